//! Build a shape by hand, compute its curvature invariants, and verify the
//! sharp upper bound — the shortest tour of the library API.
//!
//! Run with: `cargo run --example verify_bound`

use chen_core::{
    delta_k, mean_curvature, verify, AmbientForm, BoundKind, CurvatureView, ShapeOperatorSet,
};
use nalgebra::DMatrix;

fn main() -> chen_core::Result<()> {
    // A 3-dimensional shape with one normal direction: the shape operator
    // diag(0, 1, 1) inside flat ambient space. One flat direction, one
    // curved 2-sphere factor.
    let op = DMatrix::from_diagonal(&nalgebra::dvector![0.0, 1.0, 1.0]);
    let shape = ShapeOperatorSet::new(vec![op])?;
    let ambient = AmbientForm::real(0.0, 4)?;

    let view = CurvatureView::new(&shape, &ambient)?;
    println!("scalar curvature tau = {}", view.scalar_curvature());
    println!("|H|^2 = {}", mean_curvature(&shape).norm_sq);

    // The order-3 invariant: tau minus the smallest Ricci-type curvature
    // over all 3-planes (here, the whole tangent space).
    let d3 = delta_k(&shape, &ambient, 3)?;
    println!(
        "delta_3 = {} (minimal direction {:?})",
        d3.delta,
        d3.theta.argmin_x.as_slice()
    );

    // Verify delta_3 against its upper bound; this shape attains equality.
    let verdict = verify(&shape, &ambient, 3, BoundKind::Real)?;
    println!(
        "bound = {}, slack = {}, holds: {}, equality: {}",
        verdict.bound, verdict.slack, verdict.holds, verdict.equality
    );
    Ok(())
}
