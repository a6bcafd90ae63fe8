//! Pointwise curvature invariants of submanifolds in space forms.
//!
//! Given the second fundamental form of an `n`-dimensional submanifold at a
//! point — `p` symmetric shape operators in an orthonormal frame — and the
//! curvature constant of the surrounding real or complex space form, this
//! crate computes the scalar curvature `tau`, sectional and partial Ricci
//! curvatures, and the family of invariants
//!
//! ```text
//! delta_k = tau - min { Ric_L(X) / (k-1) : k-plane L, unit X in L }
//! ```
//!
//! for `2 <= k <= n`, and verifies the sharp upper bounds on `delta_k` in
//! terms of `n`, the curvature constant, and the squared mean curvature —
//! for submanifolds of real space forms, totally real submanifolds of
//! complex space forms, and (at order `n`, with a strictly better
//! coefficient) Lagrangian submanifolds.
//!
//! The bounds rest on maximizing quadratic forms under a trace constraint;
//! the [`qp`] module reproduces those maximizations three independent ways
//! (closed form, stationarity system, numeric search) together with their
//! negativity certificates. [`bounds::equality_case_generate`] constructs
//! the shapes attaining equality and [`bounds::equality_shape_detect`]
//! recognizes them in any frame. [`sweep`] runs seeded randomized
//! verification in bulk.
//!
//! Conventions: tangent directions are indexed `0..n` and normal directions
//! `0..p` everywhere in code; classical 1-based slot numbering survives only
//! in the labeled quadratic-program families ([`qp::QpLabel`]), where slots
//! are part of the form's definition. Sectional curvature of a coordinate
//! plane requires two distinct indices; scalar curvature sums each plane
//! once (`i < j`).

pub mod bounds;
pub mod curvature;
pub mod error;
pub mod invariants;
pub mod io;
pub mod linalg;
pub mod optimize;
pub mod qp;
pub mod sample;
pub mod shape;
pub mod sweep;

pub use bounds::{
    bound_lagrangian, bound_real, bound_totally_real, coefficient_comparison,
    equality_case_generate, equality_shape_detect, verify, verify_with, BoundKind, EqualityPattern,
    Verdict, VerifyOptions,
};
pub use curvature::{ricci_matrix, CurvatureView, JacobiForm};
pub use error::{Error, Result};
pub use invariants::{
    delta_k, delta_k_with, theta_given_x, theta_k, theta_k_bruteforce, theta_k_with, DeltaResult,
    ThetaMethod, ThetaOptions, ThetaResult, DEFAULT_BRUTEFORCE_RESOLUTION,
    MIN_BRUTEFORCE_RESOLUTION,
};
pub use io::{AmbientDoc, QpDocument, QpSolutionDoc, ShapeDocument};
pub use qp::{
    alpha_identity_residual, alpha_identity_residual_perturbed, cubic_factorization_holds,
    factorization_check, lagrangian_decomposition_gap, numeric_max_oracle, real_decomposition_gap,
    restricted_hessian_eigenvalues, solve_closed_form, solve_kkt, QpLabel, QpSolution, SolveMethod,
    TraceConstrainedQp,
};
pub use sample::{
    random_lagrangian, random_orthogonal, random_shape, random_unit_vector, sample_rng,
};
pub use shape::{
    check_lagrangian_symmetry, mean_curvature, AmbientForm, LagrangianShape, MeanCurvatureRecord,
    ShapeOperatorSet, SpaceFormKind, SymmetryReport,
};
pub use sweep::{run_sweep, KStats, SweepConfig, SweepReport, SweepViolation};
