use thiserror::Error;

/// Errors reported by the toolkit.
///
/// Indices appearing in messages follow the in-code convention: tangent
/// directions `0..n`, normal directions `0..p`.
#[derive(Debug, Error)]
pub enum Error {
    /// The tangent dimension is too small for the requested construction.
    #[error("tangent dimension must be at least {min}, got {got}")]
    DimensionTooSmall { min: usize, got: usize },

    /// A shape needs at least one normal direction.
    #[error("at least one shape operator (normal direction) is required")]
    NoNormalDirections,

    /// A shape operator matrix has the wrong size.
    #[error("shape operator {r} is {rows}x{cols}, expected {n}x{n}")]
    OperatorSizeMismatch {
        r: usize,
        rows: usize,
        cols: usize,
        n: usize,
    },

    /// A shape operator is not symmetric.
    #[error("shape operator {r} is asymmetric at ({i},{j}): |a_ij - a_ji| = {deviation:.3e}")]
    AsymmetricOperator {
        r: usize,
        i: usize,
        j: usize,
        deviation: f64,
    },

    /// A normal index is out of range.
    #[error("normal index {r} out of range (codimension {p})")]
    NormalIndexOutOfRange { r: usize, p: usize },

    /// A matrix expected to be orthogonal is not.
    #[error("matrix is not orthogonal: max |Q^T Q - I| = {deviation:.3e} exceeds {tol:.1e}")]
    NotOrthogonal { deviation: f64, tol: f64 },

    /// A vector expected to be unit length is not.
    #[error("vector is not unit length: ||x|| - 1| = {deviation:.3e} exceeds {tol:.1e}")]
    NotUnit { deviation: f64, tol: f64 },

    /// A family of vectors expected to be orthonormal is not.
    #[error("{what} is not orthonormal: max deviation {deviation:.3e} exceeds {tol:.1e}")]
    NotOrthonormal {
        what: &'static str,
        deviation: f64,
        tol: f64,
    },

    /// A plane order `k` is outside the admissible range.
    #[error("order k = {k} out of range {min}..={max}")]
    OrderOutOfRange { k: usize, min: usize, max: usize },

    /// The ambient description is malformed.
    #[error("invalid ambient form: {0}")]
    AmbientInvalid(String),

    /// The ambient space is too small to host the shape data.
    #[error(
        "ambient real dimension {m} cannot host n = {n} tangent plus p = {p} normal directions"
    )]
    AmbientTooSmall { m: usize, n: usize, p: usize },

    /// A construction requires Lagrangian shape data and the input is not.
    #[error("not a Lagrangian shape: {0}")]
    NotLagrangian(String),

    /// The linear stationarity system of a constrained program is singular.
    #[error("degenerate program: KKT system is singular (nullspace dimension {nullspace_dim})")]
    DegenerateQp { nullspace_dim: usize },

    /// A closed-form solution was requested for a program with no known label.
    #[error("closed-form solution is only available for labeled program families")]
    UnlabeledQp,

    /// The requested bound family does not match the supplied data.
    #[error("bound kind '{kind}' inconsistent with input: {reason}")]
    InconsistentKind { kind: String, reason: String },

    /// A scalar or structural parameter is out of its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A serialized document failed to parse or validate.
    #[error("schema violation: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;
