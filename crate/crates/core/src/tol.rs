//! Numerical tolerances shared by validators and constructions.

/// Hermiticity tolerance for density operators and projectors.
pub const HERMITIAN: f64 = 1e-10;
/// Smallest eigenvalue accepted as positive semidefinite.
pub const PSD_FLOOR: f64 = -1e-10;
/// Unit-trace tolerance for density operators.
pub const TRACE: f64 = 1e-10;
/// Bound on `‖P² − P‖` for projectors.
pub const IDEMPOTENT: f64 = 1e-8;
/// Distance of a projector trace from an integer.
pub const PROJECTOR_RANK: f64 = 1e-6;
/// Relative threshold for rank decisions in span closures.
pub const SPAN_RANK: f64 = 1e-8;
/// Gap below which eigenvalues are treated as one degenerate cluster.
pub const DEGENERATE_GAP: f64 = 1e-9;
/// Containment tolerance for `p ≤ q`.
pub const PROJECTOR_LEQ: f64 = 1e-8;
/// Probability vectors and stochastic rows must sum to one within this.
pub const PROBABILITY: f64 = 1e-12;
/// Default cap on Hilbert space dimension (`2¹⁴`).
pub const DIM_CAP: usize = 1 << 14;
/// Cap on the number of entries of a dense classical distribution (`2²⁰`).
pub const DENSE_CAP: usize = 1 << 20;
/// Largest condition number accepted for a quantum alphabet Gram matrix.
pub const ALPHABET_CONDITION: f64 = 1e8;
