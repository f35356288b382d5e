//! Dense complex linear algebra.

mod density;
mod eig;
mod matrix;
mod projector;
pub mod random;
mod real;

pub use density::{report as density_report, DensityOperator, DensityReport};
pub use eig::{hermitian_eig, hermitian_eigenvalues, sqrtm_psd, HermitianEigen};
pub use matrix::{
    inner, norm, partial_trace, pow_dim, tensor_power, tensor_product, tensor_product_capped,
    ComplexMatrix, C64,
};
pub(crate) use matrix::{
    apply_local_map, apply_local_vector, num_sites,
    ONE, ZERO,
};
pub use projector::{leq_deviation, projector_join, projector_leq, Projector, SpanBuilder};
pub use real::solve_real;
