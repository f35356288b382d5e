//! Numerical core for universal compression of stationary ergodic quantum
//! sources.
//!
//! The crate works with finite-box marginals `ρ_n` of translation-invariant
//! sources on a one-dimensional lattice of `d`-level sites. It provides:
//!
//! * a dense complex matrix substrate with a deterministic Hermitian
//!   eigensolver, tensor products, partial traces and a projector lattice
//!   ([`linalg`]);
//! * finite-alphabet stationary processes with exact marginals and
//!   `l`-block ergodic decompositions ([`process`]);
//! * fixed-rate block codes ordered by empirical entropy ([`code`]);
//! * quantum sources, their consistency/stationarity/ergodicity diagnostics
//!   and the abelian restriction bridge ([`source`]);
//! * Kraus channels and their tensor powers ([`channel`]);
//! * entropies and fidelities ([`info`]);
//! * construction of source-independent projectors `q_r^(m)` ([`universal`])
//!   and the two compression schemes built on them ([`scheme`]).
//!
//! The crate is `no_std` with `alloc` when the default `std` feature is off.

#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![forbid(unsafe_code)]
// `!(x >= 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod channel;
pub mod code;
mod error;
mod fmath;
pub mod info;
pub mod linalg;
pub mod process;
pub mod scheme;
pub mod source;
pub mod tol;
pub mod universal;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityOperator, Projector, C64};
