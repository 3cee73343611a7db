//! Numerical certificates for membership in the Wiener algebra `A(R)` and `A(R^2)`.
//!
//! A function `f` belongs to the Wiener algebra when it can be written as
//! `f(y) = ∫ g(x) e^{ixy} dx` with `g ∈ L1`; the norm is `‖f‖_A = ‖g‖_1`.
//! This crate computes sufficient-condition functionals built from monotone
//! majorants of `|f|` and `|f'|`, dyadic difference sums and Vitali variation,
//! and checks every certificate against an independent spectral oracle that
//! estimates `‖g‖_1` directly on a refinement ladder.
//!
//! Module map:
//! - [`function_model`]: sampled and analytic functions, differences, splitting
//! - [`envelopes`]: tail, head and mixed 2D majorants
//! - [`functionals`]: scalar functionals and certificates
//! - [`dyadic_sums`]: Bernstein-type dyadic sums of L2 differences
//! - [`spectral_oracle`]: inverse transform, Wiener norm ladder, Riesz, Hilbert, T-transform
//! - [`testbed`]: named analytic families with expected classifications
//! - [`harness`]: run configuration, reports, sweeps

#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose so that NaN is rejected along with the bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dyadic_sums;
pub mod envelopes;
pub mod error;
pub(crate) mod float_format;
pub mod function_model;
pub mod functionals;
pub mod harness;
pub mod parallel;
pub mod quadrature;
pub mod spectral_oracle;
pub mod testbed;

pub use error::{Error, Result};
pub use num_complex::Complex64;
