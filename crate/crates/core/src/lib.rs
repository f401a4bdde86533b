//! Numerical workbench for infinite systems of nonlinear Caputo fractional
//! differential equations
//!
//! ```text
//! ᶜD^β m_i(ξ) = φ_i(ξ, m(ξ)),   0 < β ≤ 1,  ξ ∈ [0, 1],  i = 1, 2, …
//! m(0) = 0,   m(1) = μ ∫₀^ϱ m(s) ds,   0 < ϱ < 1
//! ```
//!
//! posed in the generalized Hahn sequence space `h_d`. The crate is `no_std`
//! (it needs `alloc`) and is organised bottom-up:
//!
//! - [`seqspace`]: weights `d_n`, finitely supported Hahn vectors, the `h_d` norm.
//! - [`fraccalc`]: gamma function, product-trapezoidal Riemann–Liouville
//!   quadrature, analytic Caputo values of monomials.
//! - [`bvp`]: the integral operator whose fixed points solve the problem, the
//!   existence/uniqueness constants and the condition checks.
//! - [`picard`]: Picard iteration on the truncated system.
//! - [`mnc`]: Hausdorff measure of noncompactness estimates and Hyers–Ulam
//!   stability constants and experiments.
//! - [`problems`]: right-hand-side families shipped with the crate.
#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
pub use error::{Error, Result};

pub mod bvp;
pub mod fraccalc;
pub mod mnc;
pub mod picard;
pub mod problems;
pub mod quad;
pub mod seqspace;

pub use bvp::{BvpSpec, ConstantsReport, GridFunction, RhsFamily};
pub use fraccalc::{FractionalOrder, Grid};
pub use picard::{SolveOptions, SolveReport};
pub use seqspace::{HahnVector, WeightSequence};
