//! Numerical toolkit for the decay theory of non-local-in-time subdiffusion
//! equations `∂t(k∗[u−u0]) − Δu = 0` on ℝ^d.
//!
//! The crate is organized around the chain
//! kernel pair `(k, l)` → relaxation function `s(t, μ)` → fundamental
//! solution `Z(t, ·)` → decay exponents of `|u(t)|_r`:
//!
//! * [`kernels`] — admissible kernel pairs of type PC and their cumulative
//!   integrals,
//! * [`special_functions`] — Γ, Mittag-Leffler `E_α(−x)`, `E₁`, Bessel `J_ν`,
//! * [`relaxation`] — Volterra solver for `s + μ(l∗s) = 1` and the structural
//!   bound checks on `s(t, μ)`,
//! * [`field`] — spectral evolution of an initial datum and the norms the
//!   decay theorems quantify,
//! * [`fundsol`] — reconstruction of `Z(t, ·)` in physical space (FFT and
//!   radial Hankel inversion) with the associated norm and mass checks,
//! * [`decay`] — log-log decay-exponent fits and the critical-dimension
//!   comparisons,
//! * [`energy`] — the fractional comparison ODE and the discrete
//!   fundamental-identity / L₂-norm-inequality property checks.
//!
//! Scalar math is generic over the floating type via [`Real`]; the spatial
//! grid and Hankel machinery is pinned to `f64` (the FFT backend and the
//! file formats are double precision).

pub mod decay;
pub mod energy;
pub mod error;
pub mod field;
pub mod fundsol;
pub mod kernels;
pub mod quad;
pub mod relaxation;
pub mod special_functions;

use std::fmt;

use num_traits::{Float, FromPrimitive, NumAssignOps};

pub use error::{Error, Result};

/// Floating scalar the core math is generic over: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + NumAssignOps + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FromPrimitive + NumAssignOps + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

/// Default scalar used by the grid/Hankel layer and the CLI.
pub type Scalar = f64;

/// Convert an `f64` constant into the working scalar type.
#[inline]
pub(crate) fn c<R: Real>(x: f64) -> R {
    R::from_f64(x).expect("constant representable in scalar type")
}
