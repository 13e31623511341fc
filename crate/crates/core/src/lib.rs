//! Weighted Bessel norms with error enclosures, and machine checks of the
//! hierarchies between them.
//!
//! The central quantity is
//!
//! ```text
//! Λ_{d,p}(k) = ( ∫_0^∞ |J_{d/2-1+k}(r) r^{1-d/2}|^p r^{d-1} dr )^{1/p}
//! Λ_{d,∞}(k) = sup_{r ≥ 0} |J_{d/2-1+k}(r) r^{1-d/2}|
//! ```
//!
//! Module map:
//!
//! - [`specfun`]: Bessel functions of integer and half-integer order, `ln Γ`,
//!   the Landau constant and the critical-point locator for the sup norm.
//! - [`quadrature`]: panel Gauss–Legendre integration on `[0, R]` plus
//!   analytic tail bounds, combined into [`Enclosure`]s.
//! - [`norms`]: `Λ_{d,p}(k)`, closed forms, the Gamma-function upper bound
//!   `U_{d,p}(k)`, the lower bound on `Λ_{d,p}(0)`, and the argmax over `k`.
//! - [`hierarchy`]: the sup-norm, `p = 4` and Stein–Tomas hierarchies.
//! - [`sweep`]: interpolation sweeps certifying exponent thresholds `p₀(d)`.
//! - [`local`]: cross-norm integrals and second-order deficit coefficients.
//! - [`cli`]: command-line front end, reports and the result cache.

pub mod cli;
pub mod error;
pub mod hierarchy;
pub mod local;
pub mod norms;
pub mod quadrature;
pub mod record;
pub mod specfun;
pub mod sweep;

pub use error::{Error, Result};
pub use norms::{Exponent, NormEngine, NormKey, NormValue};
pub use quadrature::{Enclosure, QuadConfig};
pub use record::{ClaimId, Status, VerificationRecord};
pub use specfun::{BesselOrder, EvalAccuracy};
