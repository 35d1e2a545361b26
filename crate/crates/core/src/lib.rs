//! Exact exterior-algebra engine for charge-`L` log-gas ensembles
//! (`beta = L^2`, `L` even).
//!
//! * [`exterior`]: sparse multivectors, wedge, star, divided powers,
//!   hyperpfaffians and the particle forms `omega(x)`.
//! * [`spine`]: momentum modes, structure coefficients and the momentum
//!   Plücker residuals.
//! * [`ensemble`]: moment sequences, the Gram form, partition functions
//!   and correlation densities.
//! * [`tau`]: tau functions, Miwa shifts, wave functions and the Hirota
//!   residue.
//! * [`oracle`]: brute-force, closed-form, quadrature and Monte-Carlo
//!   cross-checks.
//! * [`cli`]: the `hyperpf` command-line front end.

pub mod cli;
pub mod ensemble;
pub mod error;
pub mod exterior;
pub mod oracle;
pub mod scalar;
pub mod spine;
pub mod tau;

pub use error::{Error, Result};
pub use exterior::{Blade, ModelShape, Multivector};
pub use scalar::{Coeff, ExactScalar, Scalar, ScaleTag};
