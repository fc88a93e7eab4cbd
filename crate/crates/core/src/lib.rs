//! Value-distribution calculus for functions meromorphic on annuli
//! `A(1/τ, r) = {z : 1/τ < |z| < r}` around the punctured origin.
//!
//! The crate is organised bottom-up:
//!
//! - [`funcdsl`]: function models (factored rationals and a small expression
//!   language with exact structural derivatives).
//! - [`quad`]: circle quadrature (periodic trapezoid, tanh-sinh arcs) and the
//!   `|f| > 1 / = 1 / < 1` arc partition of a circle.
//! - [`oracle`]: exact reference computations for rational functions
//!   (polynomial roots, exact index, exact counting function).
//! - [`winding`]: the circle index `ν(t, f)` and a-point counting.
//! - [`annuluschar`]: counting and proximity functions, the boundary constant
//!   `c_f`, the characteristic `T(τ, r; f)`, the first fundamental theorem and
//!   residual checks for every identity the characteristic rests on.
//! - [`corpus`]: seeded random rationals for property checks.

pub mod annuluschar;
pub mod corpus;
pub mod error;
pub mod funcdsl;
pub mod oracle;
pub mod quad;
pub mod winding;

pub use error::{Error, Result};
pub use annuluschar::{AnnulusWindow, CharacteristicReport, Estimate, FftReport, Residual};
pub use funcdsl::{ExprNode, Factor, FunctionModel, Rational};
pub use num_complex::Complex64;
pub use quad::{ArcLabel, ArcPartition, QuadConfig, QuadratureResult};
