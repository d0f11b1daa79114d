//! Exact symbolic toolkit for Courant algebroids and generalized almost
//! complex structures on polynomial charts.

pub mod courant;
pub mod gacs;
pub mod instances;
pub mod error;
pub mod field;
pub mod matrix;
pub mod poly;
pub mod quadlie;
pub mod random;
pub mod symcalc;
pub mod transport;

pub use error::{Error, Result};
pub use field::{Field, Ring, Q, QI};
pub use matrix::Matrix;
pub use poly::{Monomial, Poly};

/// Polynomial functions on a chart with rational coefficients.
pub type Scalar = Poly<Q>;
/// Polynomial functions with Gaussian rational coefficients.
pub type CScalar = Poly<QI>;
pub type QMatrix = Matrix<Q>;
pub type CMatrix = Matrix<QI>;
pub type PolyMatrix = Matrix<Scalar>;
