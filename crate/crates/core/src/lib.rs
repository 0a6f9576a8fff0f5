pub mod apolarity;
pub mod decompose;
pub mod error;
pub mod lineconfig;
pub mod linalg;
pub mod poly;
pub mod random;
pub mod ranklocus;
pub mod scalar;
pub mod selftest;

pub use error::{Error, Result};
pub use poly::{DualForm, HomogeneousForm, ParamForm, ParamScalar};
pub use scalar::{is_zero, univariate_roots, Complex, Scalar, TolerancePolicy};
