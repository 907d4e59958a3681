pub mod aberth;
pub mod arith;
pub mod characters;
pub mod bigreal;
pub mod cyclo;
pub mod decomposition;
pub mod dilog;
pub mod error;
pub mod golden;
pub mod linalg;
pub mod lvalues;
mod memo;
pub mod pd_mahler;
pub mod poly;
pub mod scalar;
pub mod solver;

pub use bigreal::BigReal;
pub use cyclo::Cyclo;
pub use error::{Error, Result};
pub use scalar::{ComplexExt, Real};

pub type BigComplex = num_complex::Complex<BigReal>;
pub use characters::{conrey, DirichletCharacter};
