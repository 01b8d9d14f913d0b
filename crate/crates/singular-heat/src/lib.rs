pub mod asymfit;
pub mod coeff;
pub mod error;
pub mod geom;
pub mod heat1d;
pub mod poly;
pub mod profile;
pub mod quad;
pub mod regint;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64 as ComplexValue;
