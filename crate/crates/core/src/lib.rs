pub mod error;
pub mod field;
pub mod matrix;
pub mod chain;
pub mod cfcat;
pub mod random;
pub mod session;
pub mod cube;
pub mod json;
pub mod functor;
pub mod crosseff;
pub mod tower;
pub mod suites;

pub use error::{Error, Result};
pub use field::{Field, PrimeField, Rationals};
pub use matrix::Matrix;
pub use chain::{ChainComplex, ChainMap, Conn, Graded};
