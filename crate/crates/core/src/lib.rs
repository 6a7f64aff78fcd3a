pub mod audit;
pub mod dirac;
pub mod error;
pub mod fw;
pub mod gamma;
pub mod moment;
pub mod ops;
pub mod scalar;
pub mod selfenergy;
pub mod vector;

pub use error::{Error, Result};
