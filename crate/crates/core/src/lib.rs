pub mod cli;
pub mod curve;
pub mod error;
pub mod field;
pub mod intersect;
pub mod maps;
pub mod moduli;
pub mod scalar;
pub mod series;
pub mod toprec;

pub use error::{Error, Result};
