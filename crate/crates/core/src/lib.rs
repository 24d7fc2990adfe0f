pub mod cli;
pub mod curve;
mod decimal;
pub mod endoring;
pub mod error;
pub mod field;
pub mod isomorphy;
pub mod quadorder;

pub use error::{Error, Result};
