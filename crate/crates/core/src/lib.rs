pub mod acceptance;
pub mod error;
pub mod genmaps;
pub mod matrix;
pub mod positivity;
pub mod superop;
pub mod wigner;

pub use error::{Error, Result};
