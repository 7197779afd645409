pub mod cli;
pub mod error;
pub mod eval;
pub mod io;
pub mod measures;
pub mod ot;
pub mod synthetic;

pub use error::{Error, Result};
