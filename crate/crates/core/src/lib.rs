pub mod error;
pub mod gauge;
pub mod generator;
pub mod numkit;
pub mod polar;
pub mod powerflow;
pub mod sampling;
pub mod semigroups;
pub mod verify;

pub use error::{Error, Result};
