pub mod cogmodel;
pub mod deliberation;
pub mod dynatrain;
pub mod error;
pub mod evalharness;
pub mod io;
pub mod runner;
pub mod traces;
pub mod worldsim;

pub use error::{Error, Result};
