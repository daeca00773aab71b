pub mod cavity;
pub mod cli;
pub mod error;
pub mod fluctuations;
pub mod matrix;
pub mod mirror;
pub mod motional_scattering;
pub mod numerics;
pub mod static_force;
pub mod susceptibility;
pub mod time_response;

pub use error::{Error, Result};
