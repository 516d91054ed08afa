pub mod amplitudes;
pub mod bessel;
pub mod kinematics;
pub mod modes;
pub mod error;
pub mod gain;
pub mod units;
pub mod xsec;

pub use error::{Error, Result};
