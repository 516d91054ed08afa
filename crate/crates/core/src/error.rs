//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    /// A caller-side precondition was violated.
    #[error("precondition violated in {op}: {msg}")]
    Precondition { op: &'static str, msg: String },

    /// The requested final state is kinematically closed (the emitted
    /// photon would carry the full light-cone momentum of the electron).
    #[error("kinematically closed channel: E' - p'_z = {light_cone} <= 0")]
    ClosedChannel { light_cone: f64 },

    /// A normalization direction is requested for a zero-norm vector.
    #[error("degenerate channel in {op}: vector norm is zero")]
    DegenerateChannel { op: &'static str },
}

impl Error {
    pub fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { op, msg: msg.into() }
    }

    pub fn precondition(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Precondition { op, msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
