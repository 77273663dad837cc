use thiserror::Error;

/// Errors raised by the channel models.
#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the validity range of a standardized model.
    #[error("{model}: {quantity} = {value} outside validity range [{min}, {max}]")]
    OutOfRange {
        model: &'static str,
        quantity: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no parameter table entry for {scenario} {state}")]
    MissingTableEntry { scenario: String, state: String },

    #[error("data file {name}: {message}")]
    Data { name: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors caused by model validity limits rather than malformed input.
    pub fn is_model_validity(&self) -> bool {
        matches!(self, Error::OutOfRange { .. } | Error::MissingTableEntry { .. })
    }
}

pub(crate) fn check_range(model: &'static str, quantity: &'static str, value: f64, min: f64, max: f64) -> Result<()> {
    if value.is_nan() || value < min || value > max {
        return Err(Error::OutOfRange {
            model,
            quantity,
            value,
            min,
            max,
        });
    }
    Ok(())
}
