use thiserror::Error;

/// Errors raised by the bound calculators, simulators and oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside its domain {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid symbol {0}: bits must be 0 or 1")]
    InvalidBit(u8),

    #[error("length mismatch: {what} has {got} entries, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },

    #[error("run {index} has length zero; plain run sequences need positive lengths")]
    ZeroRun { index: usize },

    #[error("deleted-run count {count} at gap {gap} has the wrong parity for its neighbouring bits")]
    Parity { gap: usize, count: usize },

    #[error("input length {len} exceeds the enumeration limit of {limit}")]
    TooLarge { len: usize, limit: usize },

    #[error("objective is not finite at gamma = {gamma}: {value}")]
    NonFinite { gamma: f64, value: f64 },

    #[error("series config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            expected: "[0, 1]",
        })
    }
}
