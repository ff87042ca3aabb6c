use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("{name} = {value} outside {range}")]
    Domain {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("index {index} out of range 1..={max}")]
    OutOfRange { index: usize, max: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_unit<T: crate::Scalar>(name: &'static str, value: T) -> Result<()> {
    if value >= T::zero() && value <= T::one() {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value: value.to_f64().unwrap_or(f64::NAN),
            range: "[0, 1]",
        })
    }
}
