use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ElasticaError {
    #[error("grid must be at least 2x2, got {width}x{height}")]
    GridTooSmall { width: usize, height: usize },

    #[error("expected {expected} samples for a {width}x{height} grid, got {actual}")]
    LengthMismatch {
        width: usize,
        height: usize,
        expected: usize,
        actual: usize,
    },

    #[error("field dimensions differ: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("{name} must be nonnegative, got {value}")]
    Negative { name: &'static str, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = ElasticaError> = std::result::Result<T, E>;

pub(crate) fn ensure_positive<T: crate::Real>(name: &'static str, value: T) -> Result<()> {
    // also rejects NaN
    if value > T::zero() {
        Ok(())
    } else {
        Err(ElasticaError::NonPositive {
            name,
            value: value.as_f64(),
        })
    }
}

pub(crate) fn ensure_nonnegative<T: crate::Real>(name: &'static str, value: T) -> Result<()> {
    if value >= T::zero() {
        Ok(())
    } else {
        Err(ElasticaError::Negative {
            name,
            value: value.as_f64(),
        })
    }
}
