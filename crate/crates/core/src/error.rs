use thiserror::Error;

pub type Result<T, E = ModelError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{param} = {value} is outside its domain ({requirement})")]
    Domain {
        param: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("ground reflection point is undefined when both terminals are at ground level")]
    ReflectionUndefined,

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("{got} trials requested, at least {min} are needed for a stable estimate")]
    InsufficientTrials { got: u64, min: u64 },
}

impl ModelError {
    pub(crate) fn domain(param: &'static str, value: f64, requirement: &'static str) -> Self {
        ModelError::Domain {
            param,
            value,
            requirement,
        }
    }
}

/// Fails with [`ModelError::Domain`] unless `ok` holds.
pub(crate) fn ensure(
    ok: bool,
    param: &'static str,
    value: f64,
    requirement: &'static str,
) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(ModelError::domain(param, value, requirement))
    }
}
