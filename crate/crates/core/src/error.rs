use thiserror::Error;

/// A tunable outside its allowed range. `field` is the config-file key.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{field}: {reason}")]
pub struct InvalidTunable {
    pub field: &'static str,
    pub reason: String,
}

impl InvalidTunable {
    pub(crate) fn new(field: &'static str, reason: impl Into<String>) -> Self {
        Self { field, reason: reason.into() }
    }
}

/// Returns an [`InvalidTunable`] for `field` unless `ok` holds.
pub(crate) fn ensure(
    ok: bool,
    field: &'static str,
    reason: impl FnOnce() -> String,
) -> Result<(), InvalidTunable> {
    if ok {
        Ok(())
    } else {
        Err(InvalidTunable::new(field, reason()))
    }
}
