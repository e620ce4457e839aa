use serde::Serialize;

/// Outcome of one law or verifier battery. `instances` counts the cases the
/// exhaustive check actually examined, so reports distinguish a vacuous pass
/// from a real one.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub instances: usize,
    pub failure: Option<String>,
}

impl CheckReport {
    pub fn pass(name: impl Into<String>, instances: usize) -> Self {
        CheckReport {
            name: name.into(),
            instances,
            failure: None,
        }
    }

    pub fn fail(name: impl Into<String>, instances: usize, witness: impl Into<String>) -> Self {
        CheckReport {
            name: name.into(),
            instances,
            failure: Some(witness.into()),
        }
    }

    pub fn ok(&self) -> bool {
        self.failure.is_none()
    }
}
