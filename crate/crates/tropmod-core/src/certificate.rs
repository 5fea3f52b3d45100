use serde::{Deserialize, Serialize};

/// A named list of pass/fail checks with human-readable details.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub name: String,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Certificate {
    pub fn new(name: impl Into<String>) -> Self {
        Certificate { name: name.into(), checks: Vec::new() }
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) -> bool {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
        passed
    }

    /// Records `Ok(detail)` as a pass and `Err(detail)` as a failure.
    pub fn record(&mut self, name: impl Into<String>, outcome: Result<String, String>) -> bool {
        match outcome {
            Ok(d) => self.check(name, true, d),
            Err(d) => self.check(name, false, d),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Appends the checks of `other`, prefixing their names.
    pub fn absorb(&mut self, other: Certificate) {
        for c in other.checks {
            self.checks.push(Check { name: format!("{}/{}", other.name, c.name), ..c });
        }
    }
}
