//! Residual reports produced by the verification drivers.

use alloc::string::String;
use alloc::vec::Vec;

/// One failed coefficient check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    /// Which coefficient (monomial / epsilon order / lambda order ...).
    pub key: String,
    /// The nonzero residual, printed exactly.
    pub residual: String,
}

/// Outcome of one identity verification: how many coefficients were
/// checked and which ones failed. Extra observations (such as separately
/// reported coefficients) go into `notes`.
#[derive(Clone, Debug, Default)]
pub struct ResidualReport {
    pub name: String,
    pub checked: usize,
    pub failures: Vec<Failure>,
    pub notes: Vec<String>,
}

impl ResidualReport {
    pub fn new(name: &str) -> Self {
        ResidualReport {
            name: String::from(name),
            checked: 0,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn record(&mut self, key: String, residual_nonzero: Option<String>) {
        self.checked += 1;
        if let Some(residual) = residual_nonzero {
            self.failures.push(Failure { key, residual });
        }
    }

    pub fn absorb(&mut self, other: ResidualReport) {
        self.checked += other.checked;
        self.failures.extend(other.failures);
        self.notes.extend(other.notes);
    }
}
