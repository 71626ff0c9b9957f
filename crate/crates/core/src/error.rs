//! Error type shared by all modules.

use alloc::string::String;
use core::fmt;

/// Contract violations surfaced by the library.
///
/// Variants marked "bug indicator" signal an internal inconsistency that a
/// correct implementation never produces; they are reported rather than
/// panicked on so that verification drivers can record them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactError {
    /// A polynomial division left a nonzero remainder (bug indicator in the
    /// intersection-number recursion, where divisibility is guaranteed).
    NonExactDivision(String),
    /// An enumeration or series budget was exceeded.
    BoundExceeded(String),
    /// An order-by-order linear solve became inconsistent (bug indicator).
    InconsistentSystem(String),
    /// A lattice-operator commutator has support outside the allowed shift
    /// degrees (bug indicator).
    SupportViolation(String),
    /// A substitution referenced a shift index outside the assigned window.
    WindowExceeded(String),
    /// A pseudodifferential operation fell below the truncation depth.
    DepthExceeded(String),
    /// A requested value lies outside the configured truncation budgets.
    BudgetExceeded(String),
    /// Two caches disagree on the value of the same key.
    CacheConflict(String),
}

impl fmt::Display for ExactError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactError::NonExactDivision(m) => write!(f, "non-exact division: {m}"),
            ExactError::BoundExceeded(m) => write!(f, "bound exceeded: {m}"),
            ExactError::InconsistentSystem(m) => write!(f, "inconsistent system: {m}"),
            ExactError::SupportViolation(m) => write!(f, "support violation: {m}"),
            ExactError::WindowExceeded(m) => write!(f, "window exceeded: {m}"),
            ExactError::DepthExceeded(m) => write!(f, "depth exceeded: {m}"),
            ExactError::BudgetExceeded(m) => write!(f, "budget exceeded: {m}"),
            ExactError::CacheConflict(m) => write!(f, "cache conflict: {m}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ExactError {}

pub type Result<T> = core::result::Result<T, ExactError>;
