use thiserror::Error;

use crate::graph::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The input itself is malformed: self-loops, empty neighbor sets, bad parameters.
    #[error("rejected input: {0}")]
    RejectedInput(String),
    #[error("contract violation: {0}")]
    ContractViolation(String),
    #[error("internal consistency error: {0}")]
    InternalConsistency(String),
    /// No unsaturated node is reachable (cyclic orientation input, or a Hall violation).
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("acyclicity violation: {u} and {v} are already in the same tree")]
    AcyclicityViolation { u: NodeId, v: NodeId },
    #[error("arboricity promise violated: {flips} flips exceed the budget of {budget}")]
    ArboricityPromiseViolated { flips: u64, budget: u64 },
    #[error("adversary desync: {0}")]
    AdversaryDesync(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

/// Coarse classification used for exit codes and reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Rejected,
    Infeasible,
    Contract,
}

impl Error {
    pub fn at_step(self, step: usize) -> Error {
        Error::AtStep {
            step,
            source: Box::new(self),
        }
    }

    /// Innermost error, unwrapping step annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtStep { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self.root() {
            Error::RejectedInput(_) | Error::AcyclicityViolation { .. } | Error::Capacity(_) => {
                ErrorClass::Rejected
            }
            Error::Infeasible(_) | Error::ArboricityPromiseViolated { .. } => {
                ErrorClass::Infeasible
            }
            _ => ErrorClass::Contract,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_unwraps_nested_steps() {
        let e = Error::Infeasible("x".into()).at_step(3).at_step(7);
        assert_eq!(e.root(), &Error::Infeasible("x".into()));
        assert_eq!(e.class(), ErrorClass::Infeasible);
        assert_eq!(e.to_string(), "step 7: step 3: infeasible: x");
    }
}
