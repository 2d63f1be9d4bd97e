use thiserror::Error;

/// Every fault a name-level computation can raise.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SondaError {
    #[error("malformed dyadic string {0:?}")]
    MalformedDyadic(String),
    #[error("malformed tuple string {0:?}")]
    MalformedTuple(String),
    #[error("malformed name answer: {0}")]
    MalformedName(String),
    #[error("regularity violated: |u|={short_len} gives {short_answer} symbols but |v|={long_len} gives {long_answer}")]
    RegularityFault {
        short_len: usize,
        short_answer: usize,
        long_len: usize,
        long_answer: usize,
    },
    #[error("padding target too short: answer has {answer} symbols, dominating size is {bound}")]
    DominationFault { answer: usize, bound: usize },
    #[error("cost {cost} exceeds declared bound {bound}")]
    BoundExceeded { cost: u64, bound: u64 },
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("set must contain at least one point")]
    EmptySet,
    #[error("Euler iterate {value} left [-1-2^-{prec}, 1+2^-{prec}] at step {step}")]
    TrajectoryEscape { step: u64, value: String, prec: u32 },
    #[error("{what} = {value} exceeds the configured cap {cap}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },
    #[error("input outside the domain: {0}")]
    OutOfDomain(String),
    #[error("function is not length preserving on {0:?}")]
    NotLengthPreserving(String),
}

impl SondaError {
    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        SondaError::Parse {
            pos,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, SondaError>;
