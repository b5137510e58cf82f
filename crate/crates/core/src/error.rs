use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value {0} cannot be placed on the circle")]
    NonFinite(f64),

    #[error("epsilon out of range: {0} (expected 0 <= epsilon < 1)")]
    EpsilonOutOfRange(f64),

    #[error("site count must be positive")]
    NoSites,

    #[error("configuration has {got} sites but parameters expect {expected}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("operation requires {0}")]
    Regime(&'static str),

    #[error("Markov boundary case: 2(1-epsilon) = 2^(2^-{m}) at epsilon = {epsilon}")]
    MarkovBoundary { epsilon: f64, m: u32 },

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("density not normalised: integral = {0}")]
    NotNormalized(f64),

    #[error("support too wide for a center of mass: length {0} > 1/2")]
    SupportTooWide(f64),

    #[error("density has no tracked support arc")]
    NoSupport,

    #[error("inverse branch search failed at x = {x}: {reason}")]
    BisectionFailed { x: f64, reason: &'static str },

    #[error("outside the range where the law holds: {0}")]
    OutsideScope(String),

    #[error("collapse preconditions unmet: {0}")]
    CollapsePreconditions(String),

    #[error("histogram is empty")]
    EmptyHistogram,

    #[error("too few samples: {got} (need at least {min})")]
    TooFewSamples { got: usize, min: usize },

    #[error("observer `{name}` failed at step {step}: {reason}")]
    Observer {
        name: &'static str,
        step: u64,
        reason: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
