use thiserror::Error;

/// Crate-wide error type.
///
/// Payload values are carried as canonical strings so the error type stays
/// independent of the numeric policy in use.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("slope {0} outside (sqrt2, 2]")]
    SlopeOutOfRange(String),
    #[error("value {value} outside {domain}")]
    Domain { value: String, domain: &'static str },
    #[error("precision exhausted in {0}: tracked error bound exceeds the working cap")]
    PrecisionExhausted(&'static str),
    #[error("ambiguous comparison in {context} at step {step}: values overlap within tracked error")]
    AmbiguousComparison { context: &'static str, step: usize },
    #[error("depth {requested} exceeds enumeration cap {cap}")]
    DepthCap { requested: usize, cap: usize },
    #[error("inadmissible kneading prefix: {0}")]
    InadmissiblePrefix(String),
    #[error("kneading prefix cannot be matched on the slope range: {0}")]
    PrefixUnresolvable(String),
    #[error("point truncation too shallow: need depth {needed}, have {have} with unspecified tail")]
    InsufficientDepth { needed: usize, have: usize },
    #[error("word has no indexable tail beyond its explicit symbols")]
    FiniteWord,
    #[error("arc rejected: contains the folding point {at}")]
    FoldingObstruction { at: String },
    #[error("no projection of depth <= {max_depth} is injective on the arc; fold at parameter {fold_at}")]
    NoInjectiveProjection { max_depth: usize, fold_at: String },
    #[error("quadratic parts live in different fields (sqrt{0} vs sqrt{1})")]
    MixedFields(u32, u32),
    #[error("points carry different slopes: {0} vs {1}")]
    MixedSlopes(String, String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
