use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("invalid frame: {0}")]
    InvalidFrame(String),
    #[error("block sets live on different frames")]
    MismatchedFrames,
    #[error("invalid map descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("block rule is not defined at block {0}")]
    RuleUndefined(i64),
    #[error("segments do not tile the patch region: {0}")]
    PatchTiling(String),
    #[error("declared supports overlap: {0}")]
    SupportOverlap(String),
    #[error("generator `{0}` is not bound in the action")]
    Unbound(String),
    #[error("the word is empty after reduction")]
    EmptyWord,
    #[error("frame is not coterminal in its hull")]
    NotCoterminal,
    #[error("periods are incommensurate or the map is not periodic: {0}")]
    Incommensurate(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("branches are equal")]
    EqualBranches,
    #[error("degenerate block: {0}")]
    DegenerateBlock(String),
    #[error("tuple error: {0}")]
    Tuple(String),
    #[error("point {0} lies in a reserved interval")]
    Reserved(String),
    #[error("component degree mismatch at coordinate {coord}: {left} vs {right}")]
    DegreeMismatch { coord: u32, left: usize, right: usize },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("search budget exhausted after {0} candidates (inconclusive)")]
    Exhausted(usize),
}
