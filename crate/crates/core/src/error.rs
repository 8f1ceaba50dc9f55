use thiserror::Error;

/// Crate-wide error type. Variants are grouped loosely by the layer that
/// raises them; everything is cheap to construct and carries enough context
/// to be actionable without a debugger.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    // -- graph construction and parsing --
    #[error("vertex {0} out of range (n = {1})")]
    VertexOutOfRange(usize, usize),
    #[error("self-loop at vertex {0} rejected")]
    SelfLoop(usize),
    #[error("duplicate arc ({0}, {1}) rejected")]
    DuplicateArc(usize, usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    // -- walks --
    #[error("({0}, {1}) is not an arc of the host graph")]
    NotAnArc(usize, usize),
    #[error("walk sequence is empty")]
    EmptyWalk,
    #[error("closed walk must start and end at the same vertex")]
    NotClosed,
    #[error("open walk expected: start equals end")]
    NotOpenWalk,
    #[error("path has a repeated vertex: {0}")]
    RepeatedVertex(usize),
    #[error("strong connectivity of the empty set is undefined")]
    EmptySet,

    // -- linkages and path systems --
    #[error("endpoint sets differ in size: |A| = {0}, |B| = {1}")]
    SizeMismatch(usize, usize),
    #[error("set of size {0} exceeds the exhaustive well-linkedness bound {1}")]
    TooLargeForExhaustive(usize, usize),
    #[error("no linkage of full size between B_{0} and A_{1}")]
    NoLinkage(usize, usize),

    // -- threading --
    #[error("linkage size {size} below the refine threshold x*d + (d-1) = {need}")]
    SizeTooSmall { size: usize, need: usize },

    // -- combinatorics --
    #[error("randomized search exhausted its budget of {0} rounds")]
    BudgetExhausted(usize),
    #[error("input hypothesis unmet: {0}")]
    HypothesisUnmet(String),
    #[error("construction gap: {0}")]
    ConstructionGap(String),

    // -- bowtie / scenarios --
    #[error("intersection graph is {0}-degenerate; bowtie needs a denser core")]
    TooSparse(usize),
    #[error("precondition unmet: {0}")]
    PreconditionUnmet(String),
    #[error("no disjoint path selection exists across the given linkages")]
    TransversalAbsent,
    #[error("clique minor too small to seed a bramble (q = {0})")]
    DegenerateOutcome(usize),

    // -- orchestrator --
    #[error("k = {0} is below the minimum supported value 2")]
    KTooSmall(usize),
    #[error("pair classification corrupt: {0}")]
    ClassificationCorrupt(String),

    // -- catch-all for internal postcondition checks --
    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("i/o: {0}")]
    Io(String),
    #[error("json: {0}")]
    Json(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
