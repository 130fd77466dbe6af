use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("generator index {index} out of range for rank {rank}")]
    GeneratorOutOfRange { index: usize, rank: usize },

    #[error("invalid word {input:?}: {reason}")]
    InvalidWord { input: String, reason: String },

    #[error("rank {0} is not supported (expected 1..=26)")]
    UnsupportedRank(usize),

    #[error("group mismatch: {0}")]
    SpecMismatch(String),

    #[error("flow is not balanced")]
    NotBalanced,

    #[error("flow is neither balanced nor semi-balanced")]
    Unconstrained,

    #[error("semi-balanced flow does not start at the identity")]
    NotBasedAtIdentity,

    #[error("flow support is disconnected ({components} components)")]
    DisconnectedSupport { components: usize },

    #[error("flow is zero")]
    ZeroFlow,

    #[error("base vertex is not in the support of the flow")]
    BaseOutsideSupport,

    #[error("too many terminal groups for exact Steiner connection: {groups} > {limit}")]
    TooManyTerminalGroups { groups: usize, limit: usize },

    #[error("Steiner region has {vertices} vertices, limit is {limit}")]
    RegionTooLarge { vertices: u128, limit: u128 },

    #[error("empty Steiner instance")]
    EmptyInstance,

    #[error("weight {0} is too large to materialize as a path")]
    TooLarge(String),

    #[error("memory guard tripped: {used} bytes estimated, limit {limit}")]
    MemoryGuard { used: usize, limit: usize },

    #[error("search budget exhausted: {0}")]
    BudgetExhausted(String),

    #[error("operation not supported: {0}")]
    Unsupported(String),

    #[error("depth {k} violates the tree-ball condition 2k+1 < {rho}")]
    DepthTooLarge { k: usize, rho: u64 },

    #[error("loop search failed: {0}")]
    LoopSearchFailed(String),

    #[error("length computation failed for element {element}: {source}")]
    LengthFailed {
        element: String,
        #[source]
        source: Box<Error>,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("cache error: {0}")]
    Cache(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Budget and guard trips are reported separately from internal failures.
    pub fn is_budget(&self) -> bool {
        match self {
            Error::MemoryGuard { .. }
            | Error::BudgetExhausted(_)
            | Error::TooManyTerminalGroups { .. }
            | Error::RegionTooLarge { .. }
            | Error::TooLarge(_) => true,
            Error::LengthFailed { source, .. } => source.is_budget(),
            _ => false,
        }
    }

    pub fn is_invariant(&self) -> bool {
        matches!(self, Error::Invariant(_))
    }
}
