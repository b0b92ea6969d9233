use thiserror::Error;

use crate::graph::{EdgeId, VertexId};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),

    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),

    #[error("vertex {0} already exists")]
    DuplicateVertex(VertexId),

    #[error("edge {0} already exists")]
    DuplicateEdge(EdgeId),

    #[error("loop at vertex {0}: loops are not allowed")]
    Loop(VertexId),

    #[error("edges {0} and {1} do not share exactly one endpoint")]
    NotSplittable(EdgeId, EdgeId),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("graph is not a forest: edge {0} closes a cycle")]
    NotAForest(EdgeId),

    #[error("vertex {0} is not isolated")]
    NotIsolated(VertexId),

    #[error("colouring is not proper: edge {0} is monochromatic")]
    ImproperColouring(EdgeId),

    #[error("vertex {0} has no colour")]
    Uncoloured(VertexId),

    #[error("colour {colour} out of range 1..={max}")]
    ColourOutOfRange { colour: u32, max: u32 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("search budget of {0} steps exhausted")]
    BudgetExhausted(u64),

    #[error("size limit exceeded: {0}")]
    TooLarge(String),

    #[error("merger pool exhausted while lifting through merged vertex {0}")]
    PoolExhausted(VertexId),

    #[error("audit failed during {stage}: {detail}")]
    Audit { stage: String, detail: String },

    #[error("{source_name}:{line}: {msg}")]
    Parse {
        source_name: String,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn audit(stage: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Audit {
            stage: stage.into(),
            detail: detail.into(),
        }
    }
}

/// Step counter shared by the exhaustive searches.
///
/// Every search charges one unit per node it expands; once the limit is hit
/// the search aborts with [`Error::BudgetExhausted`] instead of answering,
/// so "no" and "gave up" are never confused.
#[derive(Clone, Debug)]
pub struct Budget {
    limit: u64,
    used: u64,
}

impl Budget {
    pub const DEFAULT: u64 = 50_000_000;

    pub fn new(limit: u64) -> Self {
        Budget { limit, used: 0 }
    }

    pub fn unlimited() -> Self {
        Budget::new(u64::MAX)
    }

    #[inline]
    pub fn tick(&mut self) -> Result<()> {
        self.charge(1)
    }

    #[inline]
    pub fn charge(&mut self, units: u64) -> Result<()> {
        self.used = self.used.saturating_add(units);
        if self.used > self.limit {
            Err(Error::BudgetExhausted(self.limit))
        } else {
            Ok(())
        }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(Budget::DEFAULT)
    }
}
