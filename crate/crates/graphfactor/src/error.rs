use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("graph has no edges and no nodes")]
    EmptyGraph,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error(
        "dense matrix of {rows} x {cols} would allocate {bytes} bytes, over the cap of {cap} nodes; raise --mem-cap to proceed"
    )]
    DenseCapExceeded {
        rows: usize,
        cols: usize,
        bytes: u64,
        cap: usize,
    },

    #[error("unknown recipe '{token}'; valid recipes: {valid}")]
    UnknownRecipe { token: String, valid: String },

    #[error("recipe {0} combines a transform with a base it is not defined for")]
    InvalidRecipe(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("edge ({0}, {1}) is not in the graph")]
    MissingEdge(u32, u32),

    #[error("node id {id} out of range for a graph of {n} nodes")]
    NodeOutOfRange { id: u32, n: usize },

    #[error("graph has a zero-degree node ({0}); the operation requires all degrees positive")]
    ZeroDegree(u32),

    #[error("requested {requested} negatives but only {available} non-edges are available")]
    NotEnoughNegatives { requested: usize, available: usize },

    #[error("score lists must be nonempty")]
    EmptyScores,

    #[error("denominator is zero in a percent comparison")]
    ZeroDenominator,

    #[error("matrix contains a non-finite entry at ({0}, {1})")]
    NonFinite(usize, usize),

    #[error("negative entry {value} at ({row}, {col}) in a matrix that must be nonnegative")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("walk corpus is empty")]
    EmptyCorpus,

    #[error("{0}")]
    Format(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
