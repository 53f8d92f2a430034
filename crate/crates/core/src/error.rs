use std::io;

use thiserror::Error;

fn kind(directed: bool) -> &'static str {
    if directed {
        "directed"
    } else {
        "undirected"
    }
}

/// Errors produced by graph loading, graphlet generation, census and
/// comparison operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("empty input: no edges found")]
    EmptyInput,

    #[error("graphlet size {k} out of range (supported: 2..={max} for {} graphs)", kind(*directed))]
    SizeOutOfRange { k: usize, max: usize, directed: bool },

    #[error("directedness mismatch: graph is {}, structure is {}", kind(*graph_directed), kind(*other_directed))]
    DirectednessMismatch {
        graph_directed: bool,
        other_directed: bool,
    },

    #[error("{0}")]
    InvalidInput(String),

    #[error("reciprocity is undefined for undirected graphs")]
    ReciprocityUndirected,

    #[error("reciprocity is undefined for a graph with no edges")]
    ReciprocityNoEdges,

    #[error("orbit count mismatch: {left} vs {right}")]
    OrbitCountMismatch { left: usize, right: usize },

    #[error("counter overflow while accumulating frequencies")]
    Overflow,

    #[error("network '{network}': {source}")]
    Network {
        network: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
