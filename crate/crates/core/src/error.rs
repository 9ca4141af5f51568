//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A line of an input file could not be interpreted.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Input contained self-loop edges while self-loops are disallowed.
    #[error("input contains {count} self-loop edge(s); pass allow_self_loops to accept them")]
    SelfLoopsRejected { count: usize },

    /// A caller-supplied value is outside its documented range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Parameters were built against a different graph.
    #[error("parameters are not bound to this graph: {0}")]
    Unbound(String),

    /// A dyadic coefficient was requested for a pair that is not an edge.
    #[error("no coefficient bound for edge {src} -> {dst}")]
    UnboundEdge { src: u32, dst: u32 },

    /// A parameter file did not cover every edge of the graph.
    #[error("parameter file is missing {missing} edge(s), first absent: {first}")]
    MissingEdges { missing: usize, first: String },

    /// Difference in means (or a variance) was requested with an empty group.
    #[error("degenerate assignment: the {0} group is empty")]
    DegenerateGroup(&'static str),

    /// Modularity was requested on a graph without edges.
    #[error("modularity is undefined on an edgeless graph")]
    UndefinedModularity,

    /// Overlap statistics were requested while every node is isolated.
    #[error("overlap statistics are undefined when every node is isolated")]
    UndefinedOverlap,

    /// Exhaustive enumeration would exceed the configured budget.
    #[error("enumeration needs {atoms} atoms, exceeding the budget of {budget}")]
    BudgetExceeded { atoms: u128, budget: u128 },

    /// A closed form or exact enumeration was requested for a sampling mode
    /// it does not cover (fixed-fraction cluster sampling is Monte Carlo
    /// only).
    #[error("exact results are only available for Bernoulli cluster sampling")]
    UnsupportedExactness,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
