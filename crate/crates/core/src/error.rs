use thiserror::Error;

use crate::scalar::ParseNumberError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("invalid node id `{0}`: must be a non-empty token without whitespace")]
    InvalidNodeId(String),
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(String, String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("unknown edge {0} -> {1}")]
    UnknownEdge(String, String),
    #[error("negative weight for node `{0}`")]
    NegativeNodeWeight(String),
    #[error("non-positive weight for edge {0} -> {1}")]
    NonPositiveEdgeWeight(String, String),
    #[error("non-finite weight at `{0}`")]
    NonFiniteWeight(String),
    #[error("node id `{0}` appears in both graphs")]
    Collision(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("malformed line: {0}")]
    Malformed(String),
    #[error(transparent)]
    Number(#[from] ParseNumberError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CentralityError {
    #[error("graph is outside the admissible class for {measure}: {reason}")]
    ClassViolation { measure: String, reason: String },
    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("invalid decay parameter {0}")]
    InvalidAlpha(String),
    #[error("graph has {nodes} nodes; dense solver limit is {limit}")]
    TooLarge { nodes: usize, limit: usize },
    #[error("linear system is singular")]
    Singular,
    #[error("{0} is not available in exact mode")]
    Unsupported(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProcessError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("process diverged at step {step}")]
    Divergence { step: usize },
    #[error(transparent)]
    Centrality(#[from] CentralityError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Centrality(#[from] CentralityError),
    #[error("cannot combine `{0}` into `{1}`: centralities sum to zero")]
    ZeroCombinedValue(String, String),
    #[error("cannot combine a node with itself (`{0}`)")]
    SelfCombine(String),
    #[error("scaling factor must be positive, got {0}")]
    NonPositiveFactor(String),
    #[error("graph is not out-regular")]
    NotOutRegular,
    #[error("graph is not strongly connected")]
    NotStronglyConnected,
    #[error("impact multigraph is unbalanced at `{0}`")]
    Unbalanced(String),
    #[error("impact multigraph needs N = {n} cycle nodes, above the cap {cap}")]
    TooManyCycleNodes { n: String, cap: u64 },
    #[error("positive-degree part of the multigraph is disconnected")]
    Disconnected,
    #[error("walk does not match the impact multigraph: {0}")]
    WalkMismatch(String),
    #[error("group for `{0}` is empty")]
    EmptyGroup(String),
    #[error("centrality vector does not cover the graph")]
    ValueMismatch,
    #[error("invalid profit arguments: {0}")]
    InvalidProfit(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AxiomError {
    #[error("axiom precondition violated: {0}")]
    Precondition(String),
    #[error("generator: {0}")]
    Generator(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Centrality(#[from] CentralityError),
}

/// Any error raised by the library, tagged with its originating module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("graph: {0}")]
    Graph(#[from] GraphError),
    #[error("parse: {0}")]
    Parse(#[from] ParseError),
    #[error("centrality: {0}")]
    Centrality(#[from] CentralityError),
    #[error("process: {0}")]
    Process(#[from] ProcessError),
    #[error("transforms: {0}")]
    Transform(#[from] TransformError),
    #[error("axioms: {0}")]
    Axiom(#[from] AxiomError),
}
