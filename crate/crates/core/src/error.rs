//! Error types, one enum per module family.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    EmptyVertexSet,
    #[error("vertex {0} out of range for graph with {1} vertices")]
    VertexOutOfRange(usize, usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("not an N-graph: vertex {vertex} has out-degree {out_degree} and in-degree {in_degree}")]
    NotAnNGraph {
        vertex: usize,
        out_degree: usize,
        in_degree: usize,
    },
    #[error("no invariant communicating class found (input was not an N-graph?)")]
    NoInvariantClass,
}

#[derive(Debug, Error, PartialEq)]
pub enum SignalError {
    #[error("signal word must be nonempty")]
    EmptyWord,
    #[error("dwell length must be positive and finite, got {0}")]
    BadDwell(f64),
    #[error("offset tau must lie in [0, h), got tau={tau} with h={h}")]
    TauOutOfRange { tau: f64, h: f64 },
    #[error("word step ({0}, {1}) is not an edge of the graph")]
    InadmissibleStep(usize, usize),
    #[error("periodic wrap ({0}, {1}) is not an edge of the graph")]
    InadmissibleWrap(usize, usize),
    #[error("constant-ends extension needs a self-loop at vertex {0}")]
    MissingSelfLoop(usize),
    #[error("word entry {0} out of range for graph with {1} vertices")]
    VertexOutOfRange(usize, usize),
    #[error("signals have different dwell lengths: {0} vs {1}")]
    MismatchedDwell(f64, f64),
    #[error("metric window must be at least 1")]
    WindowTooSmall,
    #[error("empty vertex class")]
    EmptyClass,
    #[error("vertices {0:?} are not mutually connected inside the class")]
    ClassNotConnected(Vec<usize>),
    #[error("sensitivity construction needs a single communicating class covering the graph")]
    NotSingleClass,
    #[error("sensitivity construction needs a vertex with out-degree at least 2")]
    NoBranchVertex,
    #[error("sensitivity threshold must be positive, got {0}")]
    BadThreshold(f64),
}

#[derive(Debug, Error, PartialEq)]
pub enum HybridError {
    #[error("system has {fields} vector fields but the graph has {vertices} vertices")]
    FieldCountMismatch { fields: usize, vertices: usize },
    #[error("dwell length must be positive and finite, got {0}")]
    BadDwell(f64),
    #[error("state space is degenerate: {0}")]
    BadSpace(String),
    #[error("field {index} points outward at boundary {boundary}: value {value}")]
    OutwardBoundaryField {
        index: usize,
        boundary: f64,
        value: f64,
    },
    #[error("signal dwell {signal} does not match system dwell {system}")]
    DwellMismatch { signal: f64, system: f64 },
    #[error("signal is not admissible for the system graph: {0}")]
    InadmissibleSignal(#[from] SignalError),
    #[error("time step must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("segment duration must be nonnegative and finite, got {0}")]
    BadDuration(f64),
    #[error("initial point {0} lies outside the state space")]
    PointOutsideSpace(f64),
    #[error("sample spacing must be positive and finite, got {0}")]
    BadSampleSpacing(f64),
}

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error(transparent)]
    Hybrid(#[from] HybridError),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("burn-in time {burn} must be nonnegative and smaller than the horizon {horizon}")]
    BadWindow { burn: f64, horizon: f64 },
    #[error("cluster radius must be positive, got {0}")]
    BadClusterRadius(f64),
    #[error("grid needs at least 2 nodes, got {0}")]
    DegenerateGrid(usize),
    #[error("jump size eps must be positive, got {0}")]
    BadEps(f64),
    #[error("chain times need 0 < t_min <= t_max, got t_min={t_min} t_max={t_max}")]
    BadChainTimes { t_min: f64, t_max: f64 },
    #[error("word length must be at least 1")]
    BadWordLength,
    #[error("no admissible signals of the requested shape exist for this graph")]
    EmptySignalCatalog,
    #[error("region is empty or malformed: {0}")]
    BadRegion(String),
    #[error("region A must be contained in region N")]
    RegionNotContained,
    #[error("candidate {index}: {reason}")]
    BadCandidate { index: usize, reason: String },
    #[error("{0}")]
    Precondition(String),
    #[error("dwell loop at vertex {vertex} did not reach its target within {max_steps} steps")]
    DwellDidNotConverge { vertex: usize, max_steps: usize },
    #[error("perturbation ladder must contain rho = 0")]
    MissingZeroRho,
    #[error("state became non-finite at t = {t}; the flow escapes every bounded set")]
    DivergedTrajectory { t: f64 },
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Hybrid(#[from] HybridError),
}
