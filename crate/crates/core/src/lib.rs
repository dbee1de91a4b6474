//! Deterministic hybrid dynamical systems driven by switching signals.
//!
//! The crate models systems that follow one of finitely many scalar vector
//! fields at a time, switching between them along the edges of a directed
//! graph at a fixed dwell cadence. It provides:
//!
//! - directed graphs with communicating-class analysis ([`graph`]),
//! - the space of switching signals with an exact weighted disagreement
//!   metric, shift maps, transitive witnesses and sensitive pairs
//!   ([`signal`]),
//! - the product flow on state x signal space with a dwell-aligned
//!   Runge-Kutta integrator ([`hybrid`]),
//! - forward and backward limit set estimation ([`limits`]),
//! - verification of ordered invariant-region families ([`morse`]),
//! - discretized chain-recurrence analysis and perturbation sweeps
//!   ([`chains`]),
//! - reproducible end-to-end scenario runs ([`scenarios`]),
//! - configuration ingestion ([`config`]) and text export ([`export`]).

pub mod chains;
pub mod config;
pub mod error;
pub mod export;
pub mod graph;
pub mod hybrid;
pub mod limits;
pub mod morse;
pub mod scenarios;
pub mod signal;

pub use chains::{
    build_chain_graph, chain_sets, hausdorff_distance, lift_projection_check, perturbation_sweep,
    ChainComponent, ChainEdge, ChainGraph, ChainParams, ChainSetResult, ChainWitness,
    LiftCheckReport, SweepLevel, SweepReport, SweepSpec, SHADOW_DWELLS,
};
pub use config::{load, FieldConfig, GraphConfig, SignalConfig, SystemConfig};
pub use error::{AnalysisError, ConfigError, GraphError, HybridError, SignalError};
pub use export::{
    chain_dot, components_csv, fmt_sig, graph_dot, round_sig, sweep_csv, svg_trajectories,
    to_pretty_json, trajectory_csv,
};
pub use graph::{
    admissible_paths, communicating_classes, invariant_class_exists, validate_n_graph, ClassKind,
    CommClass, DegreeReport, DirectedGraph,
};
pub use hybrid::{
    hybrid_flow, product_flow, rk4_step, trajectory, FieldShape, HybridSystem, ProductPoint,
    StateSpace, TrajectorySample, VectorFieldSpec,
};
pub use limits::{
    alpha_limit_estimate, omega_limit_estimate, LimitSetEstimate, DEFAULT_BURN_DWELLS,
    DEFAULT_CLUSTER_RADIUS, DEFAULT_HORIZON_DWELLS,
};
pub use morse::{
    attracting_region_check, selfloop_visit_schedule, verify_morse_decomposition,
    AttractingReport, ConditionReport, DeltaFamily, MorseCandidate, MorseReport, OrderEdge,
    Region, SamplingPlan, VisitRecord, CONDITION_NAMES,
};
pub use scenarios::{Artifact, Claim, ScenarioReport};
pub use signal::{
    distance, metric_diameter, sensitive_pair, signal_catalog, transitive_witness,
    truncation_error_bound, Extension, MetricResult, SensitivePair, SymbolicSignal,
    DEFAULT_METRIC_WINDOW,
};
