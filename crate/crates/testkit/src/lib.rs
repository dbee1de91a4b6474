//! Independent reference implementations used to cross-check the main
//! crate's algorithms in tests. Everything here favors obviousness over
//! speed: brute-force reachability, exhaustive enumeration, and a
//! step-doubling integrator with error control.

pub mod chain_oracle;
pub mod gen;
pub mod graph_oracle;
pub mod integrate;
pub mod metric_oracle;
