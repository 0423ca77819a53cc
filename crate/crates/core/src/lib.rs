//! Approximation algorithms for the metric multi-depot multiple TSP.
//!
//! Every city must be covered by closed walks, each anchored at a depot, at
//! minimum total length. The crate provides exact rational weights, minimum
//! constrained spanning forests, matchings and `T`-joins, a depot rural
//! postperson solver, the forest-plus-matching and extended algorithms, an
//! exhaustive oracle, and instance generators and file formats.

pub mod forest;
pub mod graph;
pub mod instances;
pub mod matching;
pub mod postperson;
pub mod rational;
pub mod solver;

pub use graph::{build_instance, validate_tour, Edge, EdgeMultiset, Label, MetricInstance, Node, Weight};
pub use solver::{solve, Algorithm, SolveConfig, SolveReport, SolverError};
