//! Fair division of indivisible items arranged on a graph, where every
//! bundle must induce a connected subgraph.
//!
//! The crate provides:
//!
//! - core types for item graphs, utility functions, allocations and exact
//!   fairness thresholds ([`graph`], [`utility`], [`allocation`]);
//! - a brute-force [`oracle`] over connected partitions, used as ground truth
//!   by every algorithm's tests;
//! - graph decomposition into blocks and bipolar orderings
//!   ([`decomposition`]);
//! - solvers: a 3/4 pairwise-maximin split for two agents ([`two_agents`]),
//!   exact pairwise-maximin allocations for three agents on a path and a
//!   moving-knife procedure ([`path`]), strong maximin-share allocations on
//!   trees and unicyclic graphs ([`tree_smms`]), and local search for any
//!   number of agents with identical utilities ([`identical_n`]);
//! - a registry of separation examples with machine-checked expected facts
//!   ([`fixtures`]).
//!
//! All arithmetic on utilities and fairness thresholds is exact: utilities
//! are non-negative integers and every threshold comparison cross-multiplies
//! instead of dividing.

pub mod allocation;
pub mod decomposition;
pub mod fixtures;
pub mod graph;
pub mod identical_n;
pub mod oracle;
pub mod path;
pub mod tree_smms;
pub mod two_agents;
pub mod utility;

pub use allocation::{Allocation, AllocationError, Instance, ValidationIssue};
pub use graph::{GraphError, ItemGraph};
pub use oracle::{FairnessCheck, FairnessCriterion, OracleError, Violation};
pub use utility::{FairnessRatio, RatioError, UtilityError, UtilityFunction};
