//! Allocations of items to agents, and full problem instances.

use crate::graph::ItemGraph;
use crate::utility::{UtilityFunction, MAX_TABULATED_VERTICES};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AllocationError {
    #[error("vertex {vertex} out of range (graph has {n} vertices)")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("vertex {0} appears in more than one bundle")]
    Overlap(usize),
    #[error("vertex {0} is not covered by any bundle")]
    Uncovered(usize),
    #[error("allocation has {got} bundles but the instance has {expected} agents")]
    AgentCountMismatch { expected: usize, got: usize },
    #[error("bundle {bundle} is not connected")]
    DisconnectedBundle { bundle: usize },
}

/// A partition of all items into one bundle per agent. Bundles may be empty;
/// vertices within a bundle are kept sorted. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Allocation {
    n_vertices: usize,
    bundles: Vec<Vec<usize>>,
}

impl Allocation {
    /// Validates disjointness and coverage of `0..n_vertices`.
    /// Connectivity is a property of a graph, checked separately.
    pub fn new(n_vertices: usize, bundles: Vec<Vec<usize>>) -> Result<Self, AllocationError> {
        let mut owner = vec![usize::MAX; n_vertices];
        let mut bundles = bundles;
        for (i, bundle) in bundles.iter_mut().enumerate() {
            bundle.sort_unstable();
            for &v in bundle.iter() {
                if v >= n_vertices {
                    return Err(AllocationError::VertexOutOfRange {
                        vertex: v,
                        n: n_vertices,
                    });
                }
                if owner[v] != usize::MAX {
                    return Err(AllocationError::Overlap(v));
                }
                owner[v] = i;
            }
        }
        if let Some(v) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(AllocationError::Uncovered(v));
        }
        Ok(Allocation {
            n_vertices,
            bundles,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_agents(&self) -> usize {
        self.bundles.len()
    }

    pub fn bundles(&self) -> &[Vec<usize>] {
        &self.bundles
    }

    pub fn bundle(&self, agent: usize) -> &[usize] {
        &self.bundles[agent]
    }

    /// Errors unless every bundle induces a connected subgraph.
    pub fn check_connected(&self, graph: &ItemGraph) -> Result<(), AllocationError> {
        for (i, bundle) in self.bundles.iter().enumerate() {
            let ok = graph
                .is_connected(bundle)
                .map_err(|_| AllocationError::VertexOutOfRange {
                    vertex: self.n_vertices,
                    n: graph.n_vertices(),
                })?;
            if !ok {
                return Err(AllocationError::DisconnectedBundle { bundle: i });
            }
        }
        Ok(())
    }
}

/// Agent pairs whose bundles must be compared under the pairwise maximin
/// criterion: pairs joined by an edge, plus every pair in which at least one
/// bundle is empty. Pairs are returned as `(i, j)` with `i < j`, sorted.
pub fn neighbors_under_allocation(
    graph: &ItemGraph,
    alloc: &Allocation,
) -> Result<Vec<(usize, usize)>, AllocationError> {
    if alloc.n_vertices() != graph.n_vertices() {
        return Err(AllocationError::VertexOutOfRange {
            vertex: alloc.n_vertices(),
            n: graph.n_vertices(),
        });
    }
    let mut owner = vec![usize::MAX; graph.n_vertices()];
    for (i, bundle) in alloc.bundles().iter().enumerate() {
        for &v in bundle {
            owner[v] = i;
        }
    }
    let k = alloc.n_agents();
    let mut adjacent = vec![false; k * k];
    for &(a, b) in graph.edges() {
        let (i, j) = (owner[a], owner[b]);
        if i != j {
            adjacent[i * k + j] = true;
            adjacent[j * k + i] = true;
        }
    }
    let mut pairs = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let empty = alloc.bundle(i).is_empty() || alloc.bundle(j).is_empty();
            if adjacent[i * k + j] || empty {
                pairs.push((i, j));
            }
        }
    }
    Ok(pairs)
}

/// A violated instance invariant, with enough context to locate it.
#[derive(Debug, PartialEq, Eq)]
pub enum ValidationIssue {
    GraphNotConnected,
    UtilityItemCountMismatch {
        agent: usize,
        expected: usize,
        got: usize,
    },
    TabulatedTooLarge {
        agent: usize,
        vertices: usize,
    },
}

impl std::fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ValidationIssue::GraphNotConnected => write!(f, "item graph is not connected"),
            ValidationIssue::UtilityItemCountMismatch { agent, expected, got } => write!(
                f,
                "agent {agent}: utility covers {got} items but the graph has {expected}"
            ),
            ValidationIssue::TabulatedTooLarge { agent, vertices } => write!(
                f,
                "agent {agent}: tabulated utility over {vertices} vertices exceeds the {MAX_TABULATED_VERTICES}-vertex cap"
            ),
        }
    }
}

/// A connected item graph together with one utility function per agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    graph: ItemGraph,
    agents: Vec<UtilityFunction>,
}

impl Instance {
    /// Validates the instance, reporting every violated invariant.
    pub fn new(
        graph: ItemGraph,
        agents: Vec<UtilityFunction>,
    ) -> Result<Self, Vec<ValidationIssue>> {
        let mut issues = Vec::new();
        if !graph.is_connected_graph() {
            issues.push(ValidationIssue::GraphNotConnected);
        }
        for (i, u) in agents.iter().enumerate() {
            if u.n_items() != graph.n_vertices() {
                issues.push(ValidationIssue::UtilityItemCountMismatch {
                    agent: i,
                    expected: graph.n_vertices(),
                    got: u.n_items(),
                });
            }
            if !u.is_additive() && graph.n_vertices() > MAX_TABULATED_VERTICES {
                issues.push(ValidationIssue::TabulatedTooLarge {
                    agent: i,
                    vertices: graph.n_vertices(),
                });
            }
        }
        if issues.is_empty() {
            Ok(Instance { graph, agents })
        } else {
            Err(issues)
        }
    }

    pub fn graph(&self) -> &ItemGraph {
        &self.graph
    }

    pub fn agents(&self) -> &[UtilityFunction] {
        &self.agents
    }

    pub fn n_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn utility(&self, agent: usize) -> &UtilityFunction {
        &self.agents[agent]
    }

    /// All agents share one utility function.
    pub fn has_identical_utilities(&self) -> bool {
        self.agents.windows(2).all(|w| w[0] == w[1])
    }
}
