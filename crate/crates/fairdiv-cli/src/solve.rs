//! Solver dispatch: maps an `--algo` choice (or `auto`) to the matching
//! library routine and normalizes every library error onto an exit code.

use clap::ValueEnum;
use fairdiv::allocation::{Allocation, Instance};
use fairdiv::graph::ItemGraph;
use fairdiv::identical_n::{local_improvement_34pmms, LocalSearchError};
use fairdiv::oracle::{brute_leximin, brute_mnw, brute_smms, OracleError};
use fairdiv::path::{moving_knife_identical, three_agents_path_pmms, PathError};
use fairdiv::tree_smms::{pmms_smms_tree, smms_unicyclic, TreeSmmsError};
use fairdiv::two_agents::{cut_and_choose_34, TwoAgentsError};
use fairdiv::utility::UtilityFunction;

use crate::io::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgoChoice {
    /// Pick by instance shape; falls back to brute-mnw within the guard.
    Auto,
    /// Two agents, additive: cut-and-choose at 3/4 of the pairwise share.
    Two34,
    /// Three agents on a path, additive: exact pairwise shares.
    Path3,
    /// Identical additive agents on a tree: pairwise shares plus the
    /// fewest agents pinned at the collective share.
    TreeSmms,
    /// Same guarantee on a graph with exactly one cycle.
    UnicyclicSmms,
    /// Identical additive agents, any connected graph: local search to
    /// 3/4 of the pairwise share.
    IdenticalLocal,
    /// Identical additive agents on a path: moving-knife division.
    MovingKnife,
    /// Exhaustive Nash-welfare optimum (positive agents, then product).
    BruteMnw,
    /// Exhaustive leximin optimum.
    BruteLeximin,
    /// Exhaustive collective-share optimum with fewest pinned agents.
    BruteSmms,
}

impl AlgoChoice {
    pub fn label(self) -> &'static str {
        match self {
            AlgoChoice::Auto => "auto",
            AlgoChoice::Two34 => "two34",
            AlgoChoice::Path3 => "path3",
            AlgoChoice::TreeSmms => "tree-smms",
            AlgoChoice::UnicyclicSmms => "unicyclic-smms",
            AlgoChoice::IdenticalLocal => "identical-local",
            AlgoChoice::MovingKnife => "moving-knife",
            AlgoChoice::BruteMnw => "brute-mnw",
            AlgoChoice::BruteLeximin => "brute-leximin",
            AlgoChoice::BruteSmms => "brute-smms",
        }
    }
}

fn all_additive(instance: &Instance) -> bool {
    instance.agents().iter().all(|u| u.values().is_some())
}

fn identical_agents(instance: &Instance) -> bool {
    instance.agents().windows(2).all(|w| w[0] == w[1])
}

/// Vertices numbered along the path, edge `(i, i+1)` each: the labeling the
/// path algorithms assume.
fn is_canonical_path(graph: &ItemGraph) -> bool {
    let n = graph.n_vertices();
    let mut edges: Vec<(usize, usize)> = graph
        .edges()
        .iter()
        .map(|&(a, b)| (a.min(b), a.max(b)))
        .collect();
    edges.sort_unstable();
    edges == (1..n).map(|v| (v - 1, v)).collect::<Vec<_>>()
}

fn is_connected(graph: &ItemGraph) -> bool {
    graph.components().len() <= 1
}

fn resolve_auto(instance: &Instance) -> AlgoChoice {
    let graph = instance.graph();
    let additive = all_additive(instance);
    let identical = identical_agents(instance);
    if instance.n_agents() == 2 && additive {
        AlgoChoice::Two34
    } else if instance.n_agents() == 3 && additive && is_canonical_path(graph) {
        AlgoChoice::Path3
    } else if identical && additive && graph.is_tree() {
        AlgoChoice::TreeSmms
    } else if identical && additive && graph.is_unicyclic() {
        AlgoChoice::UnicyclicSmms
    } else if identical && additive && is_connected(graph) && instance.n_agents() > 0 {
        AlgoChoice::IdenticalLocal
    } else {
        AlgoChoice::BruteMnw
    }
}

/// Runs the chosen algorithm; returns the label of the algorithm that
/// actually ran (`auto` resolves first) with the allocation it produced.
pub fn solve(
    instance: &Instance,
    algo: AlgoChoice,
) -> Result<(&'static str, Allocation), CliError> {
    let algo = match algo {
        AlgoChoice::Auto => resolve_auto(instance),
        fixed => fixed,
    };
    let graph = instance.graph();
    let agents = instance.agents();
    let alloc = match algo {
        AlgoChoice::Auto => unreachable!("auto resolved above"),
        AlgoChoice::Two34 => {
            if agents.len() != 2 {
                return Err(CliError::Precondition(format!(
                    "two34 needs exactly 2 agents, got {}",
                    agents.len()
                )));
            }
            cut_and_choose_34(graph, &agents[0], &agents[1]).map_err(two_agents_error)?
        }
        AlgoChoice::Path3 => {
            if agents.len() != 3 {
                return Err(CliError::Precondition(format!(
                    "path3 needs exactly 3 agents, got {}",
                    agents.len()
                )));
            }
            require_canonical_path(graph, "path3")?;
            three_agents_path_pmms(&agents[0], &agents[1], &agents[2], graph.n_vertices())
                .map_err(path_error)?
                .allocation
        }
        AlgoChoice::TreeSmms => {
            let u = require_identical(instance, "tree-smms")?;
            pmms_smms_tree(graph, u, agents.len()).map_err(tree_error)?
        }
        AlgoChoice::UnicyclicSmms => {
            let u = require_identical(instance, "unicyclic-smms")?;
            smms_unicyclic(graph, u, agents.len()).map_err(tree_error)?
        }
        AlgoChoice::IdenticalLocal => {
            let u = require_identical(instance, "identical-local")?;
            local_improvement_34pmms(graph, u, agents.len())
                .map_err(local_error)?
                .allocation
        }
        AlgoChoice::MovingKnife => {
            let u = require_identical(instance, "moving-knife")?;
            require_canonical_path(graph, "moving-knife")?;
            moving_knife_identical(u, graph.n_vertices(), agents.len()).map_err(path_error)?
        }
        AlgoChoice::BruteMnw => first_optimum(brute_mnw(instance).map_err(oracle_error)?.optima)?,
        AlgoChoice::BruteLeximin => {
            first_optimum(brute_leximin(instance).map_err(oracle_error)?.optima)?
        }
        AlgoChoice::BruteSmms => first_optimum(brute_smms(instance).map_err(oracle_error)?.optima)?,
    };
    Ok((algo.label(), alloc))
}

fn require_identical<'a>(
    instance: &'a Instance,
    algo: &str,
) -> Result<&'a UtilityFunction, CliError> {
    if !identical_agents(instance) {
        return Err(CliError::Precondition(format!(
            "{algo} needs one utility shared by every agent"
        )));
    }
    instance
        .agents()
        .first()
        .ok_or_else(|| CliError::Precondition(format!("{algo} needs at least one agent")))
}

fn require_canonical_path(graph: &ItemGraph, algo: &str) -> Result<(), CliError> {
    if is_canonical_path(graph) {
        Ok(())
    } else {
        Err(CliError::Precondition(format!(
            "{algo} needs a path with vertices numbered along it"
        )))
    }
}

fn first_optimum(optima: Vec<Allocation>) -> Result<Allocation, CliError> {
    optima
        .into_iter()
        .next()
        .ok_or_else(|| CliError::Precondition("no connected allocation exists".into()))
}

fn oracle_error(e: OracleError) -> CliError {
    match e {
        OracleError::SizeGuard { .. } => CliError::SizeGuard(e.to_string()),
        OracleError::RequiresIdenticalUtilities => CliError::Precondition(e.to_string()),
        other => CliError::Malformed(other.to_string()),
    }
}

fn two_agents_error(e: TwoAgentsError) -> CliError {
    CliError::Precondition(e.to_string())
}

fn path_error(e: PathError) -> CliError {
    CliError::Precondition(e.to_string())
}

fn tree_error(e: TreeSmmsError) -> CliError {
    CliError::Precondition(e.to_string())
}

fn local_error(e: LocalSearchError) -> CliError {
    CliError::Precondition(e.to_string())
}
