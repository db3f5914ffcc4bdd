//! Local search reaching 3/4 of every pairwise share for any number of
//! agents who share one additive integer utility on a connected graph.
//!
//! The procedure starts from an arbitrary connected division and repeatedly
//! lets a poor bundle re-split its union with a neighbour through the
//! two-agent divider. The sum of squared bundle values drops by at least
//! two per step, so the number of steps is pseudo-polynomial in the
//! utilities.

use thiserror::Error;

use crate::allocation::{Allocation, AllocationError};
use crate::graph::ItemGraph;
use crate::two_agents::two_identical_34pmms;
use crate::utility::UtilityFunction;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LocalSearchError {
    #[error("item graph must be connected")]
    NotConnected,
    #[error("requires an additive utility function")]
    RequiresAdditiveUtilities,
    #[error("utility covers {got} items but the graph has {expected} vertices")]
    ItemCountMismatch { expected: usize, got: usize },
    #[error("need at least one agent")]
    NoAgents,
    #[error(transparent)]
    Allocation(#[from] AllocationError),
}

/// The division the local search settled on and how many re-splits it took
/// to get there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalSearchOutcome {
    pub allocation: Allocation,
    pub iterations: usize,
}

/// Divides a connected graph among `n_agents` agents sharing the additive
/// utility `u` so that every bundle reaches at least 3/4 of its pairwise
/// share against each neighbour, and an empty bundle reaches it against
/// everyone.
///
/// Starts by peeling leaves off a spanning tree: the first `n_agents - 1`
/// peeled vertices become singleton bundles and the connected remainder
/// goes to the last agent. Then, scanning pairs in ascending order and
/// restarting after every change, any bundle worth less than the worse
/// side of the two-agent division of its union with a neighbour (or with
/// anyone, if the bundle is empty) swaps both bundles for that division,
/// taking the worse side. Each swap lowers the sum of squared bundle
/// values by at least two, which bounds the number of swaps.
pub fn local_improvement_34pmms(
    graph: &ItemGraph,
    u: &UtilityFunction,
    n_agents: usize,
) -> Result<LocalSearchOutcome, LocalSearchError> {
    let values = u
        .values()
        .ok_or(LocalSearchError::RequiresAdditiveUtilities)?;
    if values.len() != graph.n_vertices() {
        return Err(LocalSearchError::ItemCountMismatch {
            expected: graph.n_vertices(),
            got: values.len(),
        });
    }
    if n_agents == 0 {
        return Err(LocalSearchError::NoAgents);
    }
    if !graph.is_connected_graph() {
        return Err(LocalSearchError::NotConnected);
    }

    let n = n_agents;
    let mut bundles = peeled_start(graph, n);
    let value_of = |b: &[usize]| -> u64 { b.iter().map(|&v| values[v]).sum() };
    let phi = |bundles: &[Vec<usize>]| -> u128 {
        bundles
            .iter()
            .map(|b| {
                let v = value_of(b) as u128;
                v * v
            })
            .sum()
    };
    let u_max = values.iter().copied().max().unwrap_or(0) as u128;
    let step_cap = n as u128 * (graph.n_vertices() as u128 * u_max).pow(2);

    let mut iterations = 0usize;
    'scan: loop {
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                // The pair counts exactly when the oracle would compare it:
                // an empty bundle faces everyone, the rest only neighbours.
                if !bundles[i].is_empty() && !graph.bundles_adjacent(&bundles[i], &bundles[j]) {
                    continue;
                }
                let mut union: Vec<usize> = bundles[i]
                    .iter()
                    .chain(bundles[j].iter())
                    .copied()
                    .collect();
                union.sort_unstable();
                let (sub, to_old) = graph.induced(&union);
                let restricted = u.restrict_additive(&to_old);
                let split = two_identical_34pmms(&sub, &restricted)
                    .expect("the union of a comparison pair is connected");
                let x: Vec<usize> = split.x.iter().map(|&v| to_old[v]).collect();
                let y: Vec<usize> = split.y.iter().map(|&v| to_old[v]).collect();
                let (worse, better) = if value_of(&x) <= value_of(&y) {
                    (x, y)
                } else {
                    (y, x)
                };
                if value_of(&bundles[i]) >= value_of(&worse) {
                    continue;
                }
                let before = phi(&bundles);
                bundles[i] = worse;
                bundles[j] = better;
                let after = phi(&bundles);
                assert!(
                    after + 2 <= before,
                    "every accepted swap lowers the squared-value sum by at least two"
                );
                iterations += 1;
                assert!(
                    (iterations as u128) <= step_cap,
                    "swap count stays within n * (|V| * u_max)^2"
                );
                continue 'scan;
            }
        }
        break;
    }

    let allocation = Allocation::new(graph.n_vertices(), bundles)?;
    Ok(LocalSearchOutcome {
        allocation,
        iterations,
    })
}

/// A connected starting division: peel leaves off a spanning tree, always
/// the smallest-numbered leaf, handing each peeled vertex to the next
/// agent; the last agent takes the connected remainder. With fewer
/// vertices than agents the tail agents start empty.
fn peeled_start(graph: &ItemGraph, n: usize) -> Vec<Vec<usize>> {
    let m = graph.n_vertices();
    let mut tree_adj = vec![Vec::new(); m];
    let mut seen = vec![false; m];
    if m > 0 {
        seen[0] = true;
        let mut stack = vec![0usize];
        while let Some(v) = stack.pop() {
            for &w in graph.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    tree_adj[v].push(w);
                    tree_adj[w].push(v);
                    stack.push(w);
                }
            }
        }
    }
    let mut degree: Vec<usize> = tree_adj.iter().map(Vec::len).collect();
    let mut removed = vec![false; m];
    let mut peel = Vec::with_capacity(m);
    for _ in 0..m {
        let leaf = (0..m)
            .find(|&v| !removed[v] && degree[v] <= 1)
            .expect("a tree always has a leaf");
        removed[leaf] = true;
        peel.push(leaf);
        for &w in &tree_adj[leaf] {
            if !removed[w] {
                degree[w] -= 1;
            }
        }
    }
    let mut bundles = vec![Vec::new(); n];
    for (slot, &v) in peel.iter().enumerate() {
        let agent = slot.min(n - 1);
        bundles[agent].push(v);
    }
    for bundle in &mut bundles {
        bundle.sort_unstable();
    }
    bundles
}
