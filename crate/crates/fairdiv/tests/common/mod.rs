//! Seeded generators and enumeration helpers shared by the integration
//! tests. Everything is deterministic: same seed, same instances.

use fairdiv::allocation::{Allocation, Instance};
use fairdiv::graph::ItemGraph;
use fairdiv::oracle::enumerate_connected_partitions;
use fairdiv::utility::UtilityFunction;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_values(rng: &mut ChaCha8Rng, m: usize, max: u64) -> Vec<u64> {
    (0..m).map(|_| rng.gen_range(0..=max)).collect()
}

pub fn additive(values: &[u64]) -> UtilityFunction {
    UtilityFunction::additive(values.to_vec())
}

pub fn random_tree(rng: &mut ChaCha8Rng, m: usize) -> ItemGraph {
    let edges: Vec<(usize, usize)> = (1..m).map(|v| (rng.gen_range(0..v), v)).collect();
    ItemGraph::new(m, &edges).expect("hooking each vertex below itself forms a tree")
}

/// Random tree plus a sprinkle of extra edges; stays connected.
pub fn random_connected(rng: &mut ChaCha8Rng, m: usize, extra: f64) -> ItemGraph {
    let mut edges: Vec<(usize, usize)> = (1..m).map(|v| (rng.gen_range(0..v), v)).collect();
    for a in 0..m {
        for b in a + 1..m {
            if !edges.contains(&(a, b)) && rng.gen_bool(extra) {
                edges.push((a, b));
            }
        }
    }
    ItemGraph::new(m, &edges).expect("adding edges keeps the graph valid")
}

/// Cycle through a random vertex order plus random chords: biconnected.
pub fn random_biconnected(rng: &mut ChaCha8Rng, n: usize) -> ItemGraph {
    assert!(n >= 3);
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut edges: Vec<(usize, usize)> = (0..n)
        .map(|i| {
            let (a, b) = (order[i], order[(i + 1) % n]);
            (a.min(b), a.max(b))
        })
        .collect();
    for a in 0..n {
        for b in a + 1..n {
            if !edges.contains(&(a, b)) && rng.gen_bool(0.2) {
                edges.push((a, b));
            }
        }
    }
    ItemGraph::new(n, &edges).expect("a spanning cycle with chords is a valid graph")
}

/// Budget-additive or unit-demand table; both are monotone and neither is
/// additive in general.
pub fn random_monotone_table(rng: &mut ChaCha8Rng, m: usize) -> UtilityFunction {
    let weights: Vec<u64> = (0..m).map(|_| rng.gen_range(0..=6)).collect();
    let cap = rng.gen_range(1..=12);
    let unit_demand = rng.gen_bool(0.5);
    let mut table = vec![0u64; 1 << m];
    for mask in 0..(1u64 << m) {
        let mut sum = 0;
        let mut best = 0;
        for (i, &w) in weights.iter().enumerate() {
            if mask >> i & 1 == 1 {
                sum += w;
                best = best.max(w);
            }
        }
        table[mask as usize] = if unit_demand { best } else { sum.min(cap) };
    }
    UtilityFunction::tabulated(m, table, true).expect("both table shapes are monotone")
}

/// Every connected allocation of the instance's full vertex set, empty
/// bundles and all agent orders included.
pub fn all_connected_allocations(instance: &Instance) -> Vec<Allocation> {
    let graph = instance.graph();
    let verts: Vec<usize> = (0..graph.n_vertices()).collect();
    let n = instance.n_agents();
    let partitions = enumerate_connected_partitions(graph, &verts, n, true)
        .expect("test instances stay inside the enumeration guard");
    let mut out = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    for parts in &partitions {
        permute_into(&mut order, 0, &mut |perm: &[usize]| {
            let bundles: Vec<Vec<usize>> = perm.iter().map(|&slot| parts[slot].clone()).collect();
            out.push(
                Allocation::new(graph.n_vertices(), bundles)
                    .expect("enumerated parts form valid allocations"),
            );
        });
    }
    out.sort();
    out.dedup();
    out
}

fn permute_into(order: &mut Vec<usize>, from: usize, visit: &mut impl FnMut(&[usize])) {
    if from == order.len() {
        visit(order);
        return;
    }
    for i in from..order.len() {
        order.swap(from, i);
        permute_into(order, from + 1, visit);
        order.swap(from, i);
    }
}
