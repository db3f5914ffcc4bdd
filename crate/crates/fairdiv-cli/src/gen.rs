//! Seeded instance generation. One ChaCha stream per call, consumed in a
//! fixed order (graph first, then each agent's values), so a given seed and
//! parameter set always produces the same file.

use clap::ValueEnum;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::io::{AgentFile, CliError, GraphFile, InstanceFile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Shape {
    Path,
    Tree,
    Cycle,
    Unicyclic,
    Star,
    Gnp,
}

const GNP_EDGE_PROBABILITY: f64 = 0.35;
const GNP_RETRIES: usize = 64;

pub fn generate(
    shape: Shape,
    vertices: usize,
    agents: usize,
    umax: u64,
    seed: u64,
) -> Result<InstanceFile, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = match shape {
        Shape::Path => (1..vertices).map(|v| (v - 1, v)).collect(),
        Shape::Tree => random_tree(&mut rng, vertices),
        Shape::Cycle => {
            require_cycle_room(shape, vertices)?;
            (0..vertices)
                .map(|v| order((v, (v + 1) % vertices)))
                .collect()
        }
        Shape::Unicyclic => {
            require_cycle_room(shape, vertices)?;
            let mut edges = random_tree(&mut rng, vertices);
            edges.sort_unstable();
            let absent: Vec<(usize, usize)> = pairs(vertices)
                .filter(|e| edges.binary_search(e).is_err())
                .collect();
            edges.push(absent[rng.gen_range(0..absent.len())]);
            edges
        }
        Shape::Star => (1..vertices).map(|v| (0, v)).collect(),
        Shape::Gnp => random_connected_gnp(&mut rng, vertices)?,
    };
    edges.sort_unstable();
    let agents = (0..agents)
        .map(|_| AgentFile::Additive {
            values: (0..vertices).map(|_| rng.gen_range(0..=umax)).collect(),
        })
        .collect();
    Ok(InstanceFile {
        graph: GraphFile { vertices, edges },
        agents,
    })
}

fn order((a, b): (usize, usize)) -> (usize, usize) {
    (a.min(b), a.max(b))
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |a| (a + 1..n).map(move |b| (a, b)))
}

fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> Vec<(usize, usize)> {
    (1..n).map(|v| (rng.gen_range(0..v), v)).collect()
}

fn require_cycle_room(shape: Shape, vertices: usize) -> Result<(), CliError> {
    if vertices < 3 {
        return Err(CliError::Malformed(format!(
            "{shape:?} needs at least 3 vertices, got {vertices}"
        )));
    }
    Ok(())
}

fn random_connected_gnp(rng: &mut ChaCha8Rng, n: usize) -> Result<Vec<(usize, usize)>, CliError> {
    for _ in 0..GNP_RETRIES {
        let edges: Vec<(usize, usize)> = pairs(n)
            .filter(|_| rng.gen_bool(GNP_EDGE_PROBABILITY))
            .collect();
        if connected(n, &edges) {
            return Ok(edges);
        }
    }
    Err(CliError::Malformed(format!(
        "no connected draw in {GNP_RETRIES} tries; raise the vertex count or change the seed"
    )))
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    if n == 0 {
        return true;
    }
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == n
}
