//! Batch benchmarking: solve every instance in a directory with the auto
//! dispatcher and report each agent's realized share ratio exactly.
//!
//! Instances are independent, so this loop could fan out across threads;
//! at oracle-guard sizes the sequential pass is already instant.

use std::path::Path;

use fairdiv::allocation::{Allocation, Instance};
use fairdiv::oracle::{mu_k, OracleError};
use serde::Serialize;

use crate::io::{parse_instance, read_json, CliError, InstanceFile};
use crate::solve::{solve, AlgoChoice};

#[derive(Debug, Serialize)]
pub struct Report {
    pub instances: Vec<InstanceReport>,
    /// Worst agent ratio across all instances, as an exact fraction `P/Q`.
    pub global_min_ratio: String,
}

#[derive(Debug, Serialize)]
pub struct InstanceReport {
    pub file: String,
    pub algo: String,
    pub agents: Vec<AgentReport>,
    pub min_ratio: String,
}

#[derive(Debug, Serialize)]
pub struct AgentReport {
    pub utility: u64,
    /// Largest pairwise share this agent must answer to under the
    /// allocation; 0 when no comparison applies.
    pub pmms: u64,
    pub ratio_num: u64,
    pub ratio_den: u64,
}

/// Realized guarantee `utility / pmms`, reduced, saturated at `1/1`: an
/// agent at or above every share it is compared against is fully served,
/// and a vacuous comparison cannot count against the aggregate.
fn ratio(utility: u64, pmms: u64) -> (u64, u64) {
    if pmms == 0 || utility >= pmms {
        return (1, 1);
    }
    let g = gcd(utility, pmms);
    (utility / g, pmms / g)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn ratio_le(a: (u64, u64), b: (u64, u64)) -> bool {
    u128::from(a.0) * u128::from(b.1) <= u128::from(b.0) * u128::from(a.1)
}

fn format_ratio((num, den): (u64, u64)) -> String {
    format!("{num}/{den}")
}

fn agent_rows(instance: &Instance, alloc: &Allocation) -> Result<Vec<AgentReport>, CliError> {
    let graph = instance.graph();
    let bundles = alloc.bundles();
    let mut rows = Vec::with_capacity(bundles.len());
    for (i, u) in instance.agents().iter().enumerate() {
        let own = &bundles[i];
        let mut pmms = 0;
        for (j, other) in bundles.iter().enumerate() {
            if j == i {
                continue;
            }
            let compared = own.is_empty() || graph.bundles_adjacent(own, other);
            if !compared {
                continue;
            }
            let mut union: Vec<usize> = own.iter().chain(other.iter()).copied().collect();
            union.sort_unstable();
            pmms = pmms.max(mu_k(u, graph, &union, 2).map_err(share_error)?);
        }
        let utility = u.value(own);
        let (ratio_num, ratio_den) = ratio(utility, pmms);
        rows.push(AgentReport {
            utility,
            pmms,
            ratio_num,
            ratio_den,
        });
    }
    Ok(rows)
}

fn share_error(e: OracleError) -> CliError {
    match e {
        OracleError::SizeGuard { .. } => CliError::SizeGuard(e.to_string()),
        other => CliError::Malformed(other.to_string()),
    }
}

pub fn run_bench(dir: &Path) -> Result<Report, CliError> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .map_err(|e| CliError::Malformed(format!("{}: {e}", dir.display())))?
        .filter_map(|entry| {
            let name = entry.ok()?.file_name().into_string().ok()?;
            name.ends_with(".json").then_some(name)
        })
        .collect();
    names.sort_unstable();

    let mut instances = Vec::with_capacity(names.len());
    let mut global_min = (1, 1);
    for name in names {
        let file: InstanceFile = read_json(&dir.join(&name))?;
        let instance = parse_instance(&file)?;
        let (algo, alloc) = solve(&instance, AlgoChoice::Auto)?;
        let agents = agent_rows(&instance, &alloc)?;
        let min = agents
            .iter()
            .map(|a| (a.ratio_num, a.ratio_den))
            .min_by(|&a, &b| {
                if ratio_le(a, b) {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Greater
                }
            })
            .unwrap_or((1, 1));
        if ratio_le(min, global_min) {
            global_min = min;
        }
        instances.push(InstanceReport {
            file: name,
            algo: algo.to_string(),
            agents,
            min_ratio: format_ratio(min),
        });
    }
    Ok(Report {
        instances,
        global_min_ratio: format_ratio(global_min),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratios_reduce_and_saturate() {
        assert_eq!(ratio(3, 4), (3, 4));
        assert_eq!(ratio(6, 8), (3, 4));
        assert_eq!(ratio(5, 4), (1, 1));
        assert_eq!(ratio(0, 7), (0, 1));
        assert_eq!(ratio(2, 0), (1, 1));
    }

    #[test]
    fn ratio_order_is_exact() {
        assert!(ratio_le((3, 4), (1, 1)));
        assert!(ratio_le((0, 1), (3, 4)));
        assert!(!ratio_le((1, 1), (3, 4)));
        assert!(ratio_le((2, 3), (2, 3)));
    }
}
