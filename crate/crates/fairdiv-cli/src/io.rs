//! Instance and allocation file formats, plus the exit-code error type.
//!
//! Files are UTF-8 JSON. An instance holds a graph and one utility per
//! agent; utilities are either additive value vectors or explicit set
//! tables keyed by vertex bitmask. Writers emit normalized data (sorted
//! edges, sorted bundles, table entries ascending by mask), so writing and
//! re-reading a file is the identity; `--canonical` additionally strips all
//! whitespace for bit-exact comparison.

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use fairdiv::allocation::{Allocation, Instance};
use fairdiv::graph::ItemGraph;
use fairdiv::utility::{FairnessRatio, UtilityError, UtilityFunction};
use serde::{de::DeserializeOwned, Deserialize, Serialize};

/// Failure with its process exit code: 1 malformed input, 3 size guard,
/// 4 algorithm precondition. Exit 2 is reserved for a failed verification,
/// which is not an error.
#[derive(Debug)]
pub enum CliError {
    Malformed(String),
    SizeGuard(String),
    Precondition(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Malformed(_) => ExitCode::from(1),
            CliError::SizeGuard(_) => ExitCode::from(3),
            CliError::Precondition(_) => ExitCode::from(4),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Malformed(msg) => write!(f, "malformed input: {msg}"),
            CliError::SizeGuard(msg) => write!(f, "size guard: {msg}"),
            CliError::Precondition(msg) => write!(f, "precondition: {msg}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub graph: GraphFile,
    pub agents: Vec<AgentFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum AgentFile {
    #[serde(rename = "additive")]
    Additive { values: Vec<u64> },
    /// `entries` lists only masks of nonzero value.
    #[serde(rename = "table")]
    Table {
        entries: Vec<(u64, u64)>,
        monotone: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AllocationFile {
    pub bundles: Vec<Vec<usize>>,
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))
}

/// Serializes `value` to `path`, or to standard output when `path` is
/// `None`. Pretty by default; `canonical` emits one whitespace-free line.
pub fn write_json<T: Serialize>(
    path: Option<&Path>,
    value: &T,
    canonical: bool,
) -> Result<(), CliError> {
    let mut text = if canonical {
        serde_json::to_string(value)
    } else {
        serde_json::to_string_pretty(value)
    }
    .map_err(|e| CliError::Malformed(format!("serialization failed: {e}")))?;
    text.push('\n');
    match path {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Malformed(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn parse_instance(file: &InstanceFile) -> Result<Instance, CliError> {
    let n = file.graph.vertices;
    let graph = ItemGraph::new(n, &file.graph.edges)
        .map_err(|e| CliError::Malformed(format!("graph: {e}")))?;
    let mut agents = Vec::with_capacity(file.agents.len());
    for (i, agent) in file.agents.iter().enumerate() {
        agents.push(parse_agent(agent, n).map_err(|e| match e {
            CliError::Malformed(msg) => CliError::Malformed(format!("agent {i}: {msg}")),
            other => other,
        })?);
    }
    Instance::new(graph, agents)
        .map_err(|issues| CliError::Malformed(format!("instance does not validate: {issues:?}")))
}

fn parse_agent(agent: &AgentFile, n: usize) -> Result<UtilityFunction, CliError> {
    match agent {
        AgentFile::Additive { values } => Ok(UtilityFunction::additive(values.clone())),
        AgentFile::Table { entries, monotone } => {
            if n >= 64 {
                return Err(CliError::SizeGuard(format!(
                    "table utilities support far fewer than {n} vertices"
                )));
            }
            let mut table = vec![0u64; 1usize << n];
            for &(mask, value) in entries {
                let slot = usize::try_from(mask)
                    .ok()
                    .and_then(|m| table.get_mut(m))
                    .ok_or_else(|| {
                        CliError::Malformed(format!("table mask {mask:#b} exceeds {n} vertices"))
                    })?;
                if *slot != 0 {
                    return Err(CliError::Malformed(format!(
                        "duplicate table entry for mask {mask:#b}"
                    )));
                }
                if value == 0 {
                    return Err(CliError::Malformed(format!(
                        "zero-value table entry for mask {mask:#b}; omit it instead"
                    )));
                }
                *slot = value;
            }
            UtilityFunction::tabulated(n, table, *monotone).map_err(|e| match e {
                UtilityError::TableTooLarge { .. } => CliError::SizeGuard(e.to_string()),
                other => CliError::Malformed(other.to_string()),
            })
        }
    }
}

/// Rebuilds the file form of an instance. Table agents are recovered by
/// evaluating every vertex subset, so this is only for small instances
/// (the fixture registry tops out at seven vertices).
pub fn instance_to_file(instance: &Instance) -> InstanceFile {
    let graph = instance.graph();
    let mut edges: Vec<(usize, usize)> = graph
        .edges()
        .iter()
        .map(|&(a, b)| (a.min(b), a.max(b)))
        .collect();
    edges.sort_unstable();
    let agents = instance
        .agents()
        .iter()
        .map(|u| agent_to_file(u, graph.n_vertices()))
        .collect();
    InstanceFile {
        graph: GraphFile {
            vertices: graph.n_vertices(),
            edges,
        },
        agents,
    }
}

fn agent_to_file(u: &UtilityFunction, n: usize) -> AgentFile {
    if let Some(values) = u.values() {
        return AgentFile::Additive {
            values: values.to_vec(),
        };
    }
    let value_of = |mask: u64| u.value(&mask_vertices(mask));
    let entries: Vec<(u64, u64)> = (1..1u64 << n)
        .filter_map(|mask| {
            let v = value_of(mask);
            (v != 0).then_some((mask, v))
        })
        .collect();
    let monotone = (1..1u64 << n).all(|mask| {
        (0..n).all(|i| mask >> i & 1 == 0 || value_of(mask) >= value_of(mask & !(1 << i)))
    });
    AgentFile::Table { entries, monotone }
}

fn mask_vertices(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

pub fn parse_allocation(
    file: &AllocationFile,
    instance: &Instance,
) -> Result<Allocation, CliError> {
    Allocation::new(instance.graph().n_vertices(), file.bundles.clone())
        .map_err(|e| CliError::Malformed(format!("allocation: {e}")))
}

pub fn allocation_to_file(alloc: &Allocation) -> AllocationFile {
    AllocationFile {
        bundles: alloc.bundles().to_vec(),
    }
}

/// Parses an exact fraction like `3/4` or `1`; decimals are rejected so
/// every downstream comparison stays integral.
pub fn parse_ratio(text: &str) -> Result<FairnessRatio, CliError> {
    let (num, den) = match text.split_once('/') {
        Some((p, q)) => (p, q),
        None => (text, "1"),
    };
    let num: u64 = num
        .trim()
        .parse()
        .map_err(|_| CliError::Malformed(format!("ratio {text:?} is not P/Q")))?;
    let den: u64 = den
        .trim()
        .parse()
        .map_err(|_| CliError::Malformed(format!("ratio {text:?} is not P/Q")))?;
    FairnessRatio::new(num, den).map_err(|e| CliError::Malformed(e.to_string()))
}
