//! Exhaustive ground truth for small instances.
//!
//! Everything here enumerates connected partitions outright so the solvers in
//! the rest of the crate can be checked against answers that are correct by
//! construction. Size guards keep the enumerations tractable: pairwise
//! quantities (`mu_k`, `enumerate_connected_partitions`) refuse bundles larger
//! than [`MAX_BUNDLE_ENUMERATION_VERTICES`], and whole-allocation searches
//! refuse graphs larger than [`MAX_BRUTE_VERTICES`] or more than
//! [`MAX_BRUTE_AGENTS`] agents.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::allocation::{neighbors_under_allocation, Allocation, AllocationError, Instance};
use crate::graph::{GraphError, ItemGraph};
use crate::utility::{FairnessRatio, UtilityFunction};

/// Largest bundle `mu_k` and `enumerate_connected_partitions` accept.
pub const MAX_BUNDLE_ENUMERATION_VERTICES: usize = 18;
/// Largest graph the whole-allocation searches accept.
pub const MAX_BRUTE_VERTICES: usize = 12;
/// Largest agent count the whole-allocation searches accept.
pub const MAX_BRUTE_AGENTS: usize = 4;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{what} is limited to {limit}, got {actual}")]
    SizeGuard {
        what: &'static str,
        limit: usize,
        actual: usize,
    },
    #[error("allocation has {got} bundles, instance has {expected} agents")]
    AgentCountMismatch { expected: usize, got: usize },
    #[error("allocation covers {got} items, instance has {expected}")]
    ItemCountMismatch { expected: usize, got: usize },
    #[error("no partition into the requested number of connected parts")]
    NoConnectedPartition,
    #[error("objective needs identical utilities across agents")]
    RequiresIdenticalUtilities,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Allocation(#[from] AllocationError),
}

/// A bundle remapped to bit positions, with adjacency as bitmasks.
struct SubProblem {
    verts: Vec<usize>,
    adj: Vec<u32>,
}

impl SubProblem {
    /// `verts` must be sorted and duplicate-free.
    fn new(graph: &ItemGraph, verts: Vec<usize>) -> Self {
        debug_assert!(verts.windows(2).all(|w| w[0] < w[1]));
        let mut adj = vec![0u32; verts.len()];
        for i in 0..verts.len() {
            for j in i + 1..verts.len() {
                if graph.has_edge(verts[i], verts[j]) {
                    adj[i] |= 1 << j;
                    adj[j] |= 1 << i;
                }
            }
        }
        SubProblem { verts, adj }
    }

    fn full_mask(&self) -> u32 {
        if self.verts.is_empty() {
            0
        } else {
            (1u32 << self.verts.len()) - 1
        }
    }

    fn globals(&self, mask: u32) -> Vec<usize> {
        let mut out = Vec::new();
        let mut m = mask;
        while m != 0 {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            out.push(self.verts[b]);
        }
        out
    }

    fn evaluator<'a>(&self, u: &'a UtilityFunction) -> LocalEval<'a> {
        match u.values() {
            Some(vals) => LocalEval::Additive(self.verts.iter().map(|&v| vals[v]).collect()),
            None => LocalEval::Tabulated {
                u,
                bits: self.verts.iter().map(|&v| 1u64 << v).collect(),
            },
        }
    }

    fn masks_adjacent(&self, a: u32, b: u32) -> bool {
        let mut m = a;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            if self.adj[v] & b != 0 {
                return true;
            }
        }
        false
    }
}

/// Evaluates local bitmasks under one agent's utility.
enum LocalEval<'a> {
    Additive(Vec<u64>),
    Tabulated {
        u: &'a UtilityFunction,
        bits: Vec<u64>,
    },
}

impl LocalEval<'_> {
    fn value(&self, mask: u32) -> u64 {
        match self {
            LocalEval::Additive(w) => {
                let mut sum = 0;
                let mut m = mask;
                while m != 0 {
                    let b = m.trailing_zeros() as usize;
                    m &= m - 1;
                    sum += w[b];
                }
                sum
            }
            LocalEval::Tabulated { u, bits } => {
                let mut g = 0u64;
                let mut m = mask;
                while m != 0 {
                    let b = m.trailing_zeros() as usize;
                    m &= m - 1;
                    g |= bits[b];
                }
                u.value_mask(g)
            }
        }
    }
}

fn is_connected_mask(adj: &[u32], mask: u32) -> bool {
    if mask == 0 {
        return true;
    }
    let mut seen = 1u32 << mask.trailing_zeros();
    let mut frontier = seen;
    while frontier != 0 {
        let mut next = 0;
        let mut fr = frontier;
        while fr != 0 {
            let v = fr.trailing_zeros() as usize;
            fr &= fr - 1;
            next |= adj[v] & mask & !seen;
        }
        seen |= next;
        frontier = next;
    }
    seen == mask
}

/// Calls `f` once per connected subset of `allowed` that contains `pivot`.
///
/// Binary include/exclude on an extension frontier: each subset is emitted at
/// exactly one frontier-empty leaf.
fn connected_subsets_containing(adj: &[u32], allowed: u32, pivot: usize, f: &mut dyn FnMut(u32)) {
    fn go(adj: &[u32], allowed: u32, cur: u32, ext: u32, banned: u32, f: &mut dyn FnMut(u32)) {
        if ext == 0 {
            f(cur);
            return;
        }
        let u = ext.trailing_zeros() as usize;
        let ubit = 1u32 << u;
        go(adj, allowed, cur, ext & !ubit, banned | ubit, f);
        let grow = adj[u] & allowed & !banned & !(cur | ubit);
        go(adj, allowed, cur | ubit, (ext & !ubit) | grow, banned, f);
    }
    let pbit = 1u32 << pivot;
    go(adj, allowed, pbit, adj[pivot] & allowed & !pbit, 0, f);
}

/// Calls `f` once per unordered partition of `remaining` into `k` connected
/// parts. Nonempty parts arrive in ascending order of their minimum vertex;
/// empty parts, permitted only when `allow_empty`, are padded at the end.
fn partitions_into_parts(
    adj: &[u32],
    remaining: u32,
    k: usize,
    allow_empty: bool,
    acc: &mut Vec<u32>,
    f: &mut dyn FnMut(&[u32]),
) {
    if remaining == 0 {
        if k == 0 || allow_empty {
            let base = acc.len();
            acc.resize(base + k, 0);
            f(acc);
            acc.truncate(base);
        }
        return;
    }
    if k == 0 {
        return;
    }
    if k == 1 {
        if is_connected_mask(adj, remaining) {
            acc.push(remaining);
            f(acc);
            acc.pop();
        }
        return;
    }
    let pivot = remaining.trailing_zeros() as usize;
    let mut take = |s: u32| {
        acc.push(s);
        partitions_into_parts(adj, remaining & !s, k - 1, allow_empty, acc, f);
        acc.pop();
    };
    connected_subsets_containing(adj, remaining, pivot, &mut take);
}

fn checked_bundle(graph: &ItemGraph, bundle: &[usize]) -> Result<Vec<usize>, OracleError> {
    let n = graph.n_vertices();
    for &v in bundle {
        if v >= n {
            return Err(GraphError::VertexOutOfRange { vertex: v, n }.into());
        }
    }
    let mut verts = bundle.to_vec();
    verts.sort_unstable();
    verts.dedup();
    Ok(verts)
}

fn check_bundle_guard(len: usize, what: &'static str) -> Result<(), OracleError> {
    if len > MAX_BUNDLE_ENUMERATION_VERTICES {
        return Err(OracleError::SizeGuard {
            what,
            limit: MAX_BUNDLE_ENUMERATION_VERTICES,
            actual: len,
        });
    }
    Ok(())
}

fn check_brute_guards(graph: &ItemGraph, n_agents: usize) -> Result<(), OracleError> {
    if graph.n_vertices() > MAX_BRUTE_VERTICES {
        return Err(OracleError::SizeGuard {
            what: "whole-allocation search (vertices)",
            limit: MAX_BRUTE_VERTICES,
            actual: graph.n_vertices(),
        });
    }
    if n_agents > MAX_BRUTE_AGENTS {
        return Err(OracleError::SizeGuard {
            what: "whole-allocation search (agents)",
            limit: MAX_BRUTE_AGENTS,
            actual: n_agents,
        });
    }
    Ok(())
}

/// All partitions of `bundle` into `k` connected parts, duplicates in `bundle`
/// ignored. Parts are global sorted vertex lists; the outer list is sorted.
pub fn enumerate_connected_partitions(
    graph: &ItemGraph,
    bundle: &[usize],
    k: usize,
    allow_empty: bool,
) -> Result<Vec<Vec<Vec<usize>>>, OracleError> {
    assert!(k >= 1, "need at least one part");
    let verts = checked_bundle(graph, bundle)?;
    check_bundle_guard(verts.len(), "connected partition enumeration")?;
    let sub = SubProblem::new(graph, verts);
    let mut out = Vec::new();
    let mut acc = Vec::new();
    partitions_into_parts(
        &sub.adj,
        sub.full_mask(),
        k,
        allow_empty,
        &mut acc,
        &mut |parts| {
            out.push(parts.iter().map(|&p| sub.globals(p)).collect::<Vec<_>>());
        },
    );
    out.sort();
    Ok(out)
}

/// The maximin share over `k` connected parts of `bundle`: the best achievable
/// value of the worst part. Empty parts are allowed, and a bundle admitting no
/// partition at all (more components than parts) scores 0.
pub fn mu_k(
    u: &UtilityFunction,
    graph: &ItemGraph,
    bundle: &[usize],
    k: usize,
) -> Result<u64, OracleError> {
    assert!(k >= 1, "need at least one part");
    debug_assert_eq!(u.n_items(), graph.n_vertices());
    let verts = checked_bundle(graph, bundle)?;
    check_bundle_guard(verts.len(), "share partition enumeration")?;
    let sub = SubProblem::new(graph, verts);
    let eval = sub.evaluator(u);
    Ok(mu_over(&sub, &eval, sub.full_mask(), k))
}

fn mu_over(sub: &SubProblem, eval: &LocalEval, universe: u32, k: usize) -> u64 {
    let mut best = 0u64;
    let mut acc = Vec::new();
    partitions_into_parts(&sub.adj, universe, k, true, &mut acc, &mut |parts| {
        let worst = parts.iter().map(|&p| eval.value(p)).min().unwrap_or(0);
        if worst > best {
            best = worst;
        }
    });
    best
}

/// The canonical partition of the whole graph into `n` connected bundles that
/// agent `u` finds fair no matter which bundle it receives: every bundle that
/// is empty or adjacent to another must reach the pairwise share of their
/// union. Among all such partitions the leximin-best utility profile wins,
/// with the lexicographically smallest bundle list as tie-break.
pub fn pmms_partition_of_agent(
    u: &UtilityFunction,
    graph: &ItemGraph,
    n: usize,
) -> Result<Allocation, OracleError> {
    assert!(n >= 1, "need at least one agent");
    debug_assert_eq!(u.n_items(), graph.n_vertices());
    check_brute_guards(graph, n)?;
    let sub = SubProblem::new(graph, (0..graph.n_vertices()).collect());
    let eval = sub.evaluator(u);
    let mut mu2_cache = HashMap::new();
    let mut best: Option<(Vec<u64>, Vec<Vec<usize>>)> = None;
    let mut acc = Vec::new();
    partitions_into_parts(&sub.adj, sub.full_mask(), n, true, &mut acc, &mut |parts| {
        if !pairwise_fair_for_holder(&sub, &eval, parts, &mut mu2_cache) {
            return;
        }
        let mut utils: Vec<u64> = parts.iter().map(|&p| eval.value(p)).collect();
        utils.sort_unstable();
        let bundles: Vec<Vec<usize>> = parts.iter().map(|&p| sub.globals(p)).collect();
        let better = match &best {
            None => true,
            Some((bu, bb)) => utils > *bu || (utils == *bu && bundles < *bb),
        };
        if better {
            best = Some((utils, bundles));
        }
    });
    let (_, bundles) = best.ok_or(OracleError::NoConnectedPartition)?;
    Ok(Allocation::new(graph.n_vertices(), bundles)
        .expect("enumerated partition is a valid allocation"))
}

/// Whether every part of `parts` meets the pairwise share against each part it
/// is comparable with (holder empty, or the two parts adjacent).
fn pairwise_fair_for_holder(
    sub: &SubProblem,
    eval: &LocalEval,
    parts: &[u32],
    mu2_cache: &mut HashMap<u32, u64>,
) -> bool {
    for (t, &pt) in parts.iter().enumerate() {
        let held = eval.value(pt);
        for (s, &ps) in parts.iter().enumerate() {
            if s == t {
                continue;
            }
            if pt != 0 && !sub.masks_adjacent(pt, ps) {
                continue;
            }
            let union = pt | ps;
            let need = *mu2_cache
                .entry(union)
                .or_insert_with(|| mu_over(sub, eval, union, 2));
            if held < need {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FairnessCriterion {
    /// Each agent reaches `alpha` times the pairwise share of its union with
    /// every comparable neighbour (own bundle empty, or bundles adjacent).
    Pmms(FairnessRatio),
    /// Each agent reaches `alpha` times its maximin share of the whole graph.
    Mms(FairnessRatio),
    /// Envy-freeness up to one good: each agent reaches `alpha` times every
    /// other bundle's value after removing its single best item.
    Ef1(FairnessRatio),
    /// Envy-freeness up to any good: full value after removing the worst item.
    Efx,
}

/// One failed comparison, both sides scaled to a common integer grid
/// (attained by the ratio denominator, required by the numerator).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub agent: usize,
    /// Bundle compared against; `None` for share-based criteria.
    pub other: Option<usize>,
    pub attained_scaled: u128,
    pub required_scaled: u128,
}

impl Violation {
    pub fn deficit(&self) -> u128 {
        self.required_scaled.saturating_sub(self.attained_scaled)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FairnessCheck {
    /// Sorted by agent, then by compared bundle.
    pub violations: Vec<Violation>,
}

impl FairnessCheck {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verifies `alloc` against `criterion`, reporting every failed comparison.
/// The allocation must match the instance shape and have connected bundles.
pub fn check_fairness(
    instance: &Instance,
    alloc: &Allocation,
    criterion: FairnessCriterion,
) -> Result<FairnessCheck, OracleError> {
    let graph = instance.graph();
    if alloc.n_agents() != instance.n_agents() {
        return Err(OracleError::AgentCountMismatch {
            expected: instance.n_agents(),
            got: alloc.n_agents(),
        });
    }
    if alloc.n_vertices() != graph.n_vertices() {
        return Err(OracleError::ItemCountMismatch {
            expected: graph.n_vertices(),
            got: alloc.n_vertices(),
        });
    }
    alloc.check_connected(graph)?;
    let mut violations = Vec::new();
    match criterion {
        FairnessCriterion::Pmms(ratio) => {
            for (i, j) in neighbors_under_allocation(graph, alloc)? {
                for (a, b) in [(i, j), (j, i)] {
                    let own = alloc.bundle(a);
                    let theirs = alloc.bundle(b);
                    if !own.is_empty() && !graph.bundles_adjacent(own, theirs) {
                        continue;
                    }
                    let mut union: Vec<usize> = own.iter().chain(theirs).copied().collect();
                    union.sort_unstable();
                    let u = instance.utility(a);
                    let need = mu_k(u, graph, &union, 2)?;
                    let got = u.value(own);
                    if !ratio.satisfied_by(got, need) {
                        violations.push(Violation {
                            agent: a,
                            other: Some(b),
                            attained_scaled: ratio.scale_attained(got),
                            required_scaled: ratio.scale_required(need),
                        });
                    }
                }
            }
            violations.sort_by_key(|v| (v.agent, v.other));
        }
        FairnessCriterion::Mms(ratio) => {
            let all: Vec<usize> = (0..graph.n_vertices()).collect();
            for i in 0..instance.n_agents() {
                let u = instance.utility(i);
                let need = mu_k(u, graph, &all, instance.n_agents())?;
                let got = u.value(alloc.bundle(i));
                if !ratio.satisfied_by(got, need) {
                    violations.push(Violation {
                        agent: i,
                        other: None,
                        attained_scaled: ratio.scale_attained(got),
                        required_scaled: ratio.scale_required(need),
                    });
                }
            }
        }
        FairnessCriterion::Ef1(ratio) => {
            envy_violations(instance, alloc, ratio, false, &mut violations)
        }
        FairnessCriterion::Efx => {
            envy_violations(instance, alloc, FairnessRatio::ONE, true, &mut violations)
        }
    }
    Ok(FairnessCheck { violations })
}

/// Envy comparisons over all ordered agent pairs. `worst_removal` keeps the
/// strongest residual bundle (drop the least valuable item); otherwise the
/// weakest (drop the most valuable item).
fn envy_violations(
    instance: &Instance,
    alloc: &Allocation,
    ratio: FairnessRatio,
    worst_removal: bool,
    out: &mut Vec<Violation>,
) {
    let n = instance.n_agents();
    for i in 0..n {
        let u = instance.utility(i);
        let got = u.value(alloc.bundle(i));
        for j in 0..n {
            if i == j {
                continue;
            }
            let theirs = alloc.bundle(j);
            let reduced = theirs.iter().map(|&g| {
                let rest: Vec<usize> = theirs.iter().copied().filter(|&x| x != g).collect();
                u.value(&rest)
            });
            let need = if worst_removal {
                reduced.max()
            } else {
                reduced.min()
            }
            .unwrap_or(0);
            if !ratio.satisfied_by(got, need) {
                out.push(Violation {
                    agent: i,
                    other: Some(j),
                    attained_scaled: ratio.scale_attained(got),
                    required_scaled: ratio.scale_required(need),
                });
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BruteObjective {
    /// Most agents with positive utility, then largest product of those.
    MaxNashWelfare,
    /// Lexicographically largest ascending-sorted utility profile.
    Leximin,
    /// Identical utilities only: reach the maximin share everywhere while
    /// pinning the fewest agents at exactly the share.
    StrongMms,
    /// Every agent at or above its own maximin share.
    MmsAllocation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MnwResult {
    /// Agents with positive utility in an optimum.
    pub positive_agents: usize,
    /// Product of the positive utilities; 1 when none are positive.
    pub nash_product: u128,
    /// All optimal allocations, sorted.
    pub optima: Vec<Allocation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeximinResult {
    /// Utility profile of an optimum, sorted ascending.
    pub sorted_utilities: Vec<u64>,
    pub optima: Vec<Allocation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmmsResult {
    /// The share every bundle must reach; each optimum has at least one
    /// bundle pinned at exactly this value.
    pub mms: u64,
    pub min_losers: usize,
    pub optima: Vec<Allocation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MmsAllocations {
    /// Per-agent maximin shares.
    pub thresholds: Vec<u64>,
    pub allocations: Vec<Allocation>,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, used: &mut Vec<bool>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(n, used, cur, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(n, &mut vec![false; n], &mut Vec::new(), &mut out);
    out
}

/// Calls `f` once per ordered allocation (distinct bundle arrangement).
fn for_each_arrangement(sub: &SubProblem, n: usize, f: &mut dyn FnMut(&[u32])) {
    let perms = permutations(n);
    let mut acc = Vec::new();
    partitions_into_parts(&sub.adj, sub.full_mask(), n, true, &mut acc, &mut |parts| {
        let mut seen = BTreeSet::new();
        for perm in &perms {
            let arranged: Vec<u32> = perm.iter().map(|&i| parts[i]).collect();
            if seen.insert(arranged.clone()) {
                f(&arranged);
            }
        }
    });
}

fn make_allocation(sub: &SubProblem, parts: &[u32]) -> Allocation {
    let bundles: Vec<Vec<usize>> = parts.iter().map(|&p| sub.globals(p)).collect();
    Allocation::new(sub.verts.len(), bundles).expect("enumerated parts form a valid allocation")
}

fn full_subproblem(instance: &Instance) -> Result<SubProblem, OracleError> {
    let graph = instance.graph();
    check_brute_guards(graph, instance.n_agents())?;
    Ok(SubProblem::new(graph, (0..graph.n_vertices()).collect()))
}

/// All optimal allocations under `objective`, in lexicographic order.
pub fn brute_optimal(
    instance: &Instance,
    objective: BruteObjective,
) -> Result<Vec<Allocation>, OracleError> {
    match objective {
        BruteObjective::MaxNashWelfare => Ok(brute_mnw(instance)?.optima),
        BruteObjective::Leximin => Ok(brute_leximin(instance)?.optima),
        BruteObjective::StrongMms => Ok(brute_smms(instance)?.optima),
        BruteObjective::MmsAllocation => Ok(brute_mms_allocations(instance)?.allocations),
    }
}

pub fn brute_mnw(instance: &Instance) -> Result<MnwResult, OracleError> {
    let sub = full_subproblem(instance)?;
    let evals: Vec<LocalEval> = (0..instance.n_agents())
        .map(|i| sub.evaluator(instance.utility(i)))
        .collect();
    let mut best: Option<(usize, u128)> = None;
    let mut optima = Vec::new();
    for_each_arrangement(&sub, instance.n_agents(), &mut |parts| {
        let mut count = 0usize;
        let mut prod = 1u128;
        for (i, &p) in parts.iter().enumerate() {
            let v = evals[i].value(p);
            if v > 0 {
                count += 1;
                prod = prod
                    .checked_mul(v as u128)
                    .expect("welfare product fits in u128");
            }
        }
        let key = (count, prod);
        if best.is_none_or(|b| key > b) {
            best = Some(key);
            optima.clear();
            optima.push(make_allocation(&sub, parts));
        } else if best == Some(key) {
            optima.push(make_allocation(&sub, parts));
        }
    });
    let (positive_agents, nash_product) = best.ok_or(OracleError::NoConnectedPartition)?;
    optima.sort();
    Ok(MnwResult {
        positive_agents,
        nash_product,
        optima,
    })
}

pub fn brute_leximin(instance: &Instance) -> Result<LeximinResult, OracleError> {
    let sub = full_subproblem(instance)?;
    let evals: Vec<LocalEval> = (0..instance.n_agents())
        .map(|i| sub.evaluator(instance.utility(i)))
        .collect();
    let mut best: Option<Vec<u64>> = None;
    let mut optima = Vec::new();
    for_each_arrangement(&sub, instance.n_agents(), &mut |parts| {
        let mut utils: Vec<u64> = parts
            .iter()
            .enumerate()
            .map(|(i, &p)| evals[i].value(p))
            .collect();
        utils.sort_unstable();
        match &best {
            Some(b) if utils < *b => {}
            Some(b) if utils == *b => optima.push(make_allocation(&sub, parts)),
            _ => {
                best = Some(utils);
                optima.clear();
                optima.push(make_allocation(&sub, parts));
            }
        }
    });
    let sorted_utilities = best.ok_or(OracleError::NoConnectedPartition)?;
    optima.sort();
    Ok(LeximinResult {
        sorted_utilities,
        optima,
    })
}

pub fn brute_smms(instance: &Instance) -> Result<SmmsResult, OracleError> {
    if !instance.has_identical_utilities() {
        return Err(OracleError::RequiresIdenticalUtilities);
    }
    let sub = full_subproblem(instance)?;
    let eval = sub.evaluator(instance.utility(0));
    let mms = mu_over(&sub, &eval, sub.full_mask(), instance.n_agents());
    let mut best: Option<usize> = None;
    let mut optima = Vec::new();
    for_each_arrangement(&sub, instance.n_agents(), &mut |parts| {
        let utils: Vec<u64> = parts.iter().map(|&p| eval.value(p)).collect();
        if utils.iter().any(|&v| v < mms) {
            return;
        }
        let losers = utils.iter().filter(|&&v| v == mms).count();
        if best.is_none_or(|b| losers < b) {
            best = Some(losers);
            optima.clear();
            optima.push(make_allocation(&sub, parts));
        } else if best == Some(losers) {
            optima.push(make_allocation(&sub, parts));
        }
    });
    let min_losers = best.ok_or(OracleError::NoConnectedPartition)?;
    optima.sort();
    Ok(SmmsResult {
        mms,
        min_losers,
        optima,
    })
}

pub fn brute_mms_allocations(instance: &Instance) -> Result<MmsAllocations, OracleError> {
    let sub = full_subproblem(instance)?;
    let evals: Vec<LocalEval> = (0..instance.n_agents())
        .map(|i| sub.evaluator(instance.utility(i)))
        .collect();
    let thresholds: Vec<u64> = evals
        .iter()
        .map(|e| mu_over(&sub, e, sub.full_mask(), instance.n_agents()))
        .collect();
    let mut allocations = Vec::new();
    for_each_arrangement(&sub, instance.n_agents(), &mut |parts| {
        let ok = parts
            .iter()
            .enumerate()
            .all(|(i, &p)| evals[i].value(p) >= thresholds[i]);
        if ok {
            allocations.push(make_allocation(&sub, parts));
        }
    });
    allocations.sort();
    Ok(MmsAllocations {
        thresholds,
        allocations,
    })
}

/// Whether no other allocation weakly improves every agent and strictly
/// improves at least one.
pub fn is_pareto_optimal(instance: &Instance, alloc: &Allocation) -> Result<bool, OracleError> {
    let graph = instance.graph();
    if alloc.n_agents() != instance.n_agents() {
        return Err(OracleError::AgentCountMismatch {
            expected: instance.n_agents(),
            got: alloc.n_agents(),
        });
    }
    if alloc.n_vertices() != graph.n_vertices() {
        return Err(OracleError::ItemCountMismatch {
            expected: graph.n_vertices(),
            got: alloc.n_vertices(),
        });
    }
    alloc.check_connected(graph)?;
    let sub = full_subproblem(instance)?;
    let evals: Vec<LocalEval> = (0..instance.n_agents())
        .map(|i| sub.evaluator(instance.utility(i)))
        .collect();
    let base: Vec<u64> = (0..instance.n_agents())
        .map(|i| instance.utility(i).value(alloc.bundle(i)))
        .collect();
    let mut dominated = false;
    for_each_arrangement(&sub, instance.n_agents(), &mut |parts| {
        if dominated {
            return;
        }
        let mut all_geq = true;
        let mut any_gt = false;
        for (i, &p) in parts.iter().enumerate() {
            let v = evals[i].value(p);
            if v < base[i] {
                all_geq = false;
                break;
            }
            if v > base[i] {
                any_gt = true;
            }
        }
        if all_geq && any_gt {
            dominated = true;
        }
    });
    Ok(!dominated)
}
