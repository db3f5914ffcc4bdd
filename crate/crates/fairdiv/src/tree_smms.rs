//! Maximin division of trees with as few share-pinned agents as possible.
//!
//! For identical additive utilities the collective maximin share is the same
//! for everyone, so every optimal division leaves at least one agent at
//! exactly that bar. [`smms_tree`] finds a division minimizing how many, via
//! a bottom-up table over rooted subtrees. [`pmms_smms_tree`] then reworks
//! the parts that exceed the bar until the division also meets every
//! pairwise share, and [`smms_unicyclic`] extends the tree solver to graphs
//! with a single cycle by deleting each cycle edge in turn.

use thiserror::Error;

use crate::allocation::{Allocation, AllocationError};
use crate::graph::ItemGraph;
use crate::utility::UtilityFunction;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeSmmsError {
    #[error("item graph must be a tree")]
    NotATree,
    #[error("item graph must be connected with exactly one cycle")]
    NotExactlyOneCycle,
    #[error("utilities must be additive")]
    RequiresAdditiveUtilities,
    #[error("utility covers {got} items but the graph has {expected}")]
    ItemCountMismatch { expected: usize, got: usize },
    #[error("need at least one agent")]
    NoAgents,
    #[error("the collective share is zero; the subtree table needs a positive bar")]
    ZeroShare,
    #[error(transparent)]
    Allocation(#[from] AllocationError),
}

/// A division of the whole tree, the bar every bundle reaches, and how many
/// bundles sit exactly on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmmsOutcome {
    pub allocation: Allocation,
    /// Agents whose bundle is worth exactly [`share`](Self::share). No
    /// division meeting the bar everywhere has fewer.
    pub losers: usize,
    /// The collective maximin share of the tree.
    pub share: u64,
}

/// One row of the bottom-up sweep: a partition of a rooted subtree into
/// `closed` bundles that each reach the share bar plus one open bundle that
/// is still growing toward the parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubtreeEntry {
    /// Bundles already meeting the bar, each a sorted vertex list.
    pub satisfied: Vec<Vec<usize>>,
    /// The open bundle: empty, or containing the subtree root so it can
    /// absorb vertices above. Its value is the maximum over all partitions
    /// that close the same number of bundles within the same pin budget.
    pub open: Vec<usize>,
    pub open_value: u64,
}

/// Per-subtree divisions indexed by how many bundles are closed and how many
/// of those may sit exactly on the share bar. Rows are filled leaves-first;
/// a missing row means no such partition exists.
#[derive(Debug, Clone)]
pub struct SubtreeTable {
    n_agents: usize,
    share: u64,
    entries: Vec<Option<SubtreeEntry>>,
}

impl SubtreeTable {
    /// The row for `vertex` closing `closed` bundles with at most
    /// `pin_budget` of them worth exactly the share.
    pub fn get(&self, vertex: usize, closed: usize, pin_budget: usize) -> Option<&SubtreeEntry> {
        let width = self.n_agents + 1;
        if closed >= width || pin_budget >= width {
            return None;
        }
        self.entries[(vertex * width + closed) * width + pin_budget].as_ref()
    }

    pub fn share(&self) -> u64 {
        self.share
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }
}

/// Children lists and a leaves-first vertex order for the tree rooted at
/// vertex 0.
struct Rooted {
    children: Vec<Vec<usize>>,
    order: Vec<usize>,
}

fn rooted_at_zero(tree: &ItemGraph) -> Rooted {
    let m = tree.n_vertices();
    let mut children = vec![Vec::new(); m];
    let mut order = Vec::with_capacity(m);
    let mut stack = vec![(0usize, usize::MAX, false)];
    while let Some((v, parent, expanded)) = stack.pop() {
        if expanded {
            order.push(v);
            continue;
        }
        stack.push((v, parent, true));
        for &w in tree.neighbors(v) {
            if w != parent {
                children[v].push(w);
                stack.push((w, v, false));
            }
        }
    }
    Rooted { children, order }
}

fn checked_values<'a>(
    u: &'a UtilityFunction,
    graph: &ItemGraph,
) -> Result<&'a [u64], TreeSmmsError> {
    let values = u.values().ok_or(TreeSmmsError::RequiresAdditiveUtilities)?;
    if values.len() != graph.n_vertices() {
        return Err(TreeSmmsError::ItemCountMismatch {
            expected: graph.n_vertices(),
            got: values.len(),
        });
    }
    Ok(values)
}

fn bundle_value(values: &[u64], bundle: &[usize]) -> u64 {
    bundle.iter().map(|&v| values[v]).sum()
}

/// The collective maximin share of a tree under one additive utility: the
/// best achievable value of the worst of `n_agents` connected bundles.
///
/// Binary search on the answer. A bar `t` is feasible exactly when a
/// leaves-first sweep that severs a subtree the moment its hanging weight
/// reaches `t` produces at least `n_agents` pieces: surplus pieces and the
/// light remainder at the root can always be merged into a neighbour
/// without dropping anyone below the bar.
pub fn tree_mms_value(
    tree: &ItemGraph,
    u: &UtilityFunction,
    n_agents: usize,
) -> Result<u64, TreeSmmsError> {
    let values = checked_values(u, tree)?;
    if n_agents == 0 {
        return Err(TreeSmmsError::NoAgents);
    }
    if !tree.is_tree() {
        return Err(TreeSmmsError::NotATree);
    }
    let rooted = rooted_at_zero(tree);
    let total: u64 = values.iter().sum();
    let (mut lo, mut hi) = (0u64, total);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if severed_pieces(&rooted, values, mid) >= n_agents {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(lo)
}

/// Number of disjoint connected pieces worth at least `bar` the greedy
/// sweep can cut. The sweep is optimal on trees: cutting as deep as
/// possible never hurts a later cut.
fn severed_pieces(rooted: &Rooted, values: &[u64], bar: u64) -> usize {
    debug_assert!(bar > 0);
    let mut hanging = vec![0u64; values.len()];
    let mut pieces = 0;
    for &v in &rooted.order {
        let mut weight = values[v];
        for &c in &rooted.children[v] {
            weight += hanging[c];
        }
        if weight >= bar {
            pieces += 1;
        } else {
            hanging[v] = weight;
        }
    }
    pieces
}

/// Builds the full subtree table for a tree whose collective share is
/// positive. Errors with [`TreeSmmsError::ZeroShare`] otherwise, since a
/// zero bar makes every bundle trivially satisfied and the row semantics
/// collapse.
pub fn build_subtree_table(
    tree: &ItemGraph,
    u: &UtilityFunction,
    n_agents: usize,
) -> Result<SubtreeTable, TreeSmmsError> {
    let values = checked_values(u, tree)?;
    if n_agents == 0 {
        return Err(TreeSmmsError::NoAgents);
    }
    if !tree.is_tree() {
        return Err(TreeSmmsError::NotATree);
    }
    let share = tree_mms_value(tree, u, n_agents)?;
    if share == 0 {
        return Err(TreeSmmsError::ZeroShare);
    }
    Ok(fill_table(tree, values, n_agents, share))
}

fn fill_table(tree: &ItemGraph, values: &[u64], n: usize, share: u64) -> SubtreeTable {
    debug_assert!(share > 0);
    let m = tree.n_vertices();
    let rooted = rooted_at_zero(tree);
    let width = n + 1;
    let idx = |v: usize, j: usize, l: usize| (v * width + j) * width + l;
    let cell = |j: usize, l: usize| j * width + l;
    let mut entries: Vec<Option<SubtreeEntry>> = vec![None; m * width * width];
    let mut subtree: Vec<Vec<usize>> = vec![Vec::new(); m];

    for &v in &rooted.order {
        let kids = &rooted.children[v];
        let mut verts = vec![v];
        for &c in kids {
            verts.extend_from_slice(&subtree[c]);
        }
        verts.sort_unstable();
        let whole = SubtreeEntry {
            satisfied: Vec::new(),
            open: verts.clone(),
            open_value: bundle_value(values, &verts),
        };
        for l in 0..width {
            entries[idx(v, 0, l)] = Some(whole.clone());
        }
        subtree[v] = verts;

        // Best total open value over ways to spread closed bundles and the
        // pin budget across the first t children; None marks no way. Each
        // child contributes one of its own rows, possibly the whole-subtree
        // row that folds it into the open bundle.
        let mut layers: Vec<Vec<Option<u64>>> = vec![vec![None; width * width]];
        layers[0][cell(0, 0)] = Some(0);
        let mut picks: Vec<Vec<(usize, usize)>> = Vec::new();
        for &c in kids {
            let prev = layers.last().expect("one layer per processed child");
            let mut next = vec![None; width * width];
            let mut pick = vec![(0usize, 0usize); width * width];
            for j in 0..width {
                for l in 0..width {
                    let mut best: Option<u64> = None;
                    let mut chosen = (0, 0);
                    for jh in 0..=j {
                        for lh in 0..=l {
                            let Some(base) = prev[cell(j - jh, l - lh)] else {
                                continue;
                            };
                            let Some(row) = entries[idx(c, jh, lh)].as_ref() else {
                                continue;
                            };
                            let cand = base + row.open_value;
                            if best.is_none_or(|b| cand > b) {
                                best = Some(cand);
                                chosen = (jh, lh);
                            }
                        }
                    }
                    next[cell(j, l)] = best;
                    pick[cell(j, l)] = chosen;
                }
            }
            layers.push(next);
            picks.push(pick);
        }

        for j in 1..width {
            for l in 0..width {
                let entry = if let Some(total) = layers[kids.len()][cell(j, l)] {
                    // The open bundle stays alive: it takes v plus each
                    // child's open part, and the children's closed bundles
                    // carry over.
                    let mut split = Vec::with_capacity(kids.len());
                    let (mut jj, mut ll) = (j, l);
                    for t in (0..kids.len()).rev() {
                        let (jh, lh) = picks[t][cell(jj, ll)];
                        split.push((kids[t], jh, lh));
                        jj -= jh;
                        ll -= lh;
                    }
                    split.reverse();
                    let mut satisfied = Vec::with_capacity(j);
                    let mut open = vec![v];
                    for (c, jh, lh) in split {
                        let row = entries[idx(c, jh, lh)].as_ref().expect("picked rows exist");
                        satisfied.extend(row.satisfied.iter().cloned());
                        open.extend_from_slice(&row.open);
                    }
                    open.sort_unstable();
                    debug_assert_eq!(satisfied.len(), j);
                    Some(SubtreeEntry {
                        satisfied,
                        open,
                        open_value: values[v] + total,
                    })
                } else {
                    // No spread keeps the open bundle alive, so it must
                    // close empty. That works exactly when the row with one
                    // fewer closed bundle has an open part clearing the bar
                    // itself: strictly if the pin budget is spent, weakly
                    // if a pin is still free.
                    let promote = |row: &SubtreeEntry, strict: bool| {
                        let clears = if strict {
                            row.open_value > share
                        } else {
                            row.open_value >= share
                        };
                        clears.then(|| {
                            let mut satisfied = row.satisfied.clone();
                            satisfied.push(row.open.clone());
                            SubtreeEntry {
                                satisfied,
                                open: Vec::new(),
                                open_value: 0,
                            }
                        })
                    };
                    let same_budget = entries[idx(v, j - 1, l)]
                        .as_ref()
                        .and_then(|row| promote(row, true));
                    same_budget.or_else(|| {
                        let lower = l.checked_sub(1)?;
                        entries[idx(v, j - 1, lower)]
                            .as_ref()
                            .and_then(|row| promote(row, false))
                    })
                };
                entries[idx(v, j, l)] = entry;
            }
        }
    }

    SubtreeTable {
        n_agents: n,
        share,
        entries,
    }
}

/// Dissolves `leftover` into `bundles`: repeatedly attach the smallest
/// pending vertex that touches some bundle to the smallest-indexed bundle
/// adjacent to it. Receiving bundles stay connected, and on a tree whose
/// bundles cover everything else some pending vertex always touches one.
fn absorb_leftover(tree: &ItemGraph, bundles: &mut [Vec<usize>], mut leftover: Vec<usize>) {
    let mut owner = vec![usize::MAX; tree.n_vertices()];
    for (b, bundle) in bundles.iter().enumerate() {
        for &v in bundle {
            owner[v] = b;
        }
    }
    while !leftover.is_empty() {
        let mut attach = None;
        for (pos, &v) in leftover.iter().enumerate() {
            let target = tree
                .neighbors(v)
                .iter()
                .map(|&w| owner[w])
                .filter(|&b| b != usize::MAX)
                .min();
            if let Some(b) = target {
                attach = Some((pos, v, b));
                break;
            }
        }
        let (pos, v, b) = attach.expect("pending vertices touch the rest of the tree");
        leftover.remove(pos);
        owner[v] = b;
        bundles[b].push(v);
    }
    for bundle in bundles.iter_mut() {
        bundle.sort_unstable();
    }
}

/// A division of `tree` whose every bundle reaches the collective maximin
/// share, with the smallest possible number of bundles pinned exactly at
/// it. Bundles may be empty only when the share itself is zero.
pub fn smms_tree(
    tree: &ItemGraph,
    u: &UtilityFunction,
    n_agents: usize,
) -> Result<SmmsOutcome, TreeSmmsError> {
    let values = checked_values(u, tree)?;
    if n_agents == 0 {
        return Err(TreeSmmsError::NoAgents);
    }
    if !tree.is_tree() {
        return Err(TreeSmmsError::NotATree);
    }
    smms_core(tree, values, n_agents)
}

fn smms_core(tree: &ItemGraph, values: &[u64], n: usize) -> Result<SmmsOutcome, TreeSmmsError> {
    let rooted = rooted_at_zero(tree);
    let total: u64 = values.iter().sum();
    let (mut lo, mut hi) = (0u64, total);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if severed_pieces(&rooted, values, mid) >= n {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    let share = lo;
    if share == 0 {
        return zero_share_division(tree, values, n);
    }
    let table = fill_table(tree, values, n, share);
    let entry = (0..=n)
        .find_map(|l| table.get(0, n, l))
        .expect("the full tree always splits into n bundles at some pin budget");
    let mut bundles = entry.satisfied.clone();
    absorb_leftover(tree, &mut bundles, entry.open.clone());
    let allocation = Allocation::new(tree.n_vertices(), bundles)?;
    let losers = allocation
        .bundles()
        .iter()
        .filter(|b| bundle_value(values, b) == share)
        .count();
    Ok(SmmsOutcome {
        allocation,
        losers,
        share,
    })
}

/// With a zero share every division clears the bar, so all that matters is
/// handing as many agents as possible something of positive value. Fewer
/// vertices have positive value than there are agents here, so each gets
/// its own bundle carved leaves-first and the remaining agents go empty.
fn zero_share_division(
    tree: &ItemGraph,
    values: &[u64],
    n: usize,
) -> Result<SmmsOutcome, TreeSmmsError> {
    let m = tree.n_vertices();
    let rooted = rooted_at_zero(tree);
    let mut pending: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut parts: Vec<Vec<usize>> = Vec::new();
    for &v in &rooted.order {
        let mut verts = vec![v];
        for &c in &rooted.children[v] {
            verts.append(&mut pending[c]);
        }
        if values[v] > 0 {
            verts.sort_unstable();
            parts.push(verts);
        } else {
            pending[v] = verts;
        }
    }
    let leftover = std::mem::take(&mut pending[0]);
    if parts.is_empty() {
        let mut bundles = vec![Vec::new(); n];
        bundles[0] = (0..m).collect();
        let allocation = Allocation::new(m, bundles)?;
        return Ok(SmmsOutcome {
            allocation,
            losers: n,
            share: 0,
        });
    }
    let winners = parts.len();
    debug_assert!(
        winners < n,
        "more positives than agents forces a positive share"
    );
    absorb_leftover(tree, &mut parts, leftover);
    parts.resize(n, Vec::new());
    let allocation = Allocation::new(m, parts)?;
    Ok(SmmsOutcome {
        allocation,
        losers: n - winners,
        share: 0,
    })
}

/// A division of `tree` that simultaneously reaches every pairwise share
/// exactly and pins as few agents as possible at the collective share.
///
/// Starts from [`smms_tree`] and freezes the pinned bundles; the agents
/// above the bar hand their items back and their components are divided
/// again among the agents whose bundles they absorbed. Every round pins at
/// least one more agent, and a pinned agent can never envy a neighbour's
/// pairwise share once its surroundings are frozen.
pub fn pmms_smms_tree(
    tree: &ItemGraph,
    u: &UtilityFunction,
    n_agents: usize,
) -> Result<Allocation, TreeSmmsError> {
    let values = checked_values(u, tree)?;
    if n_agents == 0 {
        return Err(TreeSmmsError::NoAgents);
    }
    if !tree.is_tree() {
        return Err(TreeSmmsError::NotATree);
    }
    let bundles = pairwise_core(tree, values, n_agents)?;
    Ok(Allocation::new(tree.n_vertices(), bundles)?)
}

fn pairwise_core(
    tree: &ItemGraph,
    values: &[u64],
    n: usize,
) -> Result<Vec<Vec<usize>>, TreeSmmsError> {
    let outcome = smms_core(tree, values, n)?;
    let share = outcome.share;
    let mut bundles: Vec<Vec<usize>> = outcome.allocation.bundles().to_vec();
    let above: Vec<usize> = (0..n)
        .filter(|&i| bundle_value(values, &bundles[i]) > share)
        .collect();
    if above.is_empty() {
        return Ok(bundles);
    }
    // Bundles above the bar are nonempty and connected, so each lies in
    // exactly one component of the graph they span.
    let mut keep: Vec<usize> = above
        .iter()
        .flat_map(|&i| bundles[i].iter().copied())
        .collect();
    keep.sort_unstable();
    let (span, to_old) = tree.induced(&keep);
    for comp in span.components() {
        let comp_old: Vec<usize> = comp.iter().map(|&v| to_old[v]).collect();
        let members: Vec<usize> = above
            .iter()
            .copied()
            .filter(|&i| comp_old.binary_search(&bundles[i][0]).is_ok())
            .collect();
        let (comp_graph, comp_map) = tree.induced(&comp_old);
        let comp_values: Vec<u64> = comp_map.iter().map(|&v| values[v]).collect();
        let rebundled = pairwise_core(&comp_graph, &comp_values, members.len())?;
        for (slot, &agent) in members.iter().enumerate() {
            let mut bundle: Vec<usize> = rebundled[slot].iter().map(|&v| comp_map[v]).collect();
            bundle.sort_unstable();
            bundles[agent] = bundle;
        }
    }
    Ok(bundles)
}

/// The tree division applied to a connected graph with exactly one cycle:
/// delete each cycle edge in turn, divide the remaining tree, and keep the
/// division whose worst bundle is most valuable, breaking ties by fewer
/// bundles pinned at that value and then by cycle-edge order.
pub fn smms_unicyclic(
    graph: &ItemGraph,
    u: &UtilityFunction,
    n_agents: usize,
) -> Result<Allocation, TreeSmmsError> {
    let values = checked_values(u, graph)?;
    if n_agents == 0 {
        return Err(TreeSmmsError::NoAgents);
    }
    if !graph.is_unicyclic() {
        return Err(TreeSmmsError::NotExactlyOneCycle);
    }
    let m = graph.n_vertices();
    let mut best: Option<(u64, usize, Vec<Vec<usize>>)> = None;
    for skip in 0..graph.edges().len() {
        let edges: Vec<(usize, usize)> = graph
            .edges()
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(_, &e)| e)
            .collect();
        let tree = ItemGraph::new(m, &edges).expect("subset of a simple graph");
        if !tree.is_tree() {
            // Deleting an edge off the cycle disconnects the graph.
            continue;
        }
        let bundles = pairwise_core(&tree, values, n_agents)?;
        let worst = bundles
            .iter()
            .map(|b| bundle_value(values, b))
            .min()
            .expect("at least one agent");
        let pinned = bundles
            .iter()
            .filter(|b| bundle_value(values, b) == worst)
            .count();
        let better = match &best {
            None => true,
            Some((w, p, _)) => worst > *w || (worst == *w && pinned < *p),
        };
        if better {
            best = Some((worst, pinned, bundles));
        }
    }
    let (_, _, bundles) = best.expect("every cycle edge leaves a spanning tree");
    Ok(Allocation::new(m, bundles)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::Instance;
    use crate::oracle::{
        brute_smms, check_fairness, enumerate_connected_partitions, mu_k, FairnessCriterion,
    };
    use crate::utility::FairnessRatio;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn additive(values: &[u64]) -> UtilityFunction {
        UtilityFunction::Additive(values.to_vec())
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// Random tree on `m` vertices: each vertex after the first hooks onto
    /// an earlier one.
    fn random_tree(rng: &mut ChaCha8Rng, m: usize) -> ItemGraph {
        let edges: Vec<(usize, usize)> = (1..m).map(|v| (rng.gen_range(0..v), v)).collect();
        ItemGraph::new(m, &edges).expect("parent links form a tree")
    }

    fn random_values(rng: &mut ChaCha8Rng, m: usize, cap: u64) -> Vec<u64> {
        (0..m).map(|_| rng.gen_range(0..=cap)).collect()
    }

    fn assert_exact_pairwise(graph: &ItemGraph, values: &[u64], alloc: &Allocation, n: usize) {
        let instance = Instance::new(graph.clone(), vec![additive(values); n]).unwrap();
        let check = check_fairness(
            &instance,
            alloc,
            FairnessCriterion::Pmms(FairnessRatio::new(1, 1).unwrap()),
        )
        .unwrap();
        assert!(
            check.passes(),
            "allocation {:?} misses a pairwise share: {:?}",
            alloc.bundles(),
            check.violations
        );
    }

    #[test]
    fn share_value_on_a_short_path() {
        let tree = ItemGraph::path(4);
        let u = additive(&[1, 3, 3, 1]);
        assert_eq!(tree_mms_value(&tree, &u, 3).unwrap(), 1);
        assert_eq!(tree_mms_value(&tree, &u, 2).unwrap(), 4);
        assert_eq!(tree_mms_value(&tree, &u, 1).unwrap(), 8);
    }

    #[test]
    fn share_value_on_a_star() {
        let tree = ItemGraph::star(3);
        let u = additive(&[1, 1, 1, 1]);
        assert_eq!(tree_mms_value(&tree, &u, 2).unwrap(), 1);
    }

    #[test]
    fn share_value_matches_the_oracle_on_random_trees() {
        let mut rng = rng(0x7a31);
        for _ in 0..120 {
            let m = rng.gen_range(1..=9);
            let tree = random_tree(&mut rng, m);
            let values = random_values(&mut rng, m, 10);
            let n = rng.gen_range(1..=4);
            let u = additive(&values);
            let all: Vec<usize> = (0..m).collect();
            let expect = mu_k(&u, &tree, &all, n).unwrap();
            assert_eq!(
                tree_mms_value(&tree, &u, n).unwrap(),
                expect,
                "tree {:?} values {:?} n {}",
                tree.edges(),
                values,
                n
            );
        }
    }

    #[test]
    fn share_value_validates_inputs() {
        let u = additive(&[1, 1, 1, 1]);
        assert_eq!(
            tree_mms_value(&ItemGraph::cycle(4), &u, 2),
            Err(TreeSmmsError::NotATree)
        );
        assert_eq!(
            tree_mms_value(&ItemGraph::path(4), &u, 0),
            Err(TreeSmmsError::NoAgents)
        );
        assert_eq!(
            tree_mms_value(&ItemGraph::path(3), &u, 2),
            Err(TreeSmmsError::ItemCountMismatch {
                expected: 3,
                got: 4
            })
        );
    }

    #[test]
    fn table_keeps_the_whole_subtree_open_with_nothing_closed() {
        let tree = ItemGraph::path(5);
        let u = additive(&[1, 3, 1, 1, 1]);
        let table = build_subtree_table(&tree, &u, 3).unwrap();
        assert_eq!(table.share(), 1);
        for v in 0..5 {
            for l in 0..=3 {
                let row = table.get(v, 0, l).expect("whole subtree is always open");
                assert!(row.satisfied.is_empty());
                assert!(row.open.contains(&v));
                assert_eq!(row.open_value, bundle_value(&[1, 3, 1, 1, 1], &row.open));
            }
        }
    }

    #[test]
    fn table_rejects_a_zero_bar() {
        let tree = ItemGraph::path(3);
        assert!(matches!(
            build_subtree_table(&tree, &additive(&[0, 0, 0]), 2),
            Err(TreeSmmsError::ZeroShare)
        ));
        // One positive vertex cannot feed two agents either.
        assert!(matches!(
            build_subtree_table(&tree, &additive(&[0, 5, 0]), 2),
            Err(TreeSmmsError::ZeroShare)
        ));
    }

    #[test]
    fn table_rows_grow_with_the_pin_budget() {
        let mut rng = rng(0x51c2);
        for _ in 0..40 {
            let m = rng.gen_range(2..=8);
            let tree = random_tree(&mut rng, m);
            let values = random_values(&mut rng, m, 8);
            let n = rng.gen_range(1..=4);
            let u = additive(&values);
            let Ok(table) = build_subtree_table(&tree, &u, n) else {
                continue;
            };
            for v in 0..m {
                for j in 0..=n {
                    for l in 0..n {
                        if let Some(row) = table.get(v, j, l) {
                            let wider = table
                                .get(v, j, l + 1)
                                .expect("a wider pin budget keeps every row");
                            assert!(wider.open_value >= row.open_value);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn table_rows_match_brute_force_partitions() {
        let mut rng = rng(0x9d44);
        for _ in 0..25 {
            let m = rng.gen_range(2..=7);
            let tree = random_tree(&mut rng, m);
            let values = random_values(&mut rng, m, 6);
            let n = rng.gen_range(1..=3);
            let u = additive(&values);
            let Ok(table) = build_subtree_table(&tree, &u, n) else {
                continue;
            };
            let share = table.share();
            let rooted = rooted_at_zero(&tree);
            let mut subtree: Vec<Vec<usize>> = vec![Vec::new(); m];
            for &v in &rooted.order {
                let mut verts = vec![v];
                for &c in &rooted.children[v] {
                    verts.extend_from_slice(&subtree[c]);
                }
                verts.sort_unstable();
                subtree[v] = verts;
            }
            for (v, sub) in subtree.iter().enumerate() {
                for j in 0..=n {
                    for l in 0..=n {
                        let best = brute_best_open(&tree, &values, sub, v, j, l, share);
                        match (best, table.get(v, j, l)) {
                            (None, None) => {}
                            (Some(want), Some(row)) => {
                                assert_eq!(
                                    row.open_value, want,
                                    "vertex {v} closing {j} with budget {l}"
                                );
                                check_row(&tree, &values, sub, v, j, l, share, row);
                            }
                            (want, got) => panic!(
                                "vertex {v} closing {j} budget {l}: brute {want:?} vs table {got:?}"
                            ),
                        }
                    }
                }
            }
        }
    }

    /// Best open-bundle value over all partitions of `verts` into `j`
    /// bar-clearing bundles (at most `l` pinned) plus one open bundle that
    /// is empty or contains `root`.
    fn brute_best_open(
        tree: &ItemGraph,
        values: &[u64],
        verts: &[usize],
        root: usize,
        j: usize,
        l: usize,
        share: u64,
    ) -> Option<u64> {
        let mut best = None;
        for parts in enumerate_connected_partitions(tree, verts, j + 1, true).unwrap() {
            for open_slot in 0..parts.len() {
                let open = &parts[open_slot];
                if !(open.is_empty() || open.contains(&root)) {
                    continue;
                }
                let mut pinned = 0;
                let mut ok = true;
                for (t, part) in parts.iter().enumerate() {
                    if t == open_slot {
                        continue;
                    }
                    let value = bundle_value(values, part);
                    if value < share {
                        ok = false;
                        break;
                    }
                    if value == share {
                        pinned += 1;
                    }
                }
                if !ok || pinned > l {
                    continue;
                }
                let open_value = bundle_value(values, open);
                if best.is_none_or(|b| open_value > b) {
                    best = Some(open_value);
                }
            }
        }
        best
    }

    #[allow(clippy::too_many_arguments)]
    fn check_row(
        tree: &ItemGraph,
        values: &[u64],
        verts: &[usize],
        root: usize,
        j: usize,
        l: usize,
        share: u64,
        row: &SubtreeEntry,
    ) {
        assert_eq!(row.satisfied.len(), j);
        assert!(row.open.is_empty() || row.open.contains(&root));
        let mut covered: Vec<usize> = row
            .satisfied
            .iter()
            .flatten()
            .chain(row.open.iter())
            .copied()
            .collect();
        covered.sort_unstable();
        assert_eq!(covered, verts, "rows partition the subtree");
        let mut pinned = 0;
        for bundle in &row.satisfied {
            assert!(tree.is_connected(bundle).unwrap());
            let value = bundle_value(values, bundle);
            assert!(value >= share);
            if value == share {
                pinned += 1;
            }
        }
        assert!(pinned <= l);
        if !row.open.is_empty() {
            assert!(tree.is_connected(&row.open).unwrap());
        }
        assert_eq!(row.open_value, bundle_value(values, &row.open));
    }

    #[test]
    fn division_splits_the_example_path() {
        let tree = ItemGraph::path(5);
        let values = [1, 3, 1, 1, 1];
        let outcome = smms_tree(&tree, &additive(&values), 3).unwrap();
        assert_eq!(outcome.share, 1);
        assert_eq!(outcome.losers, 1);
        for bundle in outcome.allocation.bundles() {
            assert!(bundle_value(&values, bundle) >= 1);
        }
    }

    #[test]
    fn division_on_a_star_pins_one_agent() {
        let outcome = smms_tree(&ItemGraph::star(3), &additive(&[1, 1, 1, 1]), 2).unwrap();
        assert_eq!(outcome.share, 1);
        assert_eq!(outcome.losers, 1);
    }

    #[test]
    fn division_matches_brute_force_on_random_trees() {
        let mut rng = rng(0xb713);
        for _ in 0..80 {
            let m = rng.gen_range(1..=8);
            let tree = random_tree(&mut rng, m);
            let values = random_values(&mut rng, m, 10);
            let n = rng.gen_range(1..=4);
            let outcome = smms_tree(&tree, &additive(&values), n).unwrap();
            let instance = Instance::new(tree.clone(), vec![additive(&values); n]).unwrap();
            let brute = brute_smms(&instance).unwrap();
            assert_eq!(
                outcome.share,
                brute.mms,
                "tree {:?} values {:?}",
                tree.edges(),
                values
            );
            assert_eq!(
                outcome.losers,
                brute.min_losers,
                "tree {:?} values {:?} n {}",
                tree.edges(),
                values,
                n
            );
            for bundle in outcome.allocation.bundles() {
                assert!(bundle_value(&values, bundle) >= outcome.share);
            }
        }
    }

    #[test]
    fn zero_bar_hands_positives_to_distinct_agents() {
        let tree = ItemGraph::path(6);
        let values = [0, 5, 0, 0, 7, 0];
        let outcome = smms_tree(&tree, &additive(&values), 3).unwrap();
        assert_eq!(outcome.share, 0);
        assert_eq!(outcome.losers, 1);
        let positive = outcome
            .allocation
            .bundles()
            .iter()
            .filter(|b| bundle_value(&values, b) > 0)
            .count();
        assert_eq!(positive, 2);
    }

    #[test]
    fn worthless_tree_goes_whole_to_one_agent() {
        let outcome = smms_tree(&ItemGraph::path(3), &additive(&[0, 0, 0]), 2).unwrap();
        assert_eq!(outcome.losers, 2);
        assert_eq!(outcome.allocation.bundle(0), &[0, 1, 2]);
        assert!(outcome.allocation.bundle(1).is_empty());
    }

    #[test]
    fn pairwise_division_of_the_example_path() {
        let tree = ItemGraph::path(5);
        let values = [1, 3, 1, 1, 1];
        let alloc = pmms_smms_tree(&tree, &additive(&values), 3).unwrap();
        assert_exact_pairwise(&tree, &values, &alloc, 3);
        let pinned = alloc
            .bundles()
            .iter()
            .filter(|b| bundle_value(&values, b) == 1)
            .count();
        assert_eq!(pinned, 1);
    }

    #[test]
    fn pairwise_division_holds_on_random_trees() {
        let mut rng = rng(0xe2a7);
        for _ in 0..60 {
            let m = rng.gen_range(1..=8);
            let tree = random_tree(&mut rng, m);
            let values = random_values(&mut rng, m, 10);
            let n = rng.gen_range(1..=4);
            let alloc = pmms_smms_tree(&tree, &additive(&values), n).unwrap();
            assert_exact_pairwise(&tree, &values, &alloc, n);
            let instance = Instance::new(tree.clone(), vec![additive(&values); n]).unwrap();
            let brute = brute_smms(&instance).unwrap();
            let pinned = alloc
                .bundles()
                .iter()
                .filter(|b| bundle_value(&values, b) == brute.mms)
                .count();
            assert_eq!(
                pinned,
                brute.min_losers,
                "tree {:?} values {:?} n {}",
                tree.edges(),
                values,
                n
            );
        }
    }

    #[test]
    #[ignore = "heavier sweep; run on demand"]
    fn stress_divisions_on_many_random_trees() {
        let mut rng = rng(0xc90d);
        for _ in 0..600 {
            let m = rng.gen_range(1..=9);
            let tree = random_tree(&mut rng, m);
            let cap = [1, 4, 10][rng.gen_range(0..3)];
            let values = random_values(&mut rng, m, cap);
            let n = rng.gen_range(1..=4);
            let alloc = pmms_smms_tree(&tree, &additive(&values), n).unwrap();
            assert_exact_pairwise(&tree, &values, &alloc, n);
            let instance = Instance::new(tree.clone(), vec![additive(&values); n]).unwrap();
            let brute = brute_smms(&instance).unwrap();
            let pinned = alloc
                .bundles()
                .iter()
                .filter(|b| bundle_value(&values, b) == brute.mms)
                .count();
            assert_eq!(
                pinned,
                brute.min_losers,
                "tree {:?} values {:?} n {}",
                tree.edges(),
                values,
                n
            );
        }
    }

    #[test]
    fn single_agent_takes_the_whole_tree() {
        let tree = ItemGraph::star(3);
        let alloc = pmms_smms_tree(&tree, &additive(&[2, 1, 1, 1]), 1).unwrap();
        assert_eq!(alloc.bundle(0), &[0, 1, 2, 3]);
    }

    #[test]
    fn cycle_of_four_splits_into_two_arcs() {
        let graph = ItemGraph::cycle(4);
        let values = [1, 1, 1, 1];
        let alloc = smms_unicyclic(&graph, &additive(&values), 2).unwrap();
        for bundle in alloc.bundles() {
            assert_eq!(bundle_value(&values, bundle), 2);
        }
    }

    #[test]
    fn cycle_of_three_gives_each_agent_a_vertex() {
        let graph = ItemGraph::cycle(3);
        let alloc = smms_unicyclic(&graph, &additive(&[1, 1, 1]), 3).unwrap();
        for bundle in alloc.bundles() {
            assert_eq!(bundle.len(), 1);
        }
    }

    #[test]
    fn pendant_cycle_matches_brute_force() {
        let graph = ItemGraph::new(4, &[(0, 1), (1, 2), (2, 0), (0, 3)]).unwrap();
        let mut rng = rng(0x4be8);
        for _ in 0..60 {
            let values = random_values(&mut rng, 4, 10);
            let alloc = smms_unicyclic(&graph, &additive(&values), 2).unwrap();
            let worst = alloc
                .bundles()
                .iter()
                .map(|b| bundle_value(&values, b))
                .min()
                .unwrap();
            let instance = Instance::new(graph.clone(), vec![additive(&values); 2]).unwrap();
            let brute = brute_smms(&instance).unwrap();
            assert_eq!(worst, brute.mms, "values {values:?}");
            let pinned = alloc
                .bundles()
                .iter()
                .filter(|b| bundle_value(&values, b) == worst)
                .count();
            assert_eq!(pinned, brute.min_losers, "values {values:?}");
        }
    }

    #[test]
    fn unicyclic_division_rejects_other_shapes() {
        let u = additive(&[1, 1, 1, 1]);
        assert_eq!(
            smms_unicyclic(&ItemGraph::path(4), &u, 2).unwrap_err(),
            TreeSmmsError::NotExactlyOneCycle
        );
        let two_cycles = ItemGraph::new(4, &[(0, 1), (1, 2), (2, 0), (0, 3), (1, 3)]).unwrap();
        assert_eq!(
            smms_unicyclic(&two_cycles, &u, 2).unwrap_err(),
            TreeSmmsError::NotExactlyOneCycle
        );
        assert_eq!(
            smms_unicyclic(&ItemGraph::cycle(4), &u, 0).unwrap_err(),
            TreeSmmsError::NoAgents
        );
    }
}
