//! Connected division of a path into consecutive runs: canonical leximin
//! cuts, arithmetic tests for optimal two-way splits, a complete procedure
//! for three agents with additive utilities, and knife moving when every
//! agent shares one monotone utility.

use thiserror::Error;

use crate::allocation::{Allocation, AllocationError};
use crate::utility::UtilityFunction;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PathError {
    #[error("requires an additive utility function")]
    RequiresAdditiveUtilities,
    #[error("requires a monotone utility function")]
    RequiresMonotoneUtilities,
    #[error("utility covers {got} items but the path has {expected}")]
    ItemCountMismatch { expected: usize, got: usize },
    #[error("cut pair ({c1}, {c2}) does not fit a path of {m} items")]
    InvalidCuts { c1: usize, c2: usize, m: usize },
    #[error("part index {got} out of range for a {parts}-part division")]
    PartOutOfRange { parts: usize, got: usize },
    #[error("cannot divide {items} items among {agents} agents")]
    TooFewItems { items: usize, agents: usize },
    #[error(transparent)]
    Allocation(#[from] AllocationError),
}

/// Contiguous run of items, named by its bounding cut positions. Cut `e`
/// sits just before item `e`, so the run covers items `lo..hi` and
/// `lo == hi` means empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PathInterval {
    pub lo: usize,
    pub hi: usize,
}

impl PathInterval {
    pub fn new(lo: usize, hi: usize) -> Self {
        debug_assert!(lo <= hi);
        PathInterval { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        self.lo == self.hi
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo
    }

    /// Items covered, in path order.
    pub fn items(&self) -> std::ops::Range<usize> {
        self.lo..self.hi
    }
}

/// Two cut positions carving a path into the three runs `[0, c1)`,
/// `[c1, c2)`, and `[c2, m)`. Valid when `c1 <= c2 <= m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CutPair {
    pub c1: usize,
    pub c2: usize,
}

impl CutPair {
    pub fn new(c1: usize, c2: usize) -> Self {
        debug_assert!(c1 <= c2);
        CutPair { c1, c2 }
    }

    /// The three runs the cuts carve out of a path of `m` items.
    pub fn parts(&self, m: usize) -> [PathInterval; 3] {
        [
            PathInterval::new(0, self.c1),
            PathInterval::new(self.c1, self.c2),
            PathInterval::new(self.c2, m),
        ]
    }
}

/// Prefix sums over item values; entry `e` counts everything left of cut `e`.
struct Prefix {
    total: Vec<u64>,
    positive: Vec<usize>,
}

impl Prefix {
    fn new(values: &[u64]) -> Self {
        let mut total = Vec::with_capacity(values.len() + 1);
        let mut positive = Vec::with_capacity(values.len() + 1);
        total.push(0u64);
        positive.push(0usize);
        for &v in values {
            total.push(total.last().unwrap() + v);
            positive.push(positive.last().unwrap() + usize::from(v > 0));
        }
        Prefix { total, positive }
    }

    fn value(&self, iv: PathInterval) -> u64 {
        self.total[iv.hi] - self.total[iv.lo]
    }

    fn positives(&self, iv: PathInterval) -> usize {
        self.positive[iv.hi] - self.positive[iv.lo]
    }
}

fn additive_values(u: &UtilityFunction, m: usize) -> Result<&[u64], PathError> {
    let values = u.values().ok_or(PathError::RequiresAdditiveUtilities)?;
    if values.len() != m {
        return Err(PathError::ItemCountMismatch {
            expected: m,
            got: values.len(),
        });
    }
    Ok(values)
}

/// Whether cutting the run `[x, z)` at `y` attains its two-part maximin
/// share. An empty side is optimal exactly when the run holds at most one
/// item of positive value. Otherwise the cut is optimal iff neither side
/// can profitably absorb the other's boundary items: the largest strict
/// value-prefix of the left side must not outweigh the right side, and
/// symmetrically. Both boundaries fall out of one binary search each.
fn pair_is_pmms_split(p: &Prefix, x: usize, y: usize, z: usize) -> bool {
    debug_assert!(x <= y && y <= z);
    if x == y || y == z {
        return p.positives(PathInterval::new(x, z)) <= 1;
    }
    let left = p.value(PathInterval::new(x, y));
    let right = p.value(PathInterval::new(y, z));
    let left_ok = left == 0 || {
        // Largest cut a with value [x, a) still short of the full left side.
        let a = p.total.partition_point(|&t| t < p.total[y]) - 1;
        p.total[a] - p.total[x] <= right
    };
    let right_ok = right == 0 || {
        // Smallest cut b with value [b, z) short of the full right side.
        let b = p.total.partition_point(|&t| t <= p.total[y]);
        p.total[z] - p.total[b] <= left
    };
    left_ok && right_ok
}

/// Whether `part` holds up for an owner valuing items by `p`: against every
/// compared bundle it reaches the exact pairwise share of the union. An
/// empty bundle is compared with every part, nonempty bundles only with
/// adjacent ones.
fn good_in_partition(p: &Prefix, cuts: CutPair, part: usize, m: usize) -> bool {
    let parts = cuts.parts(m);
    let own = parts[part];
    for (j, &other) in parts.iter().enumerate() {
        if j == part {
            continue;
        }
        if own.is_empty() {
            // Zero value meets the share only if the other part cannot be
            // split into two positive halves.
            if p.positives(other) > 1 {
                return false;
            }
            continue;
        }
        if other.is_empty() {
            // The reverse comparison belongs to the empty side's owner.
            continue;
        }
        if own.hi != other.lo && other.hi != own.lo {
            continue;
        }
        if p.value(own) >= p.value(other) {
            // The weakly heavier side of a two-part split always clears it.
            continue;
        }
        let (x, y, z) = if own.hi == other.lo {
            (own.lo, own.hi, other.hi)
        } else {
            (other.lo, other.hi, own.hi)
        };
        if !pair_is_pmms_split(p, x, y, z) {
            return false;
        }
    }
    true
}

/// Canonical division of a path of `m` items into `k` consecutive runs: the
/// leximin cut tuple (largest minimum part value, then largest second
/// minimum, and so on), lexicographically smallest among ties. Every part
/// of the winner clears the pairwise share against each compared neighbour.
/// Enumerates all nondecreasing cut tuples, so keep `k` small.
pub fn path_pmms_partition(
    u: &UtilityFunction,
    m: usize,
    k: usize,
) -> Result<Vec<usize>, PathError> {
    let values = additive_values(u, m)?;
    if k == 0 {
        return Err(PathError::TooFewItems {
            items: m,
            agents: 0,
        });
    }
    let p = Prefix::new(values);
    let mut cuts = vec![0usize; k - 1];
    let mut best: Option<(Vec<u64>, Vec<usize>)> = None;
    loop {
        let mut score: Vec<u64> = Vec::with_capacity(k);
        let mut prev = 0;
        for &c in &cuts {
            score.push(p.value(PathInterval::new(prev, c)));
            prev = c;
        }
        score.push(p.value(PathInterval::new(prev, m)));
        score.sort_unstable();
        match &best {
            Some((incumbent, _)) if score <= *incumbent => {}
            _ => best = Some((score, cuts.clone())),
        }
        // Advance to the next nondecreasing tuple in lexicographic order.
        match cuts.iter().rposition(|&c| c < m) {
            Some(i) => {
                cuts[i] += 1;
                let v = cuts[i];
                for c in cuts[i + 1..].iter_mut() {
                    *c = v;
                }
            }
            None => break,
        }
    }
    Ok(best.expect("at least one cut tuple exists").1)
}

/// Whether the given part of the three-run division `cuts` holds up for an
/// agent with additive utility `u`: against every compared bundle it
/// reaches the exact pairwise share of the union. Runs on prefix-sum
/// arithmetic, no partition enumeration.
pub fn is_good_bundle(
    u: &UtilityFunction,
    cuts: CutPair,
    part_index: usize,
    m: usize,
) -> Result<bool, PathError> {
    let values = additive_values(u, m)?;
    if cuts.c1 > cuts.c2 || cuts.c2 > m {
        return Err(PathError::InvalidCuts {
            c1: cuts.c1,
            c2: cuts.c2,
            m,
        });
    }
    if part_index >= 3 {
        return Err(PathError::PartOutOfRange {
            parts: 3,
            got: part_index,
        });
    }
    let p = Prefix::new(values);
    Ok(good_in_partition(&p, cuts, part_index, m))
}

/// Division of a path among three agents, tagged with the branch of the
/// cut-order analysis that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeAgentsAllocation {
    pub allocation: Allocation,
    /// Branch of the analysis over the agents' canonical cuts, 1 to 7.
    pub case: u8,
}

const ASSIGNMENTS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Exact pairwise-share division of a path among three agents with additive
/// utilities. Each agent first names its canonical leximin cuts; sorting the
/// agents by first cut leaves seven possible orders of the remaining cuts,
/// and each order admits a division assembled from one agent's own cuts,
/// refined in a single case by shifting one cut of the middle run. The
/// returned case tag names the branch that fired.
pub fn three_agents_path_pmms(
    u1: &UtilityFunction,
    u2: &UtilityFunction,
    u3: &UtilityFunction,
    m: usize,
) -> Result<ThreeAgentsAllocation, PathError> {
    let agents = [u1, u2, u3];
    let mut prefixes = Vec::with_capacity(3);
    let mut pairs = Vec::with_capacity(3);
    for u in agents {
        prefixes.push(Prefix::new(additive_values(u, m)?));
        let cuts = path_pmms_partition(u, m, 3)?;
        pairs.push(CutPair::new(cuts[0], cuts[1]));
    }

    // Relabel agents by their first canonical cut; ties keep agent order.
    let mut order = [0usize, 1, 2];
    order.sort_by_key(|&i| (pairs[i].c1, i));
    let c1 = order.map(|i| pairs[i].c1);
    let c2 = order.map(|i| pairs[i].c2);

    let (case, base) = if c2[1] <= c1[2] {
        (1, CutPair::new(c1[1], c2[1]))
    } else if c2[0] <= c1[2] && c1[2] <= c2[1] && c2[2] <= c2[1] {
        (2, CutPair::new(c1[2], c2[2]))
    } else if c2[0] <= c1[2] && c1[2] <= c2[1] && c2[1] <= c2[2] && c2[0] <= c1[1] {
        (3, CutPair::new(c1[1], c2[1]))
    } else if c2[0] <= c2[1] && c2[1] <= c2[2] && c1[2] <= c2[1] {
        (4, CutPair::new(c1[1], c2[1]))
    } else if c1[2] <= c2[0] && c2[0] <= c2[2] && c2[2] <= c2[1] {
        (5, CutPair::new(c1[2], c2[2]))
    } else if c1[2] <= c2[0] && c1[2] <= c2[1] && c2[2] <= c2[0] && c2[2] <= c2[1] {
        (6, CutPair::new(c1[2], c2[2]))
    } else if c1[2] <= c2[0] && c1[2] <= c2[1] && c2[1] <= c2[0] && c2[1] <= c2[2] {
        (7, CutPair::new(c1[1], c2[1]))
    } else {
        unreachable!("sorting by first cut leaves no other order of second cuts")
    };

    let mut candidates = vec![base];
    if case == 4 {
        // Only this branch ever needs a refined middle: move its left cut
        // right, or failing that its right cut left, one position at a time.
        for z in base.c1 + 1..base.c2 {
            candidates.push(CutPair::new(z, base.c2));
        }
        for z in base.c1 + 1..=base.c2 {
            candidates.push(CutPair::new(base.c1, z));
        }
    }

    let assignment_for = |cuts: CutPair| -> Option<[usize; 3]> {
        let mut good = [[false; 3]; 3];
        for (slot, row) in good.iter_mut().enumerate() {
            for (part, flag) in row.iter_mut().enumerate() {
                *flag = good_in_partition(&prefixes[order[slot]], cuts, part, m);
            }
        }
        ASSIGNMENTS
            .into_iter()
            .find(|asg| (0..3).all(|slot| good[slot][asg[slot]]))
    };

    for cuts in candidates {
        if let Some(assignment) = assignment_for(cuts) {
            return assemble(m, order, cuts, assignment, case);
        }
    }

    // With positive values and at least three items every branch division
    // succeeds. Zero-valued items can degenerate the canonical cuts into
    // divisions with empty parts, and an empty part must match the share of
    // every other part, not just its neighbours; sweep all cut pairs then.
    for x in 0..=m {
        for y in x..=m {
            let cuts = CutPair::new(x, y);
            if let Some(assignment) = assignment_for(cuts) {
                return assemble(m, order, cuts, assignment, case);
            }
        }
    }
    unreachable!("some two-cut division always admits a full assignment")
}

fn assemble(
    m: usize,
    order: [usize; 3],
    cuts: CutPair,
    assignment: [usize; 3],
    case: u8,
) -> Result<ThreeAgentsAllocation, PathError> {
    let parts = cuts.parts(m);
    let mut bundles = vec![Vec::new(); 3];
    for (slot, &agent) in order.iter().enumerate() {
        bundles[agent] = parts[assignment[slot]].items().collect();
    }
    Ok(ThreeAgentsAllocation {
        allocation: Allocation::new(m, bundles)?,
        case,
    })
}

/// Interval values for knife moving: prefix sums when the utility is
/// additive, direct table lookups otherwise.
enum IntervalEval<'a> {
    Sums(Prefix),
    Direct(&'a UtilityFunction),
}

impl<'a> IntervalEval<'a> {
    fn new(u: &'a UtilityFunction) -> Self {
        match u.values() {
            Some(values) => IntervalEval::Sums(Prefix::new(values)),
            None => IntervalEval::Direct(u),
        }
    }

    fn value(&self, iv: PathInterval) -> u64 {
        match self {
            IntervalEval::Sums(p) => p.value(iv),
            IntervalEval::Direct(u) => u.value_mask((1u64 << iv.hi) - (1u64 << iv.lo)),
        }
    }

    /// Exact two-part share of a run: best cut, empty sides allowed.
    fn pmms(&self, iv: PathInterval) -> u64 {
        (iv.lo..=iv.hi)
            .map(|c| {
                self.value(PathInterval::new(iv.lo, c))
                    .min(self.value(PathInterval::new(c, iv.hi)))
            })
            .max()
            .unwrap_or(0)
    }
}

/// Divides a path among `n` agents who share one monotone utility. Start
/// with each of the first `n - 1` agents holding one item and the last
/// holding the rest, then repeatedly take the leftmost adjacent pair whose
/// left bundle misses the pairwise share of the pair's union and shift
/// their boundary right one item at a time until it holds. Boundaries only
/// ever move right, so the loop settles after at most `(n - 1) * m` moves.
pub fn moving_knife_identical(
    u: &UtilityFunction,
    m: usize,
    n: usize,
) -> Result<Allocation, PathError> {
    if u.n_items() != m {
        return Err(PathError::ItemCountMismatch {
            expected: m,
            got: u.n_items(),
        });
    }
    if !u.is_monotone() {
        return Err(PathError::RequiresMonotoneUtilities);
    }
    if n == 0 || m < n {
        return Err(PathError::TooFewItems {
            items: m,
            agents: n,
        });
    }
    let eval = IntervalEval::new(u);
    // bounds[i]..bounds[i + 1] is agent i's run.
    let mut bounds: Vec<usize> = (0..n).collect();
    bounds.push(m);
    let mut moves = 0usize;
    'scan: loop {
        for i in 0..n - 1 {
            let union = PathInterval::new(bounds[i], bounds[i + 2]);
            let share = eval.pmms(union);
            if eval.value(PathInterval::new(bounds[i], bounds[i + 1])) < share {
                // The union stays fixed while this boundary moves, so the
                // share cannot drift mid-pair. A positive share is attained
                // by a cut strictly inside the union, so the right bundle
                // never drains.
                while eval.value(PathInterval::new(bounds[i], bounds[i + 1])) < share {
                    bounds[i + 1] += 1;
                    moves += 1;
                    debug_assert!(bounds[i + 1] < bounds[i + 2]);
                }
                debug_assert!(moves <= (n - 1) * m);
                continue 'scan;
            }
        }
        break;
    }
    let bundles = (0..n)
        .map(|i| (bounds[i]..bounds[i + 1]).collect())
        .collect();
    Ok(Allocation::new(m, bundles)?)
}
