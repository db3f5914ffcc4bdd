//! Frozen counterexample instances with machine-checkable facts.
//!
//! Each fixture packages a small instance together with the claims that make
//! it worth keeping: an allocation separating two fairness notions, a welfare
//! optimum that misses a share bound, or the outright absence of any fair
//! connected allocation. Claims are phrased as [`ExpectedFact`] values the
//! brute-force oracle can decide, so [`verify_fixture`] re-derives the whole
//! registry from scratch instead of trusting the frozen numbers.
//!
//! Registry keys are stable lookup strings; treat them as opaque data.

use crate::allocation::{Allocation, Instance};
use crate::graph::ItemGraph;
use crate::oracle::{
    brute_leximin, brute_mnw, brute_smms, check_fairness, enumerate_connected_partitions, mu_k,
    FairnessCriterion,
};
use crate::utility::{FairnessRatio, UtilityFunction};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FixtureError {
    #[error("no fixture named {name:?}")]
    UnknownFixture { name: String },
}

/// A claim about a fixture instance that the oracle can settle.
///
/// Bundles are stored as plain vertex lists rather than [`Allocation`]s so
/// fixtures stay cheap to construct and serialize; [`verify_fixture`] builds
/// the real allocations when it runs the checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExpectedFact {
    /// `check_fairness` accepts these bundles under the criterion.
    Passes {
        bundles: Vec<Vec<usize>>,
        criterion: FairnessCriterion,
    },
    /// `check_fairness` reports at least one violation.
    Fails {
        bundles: Vec<Vec<usize>>,
        criterion: FairnessCriterion,
    },
    /// No connected allocation of the instance passes the criterion,
    /// empty bundles included.
    NoneSatisfies { criterion: FairnessCriterion },
    /// The Nash-optimal product over positive agents, together with the
    /// complete list of optimal allocations.
    NashOptima {
        product: u128,
        allocations: Vec<Vec<Vec<usize>>>,
    },
    /// The leximin-optimal ascending utility profile, together with the
    /// complete list of optimal allocations.
    LeximinOptima {
        profile: Vec<u64>,
        allocations: Vec<Vec<Vec<usize>>>,
    },
    /// Whether these bundles are among the leximin optima.
    IsLeximin {
        bundles: Vec<Vec<usize>>,
        expected: bool,
    },
    /// These bundles clear the collective share everywhere and pin the
    /// minimum possible number of agents at it.
    SmmsOptimal { bundles: Vec<Vec<usize>> },
    /// The collective share and the minimum number of pinned agents.
    SmmsCounts { share: u64, losers: usize },
    /// `mu_k` of `bundle` under agent `agent`'s utility equals `value`.
    ShareEquals {
        agent: usize,
        bundle: Vec<usize>,
        parts: usize,
        value: u64,
    },
}

#[derive(Debug)]
pub struct Fixture {
    pub name: &'static str,
    /// What the instance shows, in plain words.
    pub summary: &'static str,
    pub instance: Instance,
    pub facts: Vec<ExpectedFact>,
}

/// Outcome of re-checking one fact against the oracle.
#[derive(Debug, Clone)]
pub struct FactReport {
    pub description: String,
    pub holds: bool,
}

const NAMES: [&str; 11] = [
    "prop2.1-mms-not-pmms",
    "prop2.1-pmms-not-mms",
    "prop2.2-ef1-not-pmms",
    "prop2.3-pmms-not-ef1",
    "prop3.2-mnw-half",
    "prop3.3-leximin",
    "prop3.4-star-ef1",
    "appxA-cycle4-submodular",
    "lemma5.7-monotone-counterexample",
    "lemma6.6-pmms-smms-not-leximin",
    "lemma6.14-subadditive-star",
];

pub fn fixture_names() -> &'static [&'static str] {
    &NAMES
}

pub fn get_fixture(name: &str) -> Result<Fixture, FixtureError> {
    match name {
        "prop2.1-mms-not-pmms" => Ok(share_without_pairwise()),
        "prop2.1-pmms-not-mms" => Ok(pairwise_without_share()),
        "prop2.2-ef1-not-pmms" => Ok(removal_envy_without_pairwise()),
        "prop2.3-pmms-not-ef1" => Ok(pairwise_without_removal_envy()),
        "prop3.2-mnw-half" => Ok(nash_optimum_at_half()),
        "prop3.3-leximin" => Ok(leximin_optimum_at_half()),
        "prop3.4-star-ef1" => Ok(star_defeats_removal_envy()),
        "appxA-cycle4-submodular" => Ok(cycle_defeats_exact_pairwise()),
        "lemma5.7-monotone-counterexample" => Ok(monotone_breaks_nested_shares()),
        "lemma6.6-pmms-smms-not-leximin" => Ok(pinned_optimum_not_leximin()),
        "lemma6.14-subadditive-star" => Ok(subadditive_star_pins_three()),
        _ => Err(FixtureError::UnknownFixture { name: name.into() }),
    }
}

/// Runs every fact of `fixture` through the oracle.
///
/// Panics if the oracle itself refuses an operation; registry instances all
/// sit comfortably inside the brute-force size guards.
pub fn verify_fixture(fixture: &Fixture) -> Vec<FactReport> {
    fixture
        .facts
        .iter()
        .map(|fact| FactReport {
            description: describe_fact(fact),
            holds: fact_holds(&fixture.instance, fact),
        })
        .collect()
}

fn criterion_label(criterion: FairnessCriterion) -> String {
    match criterion {
        FairnessCriterion::Pmms(r) => format!("{r}-PMMS"),
        FairnessCriterion::Mms(r) => format!("{r}-MMS"),
        FairnessCriterion::Ef1(r) => format!("{r}-EF1"),
        FairnessCriterion::Efx => "EFX".into(),
    }
}

fn describe_fact(fact: &ExpectedFact) -> String {
    match fact {
        ExpectedFact::Passes { bundles, criterion } => {
            format!("{bundles:?} satisfies {}", criterion_label(*criterion))
        }
        ExpectedFact::Fails { bundles, criterion } => {
            format!("{bundles:?} violates {}", criterion_label(*criterion))
        }
        ExpectedFact::NoneSatisfies { criterion } => format!(
            "no connected allocation satisfies {}",
            criterion_label(*criterion)
        ),
        ExpectedFact::NashOptima {
            product,
            allocations,
        } => format!(
            "Nash optimum has product {product} over exactly {} allocations",
            allocations.len()
        ),
        ExpectedFact::LeximinOptima {
            profile,
            allocations,
        } => format!(
            "leximin optimum has profile {profile:?} over exactly {} allocations",
            allocations.len()
        ),
        ExpectedFact::IsLeximin { bundles, expected } => {
            if *expected {
                format!("{bundles:?} is leximin-optimal")
            } else {
                format!("{bundles:?} is not leximin-optimal")
            }
        }
        ExpectedFact::SmmsOptimal { bundles } => {
            format!("{bundles:?} reaches the collective share with the fewest pinned agents")
        }
        ExpectedFact::SmmsCounts { share, losers } => {
            format!("collective share is {share} and at best {losers} agents sit on it")
        }
        ExpectedFact::ShareEquals {
            agent,
            bundle,
            parts,
            value,
        } => format!("agent {agent}'s {parts}-part share of {bundle:?} is {value}"),
    }
}

fn build_allocation(instance: &Instance, bundles: &[Vec<usize>]) -> Allocation {
    Allocation::new(instance.graph().n_vertices(), bundles.to_vec())
        .expect("fixture bundles form a valid allocation")
}

fn sorted_allocations(instance: &Instance, lists: &[Vec<Vec<usize>>]) -> Vec<Allocation> {
    let mut out: Vec<Allocation> = lists
        .iter()
        .map(|bundles| build_allocation(instance, bundles))
        .collect();
    out.sort();
    out
}

/// Every connected allocation of the full vertex set, empty bundles and all
/// agent orders included.
fn all_connected_allocations(instance: &Instance) -> Vec<Allocation> {
    let graph = instance.graph();
    let verts: Vec<usize> = (0..graph.n_vertices()).collect();
    let n = instance.n_agents();
    let partitions = enumerate_connected_partitions(graph, &verts, n, true)
        .expect("fixture instances stay inside the enumeration guard");
    let mut out = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    for parts in &partitions {
        permute_into(&mut order, 0, &mut |perm| {
            let bundles: Vec<Vec<usize>> = perm.iter().map(|&slot| parts[slot].clone()).collect();
            out.push(build_allocation(instance, &bundles));
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

fn fact_holds(instance: &Instance, fact: &ExpectedFact) -> bool {
    match fact {
        ExpectedFact::Passes { bundles, criterion } => {
            let alloc = build_allocation(instance, bundles);
            check_fairness(instance, &alloc, *criterion)
                .expect("fixture allocations are checkable")
                .passes()
        }
        ExpectedFact::Fails { bundles, criterion } => {
            let alloc = build_allocation(instance, bundles);
            !check_fairness(instance, &alloc, *criterion)
                .expect("fixture allocations are checkable")
                .passes()
        }
        ExpectedFact::NoneSatisfies { criterion } => {
            all_connected_allocations(instance).iter().all(|alloc| {
                !check_fairness(instance, alloc, *criterion)
                    .expect("fixture allocations are checkable")
                    .passes()
            })
        }
        ExpectedFact::NashOptima {
            product,
            allocations,
        } => {
            let result = brute_mnw(instance).expect("fixture fits the brute-force guard");
            result.nash_product == *product
                && result.optima == sorted_allocations(instance, allocations)
        }
        ExpectedFact::LeximinOptima {
            profile,
            allocations,
        } => {
            let result = brute_leximin(instance).expect("fixture fits the brute-force guard");
            result.sorted_utilities == *profile
                && result.optima == sorted_allocations(instance, allocations)
        }
        ExpectedFact::IsLeximin { bundles, expected } => {
            let result = brute_leximin(instance).expect("fixture fits the brute-force guard");
            result.optima.contains(&build_allocation(instance, bundles)) == *expected
        }
        ExpectedFact::SmmsOptimal { bundles } => {
            let result = brute_smms(instance).expect("fixture fits the brute-force guard");
            result.optima.contains(&build_allocation(instance, bundles))
        }
        ExpectedFact::SmmsCounts { share, losers } => {
            let result = brute_smms(instance).expect("fixture fits the brute-force guard");
            result.mms == *share && result.min_losers == *losers
        }
        ExpectedFact::ShareEquals {
            agent,
            bundle,
            parts,
            value,
        } => {
            let u = &instance.agents()[*agent];
            mu_k(u, instance.graph(), bundle, *parts)
                .expect("fixture share queries stay inside the guard")
                == *value
        }
    }
}

fn path(n: usize) -> ItemGraph {
    let edges: Vec<(usize, usize)> = (1..n).map(|v| (v - 1, v)).collect();
    ItemGraph::new(n, &edges).expect("a path is a valid graph")
}

fn cycle(n: usize) -> ItemGraph {
    let edges: Vec<(usize, usize)> = (0..n).map(|v| (v, (v + 1) % n)).collect();
    ItemGraph::new(n, &edges).expect("a cycle is a valid graph")
}

fn instance(graph: ItemGraph, agents: Vec<UtilityFunction>) -> Instance {
    Instance::new(graph, agents).expect("fixture instances validate")
}

fn identical_additive(values: &[u64], n: usize) -> Vec<UtilityFunction> {
    vec![UtilityFunction::additive(values.to_vec()); n]
}

fn mask_table(n: usize, value_of: impl Fn(u32) -> u64) -> Vec<u64> {
    (0..1u32 << n).map(value_of).collect()
}

fn share_without_pairwise() -> Fixture {
    let instance = instance(path(4), identical_additive(&[1, 3, 3, 1], 3));
    let split = vec![vec![0], vec![3], vec![1, 2]];
    Fixture {
        name: "prop2.1-mms-not-pmms",
        // The two endpoint singletons are never compared with each other:
        // both are nonempty and their bundles are not adjacent. The failing
        // comparison is the left endpoint against the adjacent middle pair.
        summary: "a three-agent path split where everyone clears the whole-graph share, yet \
                  the left endpoint falls below half the pairwise share of its union with \
                  the middle pair",
        facts: vec![
            ExpectedFact::Passes {
                bundles: split.clone(),
                criterion: FairnessCriterion::Mms(FairnessRatio::ONE),
            },
            ExpectedFact::Fails {
                bundles: split,
                criterion: FairnessCriterion::Pmms(FairnessRatio::HALF),
            },
        ],
        instance,
    }
}

fn pairwise_without_share() -> Fixture {
    let instance = instance(path(4), identical_additive(&[1, 3, 3, 3], 3));
    let split = vec![vec![0], vec![1], vec![2, 3]];
    Fixture {
        name: "prop2.1-pmms-not-mms",
        summary: "a three-agent path split satisfying every pairwise comparison exactly, \
                  while the left endpoint holds under half the whole-graph share",
        facts: vec![
            ExpectedFact::Passes {
                bundles: split.clone(),
                criterion: FairnessCriterion::Pmms(FairnessRatio::ONE),
            },
            ExpectedFact::Fails {
                bundles: split,
                criterion: FairnessCriterion::Mms(FairnessRatio::HALF),
            },
        ],
        instance,
    }
}

fn removal_envy_without_pairwise() -> Fixture {
    let instance = instance(path(3), identical_additive(&[1, 1, 10], 2));
    let split = vec![vec![0], vec![1, 2]];
    Fixture {
        name: "prop2.2-ef1-not-pmms",
        summary: "a two-agent path split that is envy-free up to one good but misses the \
                  exact pairwise share",
        facts: vec![
            ExpectedFact::Passes {
                bundles: split.clone(),
                criterion: FairnessCriterion::Ef1(FairnessRatio::ONE),
            },
            ExpectedFact::Fails {
                bundles: split,
                criterion: FairnessCriterion::Pmms(FairnessRatio::ONE),
            },
        ],
        instance,
    }
}

fn pairwise_without_removal_envy() -> Fixture {
    let instance = instance(ItemGraph::star(3), identical_additive(&[1, 1, 1, 1], 2));
    let split = vec![vec![1], vec![0, 2, 3]];
    Fixture {
        name: "prop2.3-pmms-not-ef1",
        summary: "a two-agent star split meeting the exact pairwise share while the leaf \
                  agent still envies after one removal",
        facts: vec![
            ExpectedFact::Passes {
                bundles: split.clone(),
                criterion: FairnessCriterion::Pmms(FairnessRatio::ONE),
            },
            ExpectedFact::Fails {
                bundles: split,
                criterion: FairnessCriterion::Ef1(FairnessRatio::ONE),
            },
        ],
        instance,
    }
}

fn nash_optimum_at_half() -> Fixture {
    let u1 = UtilityFunction::additive(vec![1, 0, 1, 1, 1, 0]);
    let u2 = UtilityFunction::additive(vec![0, 1, 1, 1, 0, 1]);
    let instance = instance(path(6), vec![u1, u2]);
    let skewed = vec![vec![0], vec![1, 2, 3, 4, 5]];
    Fixture {
        name: "prop3.2-mnw-half",
        summary: "a binary-valuation path where one Nash-optimal allocation hands an agent \
                  exactly half its pairwise share, and nothing above half",
        facts: vec![
            ExpectedFact::NashOptima {
                product: 4,
                allocations: vec![
                    vec![vec![0, 1, 2], vec![3, 4, 5]],
                    vec![vec![3, 4, 5], vec![0, 1, 2]],
                    vec![vec![0], vec![1, 2, 3, 4, 5]],
                    vec![vec![0, 1, 2, 3, 4], vec![5]],
                ],
            },
            ExpectedFact::Passes {
                bundles: skewed.clone(),
                criterion: FairnessCriterion::Pmms(FairnessRatio::HALF),
            },
            ExpectedFact::Fails {
                bundles: skewed,
                criterion: FairnessCriterion::Pmms(FairnessRatio::THREE_QUARTERS),
            },
        ],
        instance,
    }
}

fn leximin_optimum_at_half() -> Fixture {
    let u1 = UtilityFunction::additive(vec![1; 10]);
    let u2 = UtilityFunction::additive(vec![0, 0, 1, 0, 0, 0, 0, 0, 0, 1]);
    let instance = instance(path(10), vec![u1, u2]);
    let optimum = vec![vec![0, 1], vec![2, 3, 4, 5, 6, 7, 8, 9]];
    Fixture {
        name: "prop3.3-leximin",
        summary: "a ten-vertex path whose unique leximin optimum leaves the uniform agent \
                  below half its pairwise share",
        facts: vec![
            ExpectedFact::LeximinOptima {
                profile: vec![2, 2],
                allocations: vec![optimum.clone()],
            },
            ExpectedFact::Fails {
                bundles: optimum,
                criterion: FairnessCriterion::Pmms(FairnessRatio::HALF),
            },
        ],
        instance,
    }
}

fn star_defeats_removal_envy() -> Fixture {
    let instance = instance(ItemGraph::star(5), identical_additive(&[1; 6], 2));
    Fixture {
        name: "prop3.4-star-ef1",
        summary: "a five-leaf star with unit values where no connected two-agent allocation \
                  is envy-free up to one good, even at ratio one half",
        facts: vec![ExpectedFact::NoneSatisfies {
            criterion: FairnessCriterion::Ef1(FairnessRatio::HALF),
        }],
        instance,
    }
}

fn cycle_defeats_exact_pairwise() -> Fixture {
    // Submodular, monotone, binary marginals: value 2 exactly on supersets
    // of one of two opposite edges, 1 on every other nonempty set.
    let blocks_a = mask_table(4, |m| {
        if m == 0 {
            0
        } else if m & 0b0011 == 0b0011 || m & 0b1100 == 0b1100 {
            2
        } else {
            1
        }
    });
    let blocks_b = mask_table(4, |m| {
        if m == 0 {
            0
        } else if m & 0b1001 == 0b1001 || m & 0b0110 == 0b0110 {
            2
        } else {
            1
        }
    });
    let u1 = UtilityFunction::tabulated(4, blocks_a, true).expect("table is monotone");
    let u2 = UtilityFunction::tabulated(4, blocks_b, true).expect("table is monotone");
    let instance = instance(cycle(4), vec![u1, u2]);
    Fixture {
        name: "appxA-cycle4-submodular",
        summary: "a four-cycle with crossed submodular valuations where both agents' \
                  pairwise shares are 2, yet no connected allocation reaches them",
        facts: vec![
            ExpectedFact::ShareEquals {
                agent: 0,
                bundle: vec![0, 1, 2, 3],
                parts: 2,
                value: 2,
            },
            ExpectedFact::ShareEquals {
                agent: 1,
                bundle: vec![0, 1, 2, 3],
                parts: 2,
                value: 2,
            },
            ExpectedFact::NoneSatisfies {
                criterion: FairnessCriterion::Pmms(FairnessRatio::ONE),
            },
        ],
        instance,
    }
}

fn monotone_breaks_nested_shares() -> Fixture {
    // Worth 1 exactly when covering the left three vertices or the right two.
    let table = mask_table(5, |m| {
        u64::from(m & 0b00111 == 0b00111 || m & 0b11000 == 0b11000)
    });
    let u = UtilityFunction::tabulated(5, table, true).expect("table is monotone");
    let instance = instance(path(5), vec![u.clone(), u]);
    Fixture {
        name: "lemma5.7-monotone-counterexample",
        summary: "a monotone valuation on a path where widening a zero-share subpath to the \
                  full path raises the pairwise share, so the widened left piece no longer \
                  clears it",
        facts: vec![
            ExpectedFact::ShareEquals {
                agent: 0,
                bundle: vec![1, 2, 3, 4],
                parts: 2,
                value: 0,
            },
            ExpectedFact::ShareEquals {
                agent: 0,
                bundle: vec![0, 1, 2, 3, 4],
                parts: 2,
                value: 1,
            },
            ExpectedFact::Fails {
                bundles: vec![vec![0, 1], vec![2, 3, 4]],
                criterion: FairnessCriterion::Pmms(FairnessRatio::ONE),
            },
        ],
        instance,
    }
}

fn pinned_optimum_not_leximin() -> Fixture {
    let instance = instance(path(5), identical_additive(&[1, 3, 1, 1, 1], 3));
    let pinned = vec![vec![0, 1], vec![2], vec![3, 4]];
    let leximin = vec![vec![0], vec![1], vec![2, 3, 4]];
    Fixture {
        name: "lemma6.6-pmms-smms-not-leximin",
        summary: "two path splits that both meet the exact pairwise share and pin the \
                  fewest agents at the collective share, while only one is leximin-optimal",
        facts: vec![
            ExpectedFact::Passes {
                bundles: pinned.clone(),
                criterion: FairnessCriterion::Pmms(FairnessRatio::ONE),
            },
            ExpectedFact::SmmsOptimal {
                bundles: pinned.clone(),
            },
            ExpectedFact::IsLeximin {
                bundles: pinned,
                expected: false,
            },
            ExpectedFact::Passes {
                bundles: leximin.clone(),
                criterion: FairnessCriterion::Pmms(FairnessRatio::ONE),
            },
            ExpectedFact::SmmsOptimal {
                bundles: leximin.clone(),
            },
            ExpectedFact::IsLeximin {
                bundles: leximin,
                expected: true,
            },
        ],
        instance,
    }
}

fn subadditive_star_pins_three() -> Fixture {
    // Hidden bundle: the centre with leaves 1..=3. Value 2 on that exact set
    // or any set of five or more vertices, 1 on other nonempty sets.
    let table = mask_table(7, |m| {
        if m == 0 {
            0
        } else if m.count_ones() > 4 || m == 0b0001111 {
            2
        } else {
            1
        }
    });
    let u = UtilityFunction::tabulated(7, table, true).expect("table is monotone");
    let instance = instance(ItemGraph::star(6), vec![u.clone(); 4]);
    let best = vec![vec![0, 1, 2, 3], vec![4], vec![5], vec![6]];
    Fixture {
        name: "lemma6.14-subadditive-star",
        summary: "four agents with an identical subadditive star valuation where every \
                  share-reaching allocation pins three agents, and only the hidden \
                  centre bundle lifts the fourth",
        facts: vec![
            ExpectedFact::SmmsCounts {
                share: 1,
                losers: 3,
            },
            ExpectedFact::SmmsOptimal {
                bundles: best.clone(),
            },
            ExpectedFact::Passes {
                bundles: best,
                criterion: FairnessCriterion::Pmms(FairnessRatio::ONE),
            },
        ],
        instance,
    }
}
