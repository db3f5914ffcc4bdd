//! Utility functions over bundles of items, and exact fairness thresholds.

use thiserror::Error;

/// Tabulated utilities enumerate all subsets, so their ground set is capped.
pub const MAX_TABULATED_VERTICES: usize = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum UtilityError {
    #[error("tabulated utility supports at most {max} vertices, got {got}", max = MAX_TABULATED_VERTICES)]
    TableTooLarge { got: usize },
    #[error("tabulated utility needs {expected} entries for {n} vertices, got {got}")]
    TableSizeMismatch {
        n: usize,
        expected: usize,
        got: usize,
    },
    #[error("table entry for the empty set must be 0, got {0}")]
    NonZeroEmptySet(u64),
    #[error("utility is not monotone: dropping item {item} from set {set:#b} raises the value")]
    NotMonotone { set: u64, item: usize },
    #[error("vertex {vertex} out of range for a utility over {n} items")]
    VertexOutOfRange { vertex: usize, n: usize },
}

/// Valuation of item bundles. Values are non-negative integers throughout,
/// so all comparisons downstream can be exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UtilityFunction {
    /// One value per item; a bundle is worth the sum of its items.
    Additive(Vec<u64>),
    /// One value per subset, indexed by bitmask. `monotone` records that the
    /// table was checked to be monotone under set inclusion.
    Tabulated {
        n: usize,
        table: Vec<u64>,
        monotone: bool,
    },
}

impl UtilityFunction {
    pub fn additive(values: Vec<u64>) -> Self {
        UtilityFunction::Additive(values)
    }

    /// Builds a tabulated utility from a dense table of `2^n` entries.
    /// When `require_monotone` is set, verifies monotonicity and records it.
    pub fn tabulated(
        n: usize,
        table: Vec<u64>,
        require_monotone: bool,
    ) -> Result<Self, UtilityError> {
        if n > MAX_TABULATED_VERTICES {
            return Err(UtilityError::TableTooLarge { got: n });
        }
        if table.len() != 1usize << n {
            return Err(UtilityError::TableSizeMismatch {
                n,
                expected: 1usize << n,
                got: table.len(),
            });
        }
        if table[0] != 0 {
            return Err(UtilityError::NonZeroEmptySet(table[0]));
        }
        if require_monotone {
            for set in 1u64..(1 << n) {
                for item in 0..n {
                    if set >> item & 1 == 1
                        && table[set as usize] < table[(set & !(1 << item)) as usize]
                    {
                        return Err(UtilityError::NotMonotone { set, item });
                    }
                }
            }
        }
        Ok(UtilityFunction::Tabulated {
            n,
            table,
            monotone: require_monotone,
        })
    }

    /// Number of items the function is defined over.
    pub fn n_items(&self) -> usize {
        match self {
            UtilityFunction::Additive(values) => values.len(),
            UtilityFunction::Tabulated { n, .. } => *n,
        }
    }

    pub fn is_additive(&self) -> bool {
        matches!(self, UtilityFunction::Additive(_))
    }

    /// Monotone under set inclusion. Additive functions always are.
    pub fn is_monotone(&self) -> bool {
        match self {
            UtilityFunction::Additive(_) => true,
            UtilityFunction::Tabulated { monotone, .. } => *monotone,
        }
    }

    /// Value of a bundle given as a vertex list (duplicates not allowed).
    pub fn value(&self, bundle: &[usize]) -> u64 {
        match self {
            UtilityFunction::Additive(values) => bundle.iter().map(|&v| values[v]).sum(),
            UtilityFunction::Tabulated { table, .. } => {
                let mut mask = 0u64;
                for &v in bundle {
                    mask |= 1 << v;
                }
                table[mask as usize]
            }
        }
    }

    /// Value of a bundle given as a bitmask over the full ground set.
    pub fn value_mask(&self, mask: u64) -> u64 {
        match self {
            UtilityFunction::Additive(values) => {
                let mut total = 0u64;
                let mut m = mask;
                while m != 0 {
                    let v = m.trailing_zeros() as usize;
                    total += values[v];
                    m &= m - 1;
                }
                total
            }
            UtilityFunction::Tabulated { table, .. } => table[mask as usize],
        }
    }

    pub fn total(&self) -> u64 {
        match self {
            UtilityFunction::Additive(values) => values.iter().sum(),
            UtilityFunction::Tabulated { n, table, .. } => table[(1usize << n) - 1],
        }
    }

    /// Restriction of an additive function to a sorted vertex subset,
    /// reindexed to `0..verts.len()`. Panics on tabulated functions; callers
    /// that restrict always operate on additive instances.
    pub fn restrict_additive(&self, verts: &[usize]) -> UtilityFunction {
        match self {
            UtilityFunction::Additive(values) => {
                UtilityFunction::Additive(verts.iter().map(|&v| values[v]).collect())
            }
            UtilityFunction::Tabulated { .. } => {
                panic!("restrict_additive is only defined for additive utilities")
            }
        }
    }

    pub fn values(&self) -> Option<&[u64]> {
        match self {
            UtilityFunction::Additive(values) => Some(values),
            UtilityFunction::Tabulated { .. } => None,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RatioError {
    #[error("fairness ratio must have positive numerator and denominator")]
    Zero,
    #[error("fairness ratio {num}/{den} exceeds 1")]
    AboveOne { num: u64, den: u64 },
}

/// Approximation factor `num/den` with `0 < num/den <= 1`.
/// Comparisons are by cross-multiplication, never by floating point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FairnessRatio {
    num: u64,
    den: u64,
}

impl FairnessRatio {
    pub const ONE: FairnessRatio = FairnessRatio { num: 1, den: 1 };
    pub const HALF: FairnessRatio = FairnessRatio { num: 1, den: 2 };
    pub const THREE_QUARTERS: FairnessRatio = FairnessRatio { num: 3, den: 4 };

    pub fn new(num: u64, den: u64) -> Result<Self, RatioError> {
        if num == 0 || den == 0 {
            return Err(RatioError::Zero);
        }
        if num > den {
            return Err(RatioError::AboveOne { num, den });
        }
        Ok(FairnessRatio { num, den })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    /// Whether `value >= (num/den) * threshold`, exactly.
    pub fn satisfied_by(&self, value: u64, threshold: u64) -> bool {
        u128::from(self.den) * u128::from(value) >= u128::from(self.num) * u128::from(threshold)
    }

    /// `den * value`, the attained side of the scaled comparison.
    pub fn scale_attained(&self, value: u64) -> u128 {
        u128::from(self.den) * u128::from(value)
    }

    /// `num * threshold`, the required side of the scaled comparison.
    pub fn scale_required(&self, threshold: u64) -> u128 {
        u128::from(self.num) * u128::from(threshold)
    }
}

impl std::fmt::Display for FairnessRatio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}
