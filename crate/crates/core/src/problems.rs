//! Problem instances with brute-force ground truth.
//!
//! Boolean problems (search, majority, parity) store `x` as a 0/1 table;
//! collision and element distinctness store a function table `f: [N] → [N]`.
//! The `answer` flag is the yes/no ground truth:
//!
//! | kind | `answer == true` means |
//! |---|---|
//! | search | some `x(i) = 1` |
//! | majority | `|x| ≥ N/2` |
//! | parity | `|x|` is odd |
//! | collision | `f` is 2-to-1 |
//! | element distinctness | `f` has a repeated value |

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Search,
    Majority,
    Parity,
    Collision,
    #[serde(alias = "ed")]
    #[value(name = "element_distinctness", alias = "ed", alias = "element-distinctness")]
    ElementDistinctness,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 5] = [
        ProblemKind::Search,
        ProblemKind::Majority,
        ProblemKind::Parity,
        ProblemKind::Collision,
        ProblemKind::ElementDistinctness,
    ];

    pub fn is_boolean(self) -> bool {
        matches!(self, ProblemKind::Search | ProblemKind::Majority | ProblemKind::Parity)
    }

    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Search => "search",
            ProblemKind::Majority => "majority",
            ProblemKind::Parity => "parity",
            ProblemKind::Collision => "collision",
            ProblemKind::ElementDistinctness => "element_distinctness",
        }
    }
}

impl std::fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub kind: ProblemKind,
    #[serde(rename = "N")]
    pub n: usize,
    pub table: Vec<usize>,
    pub answer: bool,
}

/// Optional knobs for [`generate_instance`]. Unset fields are drawn at random.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct InstanceParams {
    /// Number of marked items (search).
    pub marked: Option<usize>,
    /// Hamming weight `s` (majority, parity).
    pub weight: Option<usize>,
    /// Preimage size `k ∈ {1, 2}` (collision).
    pub k: Option<usize>,
    /// Whether the table is injective (element distinctness).
    pub distinct: Option<bool>,
}

/// `⌈log₂ n⌉`, with `bits_for(1) = 0`.
pub fn bits_for(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

impl ProblemInstance {
    /// Builds an instance from a table, computing the answer by brute force.
    pub fn from_table(kind: ProblemKind, table: Vec<usize>) -> Result<Self> {
        let n = table.len();
        if n < 2 {
            return Err(Error::InvalidParameters("N must be at least 2".into()));
        }
        if kind.is_boolean() && table.iter().any(|&v| v > 1) {
            return Err(Error::InvalidParameters(format!("{kind} tables are 0/1")));
        }
        if !kind.is_boolean() && table.iter().any(|&v| v >= n) {
            return Err(Error::InvalidParameters("function values must lie in [N]".into()));
        }
        let answer = evaluate(kind, &table)?;
        Ok(ProblemInstance {
            kind,
            n,
            table,
            answer,
        })
    }

    pub fn index_bits(&self) -> usize {
        bits_for(self.n)
    }

    /// Width of the value register an XOR oracle writes into.
    pub fn value_bits(&self) -> usize {
        if self.kind.is_boolean() {
            1
        } else {
            bits_for(self.n)
        }
    }

    pub fn value(&self, i: usize) -> usize {
        self.table[i]
    }

    /// True when the stored answer agrees with a fresh brute-force evaluation.
    pub fn is_consistent(&self) -> bool {
        self.table.len() == self.n && evaluate(self.kind, &self.table).map(|a| a == self.answer).unwrap_or(false)
    }
}

/// Brute-force ground truth for a table.
pub fn evaluate(kind: ProblemKind, table: &[usize]) -> Result<bool> {
    let n = table.len();
    let ones = table.iter().filter(|&&v| v == 1).count();
    Ok(match kind {
        ProblemKind::Search => ones > 0,
        ProblemKind::Majority => 2 * ones >= n,
        ProblemKind::Parity => ones % 2 == 1,
        ProblemKind::Collision => {
            let mut counts = vec![0usize; n];
            for &v in table {
                counts[v] += 1;
            }
            let used: Vec<usize> = counts.into_iter().filter(|&c| c > 0).collect();
            if used.iter().all(|&c| c == 1) {
                false
            } else if used.iter().all(|&c| c == 2) {
                true
            } else {
                return Err(Error::InvalidParameters(
                    "collision tables must be 1-to-1 or 2-to-1".into(),
                ));
            }
        }
        ProblemKind::ElementDistinctness => {
            let mut seen = vec![false; n];
            let mut repeated = false;
            for &v in table {
                repeated |= std::mem::replace(&mut seen[v], true);
            }
            repeated
        }
    })
}

/// Draws a uniformly random instance from the family picked out by `params`.
pub fn generate_instance<R: Rng + ?Sized>(
    kind: ProblemKind,
    n: usize,
    params: &InstanceParams,
    rng: &mut R,
) -> Result<ProblemInstance> {
    if n < 2 {
        return Err(Error::InvalidParameters("N must be at least 2".into()));
    }
    if matches!(kind, ProblemKind::Majority | ProblemKind::Parity | ProblemKind::Collision) && !n.is_power_of_two() {
        return Err(Error::InvalidParameters(format!("{kind} needs N a power of two, got {n}")));
    }
    let table = match kind {
        ProblemKind::Search => {
            let marked = params.marked.unwrap_or(1);
            ones_table(n, marked, rng)?
        }
        ProblemKind::Majority | ProblemKind::Parity => {
            let weight = params.weight.unwrap_or_else(|| rng.random_range(0..=n));
            ones_table(n, weight, rng)?
        }
        ProblemKind::Collision => {
            let k = params.k.unwrap_or_else(|| rng.random_range(1..=2));
            match k {
                1 => permutation(n, rng),
                2 => {
                    let mut domain: Vec<usize> = (0..n).collect();
                    domain.shuffle(rng);
                    let mut images: Vec<usize> = (0..n).collect();
                    images.shuffle(rng);
                    let mut table = vec![0; n];
                    for (pair, image) in domain.chunks(2).zip(images) {
                        table[pair[0]] = image;
                        table[pair[1]] = image;
                    }
                    table
                }
                _ => return Err(Error::InvalidParameters(format!("collision k must be 1 or 2, got {k}"))),
            }
        }
        ProblemKind::ElementDistinctness => {
            let distinct = params.distinct.unwrap_or_else(|| rng.random_bool(0.5));
            let mut table = permutation(n, rng);
            if !distinct {
                // Exactly one colliding pair; the lost value is the overwritten one.
                let i = rng.random_range(0..n);
                let j = *(0..n).filter(|&j| j != i).collect::<Vec<_>>().choose(rng).expect("n ≥ 2");
                table[j] = table[i];
            }
            table
        }
    };
    ProblemInstance::from_table(kind, table)
}

fn ones_table<R: Rng + ?Sized>(n: usize, ones: usize, rng: &mut R) -> Result<Vec<usize>> {
    if ones > n {
        return Err(Error::InvalidParameters(format!("{ones} ones do not fit N = {n}")));
    }
    let mut table = vec![0; n];
    for i in rand::seq::index::sample(rng, n, ones) {
        table[i] = 1;
    }
    Ok(table)
}

fn permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut t: Vec<usize> = (0..n).collect();
    t.shuffle(rng);
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn collision_two_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let inst = generate_instance(
            ProblemKind::Collision,
            8,
            &InstanceParams {
                k: Some(2),
                ..Default::default()
            },
            &mut rng,
        )
        .unwrap();
        let mut counts = [0; 8];
        for &v in &inst.table {
            counts[v] += 1;
        }
        assert!(counts.iter().all(|&c| c == 0 || c == 2));
        assert!(inst.answer);
    }

    #[test]
    fn empty_search_and_majority_threshold() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let none = generate_instance(
            ProblemKind::Search,
            16,
            &InstanceParams {
                marked: Some(0),
                ..Default::default()
            },
            &mut rng,
        )
        .unwrap();
        assert!(none.table.iter().all(|&v| v == 0));
        assert!(!none.answer);
        let maj = generate_instance(
            ProblemKind::Majority,
            16,
            &InstanceParams {
                weight: Some(9),
                ..Default::default()
            },
            &mut rng,
        )
        .unwrap();
        assert_eq!(maj.table.iter().sum::<usize>(), 9);
        assert!(maj.answer);
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = InstanceParams::default();
        assert!(generate_instance(ProblemKind::Majority, 12, &p, &mut rng).is_err());
        assert!(generate_instance(ProblemKind::Search, 1, &p, &mut rng).is_err());
        let k3 = InstanceParams {
            k: Some(3),
            ..Default::default()
        };
        assert!(generate_instance(ProblemKind::Collision, 8, &k3, &mut rng).is_err());
        assert!(ProblemInstance::from_table(ProblemKind::Collision, vec![0, 0, 0, 1]).is_err());
    }

    #[test]
    fn ground_truth_matches_independent_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for kind in ProblemKind::ALL {
            for _ in 0..1000 {
                let inst = generate_instance(kind, 16, &InstanceParams::default(), &mut rng).unwrap();
                let expected = match kind {
                    ProblemKind::Search => inst.table.contains(&1),
                    ProblemKind::Majority => inst.table.iter().sum::<usize>() * 2 >= 16,
                    ProblemKind::Parity => inst.table.iter().sum::<usize>() % 2 == 1,
                    ProblemKind::Collision | ProblemKind::ElementDistinctness => {
                        let mut sorted = inst.table.clone();
                        sorted.sort_unstable();
                        sorted.windows(2).any(|w| w[0] == w[1])
                    }
                };
                assert_eq!(inst.answer, expected, "{inst:?}");
            }
        }
    }

    #[test]
    fn bit_widths() {
        assert_eq!(bits_for(2), 1);
        assert_eq!(bits_for(8), 3);
        assert_eq!(bits_for(27), 5);
        assert_eq!(bits_for(125), 7);
    }
}
