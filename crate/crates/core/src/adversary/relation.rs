//! Adversary relations `R ⊆ X × Y` and their degrees.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::ProblemKind;

/// Largest number of candidate tables [`build_relation`] will enumerate.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 1 << 20;

/// Which relation to build for a problem.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    /// The standard relation: Hamming-distance-one pairs across the
    /// boundary, with element distinctness restricted to the pairing
    /// `y(i) = x(i ⊕ 1)`.
    #[default]
    Canonical,
    /// Element distinctness with every single-position change that makes an
    /// injective table almost injective.
    Unrestricted,
}

/// `m, m′`: minimum relation degree over X and Y. `l, l′`: maximum number of
/// partners differing at one index, over X and Y.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationDegrees {
    pub m: usize,
    pub m_prime: usize,
    pub l: usize,
    pub l_prime: usize,
}

/// `X`, `Y` and `R` enumerated in full.
///
/// Majority uses the strict threshold `|x| > N/2` so that `|x| = N/2` lies in
/// `X`; parity uses `|x|` odd.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationInstance {
    pub kind: ProblemKind,
    #[serde(rename = "N")]
    pub n: usize,
    pub construction: Construction,
    pub x: Vec<Vec<usize>>,
    pub y: Vec<Vec<usize>>,
    /// `(x index, y index)` for every related pair.
    pub pairs: Vec<(usize, usize)>,
    pub degrees: RelationDegrees,
}

impl RelationInstance {
    /// Pair ids involving `x[i]`.
    pub fn pairs_of_x(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.pairs.iter().enumerate().filter(move |(_, p)| p.0 == i).map(|(k, _)| k)
    }

    /// Pair ids involving `y[j]`.
    pub fn pairs_of_y(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        self.pairs.iter().enumerate().filter(move |(_, p)| p.1 == j).map(|(k, _)| k)
    }

    /// Indices where the two tables of pair `k` differ.
    pub fn differing(&self, k: usize) -> Vec<usize> {
        let (a, b) = self.pairs[k];
        (0..self.n).filter(|&i| self.x[a][i] != self.y[b][i]).collect()
    }
}

/// Membership and relation predicates for one (problem, construction).
#[derive(Clone, Copy, Debug)]
struct Family {
    kind: ProblemKind,
    n: usize,
    construction: Construction,
}

impl Family {
    fn new(kind: ProblemKind, n: usize, construction: Construction) -> Result<Self> {
        let bad = |why: &str| Err(Error::InvalidParameters(format!("{kind} relation at N = {n}: {why}")));
        match kind {
            ProblemKind::Search if n < 1 => return bad("needs N ≥ 1"),
            ProblemKind::Majority if n < 2 || n % 2 != 0 => return bad("needs even N"),
            ProblemKind::Parity if n < 4 || n % 4 != 0 => return bad("needs N divisible by 4"),
            ProblemKind::ElementDistinctness if n < 2 || n % 2 != 0 => return bad("needs even N"),
            ProblemKind::Collision => return bad("no adversary relation is defined"),
            _ => {}
        }
        if construction == Construction::Unrestricted && kind != ProblemKind::ElementDistinctness {
            return bad("the unrestricted construction is for element distinctness");
        }
        Ok(Family { kind, n, construction })
    }

    fn alphabet(&self) -> usize {
        if self.kind.is_boolean() {
            2
        } else {
            self.n
        }
    }

    fn weight(t: &[usize]) -> usize {
        t.iter().filter(|&&v| v == 1).count()
    }

    /// The single colliding pair of an almost-injective table.
    fn collision(&self, t: &[usize]) -> Option<(usize, usize)> {
        let mut first = vec![usize::MAX; self.n];
        let mut pair = None;
        for (i, &v) in t.iter().enumerate() {
            if first[v] == usize::MAX {
                first[v] = i;
            } else if pair.is_some() || t.iter().filter(|&&u| u == v).count() > 2 {
                return None;
            } else {
                pair = Some((first[v], i));
            }
        }
        pair
    }

    fn in_x(&self, t: &[usize]) -> bool {
        match self.kind {
            ProblemKind::Search => t.iter().all(|&v| v == 0),
            ProblemKind::Majority | ProblemKind::Parity => Self::weight(t) == self.n / 2,
            _ => {
                let mut seen = vec![false; self.n];
                t.iter().all(|&v| !std::mem::replace(&mut seen[v], true))
            }
        }
    }

    fn in_y(&self, t: &[usize]) -> bool {
        match self.kind {
            ProblemKind::Search => Self::weight(t) == 1,
            ProblemKind::Majority | ProblemKind::Parity => Self::weight(t) == self.n / 2 + 1,
            _ => match (self.collision(t), self.construction) {
                (Some((a, b)), Construction::Canonical) => a ^ 1 == b,
                (Some(_), Construction::Unrestricted) => true,
                (None, _) => false,
            },
        }
    }

    /// Both tables are assumed to be members of their sides.
    fn related(&self, x: &[usize], y: &[usize]) -> bool {
        let diff: Vec<usize> = (0..self.n).filter(|&i| x[i] != y[i]).collect();
        match (self.kind, self.construction, diff.as_slice()) {
            (ProblemKind::ElementDistinctness, Construction::Canonical, &[i]) => y[i] == x[i ^ 1],
            (_, _, [_]) => true,
            _ => false,
        }
    }

    /// Partners of `t` (a member of X when `from_x`) among single-position
    /// changes, with the index at which each differs.
    fn neighbors(&self, t: &[usize], from_x: bool) -> Vec<(Vec<usize>, usize)> {
        let mut out = Vec::new();
        let mut c = t.to_vec();
        for i in 0..self.n {
            for a in 0..self.alphabet() {
                if a == t[i] {
                    continue;
                }
                c[i] = a;
                let ok = if from_x {
                    self.in_y(&c) && self.related(t, &c)
                } else {
                    self.in_x(&c) && self.related(&c, t)
                };
                if ok {
                    out.push((c.clone(), i));
                }
                c[i] = t[i];
            }
        }
        out
    }

    /// `(degree, max per-index degree)` of one table.
    fn degree(&self, t: &[usize], from_x: bool) -> (usize, usize) {
        let nb = self.neighbors(t, from_x);
        let mut per = vec![0; self.n];
        for (_, i) in &nb {
            per[*i] += 1;
        }
        (nb.len(), per.into_iter().max().unwrap_or(0))
    }

    fn sample_x<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        match self.kind {
            ProblemKind::Search => vec![0; self.n],
            ProblemKind::Majority | ProblemKind::Parity => self.random_weight(self.n / 2, rng),
            _ => {
                let mut t: Vec<usize> = (0..self.n).collect();
                t.shuffle(rng);
                t
            }
        }
    }

    /// Uniform over Y: every member arises from the same number of
    /// (injective table, change) choices.
    fn sample_y<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        match self.kind {
            ProblemKind::Search => {
                let mut t = vec![0; self.n];
                t[rng.random_range(0..self.n)] = 1;
                t
            }
            ProblemKind::Majority | ProblemKind::Parity => self.random_weight(self.n / 2 + 1, rng),
            _ => {
                let mut t = self.sample_x(rng);
                let i = rng.random_range(0..self.n);
                let j = match self.construction {
                    Construction::Canonical => i ^ 1,
                    Construction::Unrestricted => (i + rng.random_range(1..self.n)) % self.n,
                };
                t[i] = t[j];
                t
            }
        }
    }

    fn random_weight<R: Rng + ?Sized>(&self, w: usize, rng: &mut R) -> Vec<usize> {
        let mut t: Vec<usize> = (0..self.n).map(|i| usize::from(i < w)).collect();
        t.shuffle(rng);
        t
    }
}

/// Enumerates `X`, `Y` and `R` by brute force over every table.
pub fn build_relation(kind: ProblemKind, n: usize) -> Result<RelationInstance> {
    build_relation_with(kind, n, Construction::Canonical, DEFAULT_ENUMERATION_BUDGET)
}

pub fn build_relation_with(
    kind: ProblemKind,
    n: usize,
    construction: Construction,
    budget: u128,
) -> Result<RelationInstance> {
    let fam = Family::new(kind, n, construction)?;
    let total = (fam.alphabet() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > budget {
        return Err(Error::EnumerationBudgetExceeded { requested: total, budget });
    }
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut t = vec![0usize; n];
    for _ in 0..total {
        if fam.in_x(&t) {
            x.push(t.clone());
        } else if fam.in_y(&t) {
            y.push(t.clone());
        }
        // Next table in lexicographic order, last position fastest.
        for i in (0..n).rev() {
            t[i] += 1;
            if t[i] < fam.alphabet() {
                break;
            }
            t[i] = 0;
        }
    }
    let y_index: HashMap<&[usize], usize> = y.iter().enumerate().map(|(j, t)| (t.as_slice(), j)).collect();
    let mut pairs = Vec::new();
    for (i, xt) in x.iter().enumerate() {
        for (yt, _) in fam.neighbors(xt, true) {
            pairs.push((i, y_index[yt.as_slice()]));
        }
    }
    let degrees = count_degrees(n, &x, &y, &pairs);
    Ok(RelationInstance {
        kind,
        n,
        construction,
        x,
        y,
        pairs,
        degrees,
    })
}

/// Degrees counted directly from the pair list.
fn count_degrees(n: usize, x: &[Vec<usize>], y: &[Vec<usize>], pairs: &[(usize, usize)]) -> RelationDegrees {
    let mut deg_x = vec![0; x.len()];
    let mut deg_y = vec![0; y.len()];
    let mut idx_x = vec![vec![0; n]; x.len()];
    let mut idx_y = vec![vec![0; n]; y.len()];
    for &(a, b) in pairs {
        deg_x[a] += 1;
        deg_y[b] += 1;
        for i in (0..n).filter(|&i| x[a][i] != y[b][i]) {
            idx_x[a][i] += 1;
            idx_y[b][i] += 1;
        }
    }
    let max_of = |v: &[Vec<usize>]| v.iter().flatten().copied().max().unwrap_or(0);
    RelationDegrees {
        m: deg_x.iter().copied().min().unwrap_or(0),
        m_prime: deg_y.iter().copied().min().unwrap_or(0),
        l: max_of(&idx_x),
        l_prime: max_of(&idx_y),
    }
}

/// Degrees from uniformly sampled members of X and Y, each counted exactly
/// over all of its single-position changes.
pub fn sampled_degrees<R: Rng + ?Sized>(
    kind: ProblemKind,
    n: usize,
    construction: Construction,
    samples: usize,
    rng: &mut R,
) -> Result<RelationDegrees> {
    let fam = Family::new(kind, n, construction)?;
    if samples == 0 {
        return Err(Error::InvalidParameters("at least one sample".into()));
    }
    let mut d = RelationDegrees {
        m: usize::MAX,
        m_prime: usize::MAX,
        l: 0,
        l_prime: 0,
    };
    for _ in 0..samples {
        let x = fam.sample_x(rng);
        debug_assert!(fam.in_x(&x));
        let (deg, per) = fam.degree(&x, true);
        d.m = d.m.min(deg);
        d.l = d.l.max(per);
        let y = fam.sample_y(rng);
        debug_assert!(fam.in_y(&y));
        let (deg, per) = fam.degree(&y, false);
        d.m_prime = d.m_prime.min(deg);
        d.l_prime = d.l_prime.max(per);
    }
    Ok(d)
}

/// The degrees the constructions are designed to have.
pub fn closed_form_degrees(kind: ProblemKind, n: usize, construction: Construction) -> Result<RelationDegrees> {
    Family::new(kind, n, construction)?;
    let (m, m_prime, l, l_prime) = match (kind, construction) {
        (ProblemKind::Search, _) => (n, 1, 1, 1),
        (ProblemKind::Majority | ProblemKind::Parity, _) => (n / 2, n / 2 + 1, 1, 1),
        (_, Construction::Canonical) => (n, 2, 1, 1),
        (_, Construction::Unrestricted) => (n * (n - 1), 2, n - 1, 1),
    };
    Ok(RelationDegrees { m, m_prime, l, l_prime })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::evaluate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tuple(d: RelationDegrees) -> (usize, usize, usize, usize) {
        (d.m, d.m_prime, d.l, d.l_prime)
    }

    #[test]
    fn search_sixteen() {
        let r = build_relation(ProblemKind::Search, 16).unwrap();
        assert_eq!(tuple(r.degrees), (16, 1, 1, 1));
        assert_eq!((r.x.len(), r.y.len(), r.pairs.len()), (1, 16, 16));
    }

    #[test]
    fn majority_eight() {
        let r = build_relation(ProblemKind::Majority, 8).unwrap();
        assert_eq!(tuple(r.degrees), (4, 5, 1, 1));
        assert_eq!((r.x.len(), r.y.len()), (70, 56));
        // X and Y straddle the strict-majority threshold.
        assert!(r.x.iter().all(|t| t.iter().sum::<usize>() * 2 <= 8));
        assert!(r.y.iter().all(|t| t.iter().sum::<usize>() * 2 > 8));
    }

    #[test]
    fn parity_sides_have_opposite_parity() {
        let r = build_relation(ProblemKind::Parity, 8).unwrap();
        assert_eq!(tuple(r.degrees), (4, 5, 1, 1));
        assert!(r.x.iter().all(|t| !evaluate(ProblemKind::Parity, t).unwrap()));
        assert!(r.y.iter().all(|t| evaluate(ProblemKind::Parity, t).unwrap()));
    }

    #[test]
    fn element_distinctness_four() {
        let r = build_relation(ProblemKind::ElementDistinctness, 4).unwrap();
        assert_eq!(tuple(r.degrees), (4, 2, 1, 1));
        assert_eq!(r.x.len(), 24);
        assert!(r.x.iter().all(|t| !evaluate(ProblemKind::ElementDistinctness, t).unwrap()));
        assert!(r.y.iter().all(|t| evaluate(ProblemKind::ElementDistinctness, t).unwrap()));
        let u = build_relation_with(ProblemKind::ElementDistinctness, 4, Construction::Unrestricted, 1 << 20).unwrap();
        assert_eq!(tuple(u.degrees), (12, 2, 3, 1));
    }

    #[test]
    fn element_distinctness_eight_is_over_budget() {
        assert!(matches!(
            build_relation(ProblemKind::ElementDistinctness, 8),
            Err(Error::EnumerationBudgetExceeded { .. })
        ));
    }

    #[test]
    fn sampling_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (kind, n) in [
            (ProblemKind::Search, 8),
            (ProblemKind::Majority, 8),
            (ProblemKind::ElementDistinctness, 4),
        ] {
            let exact = build_relation(kind, n).unwrap().degrees;
            let sampled = sampled_degrees(kind, n, Construction::Canonical, 200, &mut rng).unwrap();
            assert_eq!(exact, sampled, "{kind}");
            assert_eq!(exact, closed_form_degrees(kind, n, Construction::Canonical).unwrap());
        }
        let ed8 = sampled_degrees(ProblemKind::ElementDistinctness, 8, Construction::Canonical, 300, &mut rng).unwrap();
        assert_eq!(tuple(ed8), (8, 2, 1, 1));
        let ed8u = sampled_degrees(ProblemKind::ElementDistinctness, 8, Construction::Unrestricted, 300, &mut rng).unwrap();
        assert_eq!(tuple(ed8u), (56, 2, 7, 1));
    }

    #[test]
    fn collision_has_no_relation() {
        assert!(build_relation(ProblemKind::Collision, 4).is_err());
    }
}
