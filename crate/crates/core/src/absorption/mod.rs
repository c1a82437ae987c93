//! The random displacement process.
//!
//! A point measure with a site of multiplicity at least two moves one unit of that
//! mass left or right. [`reduce_measure`] computes exact absorption distributions
//! for the chain killed at the boundary of `[n]`, which is the reduction of a
//! monomial in the q-Klyachko algebra. [`simulate_mc`] samples the unkilled process
//! on the integers.

mod exact;
mod mc;

use std::collections::BTreeMap;
use std::fmt;

pub use exact::{reduce_measure, AbsorptionResult, MAX_MASS, MAX_SITES};
pub use mc::{simulate_mc, simulate_mc_with, McOutcome, McParams};

use crate::error::{Error, Result};

/// Exponents `eta(1), ..., eta(n)` of a monomial, i.e. a measure on `[n]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentVector(Vec<u32>);

impl ExponentVector {
    pub fn new(v: Vec<u32>) -> Self {
        ExponentVector(v)
    }

    pub fn zeros(n: usize) -> Self {
        ExponentVector(vec![0; n])
    }

    /// 0/1 vector of a subset of `[n]`.
    pub fn indicator(n: usize, s: crate::subset::Subset) -> Self {
        ExponentVector((1..=n).map(|i| u32::from(s.contains(i))).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn mass(&self) -> usize {
        self.0.iter().map(|&c| c as usize).sum()
    }

    pub fn is_squarefree(&self) -> bool {
        self.0.iter().all(|&c| c <= 1)
    }

    /// Support as a subset of `[n]`.
    pub fn support(&self) -> crate::subset::Subset {
        crate::subset::Subset::from_elements(
            self.0.iter().enumerate().filter(|(_, &c)| c > 0).map(|(i, _)| i + 1),
        )
    }

    /// Parses comma separated multiplicities such as `"2,0,1"`.
    pub fn parse(s: &str) -> Result<Self> {
        s.split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad multiplicity {t:?}"))))
            .collect::<Result<Vec<_>>>()
            .map(ExponentVector)
    }

    /// Every exponent vector of length `n` and total mass `mass`, in lexicographic
    /// order with the first coordinate largest first.
    pub fn all_of_mass(n: usize, mass: usize) -> Vec<ExponentVector> {
        fn rec(i: usize, n: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<ExponentVector>) {
            if i + 1 == n {
                cur.push(left);
                out.push(ExponentVector(cur.clone()));
                cur.pop();
                return;
            }
            for c in (0..=left).rev() {
                cur.push(c);
                rec(i + 1, n, left - c, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if n > 0 {
            rec(0, n, mass as u32, &mut Vec::new(), &mut out);
        }
        out
    }
}

impl From<Vec<u32>> for ExponentVector {
    fn from(v: Vec<u32>) -> Self {
        ExponentVector(v)
    }
}

impl fmt::Debug for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Finitely supported measure on the integers, zero entries never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PointMeasure(BTreeMap<i64, u32>);

impl PointMeasure {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (i64, u32)>>(pairs: I) -> Self {
        let mut m = PointMeasure::new();
        for (site, c) in pairs {
            m.add(site, c);
        }
        m
    }

    /// Measure on `1..=n` with the given exponents.
    pub fn from_exponents(eta: &ExponentVector) -> Self {
        Self::from_pairs(eta.as_slice().iter().enumerate().map(|(i, &c)| (i as i64 + 1, c)))
    }

    pub fn add(&mut self, site: i64, c: u32) {
        if c > 0 {
            *self.0.entry(site).or_insert(0) += c;
        }
    }

    pub fn get(&self, site: i64) -> u32 {
        self.0.get(&site).copied().unwrap_or(0)
    }

    pub fn mass(&self) -> u64 {
        self.0.values().map(|&c| u64::from(c)).sum()
    }

    pub fn is_zero_one(&self) -> bool {
        self.0.values().all(|&c| c <= 1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, u32)> + '_ {
        self.0.iter().map(|(&s, &c)| (s, c))
    }

    /// Smallest and largest occupied sites.
    pub fn span(&self) -> Option<(i64, i64)> {
        Some((*self.0.keys().next()?, *self.0.keys().next_back()?))
    }
}

/// Which crowded site (multiplicity at least two) is updated next.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SelectionRule {
    Leftmost,
    Rightmost,
    /// A site picked by hashing the seed together with the current measure, so the
    /// choice is a fixed function of the state.
    SeededRandom(u64),
}

impl SelectionRule {
    /// Picks a site among `crowded` (sorted, nonempty) for the measure whose nonzero
    /// `(site, multiplicity)` pairs are produced by `occupied`.
    pub(crate) fn pick<I>(&self, crowded: &[i64], occupied: I) -> i64
    where
        I: Iterator<Item = (i64, u32)>,
    {
        debug_assert!(!crowded.is_empty());
        match *self {
            SelectionRule::Leftmost => crowded[0],
            SelectionRule::Rightmost => crowded[crowded.len() - 1],
            SelectionRule::SeededRandom(seed) => {
                let mut h = splitmix64(seed);
                for (site, c) in occupied {
                    h = splitmix64(h ^ (site as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
                    h = splitmix64(h ^ u64::from(c));
                }
                crowded[(h % crowded.len() as u64) as usize]
            }
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerate_masses() {
        let all = ExponentVector::all_of_mass(3, 3);
        assert_eq!(all.len(), 10);
        assert_eq!(all[0], ExponentVector::new(vec![3, 0, 0]));
        assert_eq!(ExponentVector::all_of_mass(5, 5).len(), 126);
        assert!(all.iter().all(|e| e.mass() == 3));
    }

    #[test]
    fn parse_and_display() {
        let e = ExponentVector::parse("1, 2,0").unwrap();
        assert_eq!(e.as_slice(), &[1, 2, 0]);
        assert_eq!(e.to_string(), "(1,2,0)");
        assert!(ExponentVector::parse("1,-1").is_err());
    }

    #[test]
    fn seeded_rule_is_a_function_of_state() {
        let rule = SelectionRule::SeededRandom(7);
        let m = PointMeasure::from_pairs([(1, 2), (2, 3), (4, 2)]);
        let crowded = [1, 2, 4];
        let a = rule.pick(&crowded, m.iter());
        let b = rule.pick(&crowded, m.iter());
        assert_eq!(a, b);
        assert!(crowded.contains(&a));
        assert_eq!(SelectionRule::Leftmost.pick(&crowded, m.iter()), 1);
        assert_eq!(SelectionRule::Rightmost.pick(&crowded, m.iter()), 4);
    }
}
