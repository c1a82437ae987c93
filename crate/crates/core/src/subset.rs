//! Subsets of `[n] = {1, ..., n}` packed into a bitmask.

use std::fmt;

/// A subset of `{1, ..., n}` for `n <= 32`; bit `i - 1` stands for element `i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subset(pub u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn full(n: usize) -> Subset {
        assert!(n <= 32);
        if n == 32 {
            Subset(u32::MAX)
        } else {
            Subset((1u32 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Subset {
        assert!((1..=32).contains(&i), "element {i} out of range");
        Subset(1 << (i - 1))
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(it: I) -> Subset {
        it.into_iter().fold(Subset::EMPTY, |s, i| s.union(Subset::singleton(i)))
    }

    pub fn contains(self, i: usize) -> bool {
        (1..=32).contains(&i) && self.0 & (1 << (i - 1)) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, o: Subset) -> Subset {
        Subset(self.0 | o.0)
    }

    pub fn intersection(self, o: Subset) -> Subset {
        Subset(self.0 & o.0)
    }

    pub fn difference(self, o: Subset) -> Subset {
        Subset(self.0 & !o.0)
    }

    pub fn is_disjoint(self, o: Subset) -> bool {
        self.0 & o.0 == 0
    }

    pub fn is_subset_of(self, o: Subset) -> bool {
        self.0 & !o.0 == 0
    }

    /// Elements in increasing order, 1-based.
    pub fn elements(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |b| self.0 & (1 << b) != 0).map(|b| b + 1)
    }

    /// All subsets of `[n]`, ordered by bitmask.
    pub fn all(n: usize) -> impl Iterator<Item = Subset> {
        assert!(n < 32);
        (0..1u32 << n).map(Subset)
    }

    /// All `k`-subsets of `[n]` in lexicographic order of their sorted elements.
    pub fn of_size(n: usize, k: usize) -> Vec<Subset> {
        fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Subset>) {
            if cur.len() == k {
                out.push(Subset::from_elements(cur.iter().copied()));
                return;
            }
            for i in start..=n {
                if n - i + 1 < k - cur.len() {
                    break;
                }
                cur.push(i);
                rec(i + 1, n, k, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if k <= n {
            rec(1, n, k, &mut Vec::new(), &mut out);
        }
        out
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e: Vec<String> = self.elements().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", e.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_and_order() {
        let two = Subset::of_size(4, 2);
        assert_eq!(two.len(), 6);
        assert_eq!(two[0], Subset::from_elements([1, 2]));
        assert_eq!(two[5], Subset::from_elements([3, 4]));
        assert_eq!(Subset::of_size(3, 0), vec![Subset::EMPTY]);
        assert!(Subset::of_size(2, 3).is_empty());
        assert_eq!(Subset::all(3).count(), 8);
    }

    #[test]
    fn set_ops() {
        let a = Subset::from_elements([1, 3]);
        let b = Subset::from_elements([3, 4]);
        assert_eq!(a.union(b).elements().collect::<Vec<_>>(), vec![1, 3, 4]);
        assert_eq!(a.intersection(b), Subset::singleton(3));
        assert!(!a.is_disjoint(b));
        assert!(Subset::singleton(1).is_subset_of(a));
        assert_eq!(a.to_string(), "{1,3}");
    }
}
