use std::fmt;

use super::field::GaloisField;
use crate::error::{Error, Result};

/// Largest projective dimension accepted by [`enumerate_flats`].
pub const MAX_PROJECTIVE_DIM: usize = 3;

/// A nonzero proper subspace of `F_q^{n+1}` in reduced row echelon form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Flat {
    rows: Vec<Vec<u8>>,
}

impl Flat {
    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    /// Dimension as a linear subspace: 1 for points, `n` for hyperplanes.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn pivot(row: &[u8]) -> usize {
        row.iter().position(|&x| x != 0).expect("echelon rows are nonzero")
    }

    /// Membership test against the reduced basis.
    pub fn contains_vector(&self, field: &GaloisField, v: &[u8]) -> bool {
        let mut w = v.to_vec();
        for row in &self.rows {
            let c = w[Self::pivot(row)];
            if c != 0 {
                for (x, r) in w.iter_mut().zip(row) {
                    *x = field.sub(*x, field.mul(c, *r));
                }
            }
        }
        w.iter().all(|&x| x == 0)
    }

    pub fn is_subspace_of(&self, field: &GaloisField, other: &Flat) -> bool {
        self.rank() <= other.rank() && self.rows.iter().all(|r| other.contains_vector(field, r))
    }
}

impl fmt::Display for Flat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.rows.iter().map(|r| r.iter().map(u8::to_string).collect::<Vec<_>>().join("")).collect();
        write!(f, "<{}>", rows.join(","))
    }
}

/// Proper nonzero subspaces of `F_q^{n+1}`, sorted by rank, with containment.
#[derive(Clone, Debug)]
pub struct FlatLattice {
    n: usize,
    field: GaloisField,
    flats: Vec<Flat>,
    /// Index range of each rank `1..=n` in `flats`.
    rank_ranges: Vec<std::ops::Range<usize>>,
    /// `leq[i][j]` iff flat `i` is contained in flat `j`.
    leq: Vec<Vec<bool>>,
}

impl FlatLattice {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.field.order() as u32
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn flats(&self) -> &[Flat] {
        &self.flats
    }

    pub fn len(&self) -> usize {
        self.flats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flats.is_empty()
    }

    pub fn rank(&self, i: usize) -> usize {
        self.flats[i].rank()
    }

    /// Projective codimension: `n` for points, 1 for hyperplanes.
    pub fn codim(&self, i: usize) -> usize {
        self.n + 1 - self.rank(i)
    }

    /// Indices of the flats of rank `r`.
    pub fn of_rank(&self, r: usize) -> std::ops::Range<usize> {
        if r == 0 || r > self.n {
            return 0..0;
        }
        self.rank_ranges[r - 1].clone()
    }

    pub fn points(&self) -> std::ops::Range<usize> {
        self.of_rank(1)
    }

    pub fn hyperplanes(&self) -> std::ops::Range<usize> {
        self.of_rank(self.n)
    }

    pub fn is_leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn comparable(&self, i: usize, j: usize) -> bool {
        self.leq[i][j] || self.leq[j][i]
    }

    /// Counts per rank `1..=n`.
    pub fn rank_counts(&self) -> Vec<usize> {
        self.rank_ranges.iter().map(ExactSizeIterator::len).collect()
    }
}

/// Number of `r`-dimensional subspaces of `F_q^m`.
pub fn gaussian_binomial(m: usize, r: usize, q: u64) -> u64 {
    if r > m {
        return 0;
    }
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..r {
        num *= q.pow((m - i) as u32) - 1;
        den *= q.pow((i + 1) as u32) - 1;
    }
    num / den
}

/// Every proper nonzero subspace of `F_q^{n+1}`, i.e. every flat of `PG(n, q)`.
pub fn enumerate_flats(n: usize, q: u32) -> Result<FlatLattice> {
    let field = GaloisField::new(q)?;
    if n == 0 {
        return Err(Error::InvalidParameter("projective dimension must be at least 1".into()));
    }
    if n > MAX_PROJECTIVE_DIM {
        return Err(Error::TooLarge(format!("flat enumeration needs n <= {MAX_PROJECTIVE_DIM}, got {n}")));
    }
    let dim = n + 1;
    let mut flats = Vec::new();
    let mut rank_ranges = Vec::with_capacity(n);
    for r in 1..=n {
        let start = flats.len();
        for pivots in combinations(dim, r) {
            let free: Vec<(usize, usize)> = (0..r)
                .flat_map(|i| ((pivots[i] + 1)..dim).filter(|c| !pivots.contains(c)).map(move |c| (i, c)))
                .collect();
            let total = (q as usize).pow(free.len() as u32);
            for mut code in 0..total {
                let mut rows = vec![vec![0u8; dim]; r];
                for (i, &p) in pivots.iter().enumerate() {
                    rows[i][p] = 1;
                }
                for &(i, c) in &free {
                    rows[i][c] = (code % q as usize) as u8;
                    code /= q as usize;
                }
                flats.push(Flat { rows });
            }
        }
        rank_ranges.push(start..flats.len());
    }
    let leq = (0..flats.len())
        .map(|i| (0..flats.len()).map(|j| flats[i].is_subspace_of(&field, &flats[j])).collect())
        .collect();
    Ok(FlatLattice { n, field, flats, rank_ranges, leq })
}

fn combinations(m: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(m: usize, r: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(m, r, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, r, 0, &mut Vec::new(), &mut out);
    out
}
