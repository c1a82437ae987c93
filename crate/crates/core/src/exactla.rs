//! Exact rational linear algebra.
//!
//! Every routine here works over `BigRational`. Determinants and echelon forms go
//! through a fraction-free (Bareiss) elimination on an integer-scaled copy of the
//! matrix, so intermediate entries stay bounded by minors of the input.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision rational number. Always kept in lowest terms with a
/// positive denominator.
pub type Rational = num_rational::BigRational;

/// Shorthand for an integer-valued rational.
pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Shorthand for `num / den`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"a/b"` or an integer literal.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(a, b))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Outcome of [`RationalMatrix::definiteness`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Definiteness {
    PositiveDefinite,
    PositiveSemidefinite,
    Indefinite,
    NegativeDefinite,
    NegativeSemidefinite,
    Zero,
}

/// Why [`RationalMatrix::solve`] found no unique answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveFailure {
    /// The system is inconsistent.
    NoSolution,
    /// The matrix is square and singular, and the system is consistent, so the
    /// solution is not unique.
    Singular,
}

/// Inertia of a symmetric form, counted by congruence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    /// Builds a matrix from rows. Panics when the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        RationalMatrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect())
    }

    /// Builds a matrix whose columns are the given vectors. `dim` is the row count,
    /// needed when there are no columns.
    pub fn from_columns(dim: usize, cols: &[Vec<Rational>]) -> Self {
        let mut m = Self::zeros(dim, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), dim, "column length mismatch");
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, x.len(), "dimension mismatch in matrix-vector product");
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(x)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Principal submatrix on the given (sorted) index list.
    pub fn principal_submatrix(&self, idx: &[usize]) -> RationalMatrix {
        let mut m = Self::zeros(idx.len(), idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m[(a, b)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// Each row multiplied by the lcm of its denominators; returns integer rows.
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|r| {
                let row = self.row(r);
                let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
            })
            .collect()
    }

    /// Determinant by fraction-free elimination. Panics when not square.
    pub fn det(&self) -> Rational {
        assert!(self.is_square(), "determinant of a non-square matrix");
        if self.rows == 0 {
            return Rational::one();
        }
        let scale = (0..self.rows).fold(BigInt::one(), |acc, r| {
            acc * self.row(r).iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()))
        });
        let mut m = self.integer_rows();
        let ech = bareiss(&mut m, self.cols);
        if ech.pivots.len() < self.rows {
            return Rational::zero();
        }
        let last = m[self.rows - 1][self.cols - 1].clone();
        let d = if ech.swaps % 2 == 1 { -last } else { last };
        Rational::new(d, scale)
    }

    pub fn rank(&self) -> usize {
        let mut m = self.integer_rows();
        bareiss(&mut m, self.cols).pivots.len()
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (RationalMatrix, Vec<usize>) {
        let mut m = self.integer_rows();
        let ech = bareiss(&mut m, self.cols);
        let rank = ech.pivots.len();
        let mut out = Self::zeros(rank, self.cols);
        for r in 0..rank {
            for c in 0..self.cols {
                out[(r, c)] = Rational::from_integer(m[r][c].clone());
            }
        }
        // back substitution on the (small) echelon form
        for (r, &pc) in ech.pivots.iter().enumerate().rev() {
            let p = out[(r, pc)].clone();
            for c in 0..self.cols {
                let v = &out[(r, c)] / &p;
                out[(r, c)] = v;
            }
            for above in 0..r {
                let f = out[(above, pc)].clone();
                if f.is_zero() {
                    continue;
                }
                for c in 0..self.cols {
                    let v = &out[(r, c)] * &f;
                    out[(above, c)] -= v;
                }
            }
        }
        (out, ech.pivots)
    }

    /// Solves `M X = B` for every column of `B` at once.
    pub fn solve_many(&self, b: &RationalMatrix) -> std::result::Result<RationalMatrix, SolveFailure> {
        assert_eq!(self.rows, b.rows, "right-hand side has the wrong number of rows");
        let n = self.cols;
        let mut aug = Self::zeros(self.rows, n + b.cols);
        for r in 0..self.rows {
            for c in 0..n {
                aug[(r, c)] = self[(r, c)].clone();
            }
            for c in 0..b.cols {
                aug[(r, n + c)] = b[(r, c)].clone();
            }
        }
        let (red, pivots) = aug.rref();
        if pivots.iter().any(|&p| p >= n) {
            return Err(SolveFailure::NoSolution);
        }
        if self.is_square() && pivots.len() < n {
            return Err(SolveFailure::Singular);
        }
        let mut x = Self::zeros(n, b.cols);
        for (r, &pc) in pivots.iter().enumerate() {
            for c in 0..b.cols {
                x[(pc, c)] = red[(r, n + c)].clone();
            }
        }
        Ok(x)
    }

    /// Solves `M x = b`. Free variables of an underdetermined consistent system are
    /// set to zero.
    pub fn solve(&self, b: &[Rational]) -> std::result::Result<Vec<Rational>, SolveFailure> {
        let rhs = Self::from_columns(self.rows, &[b.to_vec()]);
        self.solve_many(&rhs).map(|x| x.column(0))
    }

    pub fn inverse(&self) -> Result<RationalMatrix> {
        if !self.is_square() {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        self.solve_many(&Self::identity(self.rows)).map_err(|_| Error::Singular)
    }

    /// A basis of the right kernel, one vector per free column, with a 1 in that
    /// free position.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let (red, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -red[(r, f)].clone();
                }
                v
            })
            .collect()
    }

    /// Signature of a symmetric matrix via symmetric Gaussian elimination with
    /// congruence pivoting.
    pub fn inertia(&self) -> Result<Inertia> {
        if !self.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        let mut s = self.clone();
        let mut active: Vec<usize> = (0..s.rows).collect();
        let mut inertia = Inertia::default();
        while !active.is_empty() {
            let pivot = active.iter().copied().find(|&i| !s[(i, i)].is_zero());
            let p = match pivot {
                Some(p) => p,
                None => {
                    // zero diagonal: look for an off-diagonal entry and replace
                    // e_i by e_i + e_j, which makes the diagonal 2 s_ij
                    let pair = active.iter().enumerate().find_map(|(a, &i)| {
                        active[a + 1..].iter().find(|&&j| !s[(i, j)].is_zero()).map(|&j| (i, j))
                    });
                    match pair {
                        None => break,
                        Some((i, j)) => {
                            for &k in &active {
                                let v = s[(j, k)].clone();
                                s[(i, k)] += v;
                            }
                            for &k in &active {
                                let v = s[(k, j)].clone();
                                s[(k, i)] += v;
                            }
                            i
                        }
                    }
                }
            };
            let d = s[(p, p)].clone();
            if d.is_positive() {
                inertia.positive += 1;
            } else {
                inertia.negative += 1;
            }
            active.retain(|&i| i != p);
            for &i in &active {
                let f = &s[(i, p)] / &d;
                if f.is_zero() {
                    continue;
                }
                for &j in &active {
                    let v = &f * &s[(p, j)];
                    s[(i, j)] -= v;
                }
            }
        }
        inertia.zero = self.rows - inertia.positive - inertia.negative;
        Ok(inertia)
    }

    pub fn definiteness(&self) -> Result<Definiteness> {
        let Inertia { positive, negative, .. } = self.inertia()?;
        let n = self.rows;
        Ok(match (positive, negative) {
            (0, 0) => Definiteness::Zero,
            (p, 0) if p == n => Definiteness::PositiveDefinite,
            (_, 0) => Definiteness::PositiveSemidefinite,
            (0, m) if m == n => Definiteness::NegativeDefinite,
            (0, _) => Definiteness::NegativeSemidefinite,
            _ => Definiteness::Indefinite,
        })
    }
}

impl std::ops::Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;
    fn index(&self, (r, c): (usize, usize)) -> &Rational {
        debug_assert!(r < self.rows && c < self.cols);
        &self.entries[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rational {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.entries[r * self.cols + c]
    }
}

struct Echelon {
    pivots: Vec<usize>,
    swaps: usize,
}

/// In-place Bareiss elimination to row echelon form. Columns without a pivot are
/// skipped; each division is exact because every entry stays a minor of the input.
fn bareiss(m: &mut [Vec<BigInt>], cols: usize) -> Echelon {
    let rows = m.len();
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut swaps = 0;
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            m.swap(p, r);
            swaps += 1;
        }
        let (top, rest) = m.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let pv = pivot_row[c].clone();
        for row in rest.iter_mut() {
            let lead = row[c].clone();
            for j in c + 1..cols {
                let num = &row[j] * &pv - &lead * &pivot_row[j];
                debug_assert!((&num % &prev).is_zero());
                row[j] = num / &prev;
            }
            row[c] = BigInt::zero();
        }
        // rows above the pivot row keep their old scale, only later rows change
        prev = pv;
        pivots.push(c);
        r += 1;
    }
    Echelon { pivots, swaps }
}

/// Dot product of two rational vectors.
pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}
