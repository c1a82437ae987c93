//! q-integers, q-factorials and the q-deformed Cartan matrix `A(n, q)`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactla::{Rational, RationalMatrix};
use crate::subset::Subset;

/// Largest `n` for which exhaustive subset scans are attempted.
pub const MAX_EXHAUSTIVE_N: usize = 12;

/// The pair `(n, q)` every construction is parameterised by.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QContext {
    n: usize,
    q: Rational,
}

impl QContext {
    pub fn new(n: usize, q: Rational) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        if !q.is_positive() {
            return Err(Error::InvalidParameter(format!("q must be positive, got {q}")));
        }
        Ok(QContext { n, q })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    /// Weight of a rightward move, `1/(q+1)`.
    pub fn right_weight(&self) -> Rational {
        (&self.q + Rational::one()).recip()
    }

    /// Weight of a leftward move, `q/(q+1)`.
    pub fn left_weight(&self) -> Rational {
        &self.q / (&self.q + Rational::one())
    }
}

/// `(m)_q = 1 + q + ... + q^(m-1)`, summed term by term so `q = 1` needs no special case.
pub fn q_int(m: usize, q: &Rational) -> Rational {
    let mut acc = Rational::zero();
    let mut pow = Rational::one();
    for _ in 0..m {
        acc += &pow;
        pow *= q;
    }
    acc
}

/// `(m)_q! = (1)_q (2)_q ... (m)_q`.
pub fn q_factorial(m: usize, q: &Rational) -> Rational {
    (1..=m).fold(Rational::one(), |acc, i| acc * q_int(i, q))
}

/// Tridiagonal `n x n` matrix with `q+1` on the diagonal, `-1` above and `-q` below.
/// Its columns are the vectors `alpha_1, ..., alpha_n`.
pub fn build_a(ctx: &QContext) -> RationalMatrix {
    let n = ctx.n();
    let q = ctx.q();
    let mut a = RationalMatrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = q + Rational::one();
        if i + 1 < n {
            a[(i, i + 1)] = -Rational::one();
            a[(i + 1, i)] = -q.clone();
        }
    }
    a
}

/// Result of [`check_a_properties`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AMatrixReport {
    pub det: Rational,
    pub det_ok: bool,
    pub submatrices_nonsingular: bool,
    pub inverse_positive: bool,
    pub submatrix_inverses_nonnegative: bool,
}

impl AMatrixReport {
    pub fn all_ok(&self) -> bool {
        self.det_ok
            && self.submatrices_nonsingular
            && self.inverse_positive
            && self.submatrix_inverses_nonnegative
    }
}

/// Checks the determinant of `A(n,q)`, nonsingularity of every principal submatrix
/// `A_J`, strict positivity of `A^-1` and entrywise nonnegativity of every `A_J^-1`.
pub fn check_a_properties(ctx: &QContext) -> Result<AMatrixReport> {
    let n = ctx.n();
    if n > MAX_EXHAUSTIVE_N {
        return Err(Error::TooLarge(format!("subset scan needs n <= {MAX_EXHAUSTIVE_N}, got {n}")));
    }
    let a = build_a(ctx);
    let det = a.det();
    let det_ok = det == q_int(n + 1, ctx.q());
    let inverse_positive = match a.inverse() {
        Ok(inv) => (0..n).all(|i| (0..n).all(|j| inv[(i, j)].is_positive())),
        Err(_) => false,
    };
    let mut submatrices_nonsingular = true;
    let mut submatrix_inverses_nonnegative = true;
    for j in Subset::all(n).filter(|s| !s.is_empty()) {
        let idx: Vec<usize> = j.elements().map(|e| e - 1).collect();
        let sub = a.principal_submatrix(&idx);
        match sub.inverse() {
            Ok(inv) => {
                let k = idx.len();
                if (0..k).any(|r| (0..k).any(|c| inv[(r, c)].is_negative())) {
                    submatrix_inverses_nonnegative = false;
                }
            }
            Err(_) => {
                submatrices_nonsingular = false;
                submatrix_inverses_nonnegative = false;
            }
        }
    }
    Ok(AMatrixReport { det, det_ok, submatrices_nonsingular, inverse_positive, submatrix_inverses_nonnegative })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{int, ratio};

    fn ctx(n: usize, q: Rational) -> QContext {
        QContext::new(n, q).unwrap()
    }

    #[test]
    fn q_integers() {
        assert_eq!(q_int(1, &int(5)), int(1));
        assert_eq!(q_int(3, &int(2)), int(7));
        assert_eq!(q_int(2, &ratio(1, 2)), ratio(3, 2));
        assert_eq!(q_int(0, &int(2)), int(0));
        assert_eq!(q_int(4, &int(1)), int(4));
    }

    #[test]
    fn q_factorials() {
        assert_eq!(q_factorial(0, &int(3)), int(1));
        assert_eq!(q_factorial(2, &int(2)), int(3));
        assert_eq!(q_factorial(3, &int(2)), int(21));
        assert_eq!(q_factorial(4, &int(1)), int(24));
    }

    #[test]
    fn cartan_like_matrix() {
        assert_eq!(build_a(&ctx(1, ratio(2, 3))), RationalMatrix::from_rows(vec![vec![ratio(5, 3)]]));
        assert_eq!(build_a(&ctx(2, int(2))), RationalMatrix::from_i64_rows(&[&[3, -1], &[-2, 3]]));
        assert_eq!(
            build_a(&ctx(3, int(1))),
            RationalMatrix::from_i64_rows(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]])
        );
    }

    #[test]
    fn matrix_lemma_small_cases() {
        let r = check_a_properties(&ctx(2, int(2))).unwrap();
        assert!(r.all_ok());
        assert_eq!(r.det, int(7));
        let r = check_a_properties(&ctx(1, ratio(3, 4))).unwrap();
        assert!(r.all_ok());
        assert_eq!(r.det, ratio(7, 4));
        let r = check_a_properties(&ctx(3, int(2))).unwrap();
        assert!(r.all_ok());
        assert_eq!(r.det, int(15));
    }

    #[test]
    fn context_validation() {
        assert!(QContext::new(0, int(1)).is_err());
        assert!(QContext::new(2, int(0)).is_err());
        assert!(QContext::new(2, ratio(-1, 2)).is_err());
        assert!(matches!(check_a_properties(&ctx(13, int(1))), Err(Error::TooLarge(_))));
    }
}
