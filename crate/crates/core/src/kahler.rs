//! Kähler package checks for `Kly_{n,q}`, the volume polynomial and the
//! log-concavity scan of displacement probabilities.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::absorption::ExponentVector;
use crate::error::{Error, Result};
use crate::exactla::{Definiteness, Rational, RationalMatrix};
use crate::klyachko::{monomial_degree, prob_exact, KlyAlgebra, KlyElement};
use crate::qcore::{q_factorial, QContext};

/// A class `a_1 u_1 + ... + a_n u_n` with every `a_i > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LefschetzClass(Vec<Rational>);

impl LefschetzClass {
    pub fn new(coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|a| !a.is_positive()) {
            return Err(Error::InvalidParameter(
                "Lefschetz class needs strictly positive coefficients".into(),
            ));
        }
        Ok(LefschetzClass(coeffs))
    }

    /// `u_1 + ... + u_n`.
    pub fn sum_of_generators(n: usize) -> Self {
        LefschetzClass(vec![Rational::one(); n])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn scaled(&self, c: &Rational) -> Result<Self> {
        Self::new(self.0.iter().map(|a| a * c).collect())
    }

    fn element(&self, ctx: &QContext) -> Result<KlyElement> {
        if self.0.len() != ctx.n() {
            return Err(Error::Dimension(format!("class has {} coefficients, expected {}", self.0.len(), ctx.n())));
        }
        Ok(KlyElement::linear(ctx, &self.0))
    }
}

/// Verdict for one degree `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeCheck {
    pub k: usize,
    pub pass: bool,
}

/// Hodge-Riemann verdict for one degree with the data behind it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HodgeRiemannCheck {
    pub k: usize,
    pub pass: bool,
    /// Dimension of the primitive subspace.
    pub primitive_dim: usize,
    /// Gram matrix of `(-1)^k deg(l^(n-2k) x y)` on the primitive basis.
    pub form: RationalMatrix,
    pub definiteness: Option<Definiteness>,
}

fn top_k(n: usize) -> usize {
    n / 2
}

/// Matrix of `(x, y) -> deg(l^(n-2k) x y)` over the size-`k` squarefree basis.
pub fn pairing_matrix(alg: &KlyAlgebra, k: usize, ell: &LefschetzClass) -> Result<RationalMatrix> {
    let ctx = alg.ctx();
    let n = ctx.n();
    if k > top_k(n) {
        return Err(Error::InvalidParameter(format!("degree {k} outside 0..={}", top_k(n))));
    }
    let l = ell.element(ctx)?;
    let lp = alg.pow(&l, n - 2 * k);
    let basis = alg.basis(k);
    let images: Vec<KlyElement> = basis.iter().map(|&s| alg.multiply(&lp, &KlyElement::basis(ctx, s))).collect();
    let mut m = RationalMatrix::zeros(basis.len(), basis.len());
    for (i, x) in images.iter().enumerate() {
        for (j, &t) in basis.iter().enumerate() {
            m[(i, j)] = alg.pairing(x, &KlyElement::basis(ctx, t));
        }
    }
    Ok(m)
}

/// Nonsingularity of `deg(x y)` between `Kly^k` and `Kly^(n-k)` for `k <= n/2`.
pub fn check_poincare(alg: &KlyAlgebra) -> Vec<DegreeCheck> {
    let ctx = alg.ctx();
    let n = ctx.n();
    (0..=top_k(n))
        .map(|k| {
            let low = alg.basis(k);
            let high = alg.basis(n - k);
            let mut m = RationalMatrix::zeros(low.len(), high.len());
            for (i, &s) in low.iter().enumerate() {
                for (j, &t) in high.iter().enumerate() {
                    m[(i, j)] = alg.pairing(&KlyElement::basis(ctx, s), &KlyElement::basis(ctx, t));
                }
            }
            DegreeCheck { k, pass: m.is_square() && !m.det().is_zero() }
        })
        .collect()
}

/// Hard Lefschetz: `x -> l^(n-2k) x` is bijective `Kly^k -> Kly^(n-k)`. Given
/// Poincare duality this is nonsingularity of [`pairing_matrix`].
pub fn check_hl(alg: &KlyAlgebra, ell: &LefschetzClass) -> Result<Vec<DegreeCheck>> {
    (0..=top_k(alg.ctx().n()))
        .map(|k| Ok(DegreeCheck { k, pass: !pairing_matrix(alg, k, ell)?.det().is_zero() }))
        .collect()
}

/// Matrix of `x -> l^p x` from `Kly^k` to `Kly^(k+p)` in the squarefree bases.
fn multiplication_matrix(alg: &KlyAlgebra, l: &KlyElement, p: usize, k: usize) -> RationalMatrix {
    let ctx = alg.ctx();
    let lp = alg.pow(l, p);
    let src = alg.basis(k);
    let dst = alg.basis(k + p);
    let mut m = RationalMatrix::zeros(dst.len(), src.len());
    for (j, &s) in src.iter().enumerate() {
        let img = alg.multiply(&lp, &KlyElement::basis(ctx, s));
        for (i, &t) in dst.iter().enumerate() {
            m[(i, j)] = img.coefficient(t);
        }
    }
    m
}

/// Hodge-Riemann: `(-1)^k deg(l^(n-2k) x y)` is positive definite on the kernel of
/// multiplication by `l^(n-2k+1)` in `Kly^k`.
pub fn check_hr(alg: &KlyAlgebra, ell: &LefschetzClass) -> Result<Vec<HodgeRiemannCheck>> {
    let ctx = alg.ctx();
    let n = ctx.n();
    let l = ell.element(ctx)?;
    (0..=top_k(n))
        .map(|k| {
            let gram = pairing_matrix(alg, k, ell)?;
            let dim = gram.rows();
            let primitive = if k + (n - 2 * k + 1) > n {
                // l^(n-2k+1) lands above the top degree
                (0..dim)
                    .map(|i| (0..dim).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
                    .collect()
            } else {
                multiplication_matrix(alg, &l, n - 2 * k + 1, k).nullspace()
            };
            let basis = RationalMatrix::from_columns(dim, &primitive);
            let sign = if k % 2 == 0 { Rational::one() } else { -Rational::one() };
            let mut form = basis.transpose().mul(&gram).mul(&basis);
            for i in 0..form.rows() {
                for j in 0..form.cols() {
                    form[(i, j)] *= &sign;
                }
            }
            let (pass, definiteness) = if primitive.is_empty() {
                (true, None)
            } else {
                let d = form.definiteness()?;
                (d == Definiteness::PositiveDefinite, Some(d))
            };
            Ok(HodgeRiemannCheck { k, pass, primitive_dim: primitive.len(), form, definiteness })
        })
        .collect()
}

/// Coefficients of `deg((x_1 u_1 + ... + x_n u_n)^n)` keyed by exponent vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VolumePolynomial(pub BTreeMap<ExponentVector, Rational>);

impl VolumePolynomial {
    pub fn coefficient(&self, eta: &ExponentVector) -> Rational {
        self.0.get(eta).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn evaluate(&self, x: &[Rational]) -> Rational {
        self.0
            .iter()
            .map(|(eta, c)| {
                eta.as_slice()
                    .iter()
                    .zip(x)
                    .fold(c.clone(), |acc, (&e, xi)| acc * num_traits::pow(xi.clone(), e as usize))
            })
            .fold(Rational::zero(), |a, b| a + b)
    }
}

fn multinomial(eta: &ExponentVector) -> Rational {
    let fact = |m: u32| (1..=m).fold(BigInt::one(), |a, i| a * BigInt::from(i));
    let top = fact(eta.mass() as u32);
    let bottom = eta.as_slice().iter().fold(BigInt::one(), |a, &e| a * fact(e));
    Rational::from_integer(top / bottom)
}

/// `(n! / prod eta_i!) * deg(u^eta)` for every `eta` of mass `n`.
pub fn volume_polynomial(ctx: &QContext) -> Result<VolumePolynomial> {
    let mut out = BTreeMap::new();
    for eta in ExponentVector::all_of_mass(ctx.n(), ctx.n()) {
        let c = multinomial(&eta) * monomial_degree(ctx, &eta)?;
        out.insert(eta, c);
    }
    Ok(VolumePolynomial(out))
}

/// `sum_eta p([n]; eta) x^eta`, the probability generating polynomial.
pub fn probability_polynomial(ctx: &QContext) -> Result<VolumePolynomial> {
    let mut out = BTreeMap::new();
    for eta in ExponentVector::all_of_mass(ctx.n(), ctx.n()) {
        let p = prob_exact(ctx, &eta)?;
        out.insert(eta, p);
    }
    Ok(VolumePolynomial(out))
}

/// How the raw volume polynomial and the probability polynomial relate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VolumeNormalization {
    /// `volume[eta] / probability[eta]` for every `eta`, keyed by `eta`.
    pub ratios: BTreeMap<ExponentVector, Rational>,
    /// `ratio / multinomial(eta)`; equal to `(n)_q!` for every `eta`.
    pub ratio_over_multinomial: BTreeMap<ExponentVector, Rational>,
    /// The common value of `ratio_over_multinomial`, if there is one.
    pub constant: Option<Rational>,
}

pub fn volume_normalization(ctx: &QContext) -> Result<VolumeNormalization> {
    let vol = volume_polynomial(ctx)?;
    let prob = probability_polynomial(ctx)?;
    let mut ratios = BTreeMap::new();
    let mut reduced = BTreeMap::new();
    for (eta, v) in &vol.0 {
        let p = prob.coefficient(eta);
        if p.is_zero() {
            continue;
        }
        let r = v / &p;
        reduced.insert(eta.clone(), &r / multinomial(eta));
        ratios.insert(eta.clone(), r);
    }
    let mut vals = reduced.values();
    let constant = vals.next().cloned().filter(|c| vals.all(|v| v == c));
    Ok(VolumeNormalization { ratios, ratio_over_multinomial: reduced, constant })
}

/// A failure of `p(eta)^2 >= p(eta - d_i + d_{i-1}) p(eta - d_i + d_{i+1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogConcavityViolation {
    pub eta: ExponentVector,
    /// 1-based site with `eta(i) >= 2`.
    pub site: usize,
    pub p: Rational,
    pub p_left: Rational,
    pub p_right: Rational,
}

/// Scans every `eta` of mass `n` and every crowded site. Neighbours that push mass
/// outside `[n]` have probability 0.
pub fn check_log_concavity(ctx: &QContext) -> Result<Vec<LogConcavityViolation>> {
    let n = ctx.n();
    let all = ExponentVector::all_of_mass(n, n);
    let mut prob = BTreeMap::new();
    for eta in &all {
        prob.insert(eta.clone(), prob_exact(ctx, eta)?);
    }
    let shifted = |eta: &ExponentVector, from: usize, to: isize| -> Rational {
        if to < 0 || to as usize >= n {
            return Rational::zero();
        }
        let mut v = eta.as_slice().to_vec();
        v[from] -= 1;
        v[to as usize] += 1;
        prob[&ExponentVector::new(v)].clone()
    };
    let mut violations = Vec::new();
    for eta in &all {
        for i in (0..n).filter(|&i| eta.as_slice()[i] >= 2) {
            let p = prob[eta].clone();
            let p_left = shifted(eta, i, i as isize - 1);
            let p_right = shifted(eta, i, i as isize + 1);
            if &p * &p < &p_left * &p_right {
                violations.push(LogConcavityViolation { eta: eta.clone(), site: i + 1, p, p_left, p_right });
            }
        }
    }
    Ok(violations)
}

/// A failure of `p(eta)^2 >= p(eta + d_i - d_j) p(eta - d_i + d_j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CenteredViolation {
    pub eta: ExponentVector,
    pub i: usize,
    pub j: usize,
    pub p: Rational,
    pub p_plus: Rational,
    pub p_minus: Rational,
}

/// The exchange inequalities centered at `eta`, for every pair `i < j` with
/// `eta(i), eta(j) >= 1`. These hold for the normalized coefficients of any
/// Lorentzian polynomial, hence for the volume polynomial.
pub fn check_centered_log_concavity(ctx: &QContext) -> Result<Vec<CenteredViolation>> {
    let n = ctx.n();
    let all = ExponentVector::all_of_mass(n, n);
    let mut prob = BTreeMap::new();
    for eta in &all {
        prob.insert(eta.clone(), prob_exact(ctx, eta)?);
    }
    let moved = |eta: &ExponentVector, from: usize, to: usize| {
        let mut v = eta.as_slice().to_vec();
        v[from] -= 1;
        v[to] += 1;
        prob[&ExponentVector::new(v)].clone()
    };
    let mut violations = Vec::new();
    for eta in &all {
        let e = eta.as_slice();
        for i in 0..n {
            for j in i + 1..n {
                if e[i] == 0 || e[j] == 0 {
                    continue;
                }
                let p = prob[eta].clone();
                let p_plus = moved(eta, j, i);
                let p_minus = moved(eta, i, j);
                if &p * &p < &p_plus * &p_minus {
                    violations.push(CenteredViolation { eta: eta.clone(), i: i + 1, j: j + 1, p, p_plus, p_minus });
                }
            }
        }
    }
    Ok(violations)
}

/// `(n)_q!`, the value the probability polynomial is scaled by.
pub fn degree_scale(ctx: &QContext) -> Rational {
    q_factorial(ctx.n(), ctx.q())
}
