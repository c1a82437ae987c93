//! The q-Klyachko algebra in its squarefree monomial basis.
//!
//! Products are reduced to normal form by the absorption engine: the relation
//! `(q+1) u_i^2 = u_i u_{i+1} + q u_i u_{i-1}` (with `u_0 = u_{n+1} = 0`) is exactly one
//! step of the boundary-killed displacement chain.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use crate::absorption::{reduce_measure, ExponentVector, SelectionRule};
use crate::error::{Error, Result};
use crate::exactla::Rational;
use crate::exec::Exec;
use crate::qcore::{q_factorial, QContext};
use crate::subset::Subset;

/// An element of `Kly_{n,q}` as a combination of squarefree monomials `u_S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KlyElement {
    ctx: QContext,
    terms: BTreeMap<Subset, Rational>,
}

impl KlyElement {
    pub fn zero(ctx: &QContext) -> Self {
        KlyElement { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ctx: &QContext) -> Self {
        Self::basis(ctx, Subset::EMPTY)
    }

    /// The squarefree monomial `u_S`.
    pub fn basis(ctx: &QContext, s: Subset) -> Self {
        assert!(s.is_subset_of(Subset::full(ctx.n())), "{s} is not a subset of [{}]", ctx.n());
        let mut terms = BTreeMap::new();
        terms.insert(s, Rational::one());
        KlyElement { ctx: ctx.clone(), terms }
    }

    /// The generator `u_i`, `1 <= i <= n`.
    pub fn generator(ctx: &QContext, i: usize) -> Self {
        Self::basis(ctx, Subset::singleton(i))
    }

    /// `a_1 u_1 + ... + a_n u_n`.
    pub fn linear(ctx: &QContext, coeffs: &[Rational]) -> Self {
        assert_eq!(coeffs.len(), ctx.n());
        let mut e = Self::zero(ctx);
        for (i, a) in coeffs.iter().enumerate() {
            e.add_term(Subset::singleton(i + 1), a.clone());
        }
        e
    }

    pub fn from_terms<I: IntoIterator<Item = (Subset, Rational)>>(ctx: &QContext, terms: I) -> Self {
        let mut e = Self::zero(ctx);
        for (s, c) in terms {
            e.add_term(s, c);
        }
        e
    }

    pub fn ctx(&self) -> &QContext {
        &self.ctx
    }

    pub fn terms(&self) -> &BTreeMap<Subset, Rational> {
        &self.terms
    }

    pub fn coefficient(&self, s: Subset) -> Rational {
        self.terms.get(&s).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Common size of the support sets, `None` when mixed. The zero element is
    /// homogeneous of every degree and reports `Some(0)`.
    pub fn degree(&self) -> Option<usize> {
        let mut sizes = self.terms.keys().map(|s| s.len());
        let first = sizes.next().unwrap_or(0);
        sizes.all(|d| d == first).then_some(first)
    }

    pub fn add_term(&mut self, s: Subset, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(s).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&s);
        }
    }

    pub fn add(&self, other: &KlyElement) -> KlyElement {
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.add_term(*s, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> KlyElement {
        if c.is_zero() {
            return Self::zero(&self.ctx);
        }
        KlyElement { ctx: self.ctx.clone(), terms: self.terms.iter().map(|(s, x)| (*s, x * c)).collect() }
    }
}

/// Reduces `u^eta` to the squarefree basis.
fn reduce_monomial(ctx: &QContext, eta: &ExponentVector) -> Vec<(Subset, Rational)> {
    if eta.mass() > ctx.n() {
        return Vec::new();
    }
    let res = reduce_measure(ctx, eta, SelectionRule::Leftmost).expect("mass and n within guards");
    res.distribution.into_iter().map(|(v, p)| (v.support(), p)).collect()
}

fn monomial_product(ctx: &QContext, s: Subset, t: Subset) -> Vec<(Subset, Rational)> {
    if s.is_disjoint(t) {
        return vec![(s.union(t), Rational::one())];
    }
    if s.len() + t.len() > ctx.n() {
        return Vec::new();
    }
    let eta: Vec<u32> = (1..=ctx.n()).map(|i| u32::from(s.contains(i)) + u32::from(t.contains(i))).collect();
    reduce_monomial(ctx, &ExponentVector::new(eta))
}

/// Product in `Kly_{n,q}`, reducing every monomial product through the absorption
/// engine.
pub fn kly_multiply(a: &KlyElement, b: &KlyElement) -> KlyElement {
    assert_eq!(a.ctx, b.ctx, "elements of different algebras");
    let mut out = KlyElement::zero(&a.ctx);
    for (s, x) in &a.terms {
        for (t, y) in &b.terms {
            let xy = x * y;
            for (u, c) in monomial_product(&a.ctx, *s, *t) {
                out.add_term(u, &xy * c);
            }
        }
    }
    out
}

/// `deg_{n,q}` on the top degree: coefficient of `u_{[n]}` times `(n)_q!`.
pub fn kly_degree(a: &KlyElement) -> Result<Rational> {
    let n = a.ctx.n();
    if a.terms.keys().any(|s| s.len() != n) {
        return Err(Error::WrongDegree { expected: n });
    }
    Ok(a.coefficient(Subset::full(n)) * q_factorial(n, a.ctx.q()))
}

fn check_mass(ctx: &QContext, eta: &ExponentVector) -> Result<()> {
    if eta.len() != ctx.n() {
        return Err(Error::Dimension(format!("exponent vector has length {}, expected {}", eta.len(), ctx.n())));
    }
    if eta.mass() != ctx.n() {
        return Err(Error::WrongMass { expected: ctx.n(), actual: eta.mass() });
    }
    Ok(())
}

/// `deg_{n,q}(u^eta)` for `eta` of total mass `n`.
pub fn monomial_degree(ctx: &QContext, eta: &ExponentVector) -> Result<Rational> {
    Ok(prob_exact(ctx, eta)? * q_factorial(ctx.n(), ctx.q()))
}

/// Probability that the displacement process started at `eta` ends at `1_{[n]}`.
pub fn prob_exact(ctx: &QContext, eta: &ExponentVector) -> Result<Rational> {
    check_mass(ctx, eta)?;
    let res = reduce_measure(ctx, eta, SelectionRule::Leftmost)?;
    Ok(res.probability(&ExponentVector::new(vec![1; ctx.n()])))
}

/// Expansion of `u_S u_T` in the squarefree basis.
pub fn structure_constants(ctx: &QContext, s: Subset, t: Subset) -> KlyElement {
    KlyElement::from_terms(ctx, monomial_product(ctx, s, t))
}

/// `Kly_{n,q}` with every basis product precomputed, for repeated multiplication.
#[derive(Clone, Debug)]
pub struct KlyAlgebra {
    ctx: QContext,
    table: HashMap<(Subset, Subset), Vec<(Subset, Rational)>>,
}

impl KlyAlgebra {
    pub fn new(ctx: &QContext) -> Self {
        Self::with_exec(ctx, Exec::default())
    }

    pub fn with_exec(ctx: &QContext, exec: Exec) -> Self {
        let n = ctx.n();
        let pairs: Vec<(Subset, Subset)> = Subset::all(n)
            .flat_map(|s| Subset::all(n).map(move |t| (s, t)))
            .filter(|(s, t)| s <= t && !s.is_disjoint(*t) && s.len() + t.len() <= n)
            .collect();
        let products = exec.map(&pairs, |&(s, t)| monomial_product(ctx, s, t));
        let table = pairs.into_iter().zip(products).collect();
        KlyAlgebra { ctx: ctx.clone(), table }
    }

    pub fn ctx(&self) -> &QContext {
        &self.ctx
    }

    pub fn basis(&self, k: usize) -> Vec<Subset> {
        Subset::of_size(self.ctx.n(), k)
    }

    fn basis_product(&self, s: Subset, t: Subset) -> std::borrow::Cow<'_, [(Subset, Rational)]> {
        use std::borrow::Cow;
        if s.is_disjoint(t) {
            return Cow::Owned(vec![(s.union(t), Rational::one())]);
        }
        let key = if s <= t { (s, t) } else { (t, s) };
        match self.table.get(&key) {
            Some(v) => Cow::Borrowed(v),
            None => Cow::Owned(Vec::new()),
        }
    }

    pub fn multiply(&self, a: &KlyElement, b: &KlyElement) -> KlyElement {
        debug_assert_eq!(a.ctx, self.ctx);
        let mut out = KlyElement::zero(&self.ctx);
        for (s, x) in &a.terms {
            for (t, y) in &b.terms {
                let xy = x * y;
                for (u, c) in self.basis_product(*s, *t).iter() {
                    out.add_term(*u, &xy * c);
                }
            }
        }
        out
    }

    pub fn pow(&self, a: &KlyElement, k: usize) -> KlyElement {
        (0..k).fold(KlyElement::one(&self.ctx), |acc, _| self.multiply(&acc, a))
    }

    /// `deg(a b)`, computed from the top coefficient only.
    pub fn pairing(&self, a: &KlyElement, b: &KlyElement) -> Rational {
        let full = Subset::full(self.ctx.n());
        let mut acc = Rational::zero();
        for (s, x) in &a.terms {
            for (t, y) in &b.terms {
                if s.len() + t.len() != self.ctx.n() {
                    continue;
                }
                for (u, c) in self.basis_product(*s, *t).iter() {
                    if *u == full {
                        acc += x * y * c;
                    }
                }
            }
        }
        acc * q_factorial(self.ctx.n(), self.ctx.q())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{int, ratio};

    fn ctx(n: usize, q: Rational) -> QContext {
        QContext::new(n, q).unwrap()
    }

    fn set(e: &[usize]) -> Subset {
        Subset::from_elements(e.iter().copied())
    }

    #[test]
    fn multiplication_examples() {
        let c = ctx(2, int(2));
        let u1 = KlyElement::generator(&c, 1);
        let u2 = KlyElement::generator(&c, 2);
        assert_eq!(kly_multiply(&u1, &u2), KlyElement::basis(&c, set(&[1, 2])));
        assert_eq!(
            kly_multiply(&u1, &u1),
            KlyElement::from_terms(&c, [(set(&[1, 2]), ratio(1, 3))])
        );
        let c1 = ctx(1, ratio(5, 2));
        let v = KlyElement::generator(&c1, 1);
        assert!(kly_multiply(&v, &v).is_zero());
    }

    #[test]
    fn degree_examples() {
        for q in [int(1), int(2), ratio(1, 3)] {
            let c = ctx(3, q.clone());
            let top = KlyElement::basis(&c, Subset::full(3));
            assert_eq!(kly_degree(&top).unwrap(), q_factorial(3, &q));
        }
        let c = ctx(2, int(2));
        let u1 = KlyElement::generator(&c, 1);
        let u2 = KlyElement::generator(&c, 2);
        assert_eq!(kly_degree(&kly_multiply(&u1, &u1)).unwrap(), int(1));
        assert_eq!(kly_degree(&kly_multiply(&u2, &u2)).unwrap(), int(2));
        assert_eq!(kly_degree(&u1), Err(Error::WrongDegree { expected: 2 }));
        assert_eq!(kly_degree(&KlyElement::zero(&c)).unwrap(), int(0));
    }

    #[test]
    fn monomial_degrees_and_probabilities() {
        let c = ctx(2, int(2));
        assert_eq!(monomial_degree(&c, &ExponentVector::new(vec![1, 1])).unwrap(), int(3));
        assert_eq!(monomial_degree(&c, &ExponentVector::new(vec![2, 0])).unwrap(), int(1));
        assert_eq!(prob_exact(&c, &ExponentVector::new(vec![2, 0])).unwrap(), ratio(1, 3));
        assert_eq!(prob_exact(&c, &ExponentVector::new(vec![0, 2])).unwrap(), ratio(2, 3));
        assert_eq!(prob_exact(&c, &ExponentVector::new(vec![1, 1])).unwrap(), int(1));
        let c3 = ctx(3, int(1));
        assert_eq!(monomial_degree(&c3, &ExponentVector::new(vec![1, 2, 0])).unwrap(), int(4));
        assert_eq!(
            prob_exact(&c, &ExponentVector::new(vec![1, 0])),
            Err(Error::WrongMass { expected: 2, actual: 1 })
        );
    }

    #[test]
    fn structure_constant_examples() {
        let c = ctx(3, ratio(3, 2));
        assert_eq!(
            structure_constants(&c, set(&[1]), set(&[2, 3])),
            KlyElement::basis(&c, set(&[1, 2, 3]))
        );
        let c2 = ctx(2, int(2));
        assert_eq!(
            structure_constants(&c2, set(&[1]), set(&[1])),
            KlyElement::from_terms(&c2, [(set(&[1, 2]), ratio(1, 3))])
        );
        let c3 = ctx(3, int(1));
        assert_eq!(
            structure_constants(&c3, set(&[1, 2]), set(&[2])),
            KlyElement::from_terms(&c3, [(set(&[1, 2, 3]), ratio(2, 3))])
        );
    }

    #[test]
    fn cached_algebra_matches_direct_products() {
        let c = ctx(4, ratio(2, 3));
        let alg = KlyAlgebra::new(&c);
        let basis: Vec<Subset> = Subset::all(4).collect();
        for &s in &basis {
            for &t in &basis {
                let a = KlyElement::basis(&c, s);
                let b = KlyElement::basis(&c, t);
                assert_eq!(alg.multiply(&a, &b), kly_multiply(&a, &b), "{s} * {t}");
            }
        }
    }
}
