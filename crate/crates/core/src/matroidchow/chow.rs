use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use super::flats::FlatLattice;
use crate::absorption::ExponentVector;
use crate::error::{Error, Result};
use crate::exactla::{Rational, RationalMatrix};
use crate::klyachko::monomial_degree;
use crate::qcore::{q_int, QContext};

/// Largest number of chain monomials allowed in one graded piece.
pub const MAX_PIECE_COLUMNS: usize = 60_000;

/// Sorted flat indices, with repetition.
pub type Monomial = Vec<usize>;
/// Homogeneous polynomial in the `x_F`.
pub type Poly = BTreeMap<Monomial, Rational>;

type SparseRow = BTreeMap<usize, Rational>;

/// A class in `CH^k`, in the coordinates of that piece's monomial basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChowClass {
    degree: usize,
    coeffs: Vec<Rational>,
}

impl ChowClass {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &ChowClass) -> ChowClass {
        assert_eq!(self.degree, other.degree, "adding classes of different degrees");
        ChowClass { degree: self.degree, coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &ChowClass) -> ChowClass {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> ChowClass {
        ChowClass { degree: self.degree, coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }
}

/// `CH^k` as chain-supported monomials modulo the degree-`k` part of the linear
/// relations (non-chain monomials are already zero).
#[derive(Clone, Debug)]
pub struct GradedPiece {
    degree: usize,
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    echelon: HashMap<usize, SparseRow>,
    /// Monomial columns that survive as basis vectors.
    basis: Vec<usize>,
    basis_pos: HashMap<usize, usize>,
}

impl GradedPiece {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_monomials(&self) -> Vec<&Monomial> {
        self.basis.iter().map(|&c| &self.monomials[c]).collect()
    }

    pub fn chain_monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    fn reduce(&self, mut v: SparseRow) -> SparseRow {
        let mut from = 0;
        while let Some(k) = v.range(from..).map(|(k, _)| *k).find(|k| self.echelon.contains_key(k)) {
            let c = v.remove(&k).expect("key present");
            for (col, x) in self.echelon[&k].range(k + 1..) {
                let e = v.entry(*col).or_insert_with(Rational::zero);
                *e -= &c * x;
                if e.is_zero() {
                    v.remove(col);
                }
            }
            from = k + 1;
        }
        v
    }

    fn insert(&mut self, v: SparseRow) {
        let v = self.reduce(v);
        if let Some((&p, c)) = v.iter().next() {
            let inv = c.recip();
            let row = v.into_iter().map(|(k, x)| (k, x * &inv)).collect();
            self.echelon.insert(p, row);
        }
    }

    /// Normal form of a homogeneous polynomial of this degree. Non-chain monomials
    /// are dropped.
    pub fn normal_form(&self, p: &Poly) -> ChowClass {
        let mut v = SparseRow::new();
        for (m, c) in p {
            if let Some(&col) = self.index.get(m) {
                let e = v.entry(col).or_insert_with(Rational::zero);
                *e += c;
            }
        }
        v.retain(|_, c| !c.is_zero());
        let v = self.reduce(v);
        let mut coeffs = vec![Rational::zero(); self.basis.len()];
        for (col, c) in v {
            coeffs[self.basis_pos[&col]] = c;
        }
        ChowClass { degree: self.degree, coeffs }
    }
}

fn is_chain(lattice: &FlatLattice, m: &[usize]) -> bool {
    m.windows(2).all(|w| w[0] == w[1] || lattice.is_leq(w[0], w[1]) || lattice.is_leq(w[1], w[0]))
}

fn sorted(mut m: Monomial) -> Monomial {
    m.sort_unstable();
    m
}

/// Chain-supported monomials of degree `k`, as nondecreasing index sequences.
fn chain_monomials(lattice: &FlatLattice, k: usize) -> Result<Vec<Monomial>> {
    fn rec(l: &FlatLattice, k: usize, cur: &mut Monomial, out: &mut Vec<Monomial>) -> Result<()> {
        if cur.len() == k {
            if out.len() >= MAX_PIECE_COLUMNS {
                return Err(Error::TooLarge(format!("graded piece has more than {MAX_PIECE_COLUMNS} chain monomials")));
            }
            out.push(cur.clone());
            return Ok(());
        }
        let start = cur.last().copied().unwrap_or(0);
        for j in start..l.len() {
            // flats are sorted by rank, so a chain extends upward
            if cur.last().is_none_or(|&last| last == j || l.is_leq(last, j)) {
                cur.push(j);
                rec(l, k, cur, out)?;
                cur.pop();
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    rec(lattice, k, &mut Vec::new(), &mut out)?;
    Ok(out)
}

/// `sum_{F ⊆ H} x_F` as a linear form.
fn hyperplane_sum(lattice: &FlatLattice, h: usize) -> Vec<usize> {
    (0..lattice.len()).filter(|&f| lattice.is_leq(f, h)).collect()
}

/// Basis and normal form of `CH^k` of the matroid `PG(n, q)`.
pub fn graded_basis(lattice: &FlatLattice, k: usize) -> Result<GradedPiece> {
    if k > lattice.n() {
        return Err(Error::InvalidParameter(format!("degree {k} exceeds n = {}", lattice.n())));
    }
    let monomials = chain_monomials(lattice, k)?;
    let index: HashMap<Monomial, usize> = monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let mut piece = GradedPiece {
        degree: k,
        monomials,
        index,
        echelon: HashMap::new(),
        basis: Vec::new(),
        basis_pos: HashMap::new(),
    };
    if k > 0 {
        let hyperplanes: Vec<usize> = lattice.hyperplanes().collect();
        let base = hyperplane_sum(lattice, hyperplanes[0]);
        let generators: Vec<Vec<(usize, Rational)>> = hyperplanes[1..]
            .iter()
            .map(|&h| {
                let mut g: BTreeMap<usize, Rational> = BTreeMap::new();
                for f in hyperplane_sum(lattice, h) {
                    *g.entry(f).or_insert_with(Rational::zero) += Rational::one();
                }
                for &f in &base {
                    *g.entry(f).or_insert_with(Rational::zero) -= Rational::one();
                }
                g.into_iter().filter(|(_, c)| !c.is_zero()).collect()
            })
            .collect();
        for m in chain_monomials(lattice, k - 1)? {
            for g in &generators {
                let mut row = SparseRow::new();
                for (f, c) in g {
                    let mut prod = m.clone();
                    prod.push(*f);
                    let prod = sorted(prod);
                    if let Some(&col) = piece.index.get(&prod) {
                        *row.entry(col).or_insert_with(Rational::zero) += c;
                    }
                }
                row.retain(|_, c| !c.is_zero());
                if !row.is_empty() {
                    piece.insert(row);
                }
            }
        }
    }
    piece.basis = (0..piece.monomials.len()).filter(|c| !piece.echelon.contains_key(c)).collect();
    piece.basis_pos = piece.basis.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    Ok(piece)
}

/// The graded ring `CH(PG(n, q))` with every piece precomputed.
#[derive(Clone, Debug)]
pub struct ChowRing {
    lattice: FlatLattice,
    pieces: Vec<GradedPiece>,
    /// Top coordinate of `alpha^n`.
    alpha_top: Rational,
}

impl ChowRing {
    pub fn new(lattice: FlatLattice) -> Result<Self> {
        let pieces = (0..=lattice.n()).map(|k| graded_basis(&lattice, k)).collect::<Result<Vec<_>>>()?;
        let mut ring = ChowRing { lattice, pieces, alpha_top: Rational::one() };
        if ring.pieces[ring.n()].dim() != 1 {
            return Err(Error::Dimension(format!("top graded piece has dimension {}", ring.pieces[ring.n()].dim())));
        }
        let top = ring.pow(&class_alpha(&ring), ring.n());
        ring.alpha_top = top.coeffs[0].clone();
        if ring.alpha_top.is_zero() {
            return Err(Error::Singular);
        }
        Ok(ring)
    }

    pub fn lattice(&self) -> &FlatLattice {
        &self.lattice
    }

    pub fn n(&self) -> usize {
        self.lattice.n()
    }

    pub fn q(&self) -> Rational {
        Rational::from_integer(self.lattice.q().into())
    }

    pub fn piece(&self, k: usize) -> Option<&GradedPiece> {
        self.pieces.get(k)
    }

    pub fn graded_dims(&self) -> Vec<usize> {
        self.pieces.iter().map(GradedPiece::dim).collect()
    }

    pub fn zero(&self, degree: usize) -> ChowClass {
        let dim = self.pieces.get(degree).map_or(0, GradedPiece::dim);
        ChowClass { degree, coeffs: vec![Rational::zero(); dim] }
    }

    pub fn one(&self) -> ChowClass {
        ChowClass { degree: 0, coeffs: vec![Rational::one()] }
    }

    /// Class of a homogeneous polynomial of the given degree; zero above `n`.
    pub fn class_of(&self, degree: usize, p: &Poly) -> ChowClass {
        match self.pieces.get(degree) {
            Some(piece) => piece.normal_form(p),
            None => self.zero(degree),
        }
    }

    /// Class of `sum c_F x_F`.
    pub fn linear(&self, coeffs: &BTreeMap<usize, Rational>) -> ChowClass {
        let p: Poly = coeffs.iter().map(|(f, c)| (vec![*f], c.clone())).collect();
        self.class_of(1, &p)
    }

    pub fn to_poly(&self, c: &ChowClass) -> Poly {
        match self.pieces.get(c.degree) {
            Some(piece) => piece
                .basis
                .iter()
                .zip(&c.coeffs)
                .filter(|(_, x)| !x.is_zero())
                .map(|(&col, x)| (piece.monomials[col].clone(), x.clone()))
                .collect(),
            None => Poly::new(),
        }
    }

    pub fn multiply(&self, a: &ChowClass, b: &ChowClass) -> ChowClass {
        let degree = a.degree + b.degree;
        if degree > self.n() {
            return self.zero(degree);
        }
        let (pa, pb) = (self.to_poly(a), self.to_poly(b));
        let mut prod = Poly::new();
        for (ma, ca) in &pa {
            for (mb, cb) in &pb {
                let m = sorted(ma.iter().chain(mb).copied().collect());
                if is_chain(&self.lattice, &m) {
                    *prod.entry(m).or_insert_with(Rational::zero) += ca * cb;
                }
            }
        }
        self.class_of(degree, &prod)
    }

    pub fn pow(&self, a: &ChowClass, k: usize) -> ChowClass {
        (0..k).fold(self.one(), |acc, _| self.multiply(&acc, a))
    }
}

/// Degree of a top class, normalized by `deg(alpha^n) = 1`.
pub fn chow_degree(ring: &ChowRing, c: &ChowClass) -> Result<Rational> {
    if c.degree != ring.n() {
        return Err(Error::WrongDegree { expected: ring.n() });
    }
    Ok(&c.coeffs[0] / &ring.alpha_top)
}

/// `sum_{F ⊆ H} x_F` for the hyperplane with lattice index `h`.
pub fn alpha_for_hyperplane(ring: &ChowRing, h: usize) -> Result<ChowClass> {
    let l = ring.lattice();
    if !l.hyperplanes().contains(&h) {
        return Err(Error::IndexOutOfRange(format!("flat {h} is not a hyperplane")));
    }
    let coeffs = hyperplane_sum(l, h).into_iter().map(|f| (f, Rational::one())).collect();
    Ok(ring.linear(&coeffs))
}

/// `alpha` computed from the first hyperplane.
pub fn class_alpha(ring: &ChowRing) -> ChowClass {
    let h = ring.lattice().hyperplanes().start;
    alpha_for_hyperplane(ring, h).expect("first hyperplane index")
}

/// All hyperplane sums have the same normal form.
pub fn alpha_is_hyperplane_independent(ring: &ChowRing) -> bool {
    let alpha = class_alpha(ring);
    ring.lattice()
        .hyperplanes()
        .all(|h| alpha_for_hyperplane(ring, h).is_ok_and(|a| a == alpha))
}

fn check_index(ring: &ChowRing, i: usize) -> Result<()> {
    if i == 0 || i > ring.n() {
        return Err(Error::IndexOutOfRange(format!("index {i} outside 1..={}", ring.n())));
    }
    Ok(())
}

/// `a alpha - sum_{codim F >= i} w(codim F) x_F`.
fn alpha_minus(ring: &ChowRing, a: Rational, i: usize, w: impl Fn(usize) -> Rational) -> ChowClass {
    let l = ring.lattice();
    let mut coeffs: BTreeMap<usize, Rational> = hyperplane_sum(l, l.hyperplanes().start)
        .into_iter()
        .map(|f| (f, a.clone()))
        .collect();
    for f in 0..l.len() {
        let c = l.codim(f);
        if c >= i {
            *coeffs.entry(f).or_insert_with(Rational::zero) -= w(c);
        }
    }
    ring.linear(&coeffs)
}

/// `L_i = (n+1-i)_q alpha - sum_{codim F >= i} (codim F - i)_q x_F`.
pub fn class_l(ring: &ChowRing, i: usize) -> Result<ChowClass> {
    check_index(ring, i)?;
    let q = ring.q();
    Ok(alpha_minus(ring, q_int(ring.n() + 1 - i, &q), i, |c| q_int(c - i, &q)))
}

/// `gamma_i = ((n+1)_q - (i)_q) alpha - sum_{codim F >= i} ((codim F)_q - (i)_q) x_F`.
pub fn class_gamma(ring: &ChowRing, i: usize) -> Result<ChowClass> {
    check_index(ring, i)?;
    let q = ring.q();
    let qi = q_int(i, &q);
    Ok(alpha_minus(ring, q_int(ring.n() + 1, &q) - &qi, i, |c| q_int(c, &q) - &qi))
}

/// `gamma_i = q^i L_i` for each `i` in `1..=n`.
pub fn verify_gamma_l(ring: &ChowRing) -> Vec<bool> {
    let q = ring.q();
    (1..=ring.n())
        .map(|i| {
            let g = class_gamma(ring, i).expect("index in range");
            let l = class_l(ring, i).expect("index in range");
            g == l.scale(&num_traits::pow(q.clone(), i))
        })
        .collect()
}

/// `(q+1) v_i^2 = a v_i v_{i+1} + b v_i v_{i-1}` for `i` in `1..=n`, with
/// `v_0 = v_{n+1} = 0`.
fn check_relation(ring: &ChowRing, v: &[ChowClass], a: &Rational, b: &Rational) -> Vec<bool> {
    let n = ring.n();
    let q1 = ring.q() + Rational::one();
    let zero = ring.zero(1);
    let at = |i: usize| if i == 0 || i > n { &zero } else { &v[i - 1] };
    (1..=n)
        .map(|i| {
            let vi = at(i);
            let lhs = ring.multiply(vi, vi).scale(&q1);
            let rhs = ring.multiply(vi, at(i + 1)).scale(a).add(&ring.multiply(vi, at(i - 1)).scale(b));
            lhs == rhs
        })
        .collect()
}

/// `(q+1) gamma_i^2 = gamma_i gamma_{i+1} + q gamma_i gamma_{i-1}`.
pub fn verify_klyachko_relation(ring: &ChowRing) -> Vec<bool> {
    let gammas: Vec<ChowClass> = (1..=ring.n()).map(|i| class_gamma(ring, i).expect("index in range")).collect();
    check_relation(ring, &gammas, &Rational::one(), &ring.q())
}

/// `(q+1) L_i^2 = q L_i L_{i+1} + L_i L_{i-1}`.
pub fn verify_l_relation(ring: &ChowRing) -> Vec<bool> {
    let ls: Vec<ChowClass> = (1..=ring.n()).map(|i| class_l(ring, i).expect("index in range")).collect();
    check_relation(ring, &ls, &ring.q(), &Rational::one())
}

/// Candidate images of the generators `u_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Assignment {
    /// `u_i -> L_i`.
    Identity,
    /// `u_i -> L_{n-i}`, with `L_0 = 0`.
    Complement,
    /// `u_i -> L_{n+1-i}`.
    Reversal,
}

impl Assignment {
    pub const ALL: [Assignment; 3] = [Assignment::Identity, Assignment::Complement, Assignment::Reversal];

    /// Index of the `L` class assigned to `u_i`; 0 stands for the zero class.
    pub fn image(self, n: usize, i: usize) -> usize {
        match self {
            Assignment::Identity => i,
            Assignment::Complement => n - i,
            Assignment::Reversal => n + 1 - i,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Assignment::Identity => "u_i -> L_i",
            Assignment::Complement => "u_i -> L_{n-i}",
            Assignment::Reversal => "u_i -> L_{n+1-i}",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateReport {
    pub assignment: Assignment,
    /// The images satisfy the q-Klyachko relation for each `i`.
    pub relation: Vec<bool>,
    /// Ranks of the span of degree-`k` monomials in the images, `k = 0..=n`.
    pub graded_dims: Vec<usize>,
    pub expected_dims: Vec<usize>,
    /// `deg(v^eta) / deg_{n,q}(u^eta)` when this is the same for every `eta` of mass `n`.
    pub degree_constant: Option<Rational>,
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem1Report {
    pub candidates: Vec<CandidateReport>,
}

impl Theorem1Report {
    pub fn passing(&self) -> Vec<Assignment> {
        self.candidates.iter().filter(|c| c.passes).map(|c| c.assignment).collect()
    }
}

fn monomial_class(ring: &ChowRing, v: &[ChowClass], eta: &ExponentVector) -> ChowClass {
    eta.as_slice()
        .iter()
        .zip(v)
        .fold(ring.one(), |acc, (&e, c)| ring.multiply(&acc, &ring.pow(c, e as usize)))
}

/// Tests each index assignment `u_i -> L_?` against the q-Klyachko relation, the
/// graded dimensions `C(n, k)` of the generated subalgebra, and proportionality of
/// top degrees to `deg_{n,q}`.
pub fn verify_theorem1(ring: &ChowRing) -> Result<Theorem1Report> {
    let n = ring.n();
    let ctx = QContext::new(n, ring.q())?;
    let ls: Vec<ChowClass> = (1..=n).map(|i| class_l(ring, i)).collect::<Result<_>>()?;
    let expected_dims: Vec<usize> = (0..=n).map(|k| binomial(n, k)).collect();
    let mut candidates = Vec::new();
    for assignment in Assignment::ALL {
        let v: Vec<ChowClass> = (1..=n)
            .map(|i| match assignment.image(n, i) {
                0 => ring.zero(1),
                j => ls[j - 1].clone(),
            })
            .collect();
        let relation = check_relation(ring, &v, &Rational::one(), &ring.q());
        let graded_dims: Vec<usize> = (0..=n)
            .map(|k| {
                let rows: Vec<Vec<Rational>> = ExponentVector::all_of_mass(n, k)
                    .iter()
                    .map(|eta| monomial_class(ring, &v, eta).coeffs)
                    .collect();
                if rows.is_empty() || rows[0].is_empty() {
                    0
                } else {
                    RationalMatrix::from_rows(rows).rank()
                }
            })
            .collect();
        let mut ratio: Option<Option<Rational>> = None;
        for eta in ExponentVector::all_of_mass(n, n) {
            let chow = chow_degree(ring, &monomial_class(ring, &v, &eta))?;
            let kly = monomial_degree(&ctx, &eta)?;
            let r = if kly.is_zero() {
                if chow.is_zero() {
                    continue;
                }
                None
            } else {
                Some(chow / kly)
            };
            ratio = Some(match (ratio, r) {
                (None, r) => r,
                (Some(Some(a)), Some(b)) if a == b => Some(a),
                _ => None,
            });
        }
        let degree_constant = ratio.flatten().filter(|c| !c.is_zero());
        let passes = relation.iter().all(|&b| b) && graded_dims == expected_dims && degree_constant.is_some();
        candidates.push(CandidateReport {
            assignment,
            relation,
            graded_dims,
            expected_dims: expected_dims.clone(),
            degree_constant,
            passes,
        });
    }
    Ok(Theorem1Report { candidates })
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::int;
    use crate::matroidchow::enumerate_flats;

    fn ring(n: usize, q: u32) -> ChowRing {
        ChowRing::new(enumerate_flats(n, q).unwrap()).unwrap()
    }

    #[test]
    fn graded_dims() {
        assert_eq!(ring(2, 2).graded_dims(), vec![1, 8, 1]);
        assert_eq!(ring(1, 2).graded_dims(), vec![1, 1]);
        let d = ring(2, 3).graded_dims();
        assert_eq!(d.first(), d.last());
        assert_eq!(d, vec![1, 14, 1]);
    }

    #[test]
    fn alpha() {
        let r = ring(1, 2);
        let a = class_alpha(&r);
        for p in r.lattice().points() {
            assert_eq!(r.linear(&[(p, int(1))].into_iter().collect()), a);
        }
        let r = ring(2, 2);
        assert!(alpha_is_hyperplane_independent(&r));
        assert!(!class_alpha(&r).is_zero());
        assert_eq!(chow_degree(&r, &r.pow(&class_alpha(&r), 2)).unwrap(), int(1));
    }

    #[test]
    fn point_on_line() {
        let r = ring(2, 2);
        let l = r.lattice();
        let h = l.hyperplanes().start;
        let p = l.points().find(|&p| l.is_leq(p, h)).unwrap();
        let off = l.points().find(|&p| !l.is_leq(p, h)).unwrap();
        let x = |f: usize| r.linear(&[(f, int(1))].into_iter().collect());
        assert_eq!(chow_degree(&r, &r.multiply(&x(p), &x(h))).unwrap(), int(1));
        assert_eq!(chow_degree(&r, &r.multiply(&x(off), &x(h))).unwrap(), int(0));
        assert_eq!(chow_degree(&r, &r.multiply(&x(p), &x(p))).unwrap(), int(-1));
        assert!(matches!(chow_degree(&r, &x(p)), Err(Error::WrongDegree { expected: 2 })));
    }

    #[test]
    fn l_and_gamma_pg22() {
        let r = ring(2, 2);
        let l = r.lattice();
        let alpha = class_alpha(&r);
        let points: BTreeMap<usize, Rational> = l.points().map(|p| (p, int(1))).collect();
        let sum_points = r.linear(&points);
        assert_eq!(class_l(&r, 1).unwrap(), alpha.scale(&int(3)).sub(&sum_points));
        assert_eq!(class_gamma(&r, 1).unwrap(), alpha.scale(&int(6)).sub(&sum_points.scale(&int(2))));
        assert_eq!(class_l(&r, 2).unwrap(), alpha);
        assert!(class_l(&r, 3).is_err());
        assert!(class_gamma(&r, 0).is_err());
    }

    #[test]
    fn relations() {
        for (n, q) in [(2, 2), (2, 3), (1, 5)] {
            let r = ring(n, q);
            assert!(verify_gamma_l(&r).iter().all(|&b| b));
            assert!(verify_klyachko_relation(&r).iter().all(|&b| b));
            assert!(verify_l_relation(&r).iter().all(|&b| b));
        }
    }

    #[test]
    fn theorem1_pg22() {
        let r = ring(2, 2);
        let rep = verify_theorem1(&r).unwrap();
        assert_eq!(rep.passing(), vec![Assignment::Reversal]);
        let rev = rep.candidates.iter().find(|c| c.assignment == Assignment::Reversal).unwrap();
        assert_eq!(rev.graded_dims, vec![1, 2, 1]);
        assert_eq!(rev.degree_constant, Some(int(1)));
        // deg(L_2 L_1) = (2)_2! = 3
        let top = r.multiply(&class_l(&r, 2).unwrap(), &class_l(&r, 1).unwrap());
        assert_eq!(chow_degree(&r, &top).unwrap(), int(3));
    }
}
