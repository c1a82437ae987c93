//! The simplicial fan `Sigma_{n,q}` with rays `e_i` and `-alpha_i`.
//!
//! Cones are `sigma_{J,K} = cone{e_j : j in J} + cone{-alpha_k : k in K}` for
//! disjoint `J, K` in `[n]`, where `alpha_k` is the `k`-th column of `A(n,q)`.
//! Divisor classes are indexed by these generators as given, without rescaling to
//! primitive lattice vectors (which do not exist for non-integer `q`).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::absorption::ExponentVector;
use crate::error::{Error, Result};
use crate::exactla::{Rational, RationalMatrix, SolveFailure};
use crate::exec::Exec;
use crate::klyachko::{monomial_degree, KlyAlgebra, KlyElement};
use crate::qcore::{build_a, q_factorial, q_int, QContext};
use crate::subset::Subset;

/// Largest `n` accepted by the exhaustive fan scans.
pub const MAX_FAN_N: usize = 6;

/// A ray generator of the fan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    /// `e_i`, 1-based.
    E(usize),
    /// `-alpha_i`, 1-based.
    NegAlpha(usize),
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::E(i) => write!(f, "e{i}"),
            Generator::NegAlpha(i) => write!(f, "-alpha{i}"),
        }
    }
}

impl Generator {
    pub fn vector(self, a: &RationalMatrix) -> Vec<Rational> {
        match self {
            Generator::E(i) => (0..a.rows()).map(|r| if r + 1 == i { Rational::one() } else { Rational::zero() }).collect(),
            Generator::NegAlpha(k) => a.column(k - 1).into_iter().map(|x| -x).collect(),
        }
    }
}

/// The cone `sigma_{J,K}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConeId {
    j: Subset,
    k: Subset,
}

impl ConeId {
    pub fn new(j: Subset, k: Subset) -> Result<Self> {
        if !j.is_disjoint(k) {
            return Err(Error::Overlap);
        }
        Ok(ConeId { j, k })
    }

    pub fn j(&self) -> Subset {
        self.j
    }

    pub fn k(&self) -> Subset {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.j.len() + self.k.len()
    }

    /// `e_j` for `j` in `J`, then `-alpha_k` for `k` in `K`.
    pub fn generators(&self) -> Vec<Generator> {
        self.j.elements().map(Generator::E).chain(self.k.elements().map(Generator::NegAlpha)).collect()
    }

    pub fn is_face_of(&self, other: &ConeId) -> bool {
        self.j.is_subset_of(other.j) && self.k.is_subset_of(other.k)
    }

    pub fn meet(&self, other: &ConeId) -> ConeId {
        ConeId { j: self.j.intersection(other.j), k: self.k.intersection(other.k) }
    }

    /// Every cone of the fan for the given `n`: `3^n` disjoint pairs.
    pub fn all(n: usize) -> Vec<ConeId> {
        let full = Subset::full(n);
        Subset::all(n)
            .flat_map(|j| {
                let rest = full.difference(j);
                Subset::all(n).filter(move |k| k.is_subset_of(rest)).map(move |k| ConeId { j, k })
            })
            .collect()
    }

    /// Maximal cones: `J` and `K` partition `[n]`.
    pub fn maximal(n: usize) -> Vec<ConeId> {
        let full = Subset::full(n);
        Subset::all(n).map(|j| ConeId { j, k: full.difference(j) }).collect()
    }

    /// Codimension-one cones.
    pub fn walls(n: usize) -> Vec<(ConeId, usize)> {
        let full = Subset::full(n);
        (1..=n)
            .flat_map(|l| {
                let rest = full.difference(Subset::singleton(l));
                Subset::all(n).filter(move |j| j.is_subset_of(rest)).map(move |j| (ConeId { j, k: rest.difference(j) }, l))
            })
            .collect()
    }
}

impl fmt::Display for ConeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sigma_{{{},{}}}", self.j, self.k)
    }
}

/// Generator matrix of a cone, one column per generator.
pub fn cone_generators(ctx: &QContext, c: &ConeId) -> RationalMatrix {
    generator_matrix(&build_a(ctx), &c.generators())
}

fn generator_matrix(a: &RationalMatrix, gens: &[Generator]) -> RationalMatrix {
    let cols: Vec<Vec<Rational>> = gens.iter().map(|g| g.vector(a)).collect();
    RationalMatrix::from_columns(a.rows(), &cols)
}

/// Coordinates of `point` in the cone generators, if the point is in their span.
fn cone_coordinates(g: &RationalMatrix, point: &[Rational]) -> Option<Vec<Rational>> {
    if g.cols() == 0 {
        return point.iter().all(Zero::is_zero).then(Vec::new);
    }
    match g.solve(point) {
        Ok(x) => Some(x),
        Err(SolveFailure::NoSolution) | Err(SolveFailure::Singular) => None,
    }
}

/// Whether `point` is a nonnegative combination of the cone's generators.
pub fn cone_contains(ctx: &QContext, c: &ConeId, point: &[Rational]) -> bool {
    let g = cone_generators(ctx, c);
    cone_coordinates(&g, point).is_some_and(|x| x.iter().all(|v| !v.is_negative()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanReport {
    pub cones: usize,
    pub pairs_checked: usize,
    pub simplicial: bool,
    pub dimension_law: bool,
    pub intersection_law: bool,
    /// Pairs whose intersection is larger than `sigma_{J∩P, K∩Q}`.
    pub intersection_failures: Vec<(ConeId, ConeId)>,
}

impl FanReport {
    pub fn all_pass(&self) -> bool {
        self.simplicial && self.dimension_law && self.intersection_law
    }
}

pub fn check_fan(ctx: &QContext) -> Result<FanReport> {
    check_fan_with(ctx, Exec::default())
}

/// Generator independence and `dim sigma_{J,K} = |J| + |K|` for every cone, and
/// `sigma_{J,K} ∩ sigma_{P,Q} = sigma_{J∩P, K∩Q}` for every unordered pair, decided
/// exactly.
pub fn check_fan_with(ctx: &QContext, exec: Exec) -> Result<FanReport> {
    let n = ctx.n();
    if n > MAX_FAN_N {
        return Err(Error::TooLarge(format!("exhaustive fan scan needs n <= {MAX_FAN_N}, got {n}")));
    }
    let a = build_a(ctx);
    let cones = ConeId::all(n);
    let ranks = exec.map(&cones, |c| cone_generators(ctx, c).rank());
    let simplicial = cones.iter().zip(&ranks).all(|(c, &r)| r == c.generators().len());
    let dimension_law = cones.iter().zip(&ranks).all(|(c, &r)| r == c.dim());

    let failures: Vec<Vec<(ConeId, ConeId)>> = exec.map_range(cones.len(), |i| {
        cones[i..]
            .iter()
            .filter(|other| !intersection_is_common_face(&a, &cones[i], other))
            .map(|other| (cones[i], *other))
            .collect()
    });
    let intersection_failures: Vec<(ConeId, ConeId)> = failures.into_iter().flatten().collect();
    let pairs_checked = cones.len() * (cones.len() + 1) / 2;
    Ok(FanReport {
        cones: cones.len(),
        pairs_checked,
        simplicial,
        dimension_law,
        intersection_law: intersection_failures.is_empty(),
        intersection_failures,
    })
}

/// Decides `s1 ∩ s2 = cone(common generators)` for two simplicial cones.
///
/// A point of the intersection is `G1 a + G_T b = G2 c + G_T d` with `a, b, c, d >= 0`,
/// where `T` is the set of shared generators. It lies in `cone(T)` iff `a = 0`, and
/// `a = 0` forces `c = 0` by independence of the generators of `s2`. So the law holds
/// iff the kernel of `[G1 | -G2 | G_T]`, projected to the `(a, c)` coordinates, meets
/// the nonnegative orthant only in 0. With `B` a basis of that projection, this is
/// asking whether the pointed cone `{z : B z >= 0}` is trivial, which is settled by
/// testing its candidate extreme rays.
fn intersection_is_common_face(a: &RationalMatrix, s1: &ConeId, s2: &ConeId) -> bool {
    if s1.is_face_of(s2) || s2.is_face_of(s1) {
        return true;
    }
    let g1 = s1.generators();
    let g2 = s2.generators();
    let shared: Vec<Generator> = g1.iter().filter(|g| g2.contains(g)).copied().collect();
    let only1: Vec<Generator> = g1.iter().filter(|g| !shared.contains(g)).copied().collect();
    let only2: Vec<Generator> = g2.iter().filter(|g| !shared.contains(g)).copied().collect();
    let dim = a.rows();
    let mut cols: Vec<Vec<Rational>> = only1.iter().map(|g| g.vector(a)).collect();
    cols.extend(only2.iter().map(|g| g.vector(a).into_iter().map(|x| -x).collect::<Vec<_>>()));
    cols.extend(shared.iter().map(|g| g.vector(a)));
    let m = only1.len() + only2.len();
    let kernel = RationalMatrix::from_columns(dim, &cols).nullspace();
    if kernel.is_empty() {
        return true;
    }
    let proj: Vec<Vec<Rational>> = kernel.iter().map(|v| v[..m].to_vec()).collect();
    let b = RationalMatrix::from_columns(m, &proj);
    !has_nonzero_nonnegative_image(&b)
}

/// Whether some `z` has `B z >= 0` and `B z != 0`, for `B` of full column rank.
fn has_nonzero_nonnegative_image(b: &RationalMatrix) -> bool {
    let d = b.cols();
    let m = b.rows();
    let nonneg = |v: &[Rational]| v.iter().all(|x| !x.is_negative()) && v.iter().any(|x| !x.is_zero());
    let test = |ray: &[Rational]| {
        let img = b.mul_vec(ray);
        let neg: Vec<Rational> = img.iter().map(|x| -x).collect();
        nonneg(&img) || nonneg(&neg)
    };
    if d == 1 {
        return test(&[Rational::one()]);
    }
    // every extreme ray has d - 1 independent tight rows
    let mut chosen = Vec::with_capacity(d - 1);
    fn rec<F: Fn(&[Rational]) -> bool>(
        b: &RationalMatrix,
        start: usize,
        want: usize,
        chosen: &mut Vec<usize>,
        test: &F,
    ) -> bool {
        if chosen.len() == want {
            let rows: Vec<Vec<Rational>> = chosen.iter().map(|&r| b.row(r).to_vec()).collect();
            let ns = RationalMatrix::from_rows(rows).nullspace();
            return ns.len() == 1 && test(&ns[0]);
        }
        for r in start..b.rows() {
            if b.rows() - r < want - chosen.len() {
                break;
            }
            chosen.push(r);
            if rec(b, r + 1, want, chosen, test) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    m >= d - 1 && rec(b, 0, d - 1, &mut chosen, &test)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletenessReport {
    pub walls: usize,
    /// Every wall lies in exactly two maximal cones, whose extra generators sit on
    /// opposite sides of it.
    pub wall_count_ok: bool,
    pub samples: usize,
    pub uncovered: usize,
    /// Samples in the interior of two or more maximal cones.
    pub interior_overlaps: usize,
    pub coverage_ok: bool,
}

impl CompletenessReport {
    pub fn all_pass(&self) -> bool {
        self.wall_count_ok && self.coverage_ok
    }
}

pub fn check_complete(ctx: &QContext, samples: usize, seed: u64) -> Result<CompletenessReport> {
    check_complete_with(ctx, samples, seed, Exec::default())
}

/// Sample `s` is drawn from the ChaCha8 stream `s` of `seed`, with integer
/// coordinates in `[-1000, 1000]`.
pub fn check_complete_with(ctx: &QContext, samples: usize, seed: u64, exec: Exec) -> Result<CompletenessReport> {
    let n = ctx.n();
    if n > MAX_FAN_N {
        return Err(Error::TooLarge(format!("completeness scan needs n <= {MAX_FAN_N}, got {n}")));
    }
    let maximal = ConeId::maximal(n);
    let walls = ConeId::walls(n);
    let wall_ok = exec.map(&walls, |(w, l)| {
        let containing = maximal.iter().filter(|m| w.is_face_of(m)).count();
        let opposite = wall_relation(ctx, w, *l).is_ok_and(|wd| {
            wd.coefficient(Generator::E(*l)).is_positive() && wd.coefficient(Generator::NegAlpha(*l)).is_positive()
        });
        containing == 2 && opposite
    });
    let wall_count_ok = wall_ok.iter().all(|&b| b);

    // inverses scaled to integer matrices by a positive common denominator
    let inverses: Vec<Vec<Vec<BigInt>>> = exec
        .map(&maximal, |m| cone_generators(ctx, m).inverse().map(|inv| integer_rows(&inv)))
        .into_iter()
        .collect::<Result<_>>()?;
    let hits = exec.map_range(samples, |s| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(s as u64);
        let p: Vec<BigInt> = (0..n).map(|_| BigInt::from(rng.random_range(-1000i64..=1000))).collect();
        let mut covered = false;
        let mut interior = 0;
        for inv in &inverses {
            let lambda: Vec<BigInt> = inv.iter().map(|row| row.iter().zip(&p).map(|(a, b)| a * b).sum()).collect();
            if lambda.iter().all(|x| !x.is_negative()) {
                covered = true;
                if lambda.iter().all(Signed::is_positive) {
                    interior += 1;
                }
            }
        }
        (covered, interior > 1)
    });
    let uncovered = hits.iter().filter(|h| !h.0).count();
    let interior_overlaps = hits.iter().filter(|h| h.1).count();
    Ok(CompletenessReport {
        walls: walls.len(),
        wall_count_ok,
        samples,
        uncovered,
        interior_overlaps,
        coverage_ok: uncovered == 0,
    })
}

/// The linear relation among the `n + 1` rays of the two maximal cones that share a
/// wall.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallData {
    pub wall: ConeId,
    pub missing: usize,
    pub coefficients: BTreeMap<Generator, Rational>,
}

impl WallData {
    pub fn coefficient(&self, g: Generator) -> Rational {
        self.coefficients.get(&g).cloned().unwrap_or_else(Rational::zero)
    }

    /// `-alpha` coefficients nonnegative and the one at the missing index positive.
    pub fn is_positive(&self) -> bool {
        self.coefficients
            .iter()
            .filter(|(g, _)| matches!(g, Generator::NegAlpha(_)))
            .all(|(_, c)| !c.is_negative())
            && self.coefficient(Generator::NegAlpha(self.missing)).is_positive()
    }
}

/// Kernel of the generator matrix of `sigma_{J+l,K} ∪ sigma_{J,K+l}`, scaled to a
/// primitive integer vector with a positive coefficient on `e_l`.
pub fn wall_relation(ctx: &QContext, wall: &ConeId, missing: usize) -> Result<WallData> {
    let n = ctx.n();
    if wall.dim() + 1 != n {
        return Err(Error::InvalidParameter(format!("{wall} is not a wall for n = {n}")));
    }
    if missing == 0 || missing > n || wall.j.contains(missing) || wall.k.contains(missing) {
        return Err(Error::IndexOutOfRange(format!("index {missing} is not the index missing from {wall}")));
    }
    let a = build_a(ctx);
    let mut gens = wall.generators();
    gens.push(Generator::E(missing));
    gens.push(Generator::NegAlpha(missing));
    let kernel = generator_matrix(&a, &gens).nullspace();
    if kernel.len() != 1 {
        return Err(Error::Dimension(format!("wall relation kernel has dimension {}", kernel.len())));
    }
    let v = primitive_integer(&kernel[0]);
    let e_pos = gens.len() - 2;
    let sign = if v[e_pos].is_negative() { -Rational::one() } else { Rational::one() };
    let coefficients = gens
        .iter()
        .zip(v)
        .filter(|(_, c)| !c.is_zero())
        .map(|(g, c)| (*g, c * &sign))
        .collect();
    Ok(WallData { wall: *wall, missing, coefficients })
}

fn integer_rows(m: &RationalMatrix) -> Vec<Vec<BigInt>> {
    let l = (0..m.rows()).flat_map(|r| m.row(r).iter()).fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    (0..m.rows()).map(|r| m.row(r).iter().map(|x| x.numer() * (&l / x.denom())).collect()).collect()
}

/// Scales a rational vector to coprime integers (keeping the direction).
fn primitive_integer(v: &[Rational]) -> Vec<Rational> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v.to_vec();
    }
    ints.into_iter().map(|x| Rational::from_integer(x / &g)).collect()
}

pub fn all_wall_relations(ctx: &QContext) -> Result<Vec<WallData>> {
    all_wall_relations_with(ctx, Exec::default())
}

pub fn all_wall_relations_with(ctx: &QContext, exec: Exec) -> Result<Vec<WallData>> {
    exec.map(&ConeId::walls(ctx.n()), |(w, l)| wall_relation(ctx, w, *l)).into_iter().collect()
}

/// Toric Kleiman check for `D = sum a_i D_{-alpha_i}`: positive on every invariant
/// curve, read off the wall relations.
pub fn check_ample(ctx: &QContext, a: &[Rational]) -> Result<bool> {
    if a.len() != ctx.n() {
        return Err(Error::Dimension(format!("expected {} coefficients, got {}", ctx.n(), a.len())));
    }
    if a.iter().any(|x| !x.is_positive()) {
        return Err(Error::InvalidParameter("ample check needs positive coefficients".into()));
    }
    Ok(all_wall_relations(ctx)?.iter().all(|w| curve_degree(w, a).is_positive()))
}

/// `sum_j a_j (coefficient of -alpha_j)` for a wall relation.
pub fn curve_degree(w: &WallData, a: &[Rational]) -> Rational {
    w.coefficients
        .iter()
        .filter_map(|(g, c)| match g {
            Generator::NegAlpha(j) => Some(c * &a[j - 1]),
            Generator::E(_) => None,
        })
        .fold(Rational::zero(), |x, y| x + y)
}

/// A polynomial in `X_1..X_n` as exponent vector -> coefficient.
pub type Poly = BTreeMap<Vec<u32>, Rational>;

/// Variables of the Stanley-Reisner ring: one per ray.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SrPresentation {
    /// Minimal non-faces of the fan, as sets of rays.
    pub minimal_nonfaces: Vec<Vec<Generator>>,
    /// `Y_i = sum_j coeff_ij X_j`, one linear form in the `X` per `i`.
    pub linear_forms: Vec<Vec<Rational>>,
    /// Non-face monomials after substituting the linear forms.
    pub eliminated: Vec<Poly>,
    /// `(q+1) X_i^2 - X_i X_{i+1} - q X_i X_{i-1}`.
    pub klyachko_relations: Vec<Poly>,
    /// Both relation sets generate the same ideal in every degree up to `n + 1`.
    pub relations_match: bool,
    /// Dimension of each graded piece of `Q[X] / (eliminated)`, degrees `0..=n+1`.
    pub graded_dims: Vec<usize>,
    /// `C(n, k)` for `k = 0..=n`, then 0.
    pub expected_dims: Vec<usize>,
}

impl SrPresentation {
    pub fn all_pass(&self) -> bool {
        self.relations_match && self.graded_dims == self.expected_dims
    }
}

fn var(n: usize, i: usize) -> Vec<u32> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let slot = out.entry(e).or_insert_with(Rational::zero);
            *slot += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Degree-`d` part of the ideal generated by homogeneous `gens`, as a spanning matrix
/// over the degree-`d` monomials.
fn ideal_piece(n: usize, gens: &[Poly], d: usize) -> (RationalMatrix, Vec<Vec<u32>>) {
    let monomials: Vec<Vec<u32>> = ExponentVector::all_of_mass(n, d).into_iter().map(|e| e.as_slice().to_vec()).collect();
    let index: BTreeMap<&Vec<u32>, usize> = monomials.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut rows = Vec::new();
    for g in gens {
        let gd = g.keys().next().map_or(0, |e| e.iter().sum::<u32>() as usize);
        if gd > d {
            continue;
        }
        for m in ExponentVector::all_of_mass(n, d - gd) {
            let mono: Poly = [(m.as_slice().to_vec(), Rational::one())].into_iter().collect();
            let p = poly_mul(g, &mono);
            let mut row = vec![Rational::zero(); monomials.len()];
            for (e, c) in p {
                row[index[&e]] = c;
            }
            rows.push(row);
        }
    }
    let mat = if rows.is_empty() { RationalMatrix::zeros(0, monomials.len()) } else { RationalMatrix::from_rows(rows) };
    (mat, monomials)
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Builds the Stanley-Reisner presentation from the fan, eliminates the `Y`
/// variables and compares with the q-Klyachko relations.
pub fn sr_presentation(ctx: &QContext) -> Result<SrPresentation> {
    let n = ctx.n();
    if n > MAX_FAN_N {
        return Err(Error::TooLarge(format!("presentation scan needs n <= {MAX_FAN_N}, got {n}")));
    }
    let a = build_a(ctx);
    let rays: Vec<Generator> = (1..=n).map(Generator::E).chain((1..=n).map(Generator::NegAlpha)).collect();

    // ray subsets are faces iff they index a cone, i.e. J and K are disjoint
    let is_face = |mask: u32| {
        let (mut j, mut k) = (Subset::EMPTY, Subset::EMPTY);
        for (b, r) in rays.iter().enumerate() {
            if mask & (1 << b) != 0 {
                match r {
                    Generator::E(i) => j = j.union(Subset::singleton(*i)),
                    Generator::NegAlpha(i) => k = k.union(Subset::singleton(*i)),
                }
            }
        }
        j.is_disjoint(k)
    };
    let minimal_nonfaces: Vec<Vec<Generator>> = (0..1u32 << rays.len())
        .filter(|&m| !is_face(m) && (0..rays.len()).filter(|b| m & (1 << b) != 0).all(|b| is_face(m & !(1 << b))))
        .map(|m| (0..rays.len()).filter(|b| m & (1 << b) != 0).map(|b| rays[b]).collect())
        .collect();

    // linear relations sum_rho <e_i^*, v_rho> D_rho = 0; the coefficient of D_{e_i}
    // is 1, so Y_i = -sum_j (-alpha_j)_i X_j
    let linear_forms: Vec<Vec<Rational>> = (0..n)
        .map(|i| (1..=n).map(|j| -Generator::NegAlpha(j).vector(&a)[i].clone()).collect())
        .collect();
    let ray_poly = |g: &Generator| -> Poly {
        match g {
            Generator::NegAlpha(j) => [(var(n, j - 1), Rational::one())].into_iter().collect(),
            Generator::E(i) => linear_forms[i - 1]
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(j, c)| (var(n, j), c.clone()))
                .collect(),
        }
    };
    let eliminated: Vec<Poly> = minimal_nonfaces
        .iter()
        .map(|nf| nf.iter().fold([(vec![0; n], Rational::one())].into_iter().collect::<Poly>(), |acc, g| poly_mul(&acc, &ray_poly(g))))
        .collect();

    let q = ctx.q();
    let klyachko_relations: Vec<Poly> = (0..n)
        .map(|i| {
            let mut p = Poly::new();
            let mut sq = vec![0; n];
            sq[i] = 2;
            p.insert(sq, q + Rational::one());
            if i + 1 < n {
                let mut e = vec![0; n];
                e[i] = 1;
                e[i + 1] = 1;
                p.insert(e, -Rational::one());
            }
            if i > 0 {
                let mut e = vec![0; n];
                e[i] = 1;
                e[i - 1] = 1;
                p.insert(e, -q.clone());
            }
            p
        })
        .collect();

    let mut relations_match = true;
    let mut graded_dims = Vec::with_capacity(n + 2);
    for d in 0..=n + 1 {
        let (sr, monos) = ideal_piece(n, &eliminated, d);
        let (kl, _) = ideal_piece(n, &klyachko_relations, d);
        let r_sr = sr.rank();
        let r_kl = kl.rank();
        if d >= 2 {
            let mut both: Vec<Vec<Rational>> = (0..sr.rows()).map(|r| sr.row(r).to_vec()).collect();
            both.extend((0..kl.rows()).map(|r| kl.row(r).to_vec()));
            let joint = if both.is_empty() { 0 } else { RationalMatrix::from_rows(both).rank() };
            relations_match &= r_sr == r_kl && joint == r_sr;
        }
        graded_dims.push(monos.len() - r_sr);
    }
    let expected_dims = (0..=n + 1).map(|k| binomial(n, k)).collect();
    Ok(SrPresentation { minimal_nonfaces, linear_forms, eliminated, klyachko_relations, relations_match, graded_dims, expected_dims })
}

/// `∫ prod D_{-alpha_i}^{eta(i)}` with `∫ D_{-alpha_1} ... D_{-alpha_n} = 1/|det A(n,q)|`.
pub fn toric_top_integral(ctx: &QContext, eta: &ExponentVector) -> Result<Rational> {
    let md = monomial_degree(ctx, eta)?;
    Ok(md / q_factorial(ctx.n(), ctx.q()) / build_a(ctx).det().abs())
}

/// Cross-check of the integral normalization against every maximal cone: the
/// product of its divisors must integrate to `1/|det(generators)|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityCheck {
    pub cone: ConeId,
    pub integral: Rational,
    pub expected: Rational,
}

pub fn check_multiplicities(ctx: &QContext) -> Vec<MultiplicityCheck> {
    let n = ctx.n();
    let a = build_a(ctx);
    let alg = KlyAlgebra::new(ctx);
    let det_a = a.det().abs();
    // D_{e_i} = Y_i = sum_j A_ij X_j and X_j = u_j
    let y: Vec<KlyElement> = (0..n).map(|i| KlyElement::linear(ctx, a.row(i))).collect();
    ConeId::maximal(n)
        .into_iter()
        .map(|c| {
            let prod = c
                .j
                .elements()
                .map(|i| y[i - 1].clone())
                .chain(c.k.elements().map(|k| KlyElement::generator(ctx, k)))
                .fold(KlyElement::one(ctx), |acc, f| alg.multiply(&acc, &f));
            let integral = prod.coefficient(Subset::full(n)) / &det_a;
            let expected = cone_generators(ctx, &c).det().abs().recip();
            MultiplicityCheck { cone: c, integral, expected }
        })
        .collect()
}

/// For integer `q`, whether every ray generator is a primitive lattice vector.
/// `None` when `q` is not an integer.
pub fn check_lattice_primitive(ctx: &QContext) -> Option<bool> {
    if !ctx.q().is_integer() {
        return None;
    }
    let a = build_a(ctx);
    let n = ctx.n();
    let rays = (1..=n).map(Generator::E).chain((1..=n).map(Generator::NegAlpha));
    Some(rays.into_iter().all(|g| {
        let v = g.vector(&a);
        v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x.numer())).is_one()
    }))
}

/// The ratio `toric_top_integral(eta) / deg(u^eta)` over all `eta` of mass `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizationReport {
    /// The common ratio, `None` if it depends on `eta`.
    pub constant: Option<Rational>,
    /// `1 / ((n+1)_q (n)_q!)`: `|det A|^-1` with `det A = (n+1)_q`.
    pub det_bookkeeping: Rational,
    /// `1 / ((n)_q!)^2`: `|det A|^-1` read as `((n)_q!)^-1`.
    pub factorial_squared: Rational,
    pub matches_det_bookkeeping: bool,
    pub matches_factorial_squared: bool,
}

pub fn normalization_report(ctx: &QContext) -> Result<NormalizationReport> {
    let n = ctx.n();
    let q = ctx.q();
    let mut constant: Option<Option<Rational>> = None;
    for eta in ExponentVector::all_of_mass(n, n) {
        let md = monomial_degree(ctx, &eta)?;
        if md.is_zero() {
            continue;
        }
        let r = toric_top_integral(ctx, &eta)? / md;
        constant = Some(match constant {
            None => Some(r),
            Some(Some(c)) if c == r => Some(c),
            Some(_) => None,
        });
    }
    let constant = constant.flatten();
    let fact = q_factorial(n, q);
    let det_bookkeeping = (q_int(n + 1, q) * &fact).recip();
    let factorial_squared = (&fact * &fact).recip();
    Ok(NormalizationReport {
        matches_det_bookkeeping: constant.as_ref() == Some(&det_bookkeeping),
        matches_factorial_squared: constant.as_ref() == Some(&factorial_squared),
        constant,
        det_bookkeeping,
        factorial_squared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{int, ratio};

    fn ctx(n: usize, q: Rational) -> QContext {
        QContext::new(n, q).unwrap()
    }

    fn cone(j: &[usize], k: &[usize]) -> ConeId {
        ConeId::new(Subset::from_elements(j.iter().copied()), Subset::from_elements(k.iter().copied())).unwrap()
    }

    #[test]
    fn generators_n2_q2() {
        let c = ctx(2, int(2));
        assert_eq!(cone_generators(&c, &cone(&[1, 2], &[])), RationalMatrix::identity(2));
        assert_eq!(cone_generators(&c, &cone(&[], &[1])), RationalMatrix::from_i64_rows(&[&[-3], &[2]]));
        assert_eq!(cone_generators(&c, &cone(&[], &[2])), RationalMatrix::from_i64_rows(&[&[1], &[-3]]));
        assert!(matches!(ConeId::new(Subset::singleton(1), Subset::singleton(1)), Err(Error::Overlap)));
    }

    #[test]
    fn containment() {
        let c = ctx(2, int(2));
        for id in ConeId::all(2) {
            assert!(cone_contains(&c, &id, &[int(0), int(0)]));
        }
        assert!(cone_contains(&c, &cone(&[1, 2], &[]), &[int(1), int(1)]));
        // (-1, 0) = (3/7)(-alpha_1) + (2/7)(-alpha_2)
        assert!(cone_contains(&c, &cone(&[], &[1, 2]), &[int(-1), int(0)]));
        assert!(!cone_contains(&c, &cone(&[2], &[1]), &[int(-1), int(0)]));
        // (-1, 4/3) = (2/3) e_2 + (1/3)(-alpha_1)
        assert!(cone_contains(&c, &cone(&[2], &[1]), &[int(-1), ratio(4, 3)]));
        assert!(!cone_contains(&c, &cone(&[1], &[]), &[int(1), int(1)]));
    }

    #[test]
    fn fan_small() {
        let r = check_fan(&ctx(2, int(2))).unwrap();
        assert!(r.all_pass());
        assert_eq!(r.cones, 9);
        let r = check_fan(&ctx(1, ratio(1, 2))).unwrap();
        assert!(r.all_pass());
        assert_eq!(r.cones, 3);
        assert!(check_fan(&ctx(3, ratio(1, 2))).unwrap().all_pass());
    }

    #[test]
    fn intersection_test_detects_overlap() {
        // cone{e1, e2} against cone{e1 + e2 direction}: overlapping, not a common face
        let a = RationalMatrix::from_i64_rows(&[&[1, 1], &[1, 2]]);
        // alpha columns (1,1) and (1,2); -alpha_1 = (-1,-1), e1 and e2 span the orthant
        // sigma_{{1},{}} vs sigma_{{},{1}} meet only at 0
        assert!(intersection_is_common_face(&a, &cone(&[1], &[]), &cone(&[], &[1])));
        // a fake generator set whose cones overlap: e1,e2 vs e1 and (1,1) = -(-alpha_1)
        let b = RationalMatrix::from_i64_rows(&[&[-1, 0], &[-1, 0]]);
        // -alpha_1 = (1, 1) lies inside cone{e1, e2}
        assert!(!intersection_is_common_face(&b, &cone(&[1, 2], &[]), &cone(&[], &[1])));
    }

    #[test]
    fn completeness_small() {
        let r = check_complete(&ctx(2, int(2)), 2000, 5).unwrap();
        assert!(r.all_pass(), "{r:?}");
        assert_eq!(r.interior_overlaps, 0);
        assert_eq!(r.walls, 4);
    }

    #[test]
    fn wall_relation_examples() {
        let c = ctx(2, int(2));
        let w = wall_relation(&c, &cone(&[2], &[]), 1).unwrap();
        assert_eq!(w.coefficient(Generator::E(1)), int(3));
        assert_eq!(w.coefficient(Generator::NegAlpha(1)), int(1));
        assert_eq!(w.coefficient(Generator::E(2)), int(-2));
        let w = wall_relation(&c, &cone(&[], &[2]), 1).unwrap();
        assert_eq!(w.coefficient(Generator::E(1)), int(7));
        assert_eq!(w.coefficient(Generator::NegAlpha(1)), int(3));
        assert_eq!(w.coefficient(Generator::NegAlpha(2)), int(2));
        let w = wall_relation(&ctx(1, int(4)), &cone(&[], &[]), 1).unwrap();
        assert_eq!(w.coefficient(Generator::E(1)), int(5));
        assert_eq!(w.coefficient(Generator::NegAlpha(1)), int(1));
        // non-integer q: proportional to (q+1, 1)
        let w = wall_relation(&ctx(1, ratio(1, 2)), &cone(&[], &[]), 1).unwrap();
        assert_eq!(w.coefficient(Generator::E(1)), int(3));
        assert_eq!(w.coefficient(Generator::NegAlpha(1)), int(2));
        assert!(wall_relation(&c, &cone(&[2], &[]), 2).is_err());
        assert!(wall_relation(&c, &cone(&[], &[]), 1).is_err());
    }

    #[test]
    fn ample_examples() {
        assert!(check_ample(&ctx(2, int(2)), &[int(1), int(1)]).unwrap());
        assert!(check_ample(&ctx(1, int(1)), &[int(1)]).unwrap());
        assert!(check_ample(&ctx(4, ratio(1, 2)), &[int(1), int(2), int(3), int(4)]).unwrap());
        assert!(check_ample(&ctx(2, int(2)), &[int(1), int(0)]).is_err());
    }

    #[test]
    fn sr_examples() {
        let p = sr_presentation(&ctx(1, ratio(2, 3))).unwrap();
        assert_eq!(p.eliminated, vec![[(vec![2], ratio(5, 3))].into_iter().collect::<Poly>()]);
        assert!(p.all_pass());
        let p = sr_presentation(&ctx(2, int(2))).unwrap();
        let x1x1: Poly = [(vec![2, 0], int(3)), (vec![1, 1], int(-1))].into_iter().collect();
        let x2x2: Poly = [(vec![0, 2], int(3)), (vec![1, 1], int(-2))].into_iter().collect();
        assert!(p.eliminated.contains(&x1x1));
        assert!(p.eliminated.contains(&x2x2));
        assert_eq!(p.minimal_nonfaces.len(), 2);
        assert_eq!(p.graded_dims, vec![1, 2, 1, 0]);
        assert!(p.all_pass());
        let p = sr_presentation(&ctx(3, int(3))).unwrap();
        assert_eq!(p.graded_dims, vec![1, 3, 3, 1, 0]);
        assert!(p.all_pass());
    }

    #[test]
    fn top_integrals() {
        let c = ctx(2, int(2));
        assert_eq!(toric_top_integral(&c, &ExponentVector::new(vec![1, 1])).unwrap(), ratio(1, 7));
        assert_eq!(toric_top_integral(&c, &ExponentVector::new(vec![2, 0])).unwrap(), ratio(1, 21));
        let q = ratio(3, 5);
        assert_eq!(toric_top_integral(&ctx(1, q.clone()), &ExponentVector::new(vec![1])).unwrap(), (q + int(1)).recip());
    }

    #[test]
    fn multiplicities_match_cone_determinants() {
        for (n, q) in [(2, int(2)), (3, ratio(1, 2)), (3, int(3))] {
            for m in check_multiplicities(&ctx(n, q)) {
                assert_eq!(m.integral, m.expected, "{}", m.cone);
            }
        }
    }

    #[test]
    fn lattice_primitive() {
        assert_eq!(check_lattice_primitive(&ctx(3, int(2))), Some(true));
        assert_eq!(check_lattice_primitive(&ctx(3, ratio(1, 2))), None);
    }
}
