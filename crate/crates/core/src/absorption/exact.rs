use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::{ExponentVector, SelectionRule};
use crate::error::{Error, Result};
use crate::exactla::{Rational, RationalMatrix};
use crate::qcore::QContext;

/// Largest number of sites accepted by [`reduce_measure`].
pub const MAX_SITES: usize = 12;
/// Largest total mass accepted by [`reduce_measure`].
pub const MAX_MASS: usize = 12;

/// Exact absorption distribution of the boundary-killed chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbsorptionResult {
    /// Probability of ending in each 0/1-valued measure on `[n]`.
    pub distribution: BTreeMap<ExponentVector, Rational>,
    /// Probability that some mass leaves `[n]`.
    pub dead_mass: Rational,
}

impl AbsorptionResult {
    pub fn probability(&self, target: &ExponentVector) -> Rational {
        self.distribution.get(target).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total(&self) -> Rational {
        self.distribution.values().fold(self.dead_mass.clone(), |a, p| a + p)
    }
}

#[derive(Clone, Copy, Debug)]
enum Next {
    Dead,
    Absorbed(usize),
    Transient(usize),
}

struct Chain {
    /// (right successor, left successor) per transient state.
    moves: Vec<(Next, Next)>,
    absorbing: Vec<ExponentVector>,
}

/// Exact absorption distribution of `u^eta` under the rewrite
/// `u_i^2 -> (1/(q+1)) u_i u_{i+1} + (q/(q+1)) u_i u_{i-1}` applied at the site
/// chosen by `rule`, with mass leaving `[n]` killed.
///
/// Reachable states are enumerated, the transition graph is condensed into strongly
/// connected components, and each component is solved exactly, sinks first.
pub fn reduce_measure(ctx: &QContext, eta: &ExponentVector, rule: SelectionRule) -> Result<AbsorptionResult> {
    let n = ctx.n();
    if eta.len() != n {
        return Err(Error::Dimension(format!("exponent vector has length {}, expected {n}", eta.len())));
    }
    if n > MAX_SITES || eta.mass() > MAX_MASS {
        return Err(Error::TooLarge(format!(
            "state space guard: n = {n}, mass = {} (limits {MAX_SITES}, {MAX_MASS})",
            eta.mass()
        )));
    }
    if eta.is_squarefree() {
        let mut distribution = BTreeMap::new();
        distribution.insert(eta.clone(), Rational::one());
        return Ok(AbsorptionResult { distribution, dead_mass: Rational::zero() });
    }

    let chain = explore(eta, rule);
    let width = chain.absorbing.len() + 1;
    let dead_col = chain.absorbing.len();
    let unit = |c: usize| {
        let mut v = vec![Rational::zero(); width];
        v[c] = Rational::one();
        v
    };

    let mut graph = DiGraph::<(), ()>::with_capacity(chain.moves.len(), 2 * chain.moves.len());
    let nodes: Vec<NodeIndex> = (0..chain.moves.len()).map(|_| graph.add_node(())).collect();
    for (s, &(r, l)) in chain.moves.iter().enumerate() {
        for next in [r, l] {
            if let Next::Transient(t) = next {
                graph.add_edge(nodes[s], nodes[t], ());
            }
        }
    }

    let wr = ctx.right_weight();
    let wl = ctx.left_weight();
    let mut value: Vec<Option<Vec<Rational>>> = vec![None; chain.moves.len()];
    let known = |next: Next, value: &[Option<Vec<Rational>>]| -> Option<Vec<Rational>> {
        match next {
            Next::Dead => Some(unit(dead_col)),
            Next::Absorbed(a) => Some(unit(a)),
            Next::Transient(t) => value[t].clone(),
        }
    };

    // tarjan_scc yields components sinks first
    for scc in tarjan_scc(&graph) {
        let members: Vec<usize> = scc.iter().map(|ix| ix.index()).collect();
        if let [s] = members[..] {
            let (r, l) = chain.moves[s];
            let (vr, vl) = (known(r, &value), known(l, &value));
            if let (Some(vr), Some(vl)) = (vr, vl) {
                value[s] = Some(vr.iter().zip(&vl).map(|(a, b)| &wr * a + &wl * b).collect());
                continue;
            }
        }
        // (I - W) X = B over the component
        let pos: HashMap<usize, usize> = members.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let k = members.len();
        let mut lhs = RationalMatrix::identity(k);
        let mut rhs = RationalMatrix::zeros(k, width);
        for (row, &s) in members.iter().enumerate() {
            let (r, l) = chain.moves[s];
            for (next, w) in [(r, &wr), (l, &wl)] {
                match next {
                    Next::Transient(t) if pos.contains_key(&t) => {
                        lhs[(row, pos[&t])] -= w;
                    }
                    _ => {
                        let v = known(next, &value).expect("successor outside the component is solved");
                        for (c, x) in v.iter().enumerate() {
                            if !x.is_zero() {
                                rhs[(row, c)] += w * x;
                            }
                        }
                    }
                }
            }
        }
        let sol = lhs
            .solve_many(&rhs)
            .expect("absorbing chain component has a nonsingular system");
        for (row, &s) in members.iter().enumerate() {
            value[s] = Some((0..width).map(|c| sol[(row, c)].clone()).collect());
        }
    }

    let root = value[0].take().expect("initial state solved");
    let dead_mass = root[dead_col].clone();
    let distribution = chain
        .absorbing
        .into_iter()
        .zip(root)
        .filter(|(_, p)| !p.is_zero())
        .collect();
    Ok(AbsorptionResult { distribution, dead_mass })
}

/// Breadth-first enumeration of the states reachable from a non-absorbed `eta`.
/// The initial state gets transient index 0.
fn explore(eta: &ExponentVector, rule: SelectionRule) -> Chain {
    let n = eta.len();
    let mut transient: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut absorbing_ix: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut absorbing = Vec::new();
    let mut states: Vec<Vec<u32>> = vec![eta.as_slice().to_vec()];
    let mut moves = Vec::new();
    transient.insert(states[0].clone(), 0);

    let mut classify = |v: Vec<u32>,
                        states: &mut Vec<Vec<u32>>,
                        transient: &mut HashMap<Vec<u32>, usize>|
     -> Next {
        if v.iter().all(|&c| c <= 1) {
            let next = absorbing.len();
            let ix = *absorbing_ix.entry(v.clone()).or_insert_with(|| {
                absorbing.push(ExponentVector(v));
                next
            });
            Next::Absorbed(ix)
        } else if let Some(&t) = transient.get(&v) {
            Next::Transient(t)
        } else {
            let t = states.len();
            transient.insert(v.clone(), t);
            states.push(v);
            Next::Transient(t)
        }
    };

    let mut cursor = 0;
    while cursor < states.len() {
        let s = states[cursor].clone();
        let crowded: Vec<i64> = (0..n).filter(|&i| s[i] >= 2).map(|i| i as i64 + 1).collect();
        let occupied = s.iter().enumerate().filter(|(_, &c)| c > 0).map(|(i, &c)| (i as i64 + 1, c));
        let site = rule.pick(&crowded, occupied) as usize - 1;
        let right = if site + 1 < n {
            let mut v = s.clone();
            v[site] -= 1;
            v[site + 1] += 1;
            classify(v, &mut states, &mut transient)
        } else {
            Next::Dead
        };
        let left = if site > 0 {
            let mut v = s.clone();
            v[site] -= 1;
            v[site - 1] += 1;
            classify(v, &mut states, &mut transient)
        } else {
            Next::Dead
        };
        moves.push((right, left));
        cursor += 1;
    }
    Chain { moves, absorbing }
}
