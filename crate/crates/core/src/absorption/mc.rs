use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{PointMeasure, SelectionRule};
use crate::error::{Error, Result};
use crate::exactla::Rational;
use crate::exec::Exec;

/// Trials per work item. Every trial owns its RNG stream, so batching only
/// affects scheduling.
const BATCH: u64 = 1024;

/// Inputs of a Monte Carlo run of the unkilled process on the integers.
#[derive(Clone, Debug)]
pub struct McParams {
    pub q_left: Rational,
    pub q_right: Rational,
    pub initial: PointMeasure,
    /// 0/1-valued measure whose hitting probability is estimated.
    pub target: PointMeasure,
    pub rule: SelectionRule,
    pub trials: u64,
    pub seed: u64,
    /// A trajectory with mass outside `[min target - window, max target + window]`
    /// counts as completed without a hit.
    pub window: u64,
    pub max_steps: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct McOutcome {
    pub hits: u64,
    pub completed: u64,
    pub timed_out: u64,
    /// `hits / completed`; `None` when nothing completed.
    pub estimate: Option<Rational>,
    /// Binomial standard error of the estimate.
    pub stderr: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Fate {
    Hit,
    Miss,
    TimedOut,
}

pub fn simulate_mc(params: &McParams) -> Result<McOutcome> {
    simulate_mc_with(params, Exec::default())
}

/// Runs `params.trials` independent trajectories. Trial `t` draws from the ChaCha8
/// stream `t` seeded by `params.seed`, so the outcome is the same for every `exec`.
pub fn simulate_mc_with(params: &McParams, exec: Exec) -> Result<McOutcome> {
    let sim = Simulator::new(params)?;
    let batches = params.trials.div_ceil(BATCH) as usize;
    let counts = exec.map_range(batches, |b| {
        let start = b as u64 * BATCH;
        let end = (start + BATCH).min(params.trials);
        let mut c = [0u64; 3];
        for t in start..end {
            match sim.run(t) {
                Fate::Hit => c[0] += 1,
                Fate::Miss => c[1] += 1,
                Fate::TimedOut => c[2] += 1,
            }
        }
        c
    });
    let [hits, misses, timed_out] = counts
        .into_iter()
        .fold([0u64; 3], |a, c| [a[0] + c[0], a[1] + c[1], a[2] + c[2]]);
    let completed = hits + misses;
    let (estimate, stderr) = if completed == 0 {
        (None, f64::INFINITY)
    } else {
        let p = hits as f64 / completed as f64;
        (
            Some(Rational::new(BigInt::from(hits), BigInt::from(completed))),
            (p * (1.0 - p) / completed as f64).sqrt(),
        )
    };
    Ok(McOutcome { hits, completed, timed_out, estimate, stderr })
}

enum LeftCoin {
    /// Left move iff a uniform draw from `0..den` is below `num`.
    Exact { num: u64, den: u64 },
    Float(f64),
}

struct Simulator<'a> {
    params: &'a McParams,
    coin: LeftCoin,
    /// Site of index 0 in the dense buffer.
    origin: i64,
    /// Buffer index range of the allowed window; the buffer has one pad cell per side.
    lo: usize,
    hi: usize,
    initial: Vec<u32>,
    target: Vec<u32>,
}

impl<'a> Simulator<'a> {
    fn new(params: &'a McParams) -> Result<Self> {
        let (ql, qr) = (&params.q_left, &params.q_right);
        if !ql.is_positive() || !qr.is_positive() || ql + qr != Rational::one() {
            return Err(Error::InvalidProbability(format!(
                "need q_L, q_R > 0 with q_L + q_R = 1, got {ql} and {qr}"
            )));
        }
        if !params.target.is_zero_one() {
            return Err(Error::InvalidParameter("target measure must be 0/1-valued".into()));
        }
        if params.target.mass() != params.initial.mass() {
            return Err(Error::InvalidParameter(format!(
                "initial mass {} differs from target mass {}",
                params.initial.mass(),
                params.target.mass()
            )));
        }
        let coin = match (ql.numer().to_u64(), ql.denom().to_u64()) {
            (Some(num), Some(den)) => LeftCoin::Exact { num, den },
            _ => LeftCoin::Float(ql.to_f64().unwrap_or(0.5)),
        };
        let (tmin, tmax) = params.target.span().unwrap_or((0, 0));
        let w = params.window as i64;
        let origin = tmin - w - 1;
        let lo = 1;
        let hi = (tmax + w - origin) as usize;
        let len = hi + 2;
        let dense = |m: &PointMeasure| {
            let mut v = vec![0u32; len];
            let mut outside = false;
            for (site, c) in m.iter() {
                let ix = site - origin;
                if ix < lo as i64 || ix > hi as i64 {
                    outside = true;
                } else {
                    v[ix as usize] = c;
                }
            }
            (v, outside)
        };
        let (mut initial, outside) = dense(&params.initial);
        if outside {
            // mass already outside the window: every trajectory is a miss
            initial.clear();
        }
        let (target, _) = dense(&params.target);
        Ok(Simulator { params, coin, origin, lo, hi, initial, target })
    }

    fn run(&self, trial: u64) -> Fate {
        if self.initial.is_empty() {
            return Fate::Miss;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.params.seed);
        rng.set_stream(trial);
        let mut state = self.initial.clone();
        let mut crowded: Vec<i64> = Vec::new();
        for _ in 0..=self.params.max_steps {
            if state[self.lo - 1] > 0 || state[self.hi + 1] > 0 {
                return Fate::Miss;
            }
            crowded.clear();
            crowded.extend((self.lo..=self.hi).filter(|&i| state[i] >= 2).map(|i| i as i64 + self.origin));
            if crowded.is_empty() {
                return if state == self.target { Fate::Hit } else { Fate::Miss };
            }
            let occupied = state
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(i, &c)| (i as i64 + self.origin, c));
            let site = (self.params.rule.pick(&crowded, occupied) - self.origin) as usize;
            let left = match self.coin {
                LeftCoin::Exact { num, den } => rng.random_range(0..den) < num,
                LeftCoin::Float(p) => rng.random::<f64>() < p,
            };
            state[site] -= 1;
            if left {
                state[site - 1] += 1;
            } else {
                state[site + 1] += 1;
            }
        }
        Fate::TimedOut
    }
}

impl McOutcome {
    /// `|estimate - exact|` in units of the standard error.
    pub fn z_score(&self, exact: &Rational) -> Option<f64> {
        let est = self.estimate.as_ref()?;
        let diff = (est - exact).abs().to_f64()?;
        if diff.is_zero() {
            return Some(0.0);
        }
        Some(diff / self.stderr)
    }
}
