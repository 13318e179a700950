use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};

/// Budget multiplier: a search over `N` states gets `⌈BUDGET_FACTOR·√N⌉` applications.
pub const BUDGET_FACTOR: f64 = 3.0;

/// Parameters of the randomized amplification schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QSearchConfig {
    pub schedule_growth: f64,
    /// Cap on oracle calls plus final checks.
    pub max_applications: usize,
    pub rng_seed: u64,
}

impl QSearchConfig {
    pub fn new(schedule_growth: f64, max_applications: usize, rng_seed: u64) -> Result<Self> {
        let cfg = Self { schedule_growth, max_applications, rng_seed };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Growth 6/5 with the default budget for a space of `space` states.
    pub fn for_space(space: usize, rng_seed: u64) -> Self {
        Self { schedule_growth: 1.2, max_applications: default_budget(space), rng_seed }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.schedule_growth > 1.0 && self.schedule_growth <= 2.0) {
            return Err(Error::InvalidArgument(format!("schedule growth {} not in (1, 2]", self.schedule_growth)));
        }
        if self.max_applications == 0 {
            return Err(Error::InvalidArgument("max_applications must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_seed(self, rng_seed: u64) -> Self {
        Self { rng_seed, ..self }
    }
}

pub fn default_budget(space: usize) -> usize {
    (BUDGET_FACTOR * (space.max(1) as f64).sqrt()).ceil() as usize
}

/// Result of one search run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOutcome {
    pub found: Option<usize>,
    /// Oracle calls plus one check per attempt; never exceeds the budget.
    pub applications: usize,
    pub attempts: usize,
}

/// Iteration counts drawn by the schedule, one per attempt, until the budget is spent.
///
/// Attempt `k` draws `j` uniformly below `⌈m_k⌉` (clamped to the remaining
/// budget) and costs `j + 1`; `m` grows by the configured factor up to `√N`.
#[derive(Debug, Clone)]
pub struct Schedule {
    growth: f64,
    cap: f64,
    m: f64,
    remaining: usize,
    single: bool,
    done: bool,
}

impl Schedule {
    pub fn new(space: usize, cfg: &QSearchConfig) -> Self {
        Self {
            growth: cfg.schedule_growth,
            cap: (space as f64).sqrt(),
            m: 1.0,
            remaining: cfg.max_applications,
            single: space <= 1,
            done: false,
        }
    }

    pub fn next(&mut self, rng: &mut impl Rng) -> Option<usize> {
        if self.done || self.remaining == 0 {
            return None;
        }
        let bound = self.m.ceil() as usize;
        let j = rng.random_range(0..bound).min(self.remaining - 1);
        self.remaining -= j + 1;
        self.m = (self.m * self.growth).min(self.cap.max(1.0));
        // A single-state space has nothing to amplify: one look settles it.
        self.done = self.single;
        Some(j)
    }
}

/// `prepare|0⟩` followed by `iterations` rounds of `-A S_0 A† S_χ`.
pub fn amplify(prepare: &CMatrix, predicate: &dyn Fn(usize) -> bool, iterations: usize) -> Result<CVector> {
    let dim = prepare.rows();
    let start = prepare.column(0);
    let adj = prepare.adjoint();
    let mut state = start;
    for _ in 0..iterations {
        for i in 0..dim {
            if predicate(i) {
                state[i] = -state[i];
            }
        }
        let mut back = adj.mul_vec(&state)?;
        // 2|0⟩⟨0| - I in the prepared basis, times the overall sign -1.
        for (i, v) in back.as_mut_slice().iter_mut().enumerate() {
            if i != 0 {
                *v = -*v;
            }
        }
        state = prepare.mul_vec(&back)?;
    }
    Ok(state)
}

pub fn good_probability(state: &CVector, predicate: &dyn Fn(usize) -> bool) -> f64 {
    state.as_slice().iter().enumerate().filter(|(i, _)| predicate(*i)).map(|(_, a)| a.norm_sqr()).sum()
}

fn sample(state: &CVector, rng: &mut impl Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, a) in state.as_slice().iter().enumerate() {
        acc += a.norm_sqr();
        if u < acc {
            return i;
        }
    }
    state.dim() - 1
}

/// Amplitude amplification with an unknown number of solutions.
///
/// Returns the first measured state that satisfies `predicate`, or `None` once
/// the budget is spent.
pub fn qsearch(prepare: &CMatrix, predicate: &dyn Fn(usize) -> bool, cfg: &QSearchConfig) -> Result<SearchOutcome> {
    cfg.validate()?;
    if !prepare.is_square() || !prepare.is_unitary(1e-9) {
        return Err(Error::ContractViolation("prepare must be a unitary".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut schedule = Schedule::new(prepare.rows(), cfg);
    let mut out = SearchOutcome { found: None, applications: 0, attempts: 0 };
    while let Some(j) = schedule.next(&mut rng) {
        let state = amplify(prepare, predicate, j)?;
        out.applications += j + 1;
        out.attempts += 1;
        let z = sample(&state, &mut rng);
        if predicate(z) {
            out.found = Some(z);
            return Ok(out);
        }
    }
    Ok(out)
}

/// `sin²((2j+1)θ)` with `sin²θ = a`.
pub fn amplified_probability(a: f64, j: usize) -> f64 {
    let theta = a.clamp(0.0, 1.0).sqrt().asin();
    ((2 * j + 1) as f64 * theta).sin().powi(2)
}

/// Exact probability that [`qsearch`] finds a solution when a single
/// preparation succeeds with probability `a`.
pub fn qsearch_success_probability(a: f64, space: usize, cfg: &QSearchConfig) -> f64 {
    let cap = (space as f64).sqrt().max(1.0);
    let mut ms = vec![1.0f64];
    while ms.len() <= cfg.max_applications {
        let last = *ms.last().expect("non-empty");
        ms.push((last * cfg.schedule_growth).min(cap));
    }
    let mut memo = HashMap::new();
    success_from(0, cfg.max_applications, a, &ms, space <= 1, &mut memo)
}

fn success_from(
    k: usize,
    rem: usize,
    a: f64,
    ms: &[f64],
    single: bool,
    memo: &mut HashMap<(usize, usize), f64>,
) -> f64 {
    if rem == 0 || (single && k > 0) {
        return 0.0;
    }
    if let Some(&v) = memo.get(&(k, rem)) {
        return v;
    }
    let bound = ms[k].ceil() as usize;
    let mut total = 0.0;
    for j in 0..bound {
        let j = j.min(rem - 1);
        let p = amplified_probability(a, j);
        total += p + (1.0 - p) * success_from(k + 1, rem - j - 1, a, ms, single, memo);
    }
    let v = total / bound as f64;
    memo.insert((k, rem), v);
    v
}

/// Uniform superposition over `dim` states (Hadamards on every qubit when `dim` is a power of two).
pub fn uniform_prepare(dim: usize) -> CMatrix {
    let s = 1.0 / (dim as f64).sqrt();
    if dim.is_power_of_two() {
        CMatrix::from_fn(dim, dim, |r, c| {
            let sign = if (r & c).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            C64::new(sign * s, 0.0)
        })
    } else {
        // DFT matrix: first column is uniform.
        CMatrix::from_fn(dim, dim, |r, c| C64::from_polar(s, 2.0 * std::f64::consts::PI * (r * c) as f64 / dim as f64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_iteration_solves_four_states() {
        let a = uniform_prepare(4);
        let state = amplify(&a, &|i| i == 2, 1).unwrap();
        assert!((good_probability(&state, &|i| i == 2) - 1.0).abs() < 1e-9);
        // closed form: sin²(3θ) with sin²θ = 1/4
        assert!((amplified_probability(0.25, 1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn amplify_matches_closed_form() {
        for dim in [8usize, 16, 32] {
            let a = uniform_prepare(dim);
            for t in 1..4 {
                for j in 0..5 {
                    let s = amplify(&a, &|i| i < t, j).unwrap();
                    let exact = amplified_probability(t as f64 / dim as f64, j);
                    assert!((good_probability(&s, &|i| i < t) - exact).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn empty_predicate_returns_none_within_budget() {
        let cfg = QSearchConfig::new(1.2, 50, 3).unwrap();
        let out = qsearch(&uniform_prepare(16), &|_| false, &cfg).unwrap();
        assert_eq!(out.found, None);
        assert_eq!(out.applications, 50);
    }

    #[test]
    fn runs_are_reproducible() {
        let cfg = QSearchConfig::for_space(64, 11);
        let a = uniform_prepare(64);
        let r1 = qsearch(&a, &|i| i == 5, &cfg).unwrap();
        let r2 = qsearch(&a, &|i| i == 5, &cfg).unwrap();
        assert_eq!(r1, r2);
    }

    #[test]
    fn success_dp_matches_sampling() {
        let a = uniform_prepare(16);
        let cfg = QSearchConfig::new(1.2, 12, 0).unwrap();
        let exact = qsearch_success_probability(1.0 / 16.0, 16, &cfg);
        let trials = 4000;
        let hits =
            (0..trials).filter(|&t| qsearch(&a, &|i| i == 9, &cfg.with_seed(t)).unwrap().found.is_some()).count();
        let rate = hits as f64 / trials as f64;
        assert!((rate - exact).abs() < 0.04, "rate {rate} vs exact {exact}");
    }

    #[test]
    fn invalid_configs() {
        assert!(QSearchConfig::new(1.0, 5, 0).is_err());
        assert!(QSearchConfig::new(2.5, 5, 0).is_err());
        assert!(QSearchConfig::new(1.2, 0, 0).is_err());
    }
}
