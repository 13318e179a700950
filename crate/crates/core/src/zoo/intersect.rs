use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::oracle::oracle_cost;
use super::qsearch::{amplified_probability, default_budget, qsearch, uniform_prepare, QSearchConfig, Schedule};
use crate::error::{Error, Result};
use crate::linalg::ceil_log2;

/// How the recursive protocol chooses its block size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlockRule {
    /// `max(1, ⌈(log₂ n)²⌉)`.
    LogSquared,
    Fixed(usize),
}

impl BlockRule {
    pub fn block_size(&self, n: f64) -> f64 {
        match *self {
            BlockRule::LogSquared => n.log2().powi(2).ceil().max(1.0),
            BlockRule::Fixed(b) => b as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecursionConfig {
    pub block_rule: BlockRule,
    /// Inputs of at most this many bits go straight to the base protocol.
    pub base_threshold: usize,
    /// Constant in the round count `⌈κ·√n / log₂ n⌉`.
    pub kappa: f64,
}

impl Default for RecursionConfig {
    fn default() -> Self {
        Self { block_rule: BlockRule::LogSquared, base_threshold: 64, kappa: 2.0 }
    }
}

impl RecursionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.base_threshold < 2 {
            return Err(Error::InvalidArgument("base threshold must be at least 2".into()));
        }
        if self.block_rule == BlockRule::Fixed(0) {
            return Err(Error::InvalidArgument("block size must be at least 1".into()));
        }
        if self.kappa.is_nan() || self.kappa <= 0.0 {
            return Err(Error::InvalidArgument("kappa must be positive".into()));
        }
        Ok(())
    }

    pub fn amplification_rounds(&self, n: f64) -> usize {
        if n < 2.0 {
            return 1;
        }
        (self.kappa * n.sqrt() / n.log2()).ceil().max(1.0) as usize
    }

    /// Whether an `n`-bit instance is handed to the base protocol.
    pub fn delegates(&self, n: usize) -> bool {
        n <= self.base_threshold || self.block_rule.block_size(n as f64) as usize >= n
    }
}

/// Result of one run of an intersection protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntersectOutcome {
    /// A common index `i` with `x_i = y_i = 1`.
    pub found: Option<usize>,
    /// Qubits exchanged, including verification rounds.
    pub cost: usize,
}

/// Parses a bit string such as `"0010"`; index 0 is the leftmost bit.
pub fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::InvalidArgument(format!("bad bit {other:?}"))),
        })
        .collect()
}

fn check_pair(x: &[bool], y: &[bool]) -> Result<()> {
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::InvalidArgument("inputs must be nonempty and of equal length".into()));
    }
    Ok(())
}

/// Qubits for a classical check of a candidate among `n` indices.
pub fn verification_cost(n: usize) -> usize {
    2 * ceil_log2(n) + 2
}

/// Distributed Grover search: amplitude amplification over the (padded)
/// index space, each oracle call realized by the distributed AND gadget.
///
/// Each attempt with `j` iterations costs `j` oracle calls plus one
/// verification round, both `2⌈log₂ n⌉ + 2` qubits.
pub fn bcw_intersection(x: &[bool], y: &[bool], cfg: &QSearchConfig) -> Result<IntersectOutcome> {
    check_pair(x, y)?;
    let n = x.len();
    let space = n.next_power_of_two();
    let hit = |i: usize| i < n && x[i] && y[i];
    let out = qsearch(&uniform_prepare(space), &hit, cfg)?;
    debug_assert_eq!(oracle_cost(space), verification_cost(space));
    Ok(IntersectOutcome { found: out.found.filter(|&i| hit(i)), cost: out.applications * verification_cost(space) })
}

/// Default base-protocol configuration for `n`-bit inputs.
pub fn bcw_config(n: usize, seed: u64) -> QSearchConfig {
    QSearchConfig::for_space(n.next_power_of_two(), seed)
}

/// Cost of running the base protocol to the end of its budget, as a subroutine.
pub fn bcw_worst_cost(n: usize) -> usize {
    let space = n.next_power_of_two();
    if space <= 1 {
        return verification_cost(1);
    }
    default_budget(space) * verification_cost(space)
}

struct Shape {
    block: usize,
    /// Number of blocks, padded to a power of two.
    blocks: usize,
}

fn shape(n: usize, rcfg: &RecursionConfig) -> Shape {
    let block = rcfg.block_rule.block_size(n as f64) as usize;
    Shape { block, blocks: n.div_ceil(block).next_power_of_two() }
}

/// Cost of one application of the recursive step's preparation on `n` bits:
/// sending the block choice out and back plus the inner procedure.
fn preparation_cost(n: usize, rcfg: &RecursionConfig) -> usize {
    let s = shape(n, rcfg);
    2 * ceil_log2(s.blocks) + coherent_cost(s.block, rcfg)
}

/// Cost of running the procedure to the end of its budget as a subroutine.
pub fn coherent_cost(n: usize, rcfg: &RecursionConfig) -> usize {
    if rcfg.delegates(n) {
        return bcw_worst_cost(n);
    }
    let s = shape(n, rcfg);
    rcfg.amplification_rounds(n as f64) * (2 * preparation_cost(n, rcfg) + verification_cost(s.blocks * s.block))
}

/// Probability of returning each index when the procedure runs as a
/// subroutine with its random choices drawn from `rng`. Mass sits only on
/// common indices; the shortfall from 1 is the failure probability.
fn coherent_good(x: &[bool], y: &[bool], rcfg: &RecursionConfig, growth: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = x.len();
    let solutions: Vec<usize> = (0..n).filter(|&i| x[i] && y[i]).collect();
    let mut good = vec![0.0; n];
    if rcfg.delegates(n) {
        let space = n.next_power_of_two();
        let cfg = QSearchConfig { schedule_growth: growth, max_applications: default_budget(space), rng_seed: 0 };
        let mut schedule = Schedule::new(space, &cfg);
        let a = solutions.len() as f64 / space as f64;
        let mut miss = 1.0;
        while let Some(j) = schedule.next(rng) {
            miss *= 1.0 - amplified_probability(a, j);
        }
        for &i in &solutions {
            good[i] = (1.0 - miss) / solutions.len() as f64;
        }
        return good;
    }
    let mut schedule = outer_schedule(n, rcfg, growth);
    let mut miss = 1.0;
    while let Some(j) = schedule.next(rng) {
        let (g, a) = attempt_distribution(x, y, rcfg, growth, rng.next_u64());
        if a == 0.0 {
            continue;
        }
        let p = amplified_probability(a, j);
        for (acc, v) in good.iter_mut().zip(&g) {
            *acc += miss * p * v / a;
        }
        miss *= 1.0 - p;
    }
    good
}

fn outer_schedule(n: usize, rcfg: &RecursionConfig, growth: f64) -> Schedule {
    let s = shape(n, rcfg);
    let cfg =
        QSearchConfig { schedule_growth: growth, max_applications: rcfg.amplification_rounds(n as f64), rng_seed: 0 };
    Schedule::new(s.blocks, &cfg)
}

/// Output distribution of one application of the recursive step's
/// preparation: a uniform block choice followed by the inner procedure with
/// choices fixed by `seed`. Returns the distribution and its total mass.
fn attempt_distribution(x: &[bool], y: &[bool], rcfg: &RecursionConfig, growth: f64, seed: u64) -> (Vec<f64>, f64) {
    let n = x.len();
    let s = shape(n, rcfg);
    let mut g = vec![0.0; n];
    for blk in 0..s.blocks {
        let lo = blk * s.block;
        if lo >= n {
            break;
        }
        let hi = (lo + s.block).min(n);
        let mut bx = x[lo..hi].to_vec();
        let mut by = y[lo..hi].to_vec();
        bx.resize(s.block, false);
        by.resize(s.block, false);
        // The same inner choices serve every block: they are fixed before the
        // block register is put in superposition.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inner = coherent_good(&bx, &by, rcfg, growth, &mut rng);
        for (i, v) in inner.into_iter().take(hi - lo).enumerate() {
            g[lo + i] = v / s.blocks as f64;
        }
    }
    let a = g.iter().sum();
    (g, a)
}

/// The recursive intersection protocol.
///
/// Indices are split into blocks; a superposed block choice followed by the
/// protocol on that block, with a classical check of the candidate, is wrapped
/// in amplitude amplification. Small inputs use [`bcw_intersection`] with `cfg`.
///
/// Measurement statistics are computed exactly from the amplification
/// identity: an attempt with `j` iterations succeeds with `sin²((2j+1)θ)`,
/// `sin²θ` being the preparation's success probability, and on success
/// returns an index distributed as the preparation's good part.
pub fn recursive_intersection(
    x: &[bool],
    y: &[bool],
    rcfg: &RecursionConfig,
    cfg: &QSearchConfig,
) -> Result<IntersectOutcome> {
    check_pair(x, y)?;
    rcfg.validate()?;
    cfg.validate()?;
    let n = x.len();
    if rcfg.delegates(n) {
        return bcw_intersection(x, y, cfg);
    }
    let s = shape(n, rcfg);
    let prep = preparation_cost(n, rcfg);
    let verify = verification_cost(s.blocks * s.block);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut schedule = outer_schedule(n, rcfg, cfg.schedule_growth);
    let mut cost = 0;
    while let Some(j) = schedule.next(&mut rng) {
        cost += (2 * j + 1) * prep + (j + 1) * verify;
        let (g, a) = attempt_distribution(x, y, rcfg, cfg.schedule_growth, rng.next_u64());
        let p = if a > 0.0 { amplified_probability(a, j) } else { 0.0 };
        if rng.random::<f64>() < p {
            let i = sample_index(&g, a, &mut rng);
            if x[i] && y[i] {
                return Ok(IntersectOutcome { found: Some(i), cost });
            }
        }
    }
    Ok(IntersectOutcome { found: None, cost })
}

fn sample_index(g: &[f64], total: f64, rng: &mut ChaCha8Rng) -> usize {
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &v) in g.iter().enumerate() {
        if v > 0.0 {
            acc += v;
            last = i;
            if u < acc {
                return i;
            }
        }
    }
    last
}
