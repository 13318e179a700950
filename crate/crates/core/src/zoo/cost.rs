use serde::Serialize;

use super::intersect::RecursionConfig;
use super::qsearch::BUDGET_FACTOR;

/// Number of times `log₂` must be applied to bring `n` down to at most 1.
pub fn log_star(n: f64) -> usize {
    let mut v = n;
    let mut k = 0;
    while v > 1.0 {
        v = v.log2();
        k += 1;
    }
    k
}

/// Worst-case cost of the base search on `n` bits, for real-valued `n`.
pub fn base_cost(n: f64) -> f64 {
    if n <= 1.0 {
        return 2.0;
    }
    let k = n.log2().ceil();
    let space = 2f64.powf(k);
    (BUDGET_FACTOR * space.sqrt()).ceil() * (2.0 * k + 2.0)
}

/// Unfolds `C_n = K·(√n / log₂ n)·(C_b + K'·log₂ n)` with `C_1 = 2`.
///
/// The inner `C_b` is the base cost when `b` is at most the threshold or
/// covers the whole input, and the recursion otherwise.
pub fn cost_model(n: f64, rcfg: &RecursionConfig, k: f64, k2: f64) -> f64 {
    if n <= 1.0 {
        return 2.0;
    }
    let log_n = n.log2();
    let b = rcfg.block_rule.block_size(n);
    let inner =
        if b >= n || b <= rcfg.base_threshold as f64 { base_cost(b.min(n)) } else { cost_model(b, rcfg, k, k2) };
    k * n.sqrt() / log_n * (inner + k2 * log_n)
}

/// Fit of `cost_model(n)/√n ≈ κ·c^(log* n)` over a probe set.
#[derive(Debug, Clone, Serialize)]
pub struct CostFit {
    pub c: f64,
    pub kappa: f64,
    pub probes: Vec<f64>,
    pub ratios: Vec<f64>,
}

impl CostFit {
    pub fn bound(&self, n: f64) -> f64 {
        self.kappa * self.c.powi(log_star(n) as i32)
    }
}

/// Least squares of `ln(ratio)` against `log* n` gives `c`; `κ` is then the
/// smallest constant that bounds every probe.
pub fn fit_cost_model(probes: &[f64], rcfg: &RecursionConfig, k: f64, k2: f64) -> CostFit {
    let ratios: Vec<f64> = probes.iter().map(|&n| cost_model(n, rcfg, k, k2) / n.sqrt()).collect();
    let xs: Vec<f64> = probes.iter().map(|&n| log_star(n) as f64).collect();
    let ys: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let c = slope.exp().max(1.0);
    let kappa = ratios.iter().zip(&xs).map(|(r, x)| r / c.powf(*x)).fold(0.0, f64::max);
    CostFit { c, kappa, probes: probes.to_vec(), ratios }
}
