//! Monte Carlo estimates of decoder failure rates.
//!
//! Every trial draws a fresh vector, a fresh hash family and a coordinate,
//! each from a seed derived from the master seed and the trial number, so
//! results are reproducible and trials are independent.

use rand::seq::index::sample;
use rand::Rng as _;
use serde::Serialize;

use crate::construct::{build_bool_sketch_net, SparsePolynomialModel};
use crate::decoders::{dec_and, dec_med, dec_min};
use crate::error::{param, Result};
use crate::hash_family::HashFamily;
use crate::rng::{derive_seed, rng_from_seed, Rng};
use crate::sketch::{bool_sketch, count_sketch};
use crate::sparse::SparseVector;

/// Which decoder is tested, and on which class of vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrialMode {
    /// `dec_and` on boolean sketches of binary `x`; failure = `≠ x_i`.
    And,
    /// `dec_min` on count sketches of binary `x`; failure = `≠ x_i`.
    Min,
    /// `dec_min` on nonnegative `x` with tail mass `c`; failure = outside `[x_i, x_i + εc]`.
    MinInterval,
    /// `dec_med` on real `x` with tail mass `c`; failure = outside `[x_i - εc, x_i + εc]`.
    Median,
}

impl std::str::FromStr for TrialMode {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "and" => Ok(Self::And),
            "min" => Ok(Self::Min),
            "min-interval" => Ok(Self::MinInterval),
            "median" | "med" => Ok(Self::Median),
            other => param(format!("unknown trial mode {other:?}")),
        }
    }
}

impl std::fmt::Display for TrialMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::And => "and",
            Self::Min => "min",
            Self::MinInterval => "min-interval",
            Self::Median => "median",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialConfig {
    pub d: usize,
    pub k: usize,
    pub m: usize,
    pub t: usize,
    pub trials: usize,
    pub mode: TrialMode,
    pub epsilon: f64,
    pub c: f64,
    pub seed: u64,
}

/// One CSV row: `mode,t,m,trials,failures,rate,bound`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub mode: TrialMode,
    pub t: usize,
    pub m: usize,
    pub trials: usize,
    pub failures: usize,
    pub rate: f64,
    pub bound: f64,
}

impl TrialReport {
    /// `bound + 3 * sqrt(bound / trials)`: three binomial standard deviations
    /// above the nominal bound.
    pub fn bound_with_slack(&self) -> f64 {
        self.bound + 3.0 * (self.bound / self.trials as f64).sqrt()
    }
}

/// A uniformly random binary vector with exactly `k` ones.
pub fn random_binary(d: usize, k: usize, rng: &mut Rng) -> Result<SparseVector> {
    if k > d {
        return param(format!("cannot place {k} ones in dimension {d}"));
    }
    SparseVector::binary(d, sample(rng, d, k).into_iter())
}

/// A vector with `k` large head entries and a tail of `tail_len` entries
/// whose magnitudes sum to exactly `c`. Head magnitudes lie in
/// `[1 + c, 2 + c]`, so the head is the top-`k` part and `‖tail_k(x)‖_1 = c`.
pub fn random_heavy_tailed(d: usize, k: usize, c: f64, tail_len: usize, signed: bool, rng: &mut Rng) -> Result<SparseVector> {
    if k + tail_len > d {
        return param(format!("k + tail_len = {} exceeds dimension {d}", k + tail_len));
    }
    let idx = sample(rng, d, k + tail_len).into_vec();
    let raw: Vec<f64> = (0..tail_len).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let sign = |rng: &mut Rng| if signed && rng.random_bool(0.5) { -1.0 } else { 1.0 };
    let mut entries = Vec::with_capacity(idx.len());
    for &i in &idx[..k] {
        let v = rng.random_range(1.0 + c..2.0 + c);
        entries.push((i, sign(rng) * v));
    }
    for (&i, r) in idx[k..].iter().zip(raw) {
        let v = c * r / total;
        entries.push((i, sign(rng) * v));
    }
    SparseVector::new(d, entries, if signed { crate::Flavor::Real } else { crate::Flavor::Nonneg })
}

/// Number of tail entries used by the interval trials.
pub fn default_tail_len(d: usize, k: usize) -> usize {
    (4 * k).min(d.saturating_sub(k))
}

fn check(cfg: &TrialConfig) -> Result<()> {
    if cfg.trials == 0 || cfg.t == 0 || cfg.m == 0 || cfg.d == 0 {
        return param("trials, t, m and d must be positive");
    }
    if cfg.k > cfg.d {
        return param("k must not exceed d");
    }
    if matches!(cfg.mode, TrialMode::MinInterval | TrialMode::Median) && !(cfg.epsilon > 0.0 && cfg.c >= 0.0) {
        return param("interval trials need epsilon > 0 and c >= 0");
    }
    Ok(())
}

/// Run the per-coordinate failure experiment.
pub fn run_trials(cfg: &TrialConfig) -> Result<TrialReport> {
    check(cfg)?;
    let tail_len = default_tail_len(cfg.d, cfg.k);
    let mut failures = 0;
    for trial in 0..cfg.trials {
        let mut rng = rng_from_seed(derive_seed(cfg.seed, trial as u64));
        let fam = HashFamily::seeded(rng.random(), cfg.t, cfg.d, cfg.m)?;
        let i = rng.random_range(0..cfg.d);
        let failed = match cfg.mode {
            TrialMode::And => {
                let x = random_binary(cfg.d, cfg.k, &mut rng)?;
                f64::from(dec_and(&bool_sketch(&x, &fam)?, i)?) != x.get(i)
            }
            TrialMode::Min => {
                let x = random_binary(cfg.d, cfg.k, &mut rng)?;
                dec_min(&count_sketch(&x, &fam)?, i)? != x.get(i)
            }
            TrialMode::MinInterval => {
                let x = random_heavy_tailed(cfg.d, cfg.k, cfg.c, tail_len, false, &mut rng)?;
                let v = dec_min(&count_sketch(&x, &fam)?, i)?;
                let xi = x.get(i);
                !(v >= xi && v <= xi + cfg.epsilon * cfg.c)
            }
            TrialMode::Median => {
                let x = random_heavy_tailed(cfg.d, cfg.k, cfg.c, tail_len, true, &mut rng)?;
                let v = dec_med(&count_sketch(&x, &fam)?, i)?;
                let xi = x.get(i);
                (v - xi).abs() > cfg.epsilon * cfg.c
            }
        };
        failures += usize::from(failed);
    }
    Ok(TrialReport {
        mode: cfg.mode,
        t: cfg.t,
        m: cfg.m,
        trials: cfg.trials,
        failures,
        rate: failures as f64 / cfg.trials as f64,
        bound: (-(cfg.t as f64)).exp(),
    })
}

/// Outcome of the end-to-end sketch-network experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetTrialReport {
    pub trials: usize,
    /// Trials where the network output differed from `w^T x`.
    pub failures: usize,
    /// Trials where every coordinate of `S(w)` decoded correctly.
    pub clean_trials: usize,
    /// Clean trials where the output still differed (should be zero).
    pub clean_mismatches: usize,
}

/// For each trial draw `w` with `s` standard-normal entries, binary `x` with
/// `k` ones of which `overlap` lie in `S(w)`, and a family with `t` hashes
/// into `m` rows; compare `build_bool_sketch_net(w)(BSk(x))` to `w^T x`.
pub fn run_net_trials(d: usize, k: usize, s: usize, m: usize, t: usize, trials: usize, overlap: usize, seed: u64) -> Result<NetTrialReport> {
    if s > d || k > d || overlap > k.min(s) {
        return param("need s <= d, k <= d and overlap <= min(k, s)");
    }
    let mut report = NetTrialReport { trials, failures: 0, clean_trials: 0, clean_mismatches: 0 };
    for trial in 0..trials {
        let mut rng = rng_from_seed(derive_seed(seed, trial as u64));
        let support = sample(&mut rng, d, s).into_vec();
        let w = SparseVector::real(d, support.iter().map(|&i| (i, rng.sample::<f64, _>(rand_distr::StandardNormal))))?;
        let x = overlapping_binary(d, k, &support, overlap, &mut rng)?;
        let fam = HashFamily::seeded(rng.random(), t, d, m)?;
        let y = bool_sketch(&x, &fam)?;
        let net = build_bool_sketch_net(&SparsePolynomialModel::linear(&w), &fam)?;
        let out = net.eval(y.flatten())?;
        let truth = w.dot(&x);
        let all_decoded = w.indices().iter().map(|&i| dec_and(&y, i)).collect::<Result<Vec<_>>>()?
            .into_iter()
            .zip(w.indices())
            .all(|(bit, &i)| f64::from(bit) == x.get(i));
        let mismatch = (out - truth).abs() > 1e-9;
        report.failures += usize::from(mismatch);
        if all_decoded {
            report.clean_trials += 1;
            report.clean_mismatches += usize::from(mismatch);
        }
    }
    Ok(report)
}

/// Binary `x` with `k` ones, `overlap` of them drawn from `within`.
pub fn overlapping_binary(d: usize, k: usize, within: &[usize], overlap: usize, rng: &mut Rng) -> Result<SparseVector> {
    let mut chosen: std::collections::BTreeSet<usize> =
        sample(rng, within.len(), overlap).into_iter().map(|p| within[p]).collect();
    while chosen.len() < k {
        chosen.insert(rng.random_range(0..d));
    }
    SparseVector::binary(d, chosen)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_vectors_have_requested_shape() {
        let mut rng = rng_from_seed(1);
        let x = random_binary(100, 10, &mut rng).unwrap();
        assert_eq!(x.nnz(), 10);
        let x = random_heavy_tailed(1000, 20, 1.0, 80, true, &mut rng).unwrap();
        let (head, tail) = x.head_tail(20);
        assert_eq!(head.nnz(), 20);
        assert!((tail.l1_norm() - 1.0).abs() < 1e-9);
        assert!(head.values().iter().all(|v| v.abs() >= 2.0));
    }

    #[test]
    fn trials_are_reproducible() {
        let cfg = TrialConfig { d: 200, k: 10, m: 28, t: 2, trials: 300, mode: TrialMode::And, epsilon: 0.1, c: 1.0, seed: 4 };
        assert_eq!(run_trials(&cfg).unwrap(), run_trials(&cfg).unwrap());
    }

    #[test]
    fn interval_modes_need_epsilon() {
        let cfg = TrialConfig { d: 200, k: 10, m: 28, t: 2, trials: 10, mode: TrialMode::Median, epsilon: 0.0, c: 1.0, seed: 4 };
        assert!(run_trials(&cfg).is_err());
    }

    #[test]
    fn overlap_is_respected() {
        let mut rng = rng_from_seed(9);
        let within = vec![3, 5, 7, 9];
        let x = overlapping_binary(50, 6, &within, 2, &mut rng).unwrap();
        assert_eq!(x.nnz(), 6);
        assert!(within.iter().filter(|&&i| x.get(i) == 1.0).count() >= 2);
    }
}
