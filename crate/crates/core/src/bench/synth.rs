//! Synthetic sparse polynomial regression data.

use std::collections::BTreeSet;
use std::io::Write;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::construct::SparsePolynomialModel;
use crate::error::{param, Error, Result};
use crate::rng::{derive_seed, rng_from_seed};
use crate::sparse::{parse_pair, SparseVector};

fn default_min_term_card() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub d: usize,
    /// Ones per example.
    pub k: usize,
    /// Number of monomials in the generating model.
    pub s: usize,
    pub n: usize,
    /// `|I|`, the number of relevant features.
    pub relevant_size: usize,
    /// Indices drawn from `I` for every example.
    pub per_example_relevant: usize,
    pub max_term_card: usize,
    #[serde(default = "default_min_term_card")]
    pub min_term_card: usize,
    pub noise_sd: f64,
    pub seed: u64,
}

impl SynthConfig {
    /// Sizes used for the published experiments.
    pub fn paper_scale() -> Self {
        Self {
            d: 10_000,
            k: 50,
            s: 300,
            n: 200_000,
            relevant_size: 50,
            per_example_relevant: 12,
            max_term_card: 3,
            min_term_card: 1,
            noise_sd: 0.05,
            seed: 1,
        }
    }

    /// Smaller default that runs in seconds on one core.
    pub fn desk_scale() -> Self {
        Self {
            d: 2_000,
            k: 20,
            s: 60,
            n: 20_000,
            relevant_size: 20,
            per_example_relevant: 5,
            max_term_card: 3,
            min_term_card: 1,
            noise_sd: 0.05,
            seed: 1,
        }
    }

    /// Linear task: every term is a single feature.
    pub fn linear(mut self) -> Self {
        self.min_term_card = 1;
        self.max_term_card = 1;
        self
    }

    /// Polynomial task with term cardinalities in `[lo, hi]`.
    pub fn polynomial(mut self, lo: usize, hi: usize) -> Self {
        self.min_term_card = lo;
        self.max_term_card = hi;
        self
    }

    /// Keep task shape (term cardinalities, noise, seed), take sizes from `other`.
    pub fn with_sizes_of(&self, other: &SynthConfig) -> Self {
        Self {
            d: other.d,
            k: other.k,
            s: other.s,
            n: other.n,
            relevant_size: other.relevant_size,
            per_example_relevant: other.per_example_relevant,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.n == 0 || self.s == 0 {
            return param("d, n and s must be positive");
        }
        if self.relevant_size > self.d || self.relevant_size == 0 {
            return param(format!("relevant_size {} must be in [1, d = {}]", self.relevant_size, self.d));
        }
        if self.per_example_relevant > self.k || self.k > self.d {
            return param("need per_example_relevant <= k <= d");
        }
        if self.per_example_relevant > self.relevant_size {
            return param("per_example_relevant exceeds relevant_size");
        }
        if !(1..=3).contains(&self.max_term_card) || self.min_term_card == 0 || self.min_term_card > self.max_term_card {
            return param("term cardinalities must satisfy 1 <= min <= max <= 3");
        }
        if self.max_term_card > self.relevant_size {
            return param("max_term_card exceeds relevant_size");
        }
        if !(self.noise_sd >= 0.0) {
            return param("noise_sd must be nonnegative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub x: SparseVector,
    pub target: f64,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub d: usize,
    pub examples: Vec<Example>,
    pub model: SparsePolynomialModel,
    /// Relevant feature set `I`, sorted.
    pub relevant: Vec<usize>,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Draw a model and `n` examples.
///
/// The model has up to `s` distinct term sets drawn from `I` with uniform
/// cardinality in `[min_term_card, max_term_card]` and standard normal
/// weights; fewer terms are produced only when `I` has fewer distinct sets of
/// the allowed sizes. Each example has exactly `k` ones:
/// `per_example_relevant` from `I`, the rest uniform over `[d]` with
/// duplicates redrawn. The 90/10 split comes from a seeded shuffle.
pub fn gen_synthetic(cfg: &SynthConfig) -> Result<Dataset> {
    cfg.validate()?;
    let mut rng = rng_from_seed(derive_seed(cfg.seed, 0));
    let relevant: Vec<usize> = {
        let mut r = sample(&mut rng, cfg.d, cfg.relevant_size).into_vec();
        r.sort_unstable();
        r
    };

    let available: usize = (cfg.min_term_card..=cfg.max_term_card).map(|c| binomial(cfg.relevant_size, c)).sum();
    let target_terms = cfg.s.min(available);
    let mut seen = BTreeSet::new();
    let mut terms = Vec::with_capacity(target_terms);
    while terms.len() < target_terms {
        let card = rng.random_range(cfg.min_term_card..=cfg.max_term_card);
        let mut set: Vec<usize> = sample(&mut rng, relevant.len(), card).into_iter().map(|p| relevant[p]).collect();
        set.sort_unstable();
        if seen.insert(set.clone()) {
            terms.push((rng.sample::<f64, _>(StandardNormal), set));
        }
    }
    let model = SparsePolynomialModel::new(cfg.d, terms)?;

    let mut ex_rng = rng_from_seed(derive_seed(cfg.seed, 1));
    let mut examples = Vec::with_capacity(cfg.n);
    for _ in 0..cfg.n {
        let mut support: BTreeSet<usize> = sample(&mut ex_rng, relevant.len(), cfg.per_example_relevant)
            .into_iter()
            .map(|p| relevant[p])
            .collect();
        while support.len() < cfg.k {
            support.insert(ex_rng.random_range(0..cfg.d));
        }
        let x = SparseVector::binary(cfg.d, support)?;
        let noise = if cfg.noise_sd > 0.0 { cfg.noise_sd * ex_rng.sample::<f64, _>(StandardNormal) } else { 0.0 };
        let target = model.eval_binary(&x) + noise;
        examples.push(Example { x, target });
    }

    let mut order: Vec<usize> = (0..cfg.n).collect();
    order.shuffle(&mut rng_from_seed(derive_seed(cfg.seed, 2)));
    let n_train = cfg.n * 9 / 10;
    let test = order.split_off(n_train);
    Ok(Dataset { d: cfg.d, examples, model, relevant, train: order, test })
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

impl Dataset {
    pub fn targets(&self) -> Vec<f64> {
        self.examples.iter().map(|e| e.target).collect()
    }

    /// Write `d` on the first line, then one `target index:1 ...` line per
    /// example (train examples first, then test).
    pub fn write_text(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "{}", self.d)?;
        for &e in self.train.iter().chain(&self.test) {
            let ex = &self.examples[e];
            writeln!(out, "{} {}", ex.target, ex.x.pairs_text())?;
        }
        Ok(())
    }

    /// Read the format written by [`write_text`](Self::write_text). Model,
    /// relevant set and split are not stored there; the caller supplies the
    /// model and the split is taken as the first 90% / last 10% of lines.
    pub fn read_text(text: &str, model: SparsePolynomialModel) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty dataset".into() })?;
        let d: usize = first.trim().parse().map_err(|_| Error::Parse { line: 1, msg: "expected dimension".into() })?;
        let mut examples = Vec::new();
        for (n, line) in lines {
            let mut toks = line.split_whitespace();
            let perr = |msg: String| Error::Parse { line: n + 1, msg };
            let target: f64 = toks
                .next()
                .unwrap_or_default()
                .parse()
                .map_err(|_| perr("bad target".into()))?;
            let entries = toks.map(|t| parse_pair(t).map_err(perr)).collect::<Result<Vec<_>>>()?;
            let x = SparseVector::new(d, entries, crate::Flavor::Binary)?;
            examples.push(Example { x, target });
        }
        let n_train = examples.len() * 9 / 10;
        Ok(Self {
            d,
            train: (0..n_train).collect(),
            test: (n_train..examples.len()).collect(),
            examples,
            relevant: model.variables(),
            model,
        })
    }
}
