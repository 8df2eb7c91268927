//! Mini-batch training of one-hidden-layer ReLU regressors.
//!
//! Squared loss, gradient steps with optional momentum or Adam moments, and
//! an l1 proximal shrink on the first-layer weights after every step. The
//! run is a pure function of the data and [`TrainConfig::seed`].

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::bench::features::{FeatureMatrix, Row};
use crate::error::{param, Error, Result};
use crate::network::{HiddenUnit, Network};
use crate::rng::{derive_seed, rng_from_seed};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Optimizer {
    Sgd { momentum: f64 },
    Adam { beta1: f64, beta2: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// 0 trains a linear model instead of a network.
    pub hidden_units: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// l1 penalty on first-layer weights.
    pub l1: f64,
    pub optimizer: Optimizer,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            hidden_units: 60,
            learning_rate: 0.01,
            epochs: 30,
            batch_size: 64,
            l1: 1e-3,
            optimizer: Optimizer::Sgd { momentum: 0.9 },
            seed: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) || self.epochs == 0 || self.batch_size == 0 {
            return param("learning rate, epochs and batch size must be positive");
        }
        if !(self.l1 >= 0.0) {
            return param("l1 penalty must be nonnegative");
        }
        Ok(())
    }
}

/// Per-parameter optimizer state.
struct Slot {
    first: Vec<f32>,
    second: Vec<f32>,
}

impl Slot {
    fn new(n: usize, adam: bool) -> Self {
        Self { first: vec![0.0; n], second: if adam { vec![0.0; n] } else { Vec::new() } }
    }
}

struct Stepper {
    optimizer: Optimizer,
    lr: f32,
    step: i32,
}

impl Stepper {
    /// Apply one update to `params` from gradient `grad` and zero `grad`.
    fn apply(&self, params: &mut [f32], grad: &mut [f32], slot: &mut Slot) {
        match self.optimizer {
            Optimizer::Sgd { momentum } => {
                let mu = momentum as f32;
                for ((p, g), v) in params.iter_mut().zip(grad.iter_mut()).zip(&mut slot.first) {
                    *v = mu * *v + *g;
                    *p -= self.lr * *v;
                    *g = 0.0;
                }
            }
            Optimizer::Adam { beta1, beta2 } => {
                let (b1, b2) = (beta1 as f32, beta2 as f32);
                let c1 = 1.0 - b1.powi(self.step);
                let c2 = 1.0 - b2.powi(self.step);
                let lr = self.lr * c2.sqrt() / c1;
                for (((p, g), m), v) in params.iter_mut().zip(grad.iter_mut()).zip(&mut slot.first).zip(&mut slot.second) {
                    *m = b1 * *m + (1.0 - b1) * *g;
                    *v = b2 * *v + (1.0 - b2) * *g * *g;
                    *p -= lr * *m / (v.sqrt() + 1e-8);
                    *g = 0.0;
                }
            }
        }
    }
}

/// A trained regressor: one hidden ReLU layer, or linear when `hidden == 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneLayer {
    input_dim: usize,
    hidden: usize,
    /// Input-major: weights out of input `r` are `w1[r * hidden .. (r + 1) * hidden]`.
    /// For the linear model this is the weight vector.
    w1: Vec<f32>,
    b1: Vec<f32>,
    w2: Vec<f32>,
    b2: f32,
}

impl OneLayer {
    fn init(input_dim: usize, hidden: usize, seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        let width = hidden.max(1);
        let a1 = 1.0 / (input_dim as f32).sqrt();
        let w1 = (0..input_dim * width).map(|_| rng.random_range(-a1..=a1)).collect();
        let a2 = 1.0 / (hidden.max(1) as f32).sqrt();
        let w2 = (0..hidden).map(|_| rng.random_range(-a2..=a2)).collect();
        Self { input_dim, hidden, w1, b1: vec![0.0; hidden], w2, b2: 0.0 }
    }

    fn width(&self) -> usize {
        self.hidden.max(1)
    }

    /// First-layer pre-activations (or the linear output in slot 0).
    fn preact(&self, row: Row<'_>, out: &mut [f32]) {
        let h = self.width();
        if self.hidden > 0 {
            out.copy_from_slice(&self.b1);
        } else {
            out[0] = 0.0;
        }
        match row {
            Row::Binary(active) => {
                for &r in active {
                    let w = &self.w1[r as usize * h..(r as usize + 1) * h];
                    for (o, wi) in out.iter_mut().zip(w) {
                        *o += wi;
                    }
                }
            }
            Row::Dense(x) => {
                for (r, &xr) in x.iter().enumerate() {
                    if xr == 0.0 {
                        continue;
                    }
                    let w = &self.w1[r * h..(r + 1) * h];
                    for (o, wi) in out.iter_mut().zip(w) {
                        *o += xr * wi;
                    }
                }
            }
        }
    }

    fn output(&self, pre: &[f32]) -> f32 {
        if self.hidden == 0 {
            return pre[0] + self.b2;
        }
        pre.iter().zip(&self.w2).map(|(p, w)| p.max(0.0) * w).sum::<f32>() + self.b2
    }

    pub fn predict(&self, row: Row<'_>) -> f64 {
        let mut pre = vec![0.0; self.width()];
        self.preact(row, &mut pre);
        f64::from(self.output(&pre))
    }

    /// Mean squared error over the rows in `idx`.
    pub fn mse(&self, features: &FeatureMatrix, targets: &[f64], idx: &[usize]) -> f64 {
        if idx.is_empty() {
            return f64::NAN;
        }
        let mut pre = vec![0.0; self.width()];
        let total: f64 = idx
            .iter()
            .map(|&r| {
                self.preact(features.row(r), &mut pre);
                let e = f64::from(self.output(&pre)) - targets[r];
                e * e
            })
            .sum();
        total / idx.len() as f64
    }

    /// Export as a [`Network`]. A linear model becomes the pair of units
    /// `ReLU(z) - ReLU(-z)`.
    pub fn to_network(&self) -> Result<Network> {
        let h = self.width();
        let column = |u: usize, sign: f32| -> Vec<(usize, f64)> {
            (0..self.input_dim)
                .filter_map(|r| {
                    let w = self.w1[r * h + u];
                    (w != 0.0).then_some((r, f64::from(sign * w)))
                })
                .collect()
        };
        if self.hidden == 0 {
            let units = vec![HiddenUnit::relu(column(0, 1.0), 0.0), HiddenUnit::relu(column(0, -1.0), 0.0)];
            return Network::new(self.input_dim, units, vec![(0, 1.0), (1, -1.0)], f64::from(self.b2));
        }
        let units = (0..h).map(|u| HiddenUnit::relu(column(u, 1.0), f64::from(self.b1[u]))).collect();
        let output = self.w2.iter().enumerate().map(|(u, &w)| (u, f64::from(w))).collect();
        Network::new(self.input_dim, units, output, f64::from(self.b2))
    }

    /// Nonzero first-layer weights.
    pub fn first_layer_nnz(&self) -> usize {
        self.w1.iter().filter(|&&w| w != 0.0).count()
    }
}

#[derive(Debug, Clone)]
pub struct TrainResult {
    pub model: OneLayer,
    pub train_mse: f64,
    pub test_mse: f64,
}

impl TrainResult {
    pub fn network(&self) -> Result<Network> {
        self.model.to_network()
    }
}

/// Train on the rows in `train`, report MSE on `train` and `test`.
pub fn train_one_layer(features: &FeatureMatrix, targets: &[f64], train: &[usize], test: &[usize], tc: &TrainConfig) -> Result<TrainResult> {
    tc.validate()?;
    if targets.len() != features.rows() {
        return param(format!("{} targets for {} feature rows", targets.len(), features.rows()));
    }
    if train.is_empty() || train.iter().chain(test).any(|&r| r >= features.rows()) {
        return param("train split is empty or indices are out of range");
    }
    let adam = matches!(tc.optimizer, Optimizer::Adam { .. });
    let mut model = OneLayer::init(features.dim(), tc.hidden_units, derive_seed(tc.seed, 0));
    let h = model.width();
    let hidden = tc.hidden_units;

    let mut g_w1 = vec![0.0f32; model.w1.len()];
    let mut g_b1 = vec![0.0f32; model.b1.len()];
    let mut g_w2 = vec![0.0f32; model.w2.len()];
    let mut g_b2 = [0.0f32];
    let mut s_w1 = Slot::new(g_w1.len(), adam);
    let mut s_b1 = Slot::new(g_b1.len(), adam);
    let mut s_w2 = Slot::new(g_w2.len(), adam);
    let mut s_b2 = Slot::new(1, adam);
    let mut stepper = Stepper { optimizer: tc.optimizer, lr: tc.learning_rate as f32, step: 0 };
    let shrink = (tc.learning_rate * tc.l1) as f32;

    let mut order = train.to_vec();
    let mut shuffle_rng = rng_from_seed(derive_seed(tc.seed, 1));
    let mut pres = vec![0.0f32; tc.batch_size * h];
    let mut deltas = vec![0.0f32; h];

    for epoch in 0..tc.epochs {
        order.shuffle(&mut shuffle_rng);
        let mut epoch_loss = 0.0f64;
        for batch in order.chunks(tc.batch_size) {
            let scale = 1.0 / batch.len() as f32;
            // Forward with the current weights for the whole batch.
            for (b, &r) in batch.iter().enumerate() {
                model.preact(features.row(r), &mut pres[b * h..(b + 1) * h]);
            }
            for (b, &r) in batch.iter().enumerate() {
                let pre = &pres[b * h..(b + 1) * h];
                let err = model.output(pre) - targets[r] as f32;
                epoch_loss += f64::from(err * err);
                let e = err * scale;
                g_b2[0] += e;
                if hidden == 0 {
                    deltas[0] = e;
                } else {
                    for u in 0..h {
                        let act = pre[u].max(0.0);
                        g_w2[u] += e * act;
                        let d = if pre[u] > 0.0 { e * model.w2[u] } else { 0.0 };
                        deltas[u] = d;
                        g_b1[u] += d;
                    }
                }
                match features.row(r) {
                    Row::Binary(active) => {
                        for &p in active {
                            let g = &mut g_w1[p as usize * h..(p as usize + 1) * h];
                            for (gi, d) in g.iter_mut().zip(&deltas) {
                                *gi += d;
                            }
                        }
                    }
                    Row::Dense(x) => {
                        for (p, &xp) in x.iter().enumerate() {
                            if xp == 0.0 {
                                continue;
                            }
                            let g = &mut g_w1[p * h..(p + 1) * h];
                            for (gi, d) in g.iter_mut().zip(&deltas) {
                                *gi += xp * d;
                            }
                        }
                    }
                }
            }
            stepper.step += 1;
            stepper.apply(&mut model.w1, &mut g_w1, &mut s_w1);
            if hidden > 0 {
                stepper.apply(&mut model.b1, &mut g_b1, &mut s_b1);
                stepper.apply(&mut model.w2, &mut g_w2, &mut s_w2);
            }
            stepper.apply(std::slice::from_mut(&mut model.b2), &mut g_b2, &mut s_b2);
            if shrink > 0.0 {
                for w in &mut model.w1 {
                    *w = w.signum() * (w.abs() - shrink).max(0.0);
                }
            }
        }
        let loss = epoch_loss / order.len() as f64;
        if !loss.is_finite() {
            return Err(Error::Training { epoch, loss });
        }
    }

    let train_mse = model.mse(features, targets, train);
    let test_mse = model.mse(features, targets, test);
    if !train_mse.is_finite() {
        return Err(Error::Training { epoch: tc.epochs, loss: train_mse });
    }
    Ok(TrainResult { model, train_mse, test_mse })
}

/// Mean squared error of any [`Network`] on the rows in `idx`.
pub fn network_mse(net: &Network, features: &FeatureMatrix, targets: &[f64], idx: &[usize]) -> Result<f64> {
    if idx.is_empty() {
        return Ok(f64::NAN);
    }
    let mut total = 0.0;
    for &r in idx {
        let e = net.eval(&features.dense_row(r))? - targets[r];
        total += e * e;
    }
    Ok(total / idx.len() as f64)
}
