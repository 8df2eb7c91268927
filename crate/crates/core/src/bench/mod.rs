//! Synthetic regression benchmark: data, featurisation, training and the
//! experiment grid.
//!
//! A [`BenchSpec`] lists tasks (data generators), cells (feature scheme plus
//! learner) and a replicate count. Every `(task, replicate)` pair draws its
//! own dataset; every cell then gets its own hash family or projection and
//! training seed, all derived from the spec seed, so a rerun reproduces the
//! CSV exactly apart from the runtime column.

pub mod features;
pub mod synth;
pub mod train;

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::construct::{build_bool_sketch_net, build_raw_bool_net, SparsePolynomialModel};
use crate::error::{param, Error, Result};
use crate::gauss_proj::build_gauss_net;
use crate::rng::derive_seed;
use crate::sparse::SparseVector;

pub use features::{featurize, FeatureMap, FeatureMatrix, Scheme};
pub use synth::{gen_synthetic, Dataset, SynthConfig};
pub use train::{network_mse, train_one_layer, Optimizer, TrainConfig, TrainResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Learner {
    /// One-hidden-layer ReLU network trained from scratch.
    #[default]
    Net,
    /// Linear model trained with the same optimizer.
    Linear,
    /// Weights written down from the true model and the feature map.
    Constructed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub scheme: Scheme,
    #[serde(default)]
    pub learner: Learner,
}

impl Cell {
    pub fn net(scheme: Scheme) -> Self {
        Self { scheme, learner: Learner::Net }
    }

    pub fn linear(scheme: Scheme) -> Self {
        Self { scheme, learner: Learner::Linear }
    }

    /// Value of the CSV `scheme` column, e.g. `sketch` or `sketch+linear`.
    pub fn label(&self) -> String {
        match self.learner {
            Learner::Net => self.scheme.name().to_string(),
            Learner::Linear => format!("{}+linear", self.scheme.name()),
            Learner::Constructed => format!("{}+constructed", self.scheme.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub name: String,
    pub synth: SynthConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSpec {
    pub seed: u64,
    pub replicates: usize,
    pub tasks: Vec<Task>,
    pub cells: Vec<Cell>,
    pub train: TrainConfig,
}

impl BenchSpec {
    pub fn from_json(json: &str) -> Result<Self> {
        let spec: BenchSpec = serde_json::from_str(json)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 || self.tasks.is_empty() || self.cells.is_empty() {
            return param("spec needs at least one task, one cell and one replicate");
        }
        for task in &self.tasks {
            task.synth.validate()?;
        }
        self.train.validate()
    }

    /// Replace every task's sizes with the published experiment sizes.
    pub fn at_paper_scale(mut self) -> Self {
        let paper = SynthConfig::paper_scale();
        for task in &mut self.tasks {
            task.synth = task.synth.with_sizes_of(&paper);
        }
        self.train.hidden_units = self.train.hidden_units.max(paper.s);
        self
    }
}

/// One line of the benchmark CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub task: String,
    pub scheme: String,
    pub m: Option<usize>,
    pub t: Option<usize>,
    pub dim: usize,
    /// Replicate number, or `mean` for aggregate rows.
    pub replicate: String,
    pub train_mse: f64,
    pub test_mse: f64,
    pub runtime_s: f64,
    #[serde(skip)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    /// Per-replicate rows followed by one `mean` row per `(task, cell)`.
    pub fn with_means(&self) -> Vec<BenchRow> {
        let mut out = self.rows.clone();
        let mut keys: Vec<(String, String, Option<usize>, Option<usize>, usize)> = Vec::new();
        for r in &self.rows {
            let key = (r.task.clone(), r.scheme.clone(), r.m, r.t, r.dim);
            if !keys.contains(&key) {
                keys.push(key);
            }
        }
        for (task, scheme, m, t, dim) in keys {
            let group: Vec<&BenchRow> = self
                .rows
                .iter()
                .filter(|r| r.task == task && r.scheme == scheme && r.m == m && r.t == t && r.dim == dim)
                .collect();
            let mean = |f: fn(&BenchRow) -> f64| group.iter().map(|r| f(r)).sum::<f64>() / group.len() as f64;
            out.push(BenchRow {
                task,
                scheme,
                m,
                t,
                dim,
                replicate: "mean".into(),
                train_mse: mean(|r| r.train_mse),
                test_mse: mean(|r| r.test_mse),
                runtime_s: mean(|r| r.runtime_s),
                error: None,
            });
        }
        out
    }

    /// Mean test MSE of a `(task, cell)` over replicates; failed replicates
    /// make the mean NaN.
    pub fn mean_test_mse(&self, task: &str, cell: &Cell) -> f64 {
        let label = cell.label();
        let vals: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.task == task && r.scheme == label)
            .filter(|r| match cell.scheme {
                Scheme::Sketch { m, t } => r.m == Some(m) && r.t == Some(t),
                Scheme::Gaussian { dim } => r.dim == dim,
                Scheme::Raw => true,
            })
            .map(|r| r.test_mse)
            .collect();
        if vals.is_empty() {
            return f64::NAN;
        }
        vals.iter().sum::<f64>() / vals.len() as f64
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in self.with_means() {
            w.serialize(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn scheme_columns(scheme: Scheme, d: usize) -> (Option<usize>, Option<usize>, usize) {
    match scheme {
        Scheme::Sketch { m, t } => (Some(m), Some(t), m * t),
        other => (None, None, other.input_dim(d)),
    }
}

/// Build the explicit network for `model` on the given feature map.
pub fn constructed_network(model: &SparsePolynomialModel, map: &FeatureMap) -> Result<crate::Network> {
    match map {
        FeatureMap::Raw => build_raw_bool_net(model),
        FeatureMap::Sketch(fam) => build_bool_sketch_net(model, fam),
        FeatureMap::Gaussian(proj) => {
            if !model.is_linear() {
                return Err(Error::Capability("the projection construction covers linear models only".into()));
            }
            let w = SparseVector::real(model.d(), model.terms().iter().map(|t| (t.set[0], t.weight)))?;
            build_gauss_net(&w, proj)
        }
    }
}

/// Train (or construct) one cell on one dataset.
pub fn run_cell(ds: &Dataset, cell: &Cell, feature_seed: u64, tc: &TrainConfig) -> Result<(f64, f64)> {
    let (features, map) = featurize(ds, cell.scheme, feature_seed)?;
    let targets = ds.targets();
    match cell.learner {
        Learner::Net => {
            let res = train_one_layer(&features, &targets, &ds.train, &ds.test, tc)?;
            Ok((res.train_mse, res.test_mse))
        }
        Learner::Linear => {
            let tc = TrainConfig { hidden_units: 0, ..tc.clone() };
            let res = train_one_layer(&features, &targets, &ds.train, &ds.test, &tc)?;
            Ok((res.train_mse, res.test_mse))
        }
        Learner::Constructed => {
            let net = constructed_network(&ds.model, &map)?;
            Ok((network_mse(&net, &features, &targets, &ds.train)?, network_mse(&net, &features, &targets, &ds.test)?))
        }
    }
}

/// Run every `(task, replicate, cell)` combination. Failures are recorded
/// as rows with NaN errors and the run continues.
pub fn run_benchmark(spec: &BenchSpec, mut progress: impl FnMut(&BenchRow)) -> Result<BenchReport> {
    spec.validate()?;
    let mut report = BenchReport::default();
    for (ti, task) in spec.tasks.iter().enumerate() {
        for rep in 0..spec.replicates {
            let data_seed = derive_seed(task.synth.seed, rep as u64);
            let ds = gen_synthetic(&SynthConfig { seed: data_seed, ..task.synth.clone() });
            for (ci, cell) in spec.cells.iter().enumerate() {
                let (m, t, dim) = scheme_columns(cell.scheme, task.synth.d);
                let cell_seed = derive_seed(derive_seed(spec.seed, ti as u64), (rep * 1_000 + ci) as u64);
                let tc = TrainConfig { seed: derive_seed(cell_seed, 1), ..spec.train.clone() };
                let start = Instant::now();
                let outcome = ds.as_ref().map_err(|e| Error::Parameter(e.to_string())).and_then(|ds| run_cell(ds, cell, derive_seed(cell_seed, 0), &tc));
                let runtime_s = start.elapsed().as_secs_f64();
                let (train_mse, test_mse, error) = match outcome {
                    Ok((a, b)) => (a, b, None),
                    Err(e) => (f64::NAN, f64::NAN, Some(e.to_string())),
                };
                let row = BenchRow {
                    task: task.name.clone(),
                    scheme: cell.label(),
                    m,
                    t,
                    dim,
                    replicate: rep.to_string(),
                    train_mse,
                    test_mse,
                    runtime_s,
                    error,
                };
                progress(&row);
                report.rows.push(row);
            }
        }
    }
    Ok(report)
}

/// Sketch rows for a matched total input dimension: `m = round(dim / t)`.
pub fn matched_sketch(dim: usize, t: usize) -> Scheme {
    Scheme::Sketch { m: ((dim as f64) / t as f64).round() as usize, t }
}

/// Gaussian vs sketch comparison at total dimension 1K, 2K and 3K on a linear
/// and a polynomial task.
pub fn projection_vs_sketch_spec(base: &SynthConfig, replicates: usize) -> BenchSpec {
    let mut cells = Vec::new();
    for dim in [1000, 2000, 3000] {
        cells.push(Cell::net(Scheme::Gaussian { dim }));
        for t in [1, 2, 6] {
            cells.push(Cell::net(matched_sketch(dim, t)));
        }
    }
    BenchSpec {
        seed: 1,
        replicates,
        tasks: vec![
            Task { name: "linear".into(), synth: base.clone().linear() },
            Task { name: "polynomial".into(), synth: base.clone().polynomial(1, 3) },
        ],
        cells,
        train: TrainConfig { hidden_units: base.s, ..TrainConfig::default() },
    }
}

/// `m x t` sweep on linear data.
pub fn hash_grid_spec(base: &SynthConfig, ms: &[usize], ts: &[usize], replicates: usize) -> BenchSpec {
    let cells = ms.iter().flat_map(|&m| ts.iter().map(move |&t| Cell::net(Scheme::Sketch { m, t }))).collect();
    BenchSpec {
        seed: 2,
        replicates,
        tasks: vec![Task { name: "linear".into(), synth: base.clone().linear() }],
        cells,
        train: TrainConfig { hidden_units: base.s, ..TrainConfig::default() },
    }
}

/// Linear model vs network, raw features vs sketches with `m = 200`.
pub fn net_vs_linear_spec(base: &SynthConfig, ts: &[usize], replicates: usize) -> BenchSpec {
    let mut cells = vec![Cell::net(Scheme::Raw), Cell::linear(Scheme::Raw)];
    for &t in ts {
        cells.push(Cell::net(Scheme::Sketch { m: 200, t }));
        cells.push(Cell::linear(Scheme::Sketch { m: 200, t }));
    }
    BenchSpec {
        seed: 3,
        replicates,
        tasks: vec![
            Task { name: "linear".into(), synth: base.clone().linear() },
            Task { name: "polynomial".into(), synth: base.clone().polynomial(2, 3) },
        ],
        cells,
        train: TrainConfig { hidden_units: base.s, ..TrainConfig::default() },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> SynthConfig {
        SynthConfig { d: 200, k: 6, s: 8, n: 400, relevant_size: 8, per_example_relevant: 3, max_term_card: 2, min_term_card: 1, noise_sd: 0.05, seed: 9 }
    }

    fn tiny_spec() -> BenchSpec {
        BenchSpec {
            seed: 5,
            replicates: 2,
            tasks: vec![Task { name: "poly".into(), synth: tiny() }],
            cells: vec![
                Cell::net(Scheme::Sketch { m: 20, t: 2 }),
                Cell::linear(Scheme::Raw),
                Cell { scheme: Scheme::Sketch { m: 20, t: 2 }, learner: Learner::Constructed },
            ],
            train: TrainConfig { hidden_units: 8, epochs: 3, ..TrainConfig::default() },
        }
    }

    #[test]
    fn rows_and_csv_schema() {
        let report = run_benchmark(&tiny_spec(), |_| {}).unwrap();
        assert_eq!(report.rows.len(), 6);
        assert!(report.rows.iter().all(|r| r.error.is_none() && r.test_mse.is_finite()));
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "task,scheme,m,t,dim,replicate,train_mse,test_mse,runtime_s");
        assert_eq!(text.lines().count(), 1 + 6 + 3);
        assert!(!text.contains("poly,sketch+linear,"));
        assert!(text.contains("poly,raw+linear,,,200,mean,"));
    }

    #[test]
    fn rerun_is_identical_modulo_runtime() {
        let strip = |r: &BenchReport| r.rows.iter().map(|r| (r.scheme.clone(), r.replicate.clone(), r.train_mse.to_bits(), r.test_mse.to_bits())).collect::<Vec<_>>();
        let a = run_benchmark(&tiny_spec(), |_| {}).unwrap();
        let b = run_benchmark(&tiny_spec(), |_| {}).unwrap();
        assert_eq!(strip(&a), strip(&b));
    }

    #[test]
    fn failing_cells_are_marked_and_run_continues() {
        let mut spec = tiny_spec();
        spec.cells.insert(0, Cell { scheme: Scheme::Gaussian { dim: 10 }, learner: Learner::Constructed });
        let report = run_benchmark(&spec, |_| {}).unwrap();
        assert_eq!(report.rows.len(), 8);
        let failed: Vec<_> = report.rows.iter().filter(|r| r.error.is_some()).collect();
        assert_eq!(failed.len(), 2);
        assert!(failed.iter().all(|r| r.test_mse.is_nan()));
    }

    #[test]
    fn spec_json_round_trip_and_paper_scale() {
        let spec = projection_vs_sketch_spec(&SynthConfig::desk_scale(), 5);
        assert_eq!(spec.cells.len(), 12);
        assert!(spec.cells.contains(&Cell::net(Scheme::Sketch { m: 167, t: 6 })));
        let json = serde_json::to_string_pretty(&spec).unwrap();
        assert_eq!(BenchSpec::from_json(&json).unwrap(), spec);
        let paper = spec.at_paper_scale();
        assert_eq!(paper.tasks[0].synth.d, 10_000);
        assert_eq!(paper.tasks[0].synth.max_term_card, 1);
        assert_eq!(paper.train.hidden_units, 300);
    }

    #[test]
    fn constructed_sketch_net_beats_noise_floor_on_clean_decodes() {
        let ds = gen_synthetic(&SynthConfig { noise_sd: 0.0, ..tiny() }).unwrap();
        let cell = Cell { scheme: Scheme::Raw, learner: Learner::Constructed };
        let (tr, te) = run_cell(&ds, &cell, 0, &TrainConfig::default()).unwrap();
        assert!(tr < 1e-20 && te < 1e-20);
    }
}
