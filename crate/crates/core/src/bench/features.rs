//! Turning a dataset into network inputs.

use serde::{Deserialize, Serialize};

use crate::bench::synth::Dataset;
use crate::error::{param, Result};
use crate::gauss_proj::GaussianProjector;
use crate::hash_family::HashFamily;
use crate::sketch::bool_sketch_support;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Scheme {
    /// The original 0/1 vector.
    Raw,
    /// Flattened boolean sketch, `m * t` inputs.
    Sketch { m: usize, t: usize },
    /// Gaussian projection to `dim` outputs.
    Gaussian { dim: usize },
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Raw => "raw",
            Scheme::Sketch { .. } => "sketch",
            Scheme::Gaussian { .. } => "gaussian",
        }
    }

    pub fn input_dim(&self, d: usize) -> usize {
        match *self {
            Scheme::Raw => d,
            Scheme::Sketch { m, t } => m * t,
            Scheme::Gaussian { dim } => dim,
        }
    }
}

/// The map used to featurise a dataset, kept so constructed networks can be
/// built against the same hashes or projection.
#[derive(Debug, Clone)]
pub enum FeatureMap {
    Raw,
    Sketch(HashFamily),
    Gaussian(GaussianProjector),
}

#[derive(Debug, Clone, PartialEq)]
enum Storage {
    /// Active positions of 0/1 rows.
    Binary(Vec<Vec<u32>>),
    /// Row-major dense values.
    Dense(Vec<f32>),
}

/// One row per example. Raw and sketch features are 0/1 and stored by
/// active position; projections are stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    dim: usize,
    rows: usize,
    storage: Storage,
}

/// Borrowed view of one row.
#[derive(Debug, Clone, Copy)]
pub enum Row<'a> {
    Binary(&'a [u32]),
    Dense(&'a [f32]),
}

impl FeatureMatrix {
    pub fn binary(dim: usize, rows: Vec<Vec<u32>>) -> Result<Self> {
        if rows.iter().flatten().any(|&p| p as usize >= dim) {
            return param("active position out of range");
        }
        Ok(Self { dim, rows: rows.len(), storage: Storage::Binary(rows) })
    }

    pub fn dense(dim: usize, values: Vec<f32>) -> Result<Self> {
        if dim == 0 || values.len() % dim != 0 {
            return param("dense data length is not a multiple of dim");
        }
        Ok(Self { dim, rows: values.len() / dim, storage: Storage::Dense(values) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn row(&self, r: usize) -> Row<'_> {
        match &self.storage {
            Storage::Binary(rows) => Row::Binary(&rows[r]),
            Storage::Dense(v) => Row::Dense(&v[r * self.dim..(r + 1) * self.dim]),
        }
    }

    pub fn dense_row(&self, r: usize) -> Vec<f64> {
        match self.row(r) {
            Row::Binary(active) => {
                let mut out = vec![0.0; self.dim];
                for &p in active {
                    out[p as usize] = 1.0;
                }
                out
            }
            Row::Dense(v) => v.iter().map(|&x| f64::from(x)).collect(),
        }
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        (0..self.rows).flat_map(|r| self.dense_row(r)).collect()
    }
}

/// Featurise every example with one shared hash family / projector.
pub fn featurize(ds: &Dataset, scheme: Scheme, seed: u64) -> Result<(FeatureMatrix, FeatureMap)> {
    match scheme {
        Scheme::Raw => {
            let rows = ds.examples.iter().map(|e| e.x.indices().iter().map(|&i| i as u32).collect()).collect();
            Ok((FeatureMatrix::binary(ds.d, rows)?, FeatureMap::Raw))
        }
        Scheme::Sketch { m, t } => {
            let fam = HashFamily::seeded(seed, t, ds.d, m)?;
            let rows = ds
                .examples
                .iter()
                .map(|e| Ok(bool_sketch_support(&e.x, &fam)?.into_iter().map(|p| p as u32).collect()))
                .collect::<Result<_>>()?;
            Ok((FeatureMatrix::binary(m * t, rows)?, FeatureMap::Sketch(fam)))
        }
        Scheme::Gaussian { dim } => {
            let proj = GaussianProjector::new(seed, ds.d, dim)?;
            let mut values = Vec::with_capacity(ds.examples.len() * dim);
            for e in &ds.examples {
                values.extend(proj.project(&e.x)?.into_iter().map(|v| v as f32));
            }
            Ok((FeatureMatrix::dense(dim, values)?, FeatureMap::Gaussian(proj)))
        }
    }
}
