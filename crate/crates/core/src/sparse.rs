//! Sparse vectors over `[d]`.
//!
//! Text format (libsvm style): the first token is the dimension `d`, followed
//! by whitespace-separated `index:value` pairs with 0-based indices, e.g.
//!
//! ```text
//! 4
//! 0:2 2:1
//! ```

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

/// Which class of vectors a [`SparseVector`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// Every stored value is exactly 1.
    Binary,
    /// Every stored value is strictly positive.
    Nonneg,
    Real,
}

/// Sorted `(index, value)` pairs with nonzero values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    dim: usize,
    indices: Vec<usize>,
    values: Vec<f64>,
    flavor: Flavor,
}

impl SparseVector {
    /// General constructor. Zero values are dropped, indices are sorted, and
    /// duplicates or out-of-range indices are rejected. The flavor is checked
    /// against the values.
    pub fn new(dim: usize, entries: impl IntoIterator<Item = (usize, f64)>, flavor: Flavor) -> Result<Self> {
        let mut entries: Vec<(usize, f64)> = entries.into_iter().filter(|&(_, v)| v != 0.0).collect();
        entries.sort_by_key(|&(i, _)| i);
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return param(format!("duplicate index {}", w[0].0));
            }
        }
        if let Some(&(i, _)) = entries.last() {
            if i >= dim {
                return param(format!("index {i} out of range for dimension {dim}"));
            }
        }
        for &(i, v) in &entries {
            if !v.is_finite() {
                return param(format!("non-finite value at index {i}"));
            }
            match flavor {
                Flavor::Binary if v != 1.0 => return param(format!("binary vector has value {v} at index {i}")),
                Flavor::Nonneg if v < 0.0 => return param(format!("nonnegative vector has value {v} at index {i}")),
                _ => {}
            }
        }
        let (indices, values) = entries.into_iter().unzip();
        Ok(Self { dim, indices, values, flavor })
    }

    /// A 0/1 vector with ones at `support`.
    pub fn binary(dim: usize, support: impl IntoIterator<Item = usize>) -> Result<Self> {
        Self::new(dim, support.into_iter().map(|i| (i, 1.0)), Flavor::Binary)
    }

    pub fn nonneg(dim: usize, entries: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        Self::new(dim, entries, Flavor::Nonneg)
    }

    pub fn real(dim: usize, entries: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        Self::new(dim, entries, Flavor::Real)
    }

    /// Build from a dense slice, picking the narrowest flavor that fits.
    pub fn from_dense(values: &[f64]) -> Result<Self> {
        let entries: Vec<_> = values.iter().copied().enumerate().filter(|&(_, v)| v != 0.0).collect();
        let flavor = infer_flavor(entries.iter().map(|&(_, v)| v));
        Self::new(values.len(), entries, flavor)
    }

    pub fn zeros(dim: usize, flavor: Flavor) -> Self {
        Self { dim, indices: Vec::new(), values: Vec::new(), flavor }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    /// Support `S(x)` in increasing order.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn get(&self, i: usize) -> f64 {
        match self.indices.binary_search(&i) {
            Ok(pos) => self.values[pos],
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (i, v) in self.iter() {
            out[i] = v;
        }
        out
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// Inner product with another sparse vector of the same dimension.
    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut a, mut b) = (0, 0);
        let mut acc = 0.0;
        while a < self.indices.len() && b < other.indices.len() {
            match self.indices[a].cmp(&other.indices[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.values[a] * other.values[b];
                    a += 1;
                    b += 1;
                }
            }
        }
        acc
    }

    /// Split into `(head_k, tail_k)`: the head keeps the `k` entries of
    /// largest magnitude (ties go to the lower index), the tail is the rest.
    pub fn head_tail(&self, k: usize) -> (SparseVector, SparseVector) {
        let mut order: Vec<usize> = (0..self.nnz()).collect();
        // Stable sort keeps ascending index order among equal magnitudes.
        order.sort_by(|&a, &b| self.values[b].abs().total_cmp(&self.values[a].abs()));
        let mut in_head = vec![false; self.nnz()];
        for &pos in order.iter().take(k) {
            in_head[pos] = true;
        }
        let pick = |keep: bool| SparseVector {
            dim: self.dim,
            indices: (0..self.nnz()).filter(|&p| in_head[p] == keep).map(|p| self.indices[p]).collect(),
            values: (0..self.nnz()).filter(|&p| in_head[p] == keep).map(|p| self.values[p]).collect(),
            flavor: self.flavor,
        };
        (pick(true), pick(false))
    }

    /// Render in the `d` + `index:value` text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.dim);
        out.push_str(&self.pairs_text());
        out.push('\n');
        out
    }

    /// Just the `index:value` pairs, space separated.
    pub fn pairs_text(&self) -> String {
        let mut out = String::new();
        for (n, (i, v)) in self.iter().enumerate() {
            if n > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{i}:{v}");
        }
        out
    }

    /// Parse the text format. The flavor is inferred from the values.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut tokens = text
            .lines()
            .enumerate()
            .flat_map(|(n, line)| line.split_whitespace().map(move |tok| (n + 1, tok)));
        let (line, first) = tokens.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
        let dim: usize = first.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("expected dimension, found {first:?}"),
        })?;
        let entries = tokens
            .map(|(line, tok)| parse_pair(tok).map_err(|msg| Error::Parse { line, msg }))
            .collect::<Result<Vec<_>>>()?;
        let flavor = infer_flavor(entries.iter().map(|&(_, v)| v));
        Self::new(dim, entries, flavor)
    }
}

pub(crate) fn parse_pair(tok: &str) -> std::result::Result<(usize, f64), String> {
    let (i, v) = tok.split_once(':').ok_or_else(|| format!("expected index:value, found {tok:?}"))?;
    let i = i.parse().map_err(|_| format!("bad index in {tok:?}"))?;
    let v = v.parse().map_err(|_| format!("bad value in {tok:?}"))?;
    Ok((i, v))
}

pub(crate) fn infer_flavor(values: impl Iterator<Item = f64>) -> Flavor {
    let mut flavor = Flavor::Binary;
    for v in values {
        if v == 0.0 {
            continue;
        }
        if v < 0.0 {
            return Flavor::Real;
        }
        if v != 1.0 {
            flavor = Flavor::Nonneg;
        }
    }
    flavor
}
