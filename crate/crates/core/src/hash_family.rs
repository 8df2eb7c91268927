//! Pairwise-independent hash families `[d] -> [m]`.
//!
//! The seeded family uses the affine construction over the Mersenne prime
//! field `p = 2^61 - 1`:
//!
//! ```text
//! h_j(i) = ((a_j * i + b_j) mod p) mod m,    a_j in [1, p), b_j in [0, p)
//! ```
//!
//! The final reduction mod `m` is slightly non-uniform when `m` does not
//! divide `p`; the bias is at most `m / p` and negligible for the sizes used
//! here. Table families exist so hand-worked examples can be reproduced
//! bit-for-bit.

use std::sync::Arc;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::rng::rng_from_seed;

/// The Mersenne prime `2^61 - 1`.
pub const MERSENNE_61: u64 = (1 << 61) - 1;

/// Parameters that fully determine a seeded family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashSpec {
    pub seed: u64,
    pub t: usize,
    pub d: usize,
    pub m: usize,
}

#[derive(Debug, PartialEq, Eq)]
enum Params {
    Affine { seed: u64, coeffs: Vec<(u64, u64)> },
    Table(Vec<Vec<usize>>),
}

#[derive(Debug, PartialEq, Eq)]
struct Inner {
    d: usize,
    m: usize,
    params: Params,
}

/// `t` hash functions from `[d]` to `[m]`. Cheap to clone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashFamily {
    inner: Arc<Inner>,
}

#[inline]
fn mod_mersenne(x: u128) -> u64 {
    let p = MERSENNE_61 as u128;
    let folded = (x & p) + (x >> 61);
    let folded = (folded & p) + (folded >> 61);
    let r = folded as u64;
    if r >= MERSENNE_61 {
        r - MERSENNE_61
    } else {
        r
    }
}

impl HashFamily {
    /// Draw `t` affine functions from a deterministic generator seeded by `seed`.
    pub fn seeded(seed: u64, t: usize, d: usize, m: usize) -> Result<Self> {
        if t == 0 {
            return param("hash family needs t >= 1");
        }
        if d == 0 || m == 0 {
            return param(format!("hash family needs d >= 1 and m >= 1 (got d={d}, m={m})"));
        }
        if d as u64 > MERSENNE_61 || m as u64 > MERSENNE_61 {
            return param("d and m must fit in the 61-bit prime field");
        }
        let mut rng = rng_from_seed(seed);
        let coeffs = (0..t)
            .map(|_| {
                let a = rng.random_range(1..MERSENNE_61);
                let b = rng.random_range(0..MERSENNE_61);
                (a, b)
            })
            .collect();
        Ok(Self {
            inner: Arc::new(Inner {
                d,
                m,
                params: Params::Affine { seed, coeffs },
            }),
        })
    }

    pub fn from_spec(spec: &HashSpec) -> Result<Self> {
        Self::seeded(spec.seed, spec.t, spec.d, spec.m)
    }

    /// Build a family from explicit lookup tables, one per function.
    ///
    /// All tables must share the same length `d`; the range is `m`.
    pub fn from_tables(tables: Vec<Vec<usize>>, m: usize) -> Result<Self> {
        let Some(first) = tables.first() else {
            return param("table family needs at least one table");
        };
        let d = first.len();
        if d == 0 || m == 0 {
            return param("table family needs d >= 1 and m >= 1");
        }
        for (j, table) in tables.iter().enumerate() {
            if table.len() != d {
                return param(format!("table {j} has length {} but d = {d}", table.len()));
            }
            if let Some((i, &v)) = table.iter().enumerate().find(|(_, &v)| v >= m) {
                return param(format!("table {j} maps {i} to {v}, outside [0, {m})"));
            }
        }
        Ok(Self {
            inner: Arc::new(Inner {
                d,
                m,
                params: Params::Table(tables),
            }),
        })
    }

    /// Like [`from_tables`](Self::from_tables) but infers `m` as one past the
    /// largest entry.
    pub fn from_tables_infer(tables: Vec<Vec<usize>>) -> Result<Self> {
        let m = tables.iter().flatten().max().map_or(0, |&v| v + 1);
        Self::from_tables(tables, m)
    }

    pub fn t(&self) -> usize {
        match &self.inner.params {
            Params::Affine { coeffs, .. } => coeffs.len(),
            Params::Table(tables) => tables.len(),
        }
    }

    pub fn d(&self) -> usize {
        self.inner.d
    }

    pub fn m(&self) -> usize {
        self.inner.m
    }

    /// Seed and sizes for seeded families; `None` for table families.
    pub fn spec(&self) -> Option<HashSpec> {
        match &self.inner.params {
            Params::Affine { seed, coeffs } => Some(HashSpec {
                seed: *seed,
                t: coeffs.len(),
                d: self.inner.d,
                m: self.inner.m,
            }),
            Params::Table(_) => None,
        }
    }

    /// Affine coefficients `(a_j, b_j)`; `None` for table families.
    pub fn affine_coeffs(&self) -> Option<&[(u64, u64)]> {
        match &self.inner.params {
            Params::Affine { coeffs, .. } => Some(coeffs),
            Params::Table(_) => None,
        }
    }

    /// Checked evaluation of `h_j(i)`.
    pub fn eval(&self, j: usize, i: usize) -> Result<usize> {
        if j >= self.t() {
            return param(format!("hash index {j} out of range (t = {})", self.t()));
        }
        if i >= self.d() {
            return param(format!("coordinate {i} out of range (d = {})", self.d()));
        }
        Ok(self.bucket(j, i))
    }

    /// Unchecked evaluation; callers guarantee `j < t` and `i < d`.
    #[inline]
    pub fn bucket(&self, j: usize, i: usize) -> usize {
        match &self.inner.params {
            Params::Affine { coeffs, .. } => {
                let (a, b) = coeffs[j];
                let v = mod_mersenne(a as u128 * i as u128 + b as u128);
                (v % self.inner.m as u64) as usize
            }
            Params::Table(tables) => tables[j][i],
        }
    }
}
