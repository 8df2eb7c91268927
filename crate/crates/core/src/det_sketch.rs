//! Deterministic `(2k+1)`-dimensional sketch of binary vectors.
//!
//! For `x` with support `S(x)` of size at most `k` the sketch stores the
//! integer coefficients of
//!
//! ```text
//! p_x(z) = 1 - (k + 1) * prod_{i in S(x)} (z - label(i))^2
//! ```
//!
//! where `label(i) = i + 1` turns the 0-based coordinate into a root in
//! `{1, ..., d}`. `p_x` is 1 at every label in the support and at most `-k`
//! at every other label, so averaging `p_x` over the labels of a set `A` and
//! applying ReLU returns the monomial `prod_{j in A} x_j` exactly.
//!
//! Coefficients grow like `(k+1) * d^(2k)`, so everything here is exact
//! (big integers and rationals).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::sparse::{Flavor, SparseVector};

/// Polynomial label of 0-based coordinate `i`.
#[inline]
pub fn label(i: usize) -> u64 {
    i as u64 + 1
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetSketch {
    k: usize,
    d: usize,
    coeffs: Vec<BigInt>,
}

/// Sketch `x` with sparsity budget `k`.
pub fn det_sketch(x: &SparseVector, k: usize) -> Result<DetSketch> {
    if x.flavor() != Flavor::Binary {
        return param("deterministic sketch needs a binary vector");
    }
    if x.nnz() > k {
        return Err(Error::Sparsity { support: x.nnz(), k });
    }
    // prod (z - r)^2 with coefficients in increasing degree.
    let mut poly = vec![BigInt::one()];
    for &i in x.indices() {
        let r = BigInt::from(label(i));
        let factor = [&r * &r, BigInt::from(-2) * &r, BigInt::one()];
        let mut next = vec![BigInt::zero(); poly.len() + 2];
        for (a, pa) in poly.iter().enumerate() {
            for (b, fb) in factor.iter().enumerate() {
                next[a + b] += pa * fb;
            }
        }
        poly = next;
    }
    let scale = -BigInt::from(k as u64 + 1);
    let mut coeffs: Vec<BigInt> = poly.into_iter().map(|c| c * &scale).collect();
    coeffs[0] += 1;
    coeffs.resize(2 * k + 1, BigInt::zero());
    Ok(DetSketch { k, d: x.dim(), coeffs })
}

impl DetSketch {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `(a_0, ..., a_2k)`, lowest degree first.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Exact value of `p_x` at an arbitrary integer point.
    pub fn eval_at(&self, z: u64) -> BigInt {
        let z = BigInt::from(z);
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * &z + c)
    }

    /// `p_x(label(i))` for coordinate `i`.
    pub fn eval_coord(&self, i: usize) -> BigInt {
        self.eval_at(label(i))
    }

    /// Float export for feeding a network.
    ///
    /// Coefficients beyond 2^53 lose precision, so the exact decoding
    /// guarantee does not carry over to anything computed from this vector.
    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&DetSketchRepr::from(self))?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let repr: DetSketchRepr = serde_json::from_str(json)?;
        repr.try_into()
    }
}

fn check_set(sk: &DetSketch, set: &[usize]) -> Result<()> {
    if set.is_empty() {
        return param("index set must be nonempty");
    }
    if let Some(&i) = set.iter().find(|&&i| i >= sk.d) {
        return param(format!("index {i} out of range (d = {})", sk.d));
    }
    Ok(())
}

/// Average of `p_x` over the labels of `set` (0-based coordinates), exactly.
pub fn dec_poly(sk: &DetSketch, set: &[usize]) -> Result<BigRational> {
    check_set(sk, set)?;
    let sum: BigInt = set.iter().map(|&i| sk.eval_coord(i)).sum();
    Ok(BigRational::new(sum, BigInt::from(set.len())))
}

/// `ReLU(dec_poly)`, which is exactly `prod_{j in set} x_j` for valid input.
pub fn det_decode_monomial(sk: &DetSketch, set: &[usize]) -> Result<u8> {
    let v = dec_poly(sk, set)?;
    Ok(u8::from(v.is_positive()))
}

/// JSON form: coefficients as decimal strings so no precision is lost.
#[derive(Debug, Serialize, Deserialize)]
struct DetSketchRepr {
    k: usize,
    d: usize,
    coeffs: Vec<String>,
}

impl From<&DetSketch> for DetSketchRepr {
    fn from(sk: &DetSketch) -> Self {
        Self { k: sk.k, d: sk.d, coeffs: sk.coeffs.iter().map(|c| c.to_string()).collect() }
    }
}

impl TryFrom<DetSketchRepr> for DetSketch {
    type Error = Error;

    fn try_from(repr: DetSketchRepr) -> Result<Self> {
        if repr.coeffs.len() != 2 * repr.k + 1 {
            return param(format!("expected {} coefficients, found {}", 2 * repr.k + 1, repr.coeffs.len()));
        }
        let coeffs = repr
            .coeffs
            .iter()
            .map(|s| s.parse::<BigInt>().map_err(|e| Error::Parameter(format!("bad coefficient {s:?}: {e}"))))
            .collect::<Result<_>>()?;
        Ok(DetSketch { k: repr.k, d: repr.d, coeffs })
    }
}
