//! Explicit network weights for sparse polynomials `g(x) = sum_j w_j prod_{i in A_j} x_i`.
//!
//! Every construction uses one hidden unit per term (two for the Gaussian
//! gadget, see [`crate::gauss_proj`]) and the term weight `w_j` as the output
//! weight. They differ only in what the unit reads:
//!
//! - [`build_bool_sketch_net`]: AND of the boolean sketch cells `T_A`.
//! - [`build_min_sketch_net`]: min over the `t` count-sketch cells of `i`.
//! - [`build_det_net`]: ReLU of a dense linear read of the deterministic sketch.
//! - [`build_raw_bool_net`]: AND of the raw input bits in `A`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::det_sketch::label;
use crate::error::{param, Error, Result};
use crate::hash_family::HashFamily;
use crate::network::{HiddenUnit, Network};
use crate::sketch::flat_index;
use crate::sparse::SparseVector;

/// One weighted monomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub weight: f64,
    /// Sorted, distinct, nonempty.
    pub set: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelRepr")]
pub struct SparsePolynomialModel {
    d: usize,
    terms: Vec<Term>,
}

#[derive(Deserialize)]
struct ModelRepr {
    d: usize,
    terms: Vec<Term>,
}

impl TryFrom<ModelRepr> for SparsePolynomialModel {
    type Error = Error;

    fn try_from(r: ModelRepr) -> Result<Self> {
        Self::new(r.d, r.terms.into_iter().map(|t| (t.weight, t.set)))
    }
}

impl SparsePolynomialModel {
    /// Sets are sorted and deduplicated; empty sets or indices `>= d` are errors.
    pub fn new(d: usize, terms: impl IntoIterator<Item = (f64, Vec<usize>)>) -> Result<Self> {
        let mut out = Vec::new();
        for (n, (weight, mut set)) in terms.into_iter().enumerate() {
            set.sort_unstable();
            set.dedup();
            if set.is_empty() {
                return param(format!("term {n} has an empty index set"));
            }
            if let Some(&i) = set.iter().find(|&&i| i >= d) {
                return param(format!("term {n} uses index {i} outside [0, {d})"));
            }
            if !weight.is_finite() {
                return param(format!("term {n} has non-finite weight"));
            }
            out.push(Term { weight, set });
        }
        Ok(Self { d, terms: out })
    }

    /// The linear function `w^T x` as a model with singleton terms.
    pub fn linear(w: &SparseVector) -> Self {
        Self {
            d: w.dim(),
            terms: w.iter().map(|(i, weight)| Term { weight, set: vec![i] }).collect(),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_linear(&self) -> bool {
        self.terms.iter().all(|t| t.set.len() == 1)
    }

    /// Largest term cardinality (0 for the empty model).
    pub fn degree(&self) -> usize {
        self.terms.iter().map(|t| t.set.len()).max().unwrap_or(0)
    }

    /// `∪_j A_j`, sorted.
    pub fn variables(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.terms.iter().flat_map(|t| t.set.iter().copied()).collect();
        set.into_iter().collect()
    }

    /// `g(x)` for a 0/1 vector.
    pub fn eval_binary(&self, x: &SparseVector) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.set.iter().all(|&i| x.get(i) != 0.0))
            .map(|t| t.weight)
            .sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }
}

fn check_family(model: &SparsePolynomialModel, fam: &HashFamily) -> Result<()> {
    if model.d() != fam.d() {
        return param(format!("model dimension {} does not match hash domain {}", model.d(), fam.d()));
    }
    Ok(())
}

/// Network over the flattened boolean sketch computing `g(x)` whenever every
/// variable decodes correctly.
///
/// Unit `j` has weight 1 on each cell of `T_{A_j} = {(h_r(i), r) : i in A_j, r < t}`
/// and bias `-(|T_{A_j}| - 1)`.
pub fn build_bool_sketch_net(model: &SparsePolynomialModel, fam: &HashFamily) -> Result<Network> {
    check_family(model, fam)?;
    let m = fam.m();
    let hidden = model
        .terms()
        .iter()
        .map(|term| {
            let cells: BTreeSet<usize> = term
                .set
                .iter()
                .flat_map(|&i| (0..fam.t()).map(move |r| flat_index(m, fam.bucket(r, i), r)))
                .collect();
            let bias = -(cells.len() as f64 - 1.0);
            HiddenUnit::relu(cells.into_iter().map(|c| (c, 1.0)).collect(), bias)
        })
        .collect();
    let output = model.terms().iter().enumerate().map(|(j, t)| (j, t.weight)).collect();
    Network::new(m * fam.t(), hidden, output, 0.0)
}

/// Min-gate network over the flattened count sketch computing
/// `sum_i w_i * DecMin(Y, i)`. Linear models only.
pub fn build_min_sketch_net(model: &SparsePolynomialModel, fam: &HashFamily) -> Result<Network> {
    check_family(model, fam)?;
    if !model.is_linear() {
        return Err(Error::Capability("min-gate construction only covers linear models".into()));
    }
    let m = fam.m();
    let hidden = model
        .terms()
        .iter()
        .map(|term| {
            let i = term.set[0];
            HiddenUnit::min((0..fam.t()).map(|r| (flat_index(m, fam.bucket(r, i), r), 1.0)).collect())
        })
        .collect();
    let output = model.terms().iter().enumerate().map(|(j, t)| (j, t.weight)).collect();
    Network::new(m * fam.t(), hidden, output, 0.0)
}

/// Exact first-layer weights for the deterministic-sketch network: entry `p`
/// is `(sum_{r in A} label(r)^p) / |A|` for `p = 0..=2k`.
pub fn det_read_weights(set: &[usize], k: usize) -> Vec<BigRational> {
    let n = BigInt::from(set.len());
    (0..=2 * k)
        .map(|p| {
            let sum: BigInt = set.iter().map(|&r| BigInt::from(label(r)).pow(p as u32)).sum();
            BigRational::new(sum, n.clone())
        })
        .collect()
}

/// Network over the `2k+1` float coefficients of a deterministic sketch.
pub fn build_det_net(model: &SparsePolynomialModel, k: usize) -> Result<Network> {
    let hidden = model
        .terms()
        .iter()
        .map(|term| {
            let weights = det_read_weights(&term.set, k)
                .into_iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(p, v)| (p, v.to_f64().unwrap_or(f64::NAN)))
                .collect();
            HiddenUnit::relu(weights, 0.0)
        })
        .collect();
    let output = model.terms().iter().enumerate().map(|(j, t)| (j, t.weight)).collect();
    Network::new(2 * k + 1, hidden, output, 0.0)
}

/// Network over the raw 0/1 input: unit `j` is `ReLU(sum_{i in A_j} x_i - |A_j| + 1)`.
pub fn build_raw_bool_net(model: &SparsePolynomialModel) -> Result<Network> {
    let hidden = model
        .terms()
        .iter()
        .map(|term| {
            let bias = -(term.set.len() as f64 - 1.0);
            HiddenUnit::relu(term.set.iter().map(|&i| (i, 1.0)).collect(), bias)
        })
        .collect();
    let output = model.terms().iter().enumerate().map(|(j, t)| (j, t.weight)).collect();
    Network::new(model.d(), hidden, output, 0.0)
}
