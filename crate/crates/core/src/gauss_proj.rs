//! Gaussian random projection baseline.
//!
//! `G` is `d' x d` with i.i.d. `N(0, 1/d')` entries, regenerated from a seed.
//! Coordinate `i` is estimated linearly from `y = Gx` by weighting the
//! per-row estimates `y_j / g_ji` with `g_ji^2`:
//!
//! ```text
//! x̂_i = sum_j g_ji y_j / sum_j g_ji^2
//! ```
//!
//! which is unbiased given column `i` and has conditional variance
//! `‖x - x_i e_i‖² / (d' * sum_j g_ji^2)`.

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::network::{HiddenUnit, Network};
use crate::rng::rng_from_seed;
use crate::sparse::SparseVector;

/// Steepness of the rounding gadget in [`build_gauss_net`].
pub const GADGET_STEEPNESS: f64 = 4.0;

/// What gets persisted: the matrix is regenerated from these.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectorSpec {
    pub seed: u64,
    pub d: usize,
    pub out_dim: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianProjector {
    spec: ProjectorSpec,
    /// Column-major: column `i` is `cols[i * out_dim .. (i + 1) * out_dim]`.
    cols: Vec<f64>,
}

impl GaussianProjector {
    pub fn new(seed: u64, d: usize, out_dim: usize) -> Result<Self> {
        if d == 0 || out_dim == 0 {
            return param("projector needs d >= 1 and d' >= 1");
        }
        let scale = 1.0 / (out_dim as f64).sqrt();
        let mut rng = rng_from_seed(seed);
        let cols = (0..d * out_dim).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect();
        Ok(Self { spec: ProjectorSpec { seed, d, out_dim }, cols })
    }

    pub fn from_spec(spec: &ProjectorSpec) -> Result<Self> {
        Self::new(spec.seed, spec.d, spec.out_dim)
    }

    /// Wrap an explicit column-major matrix (for tests and mocks).
    pub fn from_columns(d: usize, out_dim: usize, cols: Vec<f64>) -> Result<Self> {
        if d == 0 || out_dim == 0 || cols.len() != d * out_dim {
            return param("column data does not match d * d'");
        }
        Ok(Self { spec: ProjectorSpec { seed: 0, d, out_dim }, cols })
    }

    pub fn spec(&self) -> ProjectorSpec {
        self.spec
    }

    pub fn d(&self) -> usize {
        self.spec.d
    }

    pub fn out_dim(&self) -> usize {
        self.spec.out_dim
    }

    /// Column `i` of `G`.
    pub fn column(&self, i: usize) -> &[f64] {
        let n = self.spec.out_dim;
        &self.cols[i * n..(i + 1) * n]
    }

    /// `y = Gx`, summing only the columns in the support of `x`.
    pub fn project(&self, x: &SparseVector) -> Result<Vec<f64>> {
        if x.dim() != self.d() {
            return param(format!("vector dimension {} does not match projector d = {}", x.dim(), self.d()));
        }
        let mut y = vec![0.0; self.out_dim()];
        for (i, v) in x.iter() {
            for (yj, g) in y.iter_mut().zip(self.column(i)) {
                *yj += g * v;
            }
        }
        Ok(y)
    }

    /// Row vector `r` with `x̂_i = r · y`, i.e. `g_i / ‖g_i‖²`.
    pub fn estimator_row(&self, i: usize) -> Result<Vec<f64>> {
        if i >= self.d() {
            return param(format!("coordinate {i} out of range (d = {})", self.d()));
        }
        let col = self.column(i);
        let norm_sq: f64 = col.iter().map(|g| g * g).sum();
        if norm_sq == 0.0 {
            return Err(Error::Estimation(format!("column {i} of G is identically zero")));
        }
        Ok(col.iter().map(|g| g / norm_sq).collect())
    }

    /// Minimum-variance linear estimate of `x_i` from `y = Gx`.
    pub fn estimate_coord(&self, y: &[f64], i: usize) -> Result<f64> {
        if y.len() != self.out_dim() {
            return param(format!("projection length {} does not match d' = {}", y.len(), self.out_dim()));
        }
        let row = self.estimator_row(i)?;
        Ok(row.iter().zip(y).map(|(r, v)| r * v).sum())
    }
}

/// Network over `y = Gx` computing `w^T x` for binary `x` whenever every
/// estimate `x̂_i`, `i in S(w)`, is within 3/8 of the true bit.
///
/// Each coordinate gets a pair of ReLUs,
/// `u+ = ReLU(a (x̂_i - 1/2) + 1/2)` and `u- = ReLU(a (x̂_i - 1/2) - 1/2)`
/// with `a = 4`; `u+ - u-` clips `a (x̂_i - 1/2) + 1/2` to `[0, 1]`.
pub fn build_gauss_net(w: &SparseVector, proj: &GaussianProjector) -> Result<Network> {
    if w.dim() != proj.d() {
        return param(format!("weight dimension {} does not match projector d = {}", w.dim(), proj.d()));
    }
    let a = GADGET_STEEPNESS;
    let mut hidden = Vec::with_capacity(2 * w.nnz());
    let mut output = Vec::with_capacity(2 * w.nnz());
    for (i, wi) in w.iter() {
        let row: Vec<(usize, f64)> = proj
            .estimator_row(i)
            .map_err(|e| Error::Capability(format!("cannot build estimator unit: {e}")))?
            .into_iter()
            .map(|r| a * r)
            .enumerate()
            .collect();
        let base = -0.5 * a;
        hidden.push(HiddenUnit::relu(row.clone(), base + 0.5));
        hidden.push(HiddenUnit::relu(row, base - 0.5));
        output.push((hidden.len() - 2, wi));
        output.push((hidden.len() - 1, -wi));
    }
    Network::new(proj.out_dim(), hidden, output, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_basics() {
        let p = GaussianProjector::new(11, 20, 8).unwrap();
        let zero = SparseVector::zeros(20, crate::Flavor::Binary);
        assert!(p.project(&zero).unwrap().iter().all(|&v| v == 0.0));
        let e3 = SparseVector::binary(20, [3]).unwrap();
        assert_eq!(p.project(&e3).unwrap(), p.column(3));
        let e37 = SparseVector::binary(20, [3, 7]).unwrap();
        let sum: Vec<f64> = p.column(3).iter().zip(p.column(7)).map(|(a, b)| a + b).collect();
        assert_eq!(p.project(&e37).unwrap(), sum);
        assert!(p.project(&SparseVector::binary(21, [0]).unwrap()).is_err());
    }

    #[test]
    fn reproducible_from_spec() {
        let p = GaussianProjector::new(5, 10, 4).unwrap();
        let json = serde_json::to_string(&p.spec()).unwrap();
        let back = GaussianProjector::from_spec(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn pure_coordinate_is_exact() {
        let p = GaussianProjector::new(2, 30, 6).unwrap();
        let x = SparseVector::real(30, [(9, -2.5)]).unwrap();
        let y = p.project(&x).unwrap();
        assert!((p.estimate_coord(&y, 9).unwrap() + 2.5).abs() < 1e-12);
    }

    #[test]
    fn single_row_substitution() {
        let p = GaussianProjector::new(4, 5, 1).unwrap();
        let x = SparseVector::real(5, [(0, 1.0), (2, -0.5), (4, 2.0)]).unwrap();
        let y = p.project(&x).unwrap();
        let g = |i: usize| p.column(i)[0];
        let expect = x.get(2) + (g(0) / g(2)) * x.get(0) + (g(4) / g(2)) * x.get(4);
        assert!((p.estimate_coord(&y, 2).unwrap() - expect).abs() < 1e-9);
    }

    #[test]
    fn zero_column_is_an_error() {
        let p = GaussianProjector::from_columns(2, 2, vec![0.0, 0.0, 1.0, 2.0]).unwrap();
        assert!(matches!(p.estimate_coord(&[1.0, 1.0], 0), Err(Error::Estimation(_))));
        assert!(p.estimate_coord(&[1.0, 1.0], 1).is_ok());
        let w = SparseVector::binary(2, [0]).unwrap();
        assert!(matches!(build_gauss_net(&w, &p), Err(Error::Capability(_))));
    }

    #[test]
    fn gauss_net_on_basis_vector() {
        let p = GaussianProjector::new(8, 50, 20).unwrap();
        let x = SparseVector::binary(50, [17]).unwrap();
        let net = build_gauss_net(&x, &p).unwrap();
        assert!((net.eval(&p.project(&x).unwrap()).unwrap() - 1.0).abs() < 1e-12);
        let zero = SparseVector::zeros(50, crate::Flavor::Real);
        assert_eq!(build_gauss_net(&zero, &p).unwrap().eval(&vec![0.3; 20]).unwrap(), 0.0);
    }

    #[test]
    fn gauss_net_units_are_dense() {
        let p = GaussianProjector::new(8, 50, 20).unwrap();
        let w = SparseVector::real(50, [(1, 0.5), (30, -1.0)]).unwrap();
        let net = build_gauss_net(&w, &p).unwrap();
        assert_eq!(net.hidden.len(), 4);
        assert!(net.hidden.iter().all(|u| u.weights.len() == 20));
    }

    #[test]
    fn gadget_rounds_within_three_eighths() {
        // Mock G where column 0 is e_0 so x̂_0 = y_0 directly.
        let p = GaussianProjector::from_columns(1, 1, vec![1.0]).unwrap();
        let net = build_gauss_net(&SparseVector::binary(1, [0]).unwrap(), &p).unwrap();
        for (y, want) in [(0.0, 0.0), (0.37, 0.0), (0.63, 1.0), (1.0, 1.0), (1.3, 1.0), (-0.2, 0.0)] {
            assert!((net.eval(&[y]).unwrap() - want).abs() < 1e-12, "y = {y}");
        }
        assert!((net.eval(&[0.5]).unwrap() - 0.5).abs() < 1e-12);
    }
}
