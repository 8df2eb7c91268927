//! Per-coordinate decoders and linear functionals read off a sketch.
//!
//! `dec(Y, j, i)` is the cell `h_j(i)` of column `j`. The multi-hash decoders
//! combine those `t` reads:
//!
//! | decoder   | combine | guarantee                                              |
//! |-----------|---------|--------------------------------------------------------|
//! | `dec_min` | min     | exact w.p. `1 - e^-t` on binary `x`, one-sided on `x >= 0` |
//! | `dec_and` | AND     | exact w.p. `1 - e^-t` on binary `x` (boolean sketches) |
//! | `dec_med` | median  | within `±εc` w.p. `1 - e^-t` on general real `x`       |

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::sketch::{SketchKind, SketchMatrix};
use crate::sparse::SparseVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecodeMode {
    Min,
    /// Boolean sketches only.
    And,
    Median,
}

impl std::str::FromStr for DecodeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" => Ok(Self::Min),
            "and" => Ok(Self::And),
            "median" | "med" => Ok(Self::Median),
            other => param(format!("unknown decode mode {other:?}")),
        }
    }
}

impl std::fmt::Display for DecodeMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Min => "min",
            Self::And => "and",
            Self::Median => "median",
        })
    }
}

/// Rows needed for binary inputs with at most `k` ones: `ceil(e * k)`.
pub fn rows_for_binary(k: usize) -> usize {
    (std::f64::consts::E * k as f64).ceil() as usize
}

/// Rows for `ℜ⁺_{d,k,c}` inputs at accuracy `eps`: `ceil(e * (k + 1/eps))`.
pub fn rows_for_nonneg(k: usize, eps: f64) -> usize {
    (std::f64::consts::E * (k as f64 + 1.0 / eps)).ceil() as usize
}

/// Rows for `ℜ_{d,k,c}` inputs at accuracy `eps`: `ceil(4e² * (k + 2/eps))`.
pub fn rows_for_real(k: usize, eps: f64) -> usize {
    let e2 = std::f64::consts::E * std::f64::consts::E;
    (4.0 * e2 * (k as f64 + 2.0 / eps)).ceil() as usize
}

/// Hash count for `s` coordinates at total failure probability `delta`:
/// `ceil(ln(s / delta))`, at least 1.
pub fn hashes_for(s: usize, delta: f64) -> usize {
    ((s as f64 / delta).ln().ceil() as usize).max(1)
}

/// Single-column decode: the cell `(h_j(i), j)`.
pub fn dec(y: &SketchMatrix, j: usize, i: usize) -> Result<f64> {
    let row = y.family().eval(j, i)?;
    Ok(y.cell(row, j))
}

fn reads(y: &SketchMatrix, i: usize) -> Result<Vec<f64>> {
    if i >= y.family().d() {
        return param(format!("coordinate {i} out of range (d = {})", y.family().d()));
    }
    let fam = y.family();
    Ok((0..y.t()).map(|j| y.cell(fam.bucket(j, i), j)).collect())
}

pub fn dec_min(y: &SketchMatrix, i: usize) -> Result<f64> {
    Ok(reads(y, i)?.into_iter().fold(f64::INFINITY, f64::min))
}

pub fn dec_and(y: &SketchMatrix, i: usize) -> Result<u8> {
    if y.kind() != SketchKind::Bool {
        return Err(Error::Mode("AND decoding needs a boolean sketch".into()));
    }
    Ok(u8::from(reads(y, i)?.into_iter().all(|c| c != 0.0)))
}

/// Median of the `t` reads; for even `t` the mean of the two middle values.
pub fn dec_med(y: &SketchMatrix, i: usize) -> Result<f64> {
    let mut r = reads(y, i)?;
    Ok(median(&mut r))
}

pub(crate) fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

pub fn decode(y: &SketchMatrix, i: usize, mode: DecodeMode) -> Result<f64> {
    match mode {
        DecodeMode::Min => dec_min(y, i),
        DecodeMode::And => dec_and(y, i).map(f64::from),
        DecodeMode::Median => dec_med(y, i),
    }
}

/// `sum_{i in S(w)} w_i * decode(Y, i)`, touching only the support of `w`.
pub fn eval_linear_from_sketch(w: &SparseVector, y: &SketchMatrix, mode: DecodeMode) -> Result<f64> {
    if w.dim() != y.family().d() {
        return param(format!("weight dimension {} does not match sketch domain {}", w.dim(), y.family().d()));
    }
    if mode == DecodeMode::And && y.kind() != SketchKind::Bool {
        return Err(Error::Mode("AND decoding needs a boolean sketch".into()));
    }
    w.iter().try_fold(0.0, |acc, (i, wi)| Ok(acc + wi * decode(y, i, mode)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hash_family::HashFamily;
    use crate::sketch::{bool_sketch, count_sketch};

    fn tables() -> HashFamily {
        HashFamily::from_tables(vec![vec![0, 0, 1, 1], vec![0, 1, 0, 1]], 2).unwrap()
    }

    #[test]
    fn dec_reads_one_cell() {
        let x = SparseVector::from_dense(&[2.0, 0.0, 1.0, 0.0]).unwrap();
        let y = count_sketch(&x, &tables()).unwrap();
        assert_eq!(dec(&y, 0, 0).unwrap(), 2.0);
        assert!(dec(&y, 2, 0).is_err());
        assert!(dec(&y, 0, 4).is_err());

        let zero = count_sketch(&SparseVector::zeros(4, crate::Flavor::Real), &tables()).unwrap();
        assert_eq!(dec(&zero, 1, 3).unwrap(), 0.0);

        let b = bool_sketch(&SparseVector::binary(4, [0]).unwrap(), &tables()).unwrap();
        assert_eq!(dec(&b, 1, 1).unwrap(), 0.0);
    }

    #[test]
    fn dec_and_recovers_singleton() {
        let y = bool_sketch(&SparseVector::binary(4, [0]).unwrap(), &tables()).unwrap();
        let got: Vec<u8> = (0..4).map(|i| dec_and(&y, i).unwrap()).collect();
        assert_eq!(got, vec![1, 0, 0, 0]);
    }

    #[test]
    fn dec_and_collision_failure() {
        let y = bool_sketch(&SparseVector::binary(4, [0, 3]).unwrap(), &tables()).unwrap();
        assert_eq!(dec_and(&y, 1).unwrap(), 1);
    }

    #[test]
    fn dec_and_rejects_count_sketch() {
        let y = count_sketch(&SparseVector::binary(4, [0]).unwrap(), &tables()).unwrap();
        assert!(matches!(dec_and(&y, 0), Err(Error::Mode(_))));
        let w = SparseVector::binary(4, [0]).unwrap();
        assert!(matches!(eval_linear_from_sketch(&w, &y, DecodeMode::And), Err(Error::Mode(_))));
    }

    #[test]
    fn dec_min_hand_example() {
        let x = SparseVector::from_dense(&[2.0, 0.0, 1.0, 0.0]).unwrap();
        let y = count_sketch(&x, &tables()).unwrap();
        assert_eq!(dec_min(&y, 0).unwrap(), 2.0);
    }

    #[test]
    fn median_definition() {
        assert_eq!(median(&mut [1.0, 5.0, 1.2]), 1.2);
        assert_eq!(median(&mut [4.0, 1.0, 3.0, 2.0]), 2.5);
        // Through the sketch: three columns reading 1.0, 5.0 and 1.2.
        let fam = HashFamily::from_tables(vec![vec![0, 1], vec![1, 0], vec![0, 1]], 2).unwrap();
        let x = SparseVector::real(2, [(0, 1.0), (1, 4.0)]).unwrap();
        let y = count_sketch(&x, &fam).unwrap();
        assert_eq!(dec_med(&y, 0).unwrap(), 1.0);
        let x = SparseVector::real(2, [(0, 1.2), (1, 3.8)]).unwrap();
        let fam = HashFamily::from_tables(vec![vec![0, 0], vec![0, 1], vec![0, 0]], 2).unwrap();
        // Reads for i = 0: 5.0, 1.2, 5.0 -> median 5.0.
        let y = count_sketch(&x, &fam).unwrap();
        assert!((dec_med(&y, 0).unwrap() - 5.0).abs() < 1e-9);
    }

    #[test]
    fn linear_functional_examples() {
        let w = SparseVector::from_dense(&[0.5, 0.0, -2.0, 0.0]).unwrap();
        let y = bool_sketch(&SparseVector::binary(4, [0]).unwrap(), &tables()).unwrap();
        assert_eq!(eval_linear_from_sketch(&w, &y, DecodeMode::And).unwrap(), 0.5);

        let zero = SparseVector::zeros(4, crate::Flavor::Real);
        assert_eq!(eval_linear_from_sketch(&zero, &y, DecodeMode::And).unwrap(), 0.0);

        let w = SparseVector::binary(4, [0, 1]).unwrap();
        let y = bool_sketch(&SparseVector::binary(4, [0, 3]).unwrap(), &tables()).unwrap();
        assert_eq!(eval_linear_from_sketch(&w, &y, DecodeMode::And).unwrap(), 2.0);
    }

    #[test]
    fn parameter_formulas() {
        assert_eq!(rows_for_binary(20), 55);
        assert_eq!(rows_for_binary(50), 136);
        assert_eq!(hashes_for(30, 0.05), 7);
        assert_eq!(rows_for_nonneg(20, 0.1), 82);
        assert_eq!(rows_for_real(20, 0.1), 1183);
        assert_eq!(hashes_for(1, 1.0), 1);
    }

    #[test]
    fn nonneg_min_is_one_sided() {
        for seed in 0..50 {
            let fam = HashFamily::seeded(seed, 3, 60, 7).unwrap();
            let x = SparseVector::nonneg(60, (0..60).step_by(3).map(|i| (i, 0.5 + i as f64))).unwrap();
            let y = count_sketch(&x, &fam).unwrap();
            for i in 0..60 {
                assert!(dec_min(&y, i).unwrap() >= x.get(i));
            }
        }
    }
}
