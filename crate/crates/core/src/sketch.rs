//! Multi-hash sketches.
//!
//! A sketch under `h_1..h_t` is an `m x t` matrix whose column `j` is the
//! single-hash sub-sketch under `h_j`: bucket sums for [`count_sketch`],
//! bucket ORs for [`bool_sketch`]. Cells are stored column-major, so the
//! flattened input fed to networks maps cell `(l, j)` to `j * m + l`.

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::hash_family::HashFamily;
use crate::sparse::{Flavor, SparseVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SketchKind {
    /// Real-valued bucket sums.
    Count,
    /// 0/1 bucket ORs.
    Bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SketchMatrix {
    kind: SketchKind,
    cells: Vec<f64>,
    fam: HashFamily,
}

/// Flat position of cell `(row, col)` in an `m`-row sketch.
#[inline]
pub fn flat_index(m: usize, row: usize, col: usize) -> usize {
    col * m + row
}

/// Sum sketch `Sk`: cell `(l, j)` holds `sum_{i : h_j(i) = l} x_i`.
pub fn count_sketch(x: &SparseVector, fam: &HashFamily) -> Result<SketchMatrix> {
    check_dim(x, fam)?;
    let m = fam.m();
    let mut cells = vec![0.0; m * fam.t()];
    for j in 0..fam.t() {
        for (i, v) in x.iter() {
            cells[flat_index(m, fam.bucket(j, i), j)] += v;
        }
    }
    Ok(SketchMatrix { kind: SketchKind::Count, cells, fam: fam.clone() })
}

/// Boolean sketch `BSk`: cell `(l, j)` holds `OR_{i : h_j(i) = l} x_i`.
pub fn bool_sketch(x: &SparseVector, fam: &HashFamily) -> Result<SketchMatrix> {
    if x.flavor() != Flavor::Binary {
        return param("boolean sketch needs a binary vector");
    }
    check_dim(x, fam)?;
    let m = fam.m();
    let mut cells = vec![0.0; m * fam.t()];
    for j in 0..fam.t() {
        for &i in x.indices() {
            cells[flat_index(m, fam.bucket(j, i), j)] = 1.0;
        }
    }
    Ok(SketchMatrix { kind: SketchKind::Bool, cells, fam: fam.clone() })
}

/// Flat positions of the nonzero cells of `BSk(x)`, in increasing order.
///
/// Same information as [`bool_sketch`] without materialising `m * t` cells;
/// used when featurising large datasets.
pub fn bool_sketch_support(x: &SparseVector, fam: &HashFamily) -> Result<Vec<usize>> {
    if x.flavor() != Flavor::Binary {
        return param("boolean sketch needs a binary vector");
    }
    check_dim(x, fam)?;
    let m = fam.m();
    let mut cells: Vec<usize> = (0..fam.t())
        .flat_map(|j| x.indices().iter().map(move |&i| flat_index(m, fam.bucket(j, i), j)))
        .collect();
    cells.sort_unstable();
    cells.dedup();
    Ok(cells)
}

fn check_dim(x: &SparseVector, fam: &HashFamily) -> Result<()> {
    if x.dim() != fam.d() {
        return param(format!("vector dimension {} does not match hash domain {}", x.dim(), fam.d()));
    }
    Ok(())
}

impl SketchMatrix {
    pub fn kind(&self) -> SketchKind {
        self.kind
    }

    pub fn m(&self) -> usize {
        self.fam.m()
    }

    pub fn t(&self) -> usize {
        self.fam.t()
    }

    pub fn family(&self) -> &HashFamily {
        &self.fam
    }

    pub fn cell(&self, row: usize, col: usize) -> f64 {
        self.cells[flat_index(self.m(), row, col)]
    }

    /// Column `j`, i.e. the sub-sketch under `h_j`.
    pub fn column(&self, j: usize) -> &[f64] {
        let m = self.m();
        &self.cells[j * m..(j + 1) * m]
    }

    /// Cells in network input order (`(l, j) -> j * m + l`).
    pub fn flatten(&self) -> &[f64] {
        &self.cells
    }

    /// Cellwise sum of two sketches over the same family.
    pub fn add(&self, other: &SketchMatrix) -> Result<SketchMatrix> {
        if self.fam != other.fam || self.kind != SketchKind::Count || other.kind != SketchKind::Count {
            return param("only count sketches over the same family can be added");
        }
        let cells = self.cells.iter().zip(&other.cells).map(|(a, b)| a + b).collect();
        Ok(SketchMatrix { kind: SketchKind::Count, cells, fam: self.fam.clone() })
    }

    /// Render as `m` lines of `t` whitespace-separated cells.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for l in 0..self.m() {
            let row: Vec<String> = (0..self.t()).map(|j| format!("{}", self.cell(l, j))).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tables() -> HashFamily {
        HashFamily::from_tables(vec![vec![0, 0, 1, 1], vec![0, 1, 0, 1]], 2).unwrap()
    }

    #[test]
    fn count_sketch_hand_example() {
        let x = SparseVector::from_dense(&[2.0, 0.0, 1.0, 0.0]).unwrap();
        let y = count_sketch(&x, &tables()).unwrap();
        assert_eq!(y.column(0), &[2.0, 1.0]);
        assert_eq!(y.column(1), &[3.0, 0.0]);
        assert_eq!(y.cell(0, 1), 3.0);
        assert_eq!(y.cell(1, 1), 0.0);
    }

    #[test]
    fn zero_vector_gives_zero_sketch() {
        let x = SparseVector::zeros(4, Flavor::Binary);
        assert!(count_sketch(&x, &tables()).unwrap().flatten().iter().all(|&c| c == 0.0));
        assert!(bool_sketch(&x, &tables()).unwrap().flatten().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn singleton_lights_one_cell_per_column() {
        let fam = HashFamily::seeded(3, 5, 100, 7).unwrap();
        let x = SparseVector::binary(100, [42]).unwrap();
        let y = count_sketch(&x, &fam).unwrap();
        for j in 0..5 {
            let col = y.column(j);
            assert_eq!(col.iter().filter(|&&c| c != 0.0).count(), 1);
            assert_eq!(col[fam.bucket(j, 42)], 1.0);
        }
    }

    #[test]
    fn bool_sketch_hand_examples() {
        let x = SparseVector::binary(4, [0, 3]).unwrap();
        let y = bool_sketch(&x, &tables()).unwrap();
        assert_eq!(y.column(0), &[1.0, 1.0]);
        assert_eq!(y.column(1), &[1.0, 1.0]);

        let x = SparseVector::binary(4, [0]).unwrap();
        let y = bool_sketch(&x, &tables()).unwrap();
        assert_eq!(y.column(0), &[1.0, 0.0]);
        assert_eq!(y.column(1), &[1.0, 0.0]);
    }

    #[test]
    fn bool_sketch_rejects_non_binary() {
        let x = SparseVector::from_dense(&[2.0, 0.0, 1.0, 0.0]).unwrap();
        assert!(bool_sketch(&x, &tables()).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let x = SparseVector::binary(5, [0]).unwrap();
        assert!(count_sketch(&x, &tables()).is_err());
        assert!(bool_sketch(&x, &tables()).is_err());
    }

    fn small_vec(d: usize) -> impl Strategy<Value = SparseVector> {
        proptest::collection::vec(-3i32..4, d).prop_map(|v| {
            let dense: Vec<f64> = v.into_iter().map(f64::from).collect();
            SparseVector::from_dense(&dense).unwrap()
        })
    }

    proptest! {
        #[test]
        fn count_sketch_is_linear(x in small_vec(30), z in small_vec(30), seed in any::<u64>()) {
            let fam = HashFamily::seeded(seed, 3, 30, 5).unwrap();
            let sum: Vec<f64> = x.to_dense().iter().zip(z.to_dense()).map(|(a, b)| a + b).collect();
            let lhs = count_sketch(&SparseVector::from_dense(&sum).unwrap(), &fam).unwrap();
            let rhs = count_sketch(&x, &fam).unwrap().add(&count_sketch(&z, &fam).unwrap()).unwrap();
            prop_assert_eq!(lhs.flatten(), rhs.flatten());
        }

        #[test]
        fn column_sums_equal_total(x in small_vec(30), seed in any::<u64>()) {
            let fam = HashFamily::seeded(seed, 4, 30, 6).unwrap();
            let y = count_sketch(&x, &fam).unwrap();
            let total: f64 = x.values().iter().sum();
            for j in 0..4 {
                prop_assert_eq!(y.column(j).iter().sum::<f64>(), total);
            }
        }

        #[test]
        fn bool_is_clamped_count(support in proptest::collection::btree_set(0usize..40, 0..12), seed in any::<u64>()) {
            let fam = HashFamily::seeded(seed, 3, 40, 8).unwrap();
            let x = SparseVector::binary(40, support).unwrap();
            let counts = count_sketch(&x, &fam).unwrap();
            let bits = bool_sketch(&x, &fam).unwrap();
            let clamped: Vec<f64> = counts.flatten().iter().map(|&c| c.min(1.0)).collect();
            prop_assert_eq!(bits.flatten(), &clamped[..]);
            let support: Vec<usize> = (0..bits.flatten().len()).filter(|&p| bits.flatten()[p] == 1.0).collect();
            prop_assert_eq!(bool_sketch_support(&x, &fam).unwrap(), support);
        }
    }
}
