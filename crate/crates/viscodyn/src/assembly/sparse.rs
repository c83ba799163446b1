//! Fixed CSC pattern of the Newton matrix with per-element scatter maps.

use faer::sparse::{SparseColMat, SymbolicSparseColMat};

use super::mesh::Mesh;
use crate::Error;

pub(crate) const NONE: usize = usize::MAX;

#[derive(Clone, Debug)]
pub struct SparsePattern {
    n: usize,
    symbolic: SymbolicSparseColMat<usize>,
    /// Per element, value positions of its local block in row-major order;
    /// `NONE` for the pressure–pressure block.
    scatter: Vec<Vec<usize>>,
    diagonal: Vec<usize>,
}

/// Global dofs of an element: `3a+i` for its kinematic functions, then pressures.
pub(crate) fn element_dofs(kin: &[usize], pres: &[usize], offset: usize) -> Vec<usize> {
    let mut d = Vec::with_capacity(3 * kin.len() + pres.len());
    for &a in kin {
        d.extend([3 * a, 3 * a + 1, 3 * a + 2]);
    }
    d.extend(pres.iter().map(|b| offset + b));
    d
}

impl SparsePattern {
    pub fn new(mesh: &Mesh) -> Result<Self, Error> {
        let n = mesh.num_dofs();
        let offset = 3 * mesh.n_kin;
        let mut cols: Vec<Vec<usize>> = (0..n).map(|c| vec![c]).collect();
        let dofs: Vec<Vec<usize>> = mesh.elements.iter().map(|e| element_dofs(&e.kin, &e.pres, offset)).collect();
        for d in &dofs {
            for &c in d {
                for &r in d {
                    if r >= offset && c >= offset {
                        continue;
                    }
                    cols[c].push(r);
                }
            }
        }
        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut row_idx = Vec::new();
        col_ptr.push(0);
        for c in cols.iter_mut() {
            c.sort_unstable();
            c.dedup();
            row_idx.extend_from_slice(c);
            col_ptr.push(row_idx.len());
        }
        let find = |r: usize, c: usize| -> usize {
            let s = &row_idx[col_ptr[c]..col_ptr[c + 1]];
            col_ptr[c] + s.binary_search(&r).expect("entry in pattern")
        };
        let scatter = dofs
            .iter()
            .map(|d| {
                let mut pos = Vec::with_capacity(d.len() * d.len());
                for &r in d {
                    for &c in d {
                        pos.push(if r >= offset && c >= offset { NONE } else { find(r, c) });
                    }
                }
                pos
            })
            .collect();
        let diagonal = (0..n).map(|i| find(i, i)).collect();
        let symbolic = SymbolicSparseColMat::new_checked(n, n, col_ptr, None, row_idx);
        Ok(Self { n, symbolic, scatter, diagonal })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.symbolic.compute_nnz()
    }

    pub fn symbolic(&self) -> &SymbolicSparseColMat<usize> {
        &self.symbolic
    }

    pub(crate) fn scatter(&self, e: usize) -> &[usize] {
        &self.scatter[e]
    }

    pub(crate) fn diagonal(&self, i: usize) -> usize {
        self.diagonal[i]
    }

    /// Row indices of column `c`.
    pub fn column_rows(&self, c: usize) -> &[usize] {
        self.symbolic.row_idx_of_col_raw(c)
    }

    pub fn matrix(&self, values: Vec<f64>) -> SparseColMat<usize, f64> {
        SparseColMat::new(self.symbolic.clone(), values)
    }
}
