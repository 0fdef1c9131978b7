use rayon::prelude::*;

use super::mesh::{GapMesh, NodeClass};
use crate::geometry::LameParams;

const GAUSS: [f64; 2] = [-0.577_350_269_189_625_8, 0.577_350_269_189_625_8];

/// Shape function derivatives in reference coordinates at `(s, t)`,
/// `[dN/ds, dN/dt]` for the four counterclockwise corners.
#[inline]
pub(crate) fn ref_grads(s: f64, t: f64) -> [[f64; 4]; 2] {
    [
        [-0.25 * (1.0 - t), 0.25 * (1.0 - t), 0.25 * (1.0 + t), -0.25 * (1.0 + t)],
        [-0.25 * (1.0 - s), -0.25 * (1.0 + s), 0.25 * (1.0 + s), 0.25 * (1.0 - s)],
    ]
}

/// Physical shape function gradients and Jacobian determinant.
#[inline]
pub(crate) fn phys_grads(xe: &[[f64; 2]; 4], s: f64, t: f64) -> ([[f64; 4]; 2], f64) {
    let dn = ref_grads(s, t);
    let mut j = [[0.0; 2]; 2];
    for a in 0..4 {
        for r in 0..2 {
            j[r][0] += dn[r][a] * xe[a][0];
            j[r][1] += dn[r][a] * xe[a][1];
        }
    }
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let inv = [[j[1][1] / det, -j[0][1] / det], [-j[1][0] / det, j[0][0] / det]];
    let mut out = [[0.0; 4]; 2];
    for a in 0..4 {
        out[0][a] = inv[0][0] * dn[0][a] + inv[0][1] * dn[1][a];
        out[1][a] = inv[1][0] * dn[0][a] + inv[1][1] * dn[1][a];
    }
    (out, det)
}

pub(crate) fn gauss_points() -> impl Iterator<Item = (f64, f64)> {
    GAUSS.iter().flat_map(|&s| GAUSS.iter().map(move |&t| (s, t)))
}

/// 8×8 plane-strain stiffness of a bilinear quadrilateral, 2×2 Gauss.
/// Dofs are ordered `(u₁, u₂)` per corner. Exactly symmetric.
pub fn element_stiffness(xe: &[[f64; 2]; 4], lame: &LameParams<f64>) -> [[f64; 8]; 8] {
    let (l, mu) = (lame.lambda, lame.mu);
    let lp = l + 2.0 * mu;
    let mut k = [[0.0; 8]; 8];
    for (s, t) in gauss_points() {
        let (g, det) = phys_grads(xe, s, t);
        for a in 0..4 {
            let (ax, ay) = (g[0][a], g[1][a]);
            for b in a..4 {
                let (bx, by) = (g[0][b], g[1][b]);
                let k11 = lp * ax * bx + mu * ay * by;
                let k12 = l * ax * by + mu * ay * bx;
                let k21 = l * ay * bx + mu * ax * by;
                let k22 = lp * ay * by + mu * ax * bx;
                k[2 * a][2 * b] += k11 * det;
                k[2 * a][2 * b + 1] += k12 * det;
                k[2 * a + 1][2 * b] += k21 * det;
                k[2 * a + 1][2 * b + 1] += k22 * det;
            }
        }
    }
    for r in 0..8 {
        for c in 0..r {
            k[r][c] = k[c][r];
        }
    }
    k
}

/// Compressed sparse rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl CsrMatrix {
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        y.par_iter_mut().enumerate().for_each(|(r, yr)| {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *yr = acc;
        });
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let row = &self.cols[self.row_ptr[r]..self.row_ptr[r + 1]];
        match row.binary_search(&c) {
            Ok(k) => self.vals[self.row_ptr[r] + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|r| self.get(r, r)).collect()
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }
}

/// Assembled stiffness: the full matrix over every dof and the reduced
/// block over free dofs. Dof `2·node + c` is component `c` of `node`.
#[derive(Debug, Clone)]
pub struct StiffnessSystem {
    pub full: CsrMatrix,
    pub reduced: CsrMatrix,
    /// Global dof of each reduced row.
    pub free_dofs: Vec<usize>,
    /// Reduced index of each global dof, `usize::MAX` when pinned.
    pub free_index: Vec<usize>,
    pub pinned_dofs: Vec<usize>,
    pub class: Vec<NodeClass>,
}

impl StiffnessSystem {
    pub fn n_free(&self) -> usize {
        self.free_dofs.len()
    }
}

/// Assembles over all cells. Each row sums its adjacent cells in a fixed
/// order, so the result is bitwise symmetric and independent of threading.
pub fn assemble(mesh: &GapMesh, lame: &LameParams<f64>) -> StiffnessSystem {
    let ncx = mesh.nx - 1;
    let ncy = mesh.ny - 1;
    let elems: Vec<[[f64; 8]; 8]> =
        (0..ncx * ncy).into_par_iter().map(|c| element_stiffness(&mesh.cell_corners(c / ncy, c % ncy), lame)).collect();

    let n_nodes = mesh.n_nodes();
    let rows: Vec<(Vec<usize>, Vec<f64>, Vec<usize>, Vec<f64>)> = (0..n_nodes)
        .into_par_iter()
        .map(|node| {
            let (ix, iy) = (node / mesh.ny, node % mesh.ny);
            let mut nbrs = Vec::with_capacity(9);
            for jx in ix.saturating_sub(1)..=(ix + 1).min(mesh.nx - 1) {
                for jy in iy.saturating_sub(1)..=(iy + 1).min(mesh.ny - 1) {
                    nbrs.push(mesh.idx(jx, jy));
                }
            }
            let mut rx = vec![0.0; 2 * nbrs.len()];
            let mut ry = vec![0.0; 2 * nbrs.len()];
            for cx in ix.saturating_sub(1)..=ix.min(ncx - 1) {
                for cy in iy.saturating_sub(1)..=iy.min(ncy - 1) {
                    let cn = mesh.cell_nodes(cx, cy);
                    let Some(a) = cn.iter().position(|&n| n == node) else { continue };
                    let ke = &elems[cx * ncy + cy];
                    for (b, &nb) in cn.iter().enumerate() {
                        let p = nbrs.binary_search(&nb).expect("stencil neighbour");
                        for c in 0..2 {
                            rx[2 * p + c] += ke[2 * a][2 * b + c];
                            ry[2 * p + c] += ke[2 * a + 1][2 * b + c];
                        }
                    }
                }
            }
            let cols: Vec<usize> = nbrs.iter().flat_map(|&n| [2 * n, 2 * n + 1]).collect();
            (cols.clone(), rx, cols, ry)
        })
        .collect();

    let ndof = 2 * n_nodes;
    let mut row_ptr = Vec::with_capacity(ndof + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    row_ptr.push(0);
    for (cx, vx, cy, vy) in rows {
        cols.extend(cx);
        vals.extend(vx);
        row_ptr.push(cols.len());
        cols.extend(cy);
        vals.extend(vy);
        row_ptr.push(cols.len());
    }
    let full = CsrMatrix { n: ndof, row_ptr, cols, vals };

    let mut free_index = vec![usize::MAX; ndof];
    let mut free_dofs = Vec::new();
    let mut pinned_dofs = Vec::new();
    for d in 0..ndof {
        if mesh.class[d / 2] == NodeClass::Free {
            free_index[d] = free_dofs.len();
            free_dofs.push(d);
        } else {
            pinned_dofs.push(d);
        }
    }
    let mut r_ptr = Vec::with_capacity(free_dofs.len() + 1);
    let mut r_cols = Vec::new();
    let mut r_vals = Vec::new();
    r_ptr.push(0);
    for &d in &free_dofs {
        for k in full.row_ptr[d]..full.row_ptr[d + 1] {
            let f = free_index[full.cols[k]];
            if f != usize::MAX {
                r_cols.push(f);
                r_vals.push(full.vals[k]);
            }
        }
        r_ptr.push(r_cols.len());
    }
    let reduced = CsrMatrix { n: free_dofs.len(), row_ptr: r_ptr, cols: r_cols, vals: r_vals };
    StiffnessSystem { full, reduced, free_dofs, free_index, pinned_dofs, class: mesh.class.clone() }
}
