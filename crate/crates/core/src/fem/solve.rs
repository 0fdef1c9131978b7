use rayon::prelude::*;

use super::assemble::{CsrMatrix, StiffnessSystem};
use super::mesh::NodeClass;
use crate::auxfield::Load;
use crate::error::{Error, Result};

/// Nodal displacements `v = (v⁽¹⁾, v⁽²⁾)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementField {
    pub values: Vec<[f64; 2]>,
}

impl DisplacementField {
    pub fn zeros(n_nodes: usize) -> Self {
        Self { values: vec![[0.0; 2]; n_nodes] }
    }

    /// Flat dof vector `[v⁽¹⁾₀, v⁽²⁾₀, v⁽¹⁾₁, …]`.
    pub fn as_dofs(&self) -> Vec<f64> {
        self.values.iter().flat_map(|v| [v[0], v[1]]).collect()
    }

    pub fn from_dofs(d: &[f64]) -> Self {
        Self { values: d.chunks_exact(2).map(|c| [c[0], c[1]]).collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveInfo {
    pub iterations: usize,
    pub rel_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Preconditioner {
    /// Diagonal scaling.
    #[default]
    Jacobi,
    /// Exact solves on each vertical grid line (block tridiagonal with 2×2
    /// blocks), i.e. line-Jacobi across columns.
    Column,
}

/// Iteration cap `20·√n` for `n` unknowns.
pub fn iteration_cap(n: usize) -> usize {
    ((20.0 * (n as f64).sqrt()).ceil() as usize).max(50)
}

/// Solves for the free dofs given the pinned values in `data` (a full dof
/// vector; its free entries are ignored). Returns the full field.
pub fn solve_with_data(
    system: &StiffnessSystem,
    data: &[f64],
    tol: f64,
    precond: Preconditioner,
) -> Result<(DisplacementField, SolveInfo)> {
    if !(tol > 0.0 && tol <= 1e-6) {
        return Err(Error::domain(format!("solver tolerance must lie in (0, 1e-6], got {tol}")));
    }
    let mut lift = data.to_vec();
    for &d in &system.free_dofs {
        lift[d] = 0.0;
    }
    let mut klift = vec![0.0; lift.len()];
    system.full.matvec(&lift, &mut klift);
    let b: Vec<f64> = system.free_dofs.iter().map(|&d| -klift[d]).collect();
    let pc = build_preconditioner(system, precond);
    let (x, info) = pcg(&system.reduced, &b, &pc, tol)?;
    for (k, &d) in system.free_dofs.iter().enumerate() {
        lift[d] = x[k];
    }
    Ok((DisplacementField::from_dofs(&lift), info))
}

/// Pinned data `0` on `Γ₋` and `ψ_i` on `Γ₊`.
pub fn boundary_data(class: &[NodeClass], load: Load) -> Vec<f64> {
    let psi = load.psi::<f64>();
    class
        .iter()
        .flat_map(|c| match c {
            NodeClass::PinTop => psi,
            _ => [0.0, 0.0],
        })
        .collect()
}

/// Cell problem with load `ψ_i`.
pub fn solve_cell(
    system: &StiffnessSystem,
    load: Load,
    tol: f64,
    precond: Preconditioner,
) -> Result<(DisplacementField, SolveInfo)> {
    solve_with_data(system, &boundary_data(&system.class, load), tol, precond)
}

enum Pc {
    Diag(Vec<f64>),
    Lines(Vec<LineBlock>),
}

/// Factored block tridiagonal system for one grid line.
struct LineBlock {
    start: usize,
    /// Inverse Schur complements `S_k⁻¹`.
    sinv: Vec<[[f64; 2]; 2]>,
    /// Upper couplings `U_k = A[k, k+1]`.
    upper: Vec<[[f64; 2]; 2]>,
}

fn inv2(m: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]]
}

fn mul2(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

fn tr2(a: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

fn mv2(a: [[f64; 2]; 2], x: [f64; 2]) -> [f64; 2] {
    [a[0][0] * x[0] + a[0][1] * x[1], a[1][0] * x[0] + a[1][1] * x[1]]
}

fn build_preconditioner(system: &StiffnessSystem, kind: Preconditioner) -> Pc {
    let a = &system.reduced;
    match kind {
        Preconditioner::Jacobi => Pc::Diag(a.diagonal().iter().map(|d| 1.0 / d).collect()),
        Preconditioner::Column => {
            // free nodes of one column are consecutive in the reduced numbering
            let mut lines: Vec<(usize, usize)> = Vec::new();
            let nodes: Vec<usize> = system.free_dofs.iter().step_by(2).map(|d| d / 2).collect();
            let mut k = 0;
            while k < nodes.len() {
                let mut e = k + 1;
                while e < nodes.len() && nodes[e] == nodes[e - 1] + 1 {
                    e += 1;
                }
                lines.push((k, e - k));
                k = e;
            }
            let blocks = lines
                .par_iter()
                .map(|&(start, len)| {
                    let blk = |r: usize, c: usize| {
                        let (r, c) = (2 * (start + r), 2 * (start + c));
                        [[a.get(r, c), a.get(r, c + 1)], [a.get(r + 1, c), a.get(r + 1, c + 1)]]
                    };
                    let mut sinv = Vec::with_capacity(len);
                    let mut upper = Vec::with_capacity(len.saturating_sub(1));
                    for j in 0..len {
                        let mut s = blk(j, j);
                        if j > 0 {
                            let u = upper[j - 1];
                            let corr = mul2(tr2(u), mul2(sinv[j - 1], u));
                            for p in 0..2 {
                                for q in 0..2 {
                                    s[p][q] -= corr[p][q];
                                }
                            }
                        }
                        sinv.push(inv2(s));
                        if j + 1 < len {
                            upper.push(blk(j, j + 1));
                        }
                    }
                    LineBlock { start, sinv, upper }
                })
                .collect();
            Pc::Lines(blocks)
        }
    }
}

impl Pc {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        match self {
            Pc::Diag(d) => z.par_iter_mut().enumerate().for_each(|(k, zk)| *zk = d[k] * r[k]),
            Pc::Lines(lines) => {
                // lines partition the free dofs in order
                let mut chunks: Vec<&mut [f64]> = Vec::with_capacity(lines.len());
                let mut rest = z;
                for b in lines {
                    let (head, tail) = rest.split_at_mut(2 * b.sinv.len());
                    chunks.push(head);
                    rest = tail;
                }
                lines.par_iter().zip(chunks).for_each(|(b, zs)| {
                    let len = b.sinv.len();
                    let rs = &r[2 * b.start..2 * (b.start + len)];
                    let mut y: Vec<[f64; 2]> = Vec::with_capacity(len);
                    for j in 0..len {
                        let mut v = [rs[2 * j], rs[2 * j + 1]];
                        if j > 0 {
                            let t = mv2(tr2(b.upper[j - 1]), mv2(b.sinv[j - 1], y[j - 1]));
                            v[0] -= t[0];
                            v[1] -= t[1];
                        }
                        y.push(v);
                    }
                    let mut next = [0.0; 2];
                    for j in (0..len).rev() {
                        let mut v = y[j];
                        if j + 1 < len {
                            let t = mv2(b.upper[j], next);
                            v[0] -= t[0];
                            v[1] -= t[1];
                        }
                        next = mv2(b.sinv[j], v);
                        zs[2 * j] = next[0];
                        zs[2 * j + 1] = next[1];
                    }
                });
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn pcg(a: &CsrMatrix, b: &[f64], pc: &Pc, tol: f64) -> Result<(Vec<f64>, SolveInfo)> {
    let n = b.len();
    let mut x = vec![0.0; n];
    let bnorm = dot(b, b).sqrt();
    if bnorm == 0.0 {
        return Ok((x, SolveInfo { iterations: 0, rel_residual: 0.0 }));
    }
    let mut r = b.to_vec();
    let mut z = vec![0.0; n];
    pc.apply(&r, &mut z);
    let mut p = z.clone();
    let mut q = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let cap = iteration_cap(n);
    let mut rel = 1.0;
    for it in 1..=cap {
        a.matvec(&p, &mut q);
        let alpha = rz / dot(&p, &q);
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * q[k];
        }
        rel = dot(&r, &r).sqrt() / bnorm;
        if rel <= tol {
            return Ok((x, SolveInfo { iterations: it, rel_residual: rel }));
        }
        pc.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    Err(Error::NoConvergence { iterations: cap, residual: rel })
}
