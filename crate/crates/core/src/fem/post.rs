use super::assemble::{gauss_points, phys_grads, StiffnessSystem};
use super::mesh::{GapMesh, NodeClass};
use super::solve::DisplacementField;
use crate::auxfield::{eval_aux, Load};
use crate::error::{Error, Result};
use crate::geometry::{gap_profile, CellSpec, GapMode, LameParams};
use crate::real::Real;

/// `∫ (C e(v), e(v))` over all cells with 2×2 Gauss quadrature.
pub fn energy(mesh: &GapMesh, lame: &LameParams<f64>, field: &DisplacementField) -> f64 {
    let (l, mu) = (lame.lambda, lame.mu);
    let mut total = 0.0;
    for (cx, cy) in mesh.cells() {
        let xe = mesh.cell_corners(cx, cy);
        let ue = mesh.cell_nodes(cx, cy).map(|n| field.values[n]);
        for (s, t) in gauss_points() {
            let (g, det) = phys_grads(&xe, s, t);
            let grad = nodal_gradient(&g, &ue);
            let div = grad[0][0] + grad[1][1];
            let shear = grad[0][1] + grad[1][0];
            let dens =
                l * div * div + 2.0 * mu * (grad[0][0] * grad[0][0] + grad[1][1] * grad[1][1]) + mu * shear * shear;
            total += dens * det;
        }
    }
    total
}

/// Boundary work `Σ_pinned (K v)_d v_d`; equals the energy `vᵀKv` for a
/// discrete solution because `(K v)_d = 0` on free dofs.
pub fn pinned_work(system: &StiffnessSystem, field: &DisplacementField) -> f64 {
    let v = field.as_dofs();
    let mut kv = vec![0.0; v.len()];
    system.full.matvec(&v, &mut kv);
    system.pinned_dofs.iter().map(|&d| kv[d] * v[d]).sum()
}

/// `(μ*, E*) = ((L₂/L₁)ℰ₁, E/(λ+2μ)·(L₂/L₁)ℰ₂)`.
pub fn effective_moduli<T: Real>(e1: T, e2: T, cell: &CellSpec<T>, lame: &LameParams<T>) -> (T, T) {
    let r = cell.aspect();
    (r * e1, lame.young() / lame.p_modulus() * r * e2)
}

#[inline]
fn nodal_gradient(g: &[[f64; 4]; 2], ue: &[[f64; 2]; 4]) -> [[f64; 2]; 2] {
    let mut grad = [[0.0; 2]; 2];
    for a in 0..4 {
        for k in 0..2 {
            grad[k][0] += ue[a][k] * g[0][a];
            grad[k][1] += ue[a][k] * g[1][a];
        }
    }
    grad
}

fn cutoff(ax: f64, r: f64) -> f64 {
    let t = (ax - 0.375 * r) / (0.125 * r);
    if t <= 0.0 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        1.0 - t * t * (3.0 - 2.0 * t)
    }
}

/// Nodal values of an admissible extension of the auxiliary field `u_i`:
/// the gap formula (with its chart stretched onto the exact column) for
/// `|x₁| ≤ 3r/8`, blended by a cubic ramp into the linear background
/// `η ψ_i`, which alone is used for `|x₁| ≥ r/2`. Pinned values are exact.
pub fn aux_interpolant(
    mesh: &GapMesh,
    cell: &CellSpec<f64>,
    lame: &LameParams<f64>,
    load: Load,
) -> Result<DisplacementField> {
    let gap = gap_profile(cell, GapMode::Simplified).ok();
    let r = cell.shape.halfwidth();
    let psi = load.psi::<f64>();
    let mut out = DisplacementField::zeros(mesh.n_nodes());
    for ix in 0..mesh.nx {
        let lo = mesh.coords[mesh.idx(ix, 0)][1];
        let hi = mesh.coords[mesh.idx(ix, mesh.ny - 1)][1];
        for iy in 0..mesh.ny {
            let n = mesh.idx(ix, iy);
            let [x, x2] = mesh.coords[n];
            let val = match mesh.class[n] {
                NodeClass::PinBottom => [0.0, 0.0],
                NodeClass::PinTop => psi,
                NodeClass::Free => {
                    let eta = (x2 - lo) / (hi - lo);
                    let bg = [eta * psi[0], eta * psi[1]];
                    let chi = if gap.is_some() { cutoff(x.abs(), r) } else { 0.0 };
                    match (&gap, chi > 0.0) {
                        (Some(g), true) => {
                            let y = (eta - 0.5) * g.delta(x)?;
                            let u = eval_aux(load, (x, y), lame, g)?.value;
                            [chi * u[0] + (1.0 - chi) * bg[0], chi * u[1] + (1.0 - chi) * bg[1]]
                        }
                        _ => bg,
                    }
                }
            };
            out.values[n] = val;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientStats {
    pub sup_grad_v: f64,
    pub sup_grad_w: f64,
    pub samples: usize,
}

/// Largest cell-centre gradient of `v` and of `w = v − u` over cells whose
/// centre lies in `|x₁| ≤ r/4`, where every column is the gap.
pub fn gap_gradient_stats(mesh: &GapMesh, field: &DisplacementField, aux: &DisplacementField) -> Result<GradientStats> {
    let r = mesh.shape.halfwidth();
    let mut sv: f64 = 0.0;
    let mut sw: f64 = 0.0;
    let mut samples = 0;
    for (cx, cy) in mesh.cells() {
        let xe = mesh.cell_corners(cx, cy);
        let xc = 0.25 * (xe[0][0] + xe[1][0] + xe[2][0] + xe[3][0]);
        if xc.abs() > 0.25 * r {
            continue;
        }
        let nodes = mesh.cell_nodes(cx, cy);
        let ve = nodes.map(|n| field.values[n]);
        let we = nodes.map(|n| [field.values[n][0] - aux.values[n][0], field.values[n][1] - aux.values[n][1]]);
        let (g, _) = phys_grads(&xe, 0.0, 0.0);
        sv = sv.max(frob(&nodal_gradient(&g, &ve)));
        sw = sw.max(frob(&nodal_gradient(&g, &we)));
        samples += 1;
    }
    if samples == 0 {
        return Err(Error::EmptySample("no cells inside |x1| <= r/4"));
    }
    Ok(GradientStats { sup_grad_v: sv, sup_grad_w: sw, samples })
}

fn frob(g: &[[f64; 2]; 2]) -> f64 {
    (g[0][0] * g[0][0] + g[0][1] * g[0][1] + g[1][0] * g[1][0] + g[1][1] * g[1][1]).sqrt()
}
