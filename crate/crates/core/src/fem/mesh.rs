use crate::error::{Error, Result};
use crate::geometry::{boundary_height, curvature_at_gap, CellSpec, InclusionShape};
use crate::specfun::find_root;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeClass {
    Free,
    /// On `Γ₋`: the boundary of `D₂` or the bottom edge `x₂ = 0`.
    PinBottom,
    /// On `Γ₊`: the boundary of `D₁` or the top edge `x₂ = 2L₂`.
    PinTop,
}

/// Structured quadrilateral grid of `nx × ny` nodes, stored column by
/// column (`index = ix·ny + iy`).
#[derive(Debug, Clone, PartialEq)]
pub struct GapMesh {
    pub nx: usize,
    pub ny: usize,
    pub coords: Vec<[f64; 2]>,
    pub class: Vec<NodeClass>,
    pub l1: f64,
    pub l2: f64,
    pub eps: f64,
    pub shape: InclusionShape<f64>,
}

impl GapMesh {
    #[inline]
    pub fn idx(&self, ix: usize, iy: usize) -> usize {
        ix * self.ny + iy
    }

    pub fn n_nodes(&self) -> usize {
        self.nx * self.ny
    }

    pub fn n_cells(&self) -> usize {
        (self.nx - 1) * (self.ny - 1)
    }

    /// Counterclockwise corner nodes of cell `(cx, cy)`.
    #[inline]
    pub fn cell_nodes(&self, cx: usize, cy: usize) -> [usize; 4] {
        [self.idx(cx, cy), self.idx(cx + 1, cy), self.idx(cx + 1, cy + 1), self.idx(cx, cy + 1)]
    }

    pub fn cell_corners(&self, cx: usize, cy: usize) -> [[f64; 2]; 4] {
        self.cell_nodes(cx, cy).map(|n| self.coords[n])
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let ny = self.ny - 1;
        (0..self.nx - 1).flat_map(move |cx| (0..ny).map(move |cy| (cx, cy)))
    }

    pub fn count(&self, c: NodeClass) -> usize {
        self.class.iter().filter(|&&k| k == c).count()
    }

    /// Smallest vertical edge length among columns with `|x₁| ≤ width`.
    pub fn min_edge_height(&self, width: f64) -> f64 {
        let mut best = f64::INFINITY;
        for ix in 0..self.nx {
            if self.coords[self.idx(ix, 0)][0].abs() > width {
                continue;
            }
            for iy in 0..self.ny - 1 {
                let h = self.coords[self.idx(ix, iy + 1)][1] - self.coords[self.idx(ix, iy)][1];
                best = best.min(h);
            }
        }
        best
    }
}

/// Width of the gap core, `(ε/κ₀)^{1/m}`.
pub(crate) fn core_width(cell: &CellSpec<f64>) -> f64 {
    match (curvature_at_gap(&cell.shape), cell.shape.exponent()) {
        (Ok(k), Ok(m)) => (cell.eps / k).powf(1.0 / m),
        _ => (cell.eps * cell.shape.halfwidth()).sqrt(),
    }
}

/// Nonnegative half of the `x₁` grid: a node at the inclusion half-width
/// `a`, points clustered toward 0 with density `(w + x)^{−θ}` and toward `a`
/// with an inverse square-root term.
fn half_grid(a: f64, l1: f64, w: f64, n_half: usize, grading: f64) -> Result<Vec<f64>> {
    if grading == 1.0 {
        // plain uniform grid, with the node at `a` moved onto the boundary
        let h = l1 / n_half as f64;
        let mut xs: Vec<f64> = (0..=n_half).map(|k| k as f64 * h).collect();
        let k = (0..=n_half).min_by(|&i, &j| (xs[i] - a).abs().total_cmp(&(xs[j] - a).abs())).unwrap_or(0);
        if k > 0 && k < n_half {
            xs[k] = a;
        }
        return Ok(xs);
    }
    let theta = 1.0 - 1.0 / grading;
    let beta = 0.3;
    let s = 1.0 - theta;
    let z = ((w + a).powf(s) - w.powf(s)) / s;
    let core = |x: f64| ((w + x).powf(s) - w.powf(s)) / (s * z);
    let edge = |x: f64| {
        if x <= a {
            beta * (1.0 - ((a - x) / a).sqrt())
        } else {
            beta * (1.0 + ((x - a) / a).sqrt())
        }
    };
    let cum = |x: f64| core(x) + edge(x);
    let ca = cum(a);
    let tot = cum(l1);
    let n_out = (((n_half as f64) * (tot - ca) / tot).round() as usize).max(1);
    if n_out >= n_half {
        return Err(Error::Resolution("n1 too small to place a node at the inclusion edge".into()));
    }
    let n_in = n_half - n_out;
    let mut xs = Vec::with_capacity(n_half + 1);
    xs.push(0.0);
    for k in 1..n_in {
        let target = ca * k as f64 / n_in as f64;
        let x = find_root(|x| cum(x) - target, 0.0, a, 1e-15 * a)?;
        xs.push(x);
    }
    xs.push(a);
    for k in 1..=n_out {
        xs.push(a + (l1 - a) * k as f64 / n_out as f64);
    }
    Ok(xs)
}

/// Builds the fitted grid: `n1` cells across, `n2` cells in every column.
/// `grading > 1` clusters columns toward the gap at `x₁ = 0`.
pub fn build_mesh(cell: &CellSpec<f64>, n1: usize, n2: usize, grading: f64) -> Result<GapMesh> {
    if n1 < 4 || n2 < 2 || !n1.is_multiple_of(2) || !n2.is_multiple_of(2) {
        return Err(Error::domain(format!("n1, n2 must be even (n1 >= 4), got {n1}, {n2}")));
    }
    if !(grading >= 1.0) {
        return Err(Error::domain("grading must be at least 1"));
    }
    let a = cell.shape.halfwidth();
    let w = core_width(cell);
    let half = half_grid(a, cell.l1, w, n1 / 2, grading)?;
    let mut xs: Vec<f64> = half.iter().skip(1).rev().map(|x| -x).collect();
    xs.extend(half.iter().copied());
    let nx = xs.len();
    let ny = n2 + 1;
    let top = 2.0 * cell.l2;
    let mut coords = Vec::with_capacity(nx * ny);
    let mut class = Vec::with_capacity(nx * ny);
    for &x in &xs {
        let lo = if x.abs() < a { boundary_height(&cell.shape, x)? } else { 0.0 };
        let hi = top - lo;
        for iy in 0..ny {
            let y = if iy == n2 { hi } else { lo + (hi - lo) * iy as f64 / n2 as f64 };
            coords.push([x, y]);
            class.push(if iy == 0 {
                NodeClass::PinBottom
            } else if iy == n2 {
                NodeClass::PinTop
            } else {
                NodeClass::Free
            });
        }
    }
    let mesh = GapMesh { nx, ny, coords, class, l1: cell.l1, l2: cell.l2, eps: cell.eps, shape: cell.shape };
    let hmin = mesh.min_edge_height(w);
    if hmin > cell.eps / 8.0 * (1.0 + 1e-9) {
        return Err(Error::Resolution(format!(
            "min gap cell height {hmin:.3e} exceeds eps/8 = {:.3e}; increase n2",
            cell.eps / 8.0
        )));
    }
    Ok(mesh)
}

/// Splits every cell into four through its bilinear midpoints, so the
/// refined space contains the coarse one.
pub fn refine(mesh: &GapMesh) -> GapMesh {
    let nx = 2 * mesh.nx - 1;
    let ny = 2 * mesh.ny - 1;
    let mut coords = vec![[0.0; 2]; nx * ny];
    let mut class = vec![NodeClass::Free; nx * ny];
    let at = |ix: usize, iy: usize| mesh.coords[mesh.idx(ix, iy)];
    for jx in 0..nx {
        for jy in 0..ny {
            let (ix, rx) = (jx / 2, jx % 2);
            let (iy, ry) = (jy / 2, jy % 2);
            let p = match (rx, ry) {
                (0, 0) => at(ix, iy),
                (1, 0) => avg(&[at(ix, iy), at(ix + 1, iy)]),
                (0, 1) => avg(&[at(ix, iy), at(ix, iy + 1)]),
                _ => avg(&[at(ix, iy), at(ix + 1, iy), at(ix + 1, iy + 1), at(ix, iy + 1)]),
            };
            coords[jx * ny + jy] = p;
            class[jx * ny + jy] = if jy == 0 {
                NodeClass::PinBottom
            } else if jy == ny - 1 {
                NodeClass::PinTop
            } else {
                NodeClass::Free
            };
        }
    }
    GapMesh { nx, ny, coords, class, ..mesh.clone() }
}

fn avg(ps: &[[f64; 2]]) -> [f64; 2] {
    let n = ps.len() as f64;
    let (sx, sy) = ps.iter().fold((0.0, 0.0), |(a, b), p| (a + p[0], b + p[1]));
    [sx / n, sy / n]
}
