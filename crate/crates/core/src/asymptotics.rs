//! Leading terms of the cell energies and effective moduli as `ε → 0`,
//! the singular gap integral, and the ε-sweep that measures the bounded
//! remainder.

use rayon::prelude::*;

use crate::auxfield::Load;
use crate::error::{Error, Result};
use crate::fem::{
    assemble, aux_interpolant, build_mesh, effective_moduli, energy, gap_gradient_stats, solve_cell, Preconditioner,
};
use crate::geometry::{curvature_at_gap, max_volume_fraction, CellSpec, InclusionShape, LameParams};
use crate::real::Real;
use crate::specfun::{gamma, integrate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModulusKind {
    Shear,
    Extensional,
    Energy1,
    Energy2,
}

/// `coefficient · ε^{−exponent}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeadingTerm<T> {
    pub coefficient: T,
    pub exponent: T,
    pub kind: ModulusKind,
    pub m: T,
    pub kappa0: T,
}

impl<T: Real> LeadingTerm<T> {
    pub fn value(&self, eps: T) -> T {
        self.coefficient * eps.powf(-self.exponent)
    }
}

/// `2π/(m sin(π/m)) · κ₀^{−1/m}`, which is `π/√κ₀` at `m = 2`.
pub fn shape_factor<T: Real>(m: T, kappa0: T) -> T {
    if m == T::lit(2.0) {
        return T::PI() / kappa0.sqrt();
    }
    T::lit(2.0) * T::PI() / (m * (T::PI() / m).sin()) * kappa0.powf(-T::one() / m)
}

fn check_args<T: Real>(m: T, kappa0: T) -> Result<()> {
    if !(kappa0 > T::zero()) {
        return Err(Error::domain(format!("kappa0 must be positive, got {kappa0}")));
    }
    if !(m >= T::lit(2.0)) {
        return Err(Error::domain(format!("exponent must be at least 2, got {m}")));
    }
    Ok(())
}

/// Leading term of `ℰ_i`: `μ` (shear) or `λ+2μ` (extension) times the
/// shape factor, with exponent `1 − 1/m`.
pub fn leading_energy<T: Real>(load: Load, m: T, kappa0: T, lame: &LameParams<T>) -> Result<LeadingTerm<T>> {
    check_args(m, kappa0)?;
    let (modulus, kind) = match load {
        Load::Shear => (lame.mu, ModulusKind::Energy1),
        Load::Extension => (lame.p_modulus(), ModulusKind::Energy2),
    };
    Ok(LeadingTerm {
        coefficient: modulus * shape_factor(m, kappa0),
        exponent: T::one() - T::one() / m,
        kind,
        m,
        kappa0,
    })
}

/// Leading terms of `μ*` and `E*`.
pub fn leading_moduli<T: Real>(
    m: T,
    kappa0: T,
    lame: &LameParams<T>,
    cell: &CellSpec<T>,
) -> Result<(LeadingTerm<T>, LeadingTerm<T>)> {
    check_args(m, kappa0)?;
    let f = cell.aspect() * shape_factor(m, kappa0);
    let exponent = T::one() - T::one() / m;
    Ok((
        LeadingTerm { coefficient: lame.mu * f, exponent, kind: ModulusKind::Shear, m, kappa0 },
        LeadingTerm { coefficient: lame.young() * f, exponent, kind: ModulusKind::Extensional, m, kappa0 },
    ))
}

/// Moduli in terms of the distance `δ_f` of the volume fraction from its
/// maximum, square cell.
pub fn moduli_from_fraction<T: Real>(m: T, lame: &LameParams<T>, delta_f: T) -> Result<(T, T)> {
    if !(delta_f > T::zero()) {
        return Err(Error::domain(format!("delta_f must be positive, got {delta_f}")));
    }
    if !(m >= T::lit(2.0)) {
        return Err(Error::domain("exponent must be at least 2"));
    }
    let c = if m == T::lit(2.0) {
        T::PI().powf(T::lit(1.5)) / T::lit(2.0).sqrt() / delta_f.sqrt()
    } else {
        let g1 = gamma(T::one() / m)?;
        let g2 = gamma(T::lit(2.0) / m)?;
        let e = T::one() - T::one() / m;
        T::PI() / (T::PI() / m).sin() * (T::lit(2.0) / (m * m) * g1 * g1 / g2).powf(e) / delta_f.powf(e)
    };
    Ok((lame.mu * c, lame.young() * c))
}

/// Gap `ε` between neighbours in the square cell of half-width `L` whose
/// inclusion fraction sits `δ_f` below the maximum.
pub fn eps_from_fraction_gap<T: Real>(m: T, delta_f: T, l: T) -> Result<T> {
    let fmax = max_volume_fraction(m)?;
    if !(delta_f > T::zero() && delta_f < fmax) {
        return Err(Error::OutOfRange(format!("delta_f {delta_f} not in (0, {fmax})")));
    }
    Ok(T::lit(2.0) * l * (T::one() - (T::one() - delta_f / fmax).sqrt()))
}

/// `δ_m` with the same volume fraction as a circle at `π/4 − δ₂`.
pub fn equal_fraction_delta<T: Real>(m: T, delta2: T) -> Result<T> {
    Ok(max_volume_fraction(m)? - (T::FRAC_PI_4() - delta2))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapIntegral<T> {
    pub numeric: T,
    pub leading: T,
    pub residual: T,
}

/// `∫_{−s}^{s} dx₁/(ε + κ₀|x₁|^m)` against its leading term.
///
/// After `x₁ = (ε/κ₀)^{1/m} t` the integral is `2(ε/κ₀)^{1/m}/ε ·
/// ∫₀^{T} dt/(1+t^m)`; the tail `t > 1` is integrated in `log t`.
pub fn gap_integral<T: Real>(m: T, kappa0: T, eps: T, s: T) -> Result<GapIntegral<T>> {
    check_args(m, kappa0)?;
    if !(eps > T::zero() && s > T::zero()) {
        return Err(Error::domain("eps and s must be positive"));
    }
    let scale = (eps / kappa0).powf(T::one() / m);
    let tmax = s / scale;
    let tol = T::lit(1e-13).max(T::lit(64.0) * T::epsilon());
    let core = integrate(|t: T| T::one() / (T::one() + t.powf(m)), T::zero(), tmax.min(T::one()), tol)?;
    let tail = if tmax > T::one() {
        integrate(
            |u: T| {
                let t = u.exp();
                t / (T::one() + t.powf(m))
            },
            T::zero(),
            tmax.ln(),
            tol,
        )?
    } else {
        T::zero()
    };
    let numeric = T::lit(2.0) * scale / eps * (core + tail);
    let leading = shape_factor(m, kappa0) * eps.powf(-(T::one() - T::one() / m));
    Ok(GapIntegral { numeric, leading, residual: numeric - leading })
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::domain("need at least two paired points to fit"));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// `max|r| / min|r|` over a residual column.
pub fn spread_factor(res: &[f64]) -> f64 {
    let abs: Vec<f64> = res.iter().map(|r| r.abs()).collect();
    let max = abs.iter().cloned().fold(0.0, f64::max);
    let min = abs.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub n1: usize,
    pub n2: usize,
    pub grading: f64,
    pub tol: f64,
    pub precond: Preconditioner,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { n1: 240, n2: 32, grading: 10.0, tol: 1e-10, precond: Preconditioner::Jacobi }
    }
}

/// Cell template for a sweep: the shape is fixed and `L₂ = apex + ε/2`;
/// `L₁` is either fixed or tracks `halfwidth + ε/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellTemplate {
    pub shape: InclusionShape<f64>,
    pub l1: Option<f64>,
}

impl CellTemplate {
    pub fn cell(&self, eps: f64) -> Result<CellSpec<f64>> {
        match self.l1 {
            Some(l1) => CellSpec::with_gap(self.shape, eps, l1),
            None => CellSpec::tight(self.shape, eps),
        }
    }
}

/// One solved cell: both energies, leading terms, moduli and gap gradients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub eps: f64,
    pub e1: f64,
    pub e2: f64,
    pub lead1: f64,
    pub lead2: f64,
    pub res1: f64,
    pub res2: f64,
    pub mu_star: f64,
    pub e_star: f64,
    pub sup_grad_v: f64,
    pub sup_grad_w: f64,
    /// Energy of the interpolated auxiliary field for each load.
    pub aux_energy: [f64; 2],
    pub dofs: usize,
    pub iters: usize,
}

/// Solves both cell problems at one `ε`. The gradient columns are taken
/// from the shear solve.
pub fn solve_row(template: &CellTemplate, lame: &LameParams<f64>, eps: f64, cfg: &SolverConfig) -> Result<SweepRow> {
    let cell = template.cell(eps)?;
    let kappa0 = curvature_at_gap(&cell.shape)?;
    let m = cell.shape.exponent()?;
    let mesh = build_mesh(&cell, cfg.n1, cfg.n2, cfg.grading)?;
    let system = assemble(&mesh, lame);
    let mut e = [0.0; 2];
    let mut aux_e = [0.0; 2];
    let mut iters = 0;
    let mut stats = None;
    for (k, load) in [Load::Shear, Load::Extension].into_iter().enumerate() {
        let (v, info) = solve_cell(&system, load, cfg.tol, cfg.precond)?;
        iters += info.iterations;
        e[k] = energy(&mesh, lame, &v);
        let aux = aux_interpolant(&mesh, &cell, lame, load)?;
        aux_e[k] = energy(&mesh, lame, &aux);
        if load == Load::Shear {
            stats = Some(gap_gradient_stats(&mesh, &v, &aux)?);
        }
    }
    let stats = stats.expect("shear solve ran");
    let lead1 = leading_energy(Load::Shear, m, kappa0, lame)?.value(eps);
    let lead2 = leading_energy(Load::Extension, m, kappa0, lame)?.value(eps);
    let (mu_star, e_star) = effective_moduli(e[0], e[1], &cell, lame);
    Ok(SweepRow {
        eps,
        e1: e[0],
        e2: e[1],
        lead1,
        lead2,
        res1: e[0] - lead1,
        res2: e[1] - lead2,
        mu_star,
        e_star,
        sup_grad_v: stats.sup_grad_v,
        sup_grad_w: stats.sup_grad_w,
        aux_energy: aux_e,
        dofs: system.n_free(),
        iters,
    })
}

/// One row per `ε` (in input order); failed rows carry their error.
pub fn sweep_report(
    template: &CellTemplate,
    lame: &LameParams<f64>,
    eps_list: &[f64],
    cfg: &SolverConfig,
) -> Vec<Result<SweepRow>> {
    eps_list.par_iter().map(|&eps| solve_row(template, lame, eps, cfg)).collect()
}

/// Fit summary of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSummary {
    pub slope_e1: f64,
    pub spread_res1: f64,
    pub slope_e2: f64,
    pub spread_res2: f64,
}

pub fn summarize(rows: &[SweepRow]) -> Result<SweepSummary> {
    if rows.len() < 3 {
        return Err(Error::domain("need >= 3 points to fit"));
    }
    let eps: Vec<f64> = rows.iter().map(|r| r.eps).collect();
    let e1: Vec<f64> = rows.iter().map(|r| r.e1).collect();
    let e2: Vec<f64> = rows.iter().map(|r| r.e2).collect();
    let r1: Vec<f64> = rows.iter().map(|r| r.res1).collect();
    let r2: Vec<f64> = rows.iter().map(|r| r.res2).collect();
    Ok(SweepSummary {
        slope_e1: loglog_slope(&eps, &e1)?,
        spread_res1: spread_factor(&r1),
        slope_e2: loglog_slope(&eps, &e2)?,
        spread_res2: spread_factor(&r2),
    })
}

/// Slope window for `ℰ₁`: `[−0.55, −0.45]` at `m = 2`, otherwise
/// `−(1 − 1/m) ± 0.03`.
pub fn slope_window(m: f64) -> (f64, f64) {
    if m == 2.0 {
        (-0.55, -0.45)
    } else {
        let t = -(1.0 - 1.0 / m);
        (t - 0.03, t + 0.03)
    }
}

/// Sweep pass/fail: slope of `ℰ₁` in its window and both residual spreads
/// at most 2.5.
pub fn sweep_passes(summary: &SweepSummary, m: f64) -> bool {
    let (lo, hi) = slope_window(m);
    summary.slope_e1 >= lo && summary.slope_e1 <= hi && summary.spread_res1 <= 2.5 && summary.spread_res2 <= 2.5
}
