//! Driver for the `densepack` command line tool.
//!
//! Each command reads a validated [`RunConfig`], writes its report to `out`
//! and diagnostics to `err`, and returns an [`Outcome`] whose exit code is
//! 0 (pass), 1 (configuration), 2 (solver or root finder) or 3 (criterion
//! not met).

pub mod config;

use std::io::{self, Write};

use densepack::asymptotics::{gap_integral, slope_window, solve_row, summarize, sweep_passes, sweep_report};
use densepack::auxfield::{cancellation_check, eval_aux, eval_aux_formula, Load};
use densepack::geometry::{
    curvature_at_gap, gap_profile, match_fraction, polygon_area, polygonize, vigdergauz_solve, GapMode, GapProfile,
    InclusionShape, LameParams,
};
use densepack::report::{format_row_with, format_summary, format_sweep_line_with, sweep_header, HEADER};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use config::{ConfigError, RunConfig, ShapeSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Config,
    Solver,
    Criterion,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Pass => 0,
            Outcome::Config => 1,
            Outcome::Solver => 2,
            Outcome::Criterion => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Moduli,
    Sweep,
    Auxcheck,
    Shape,
    Integral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Options {
    pub seed: u64,
    pub quiet: bool,
}

impl Default for Options {
    fn default() -> Self {
        Self { seed: 1, quiet: false }
    }
}

/// Tolerances for `auxcheck`.
pub const IDENTITY_TOL: f64 = 1e-10;
pub const FD_TOL: f64 = 1e-5;

/// Vertices per polygon in `shape` output.
pub const SHAPE_VERTICES: usize = 2048;
pub const SHAPE_AREA_TOL: f64 = 1e-4;

pub fn run(
    cmd: Command,
    cfg: &RunConfig,
    opts: &Options,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> io::Result<Outcome> {
    if let Err(e) = cfg.validate() {
        writeln!(err, "config error: {e}")?;
        return Ok(Outcome::Config);
    }
    match cmd {
        Command::Moduli => moduli(cfg, out, err),
        Command::Sweep => sweep(cfg, out, err, opts),
        Command::Auxcheck => auxcheck(cfg, out, err, opts),
        Command::Shape => shape(cfg, out, err),
        Command::Integral => integral(cfg, out, err),
    }
}

fn config_fail(err: &mut dyn Write, msg: impl std::fmt::Display) -> io::Result<Outcome> {
    writeln!(err, "config error: {msg}")?;
    Ok(Outcome::Config)
}

fn solver_fail(err: &mut dyn Write, msg: impl std::fmt::Display) -> io::Result<Outcome> {
    writeln!(err, "error: {msg}")?;
    Ok(Outcome::Solver)
}

fn analytic_setup(cfg: &RunConfig) -> Result<(densepack::asymptotics::CellTemplate, LameParams<f64>), ConfigError> {
    Ok((cfg.template()?, cfg.lame()?))
}

fn moduli(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<Outcome> {
    let (template, lame) = match analytic_setup(cfg) {
        Ok(v) => v,
        Err(e) => return config_fail(err, e),
    };
    let [eps] = cfg.eps[..] else {
        return config_fail(err, format!("moduli needs exactly one cell.eps value, got {}", cfg.eps.len()));
    };
    match solve_row(&template, &lame, eps, &cfg.solver) {
        Ok(row) => {
            if let Some(path) = &cfg.csv {
                std::fs::write(path, format!("{HEADER}\n{}\n", format_row_with(&row, cfg.precision)))?;
            }
            writeln!(out, "{}", format_row_with(&row, cfg.precision))?;
            Ok(Outcome::Pass)
        }
        Err(e) => solver_fail(err, e),
    }
}

fn sweep(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write, opts: &Options) -> io::Result<Outcome> {
    let (template, lame) = match analytic_setup(cfg) {
        Ok(v) => v,
        Err(e) => return config_fail(err, e),
    };
    if cfg.eps.len() < 3 {
        return config_fail(err, "need >= 3 points to fit");
    }
    let m = template.shape.exponent().expect("analytic shape");
    let results = sweep_report(&template, &lame, &cfg.eps, &cfg.solver);
    let mut text = sweep_header();
    text.push('\n');
    let mut rows = Vec::new();
    for (&eps, res) in cfg.eps.iter().zip(&results) {
        match res {
            Ok(row) => {
                text.push_str(&format_sweep_line_with(eps, Some(row), cfg.precision));
                rows.push(*row);
            }
            Err(e) => {
                writeln!(err, "eps = {eps}: {e}")?;
                text.push_str(&format_sweep_line_with(eps, None, cfg.precision));
            }
        }
        text.push('\n');
    }
    let summary = if rows.len() >= 3 { summarize(&rows).ok() } else { None };
    if let Some(s) = &summary {
        text.push_str(&format_summary(s));
        text.push('\n');
    }
    match &cfg.csv {
        Some(path) => std::fs::write(path, &text)?,
        None => out.write_all(text.as_bytes())?,
    }
    if rows.is_empty() {
        return solver_fail(err, "every sweep point failed");
    }
    if rows.len() < results.len() {
        writeln!(err, "{} of {} sweep points failed", results.len() - rows.len(), results.len())?;
        return Ok(Outcome::Criterion);
    }
    let Some(s) = summary else {
        return Ok(Outcome::Criterion);
    };
    let pass = sweep_passes(&s, m);
    if !opts.quiet {
        let (lo, hi) = slope_window(m);
        writeln!(
            err,
            "sweep {}: slope_E1 {:.4} in [{lo:.3}, {hi:.3}], residual spreads {:.3} and {:.3} (limit 2.5)",
            if pass { "PASS" } else { "FAIL" },
            s.slope_e1,
            s.spread_res1,
            s.spread_res2
        )?;
    }
    Ok(if pass { Outcome::Pass } else { Outcome::Criterion })
}

/// Worst-case diagnostics of `auxcheck`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AuxReport {
    pub points: usize,
    pub identity_abs: f64,
    pub identity_rel: f64,
    pub fd_rel: f64,
    pub worst_identity: (f64, f64, f64),
    pub worst_fd: (f64, f64, f64),
}

fn max_abs<const N: usize>(a: [f64; N]) -> f64 {
    a.iter().fold(0.0, |s: f64, v| s.max(v.abs()))
}

/// Relative mismatch of central differences of the value (gradient) and of
/// the gradient (Hessian) against the closed forms.
fn fd_mismatch(
    load: Load,
    (x, y): (f64, f64),
    lame: &LameParams<f64>,
    gap: &GapProfile<f64>,
) -> densepack::Result<f64> {
    let at = eval_aux(load, (x, y), lame, gap)?;
    let delta = gap.delta(x)?;
    let hy = 1e-5 * delta;
    let hx = 1e-5 * x.abs().max((gap.eps / gap.kappa0).powf(1.0 / gap.m));
    let f = |p: (f64, f64)| eval_aux_formula(load, p, lame, gap).map(|u| u.total());
    let (xp, xm) = (f((x + hx, y))?, f((x - hx, y))?);
    let (yp, ym) = (f((x, y + hy))?, f((x, y - hy))?);
    let mut gerr: f64 = 0.0;
    let mut herr: f64 = 0.0;
    let gscale = max_abs([at.grad[0][0], at.grad[0][1], at.grad[1][0], at.grad[1][1]]).max(f64::MIN_POSITIVE);
    // second derivatives are measured against |∇u|/δ as well: the y-slope of
    // the Keller ramp is ~1/δ while its y-curvature vanishes
    let hscale = at.hess.iter().flatten().flatten().fold(gscale / delta, |s, v| s.max(v.abs()));
    for k in 0..2 {
        let gx = (xp.value[k] - xm.value[k]) / (2.0 * hx);
        let gy = (yp.value[k] - ym.value[k]) / (2.0 * hy);
        gerr = gerr.max((gx - at.grad[k][0]).abs()).max((gy - at.grad[k][1]).abs());
        for b in 0..2 {
            let hxb = (xp.grad[k][b] - xm.grad[k][b]) / (2.0 * hx);
            let hyb = (yp.grad[k][b] - ym.grad[k][b]) / (2.0 * hy);
            herr = herr.max((hxb - at.hess[k][0][b]).abs()).max((hyb - at.hess[k][1][b]).abs());
        }
    }
    Ok((gerr / gscale).max(herr / hscale))
}

/// Samples the auxiliary fields at `points` seeded random gap points for
/// each `ε` and both loads.
pub fn aux_sweep(
    gaps: &[GapProfile<f64>],
    lame: &LameParams<f64>,
    points: usize,
    seed: u64,
) -> densepack::Result<AuxReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = AuxReport::default();
    for gap in gaps {
        let half = 0.5 * gap.halfwidth;
        for _ in 0..points {
            let x = rng.gen_range(-half..=half);
            let eta: f64 = rng.gen_range(-0.5..=0.5);
            let y = eta * gap.delta(x)?;
            for load in [Load::Shear, Load::Extension] {
                let c = cancellation_check(load, (x, y), lame, gap)?;
                let abs = c.c1.abs().max(c.c2.abs());
                let rel =
                    (c.c1.abs() / c.scale1.max(f64::MIN_POSITIVE)).max(c.c2.abs() / c.scale2.max(f64::MIN_POSITIVE));
                rep.identity_abs = rep.identity_abs.max(abs);
                if rel > rep.identity_rel {
                    rep.identity_rel = rel;
                    rep.worst_identity = (gap.eps, x, y);
                }
                let fd = fd_mismatch(load, (x, y), lame, gap)?;
                if fd > rep.fd_rel {
                    rep.fd_rel = fd;
                    rep.worst_fd = (gap.eps, x, y);
                }
                rep.points += 1;
            }
        }
    }
    Ok(rep)
}

fn auxcheck(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write, opts: &Options) -> io::Result<Outcome> {
    let (template, lame) = match analytic_setup(cfg) {
        Ok(v) => v,
        Err(e) => return config_fail(err, e),
    };
    let eps_list = if cfg.eps.is_empty() { vec![1e-2] } else { cfg.eps.clone() };
    let gaps: densepack::Result<Vec<_>> =
        eps_list.iter().map(|&eps| template.cell(eps).and_then(|c| gap_profile(&c, GapMode::Simplified))).collect();
    let rep = match gaps.and_then(|g| aux_sweep(&g, &lame, cfg.aux_points, opts.seed)) {
        Ok(r) => r,
        Err(e) => return solver_fail(err, e),
    };
    writeln!(
        out,
        "points={} identity_residual_abs={:e} identity_residual_rel={:e} fd_mismatch_rel={:e}",
        rep.points, rep.identity_abs, rep.identity_rel, rep.fd_rel
    )?;
    let mut pass = true;
    if rep.identity_rel > IDENTITY_TOL {
        pass = false;
        let (e, x, y) = rep.worst_identity;
        writeln!(err, "identity residual {:e} > {IDENTITY_TOL:e} at eps={e} x1={x} y={y}", rep.identity_rel)?;
    }
    if rep.fd_rel > FD_TOL {
        pass = false;
        let (e, x, y) = rep.worst_fd;
        writeln!(err, "finite difference mismatch {:e} > {FD_TOL:e} at eps={e} x1={x} y={y}", rep.fd_rel)?;
    }
    Ok(if pass { Outcome::Pass } else { Outcome::Criterion })
}

/// Distance from the origin to the polygon along direction `theta`.
pub fn ray_radius(poly: &[(f64, f64)], theta: f64) -> Option<f64> {
    let (dx, dy) = (theta.cos(), theta.sin());
    let n = poly.len();
    let mut best: Option<f64> = None;
    for k in 0..n {
        let (ax, ay) = poly[k];
        let (bx, by) = poly[(k + 1) % n];
        let (ex, ey) = (bx - ax, by - ay);
        let den = dx * ey - dy * ex;
        if den.abs() < 1e-300 {
            continue;
        }
        let t = (ax * ey - ay * ex) / den;
        let s = (ax * dy - ay * dx) / den;
        if t > 0.0 && (-1e-12..=1.0 + 1e-12).contains(&s) {
            best = Some(best.map_or(t, |b: f64| b.max(t)));
        }
    }
    best
}

fn shape(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<Outcome> {
    let ShapeSpec::Vigdergauz { f } = cfg.shape else {
        return config_fail(err, "the shape command needs shape.kind = vigdergauz");
    };
    let vg = match vigdergauz_solve(f) {
        Ok(v) => InclusionShape::Vigdergauz(v),
        Err(e) => return solver_fail(err, format!("Vigdergauz shape for f = {f}: {e}")),
    };
    let mc = match match_fraction(f, cfg.compare_m, 0.5) {
        Ok(s) => s,
        Err(e) => return solver_fail(err, format!("m-convex shape for f = {f}: {e}")),
    };
    let (pv, pm) = match (polygonize(&vg, SHAPE_VERTICES), polygonize(&mc, SHAPE_VERTICES)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return solver_fail(err, e),
    };
    let (av, am) = (polygon_area(&pv), polygon_area(&pm));
    let mut dev: f64 = 0.0;
    for k in 0..360 {
        let th = (k as f64).to_radians();
        match (ray_radius(&pv, th), ray_radius(&pm, th)) {
            (Some(a), Some(b)) => dev = dev.max((a - b).abs()),
            _ => return solver_fail(err, format!("ray at {k} degrees misses a polygon")),
        }
    }
    let p = cfg.precision;
    let g = |x: f64| densepack::report::fmt_g(x, p);
    let mut text = String::from("shape,x,y\n");
    for (name, poly) in [("vigdergauz", &pv), ("mconvex", &pm)] {
        for &(x, y) in poly.iter() {
            text.push_str(&format!("{name},{},{}\n", g(x), g(y)));
        }
    }
    text.push_str(&format!(
        "# f={} m={} area_vigdergauz={} area_mconvex={} max_radial_deviation={}\n",
        g(f),
        g(cfg.compare_m),
        g(av),
        g(am),
        g(dev)
    ));
    match &cfg.csv {
        Some(path) => std::fs::write(path, &text)?,
        None => out.write_all(text.as_bytes())?,
    }
    let pass = (av - f).abs() <= SHAPE_AREA_TOL && (am - f).abs() <= SHAPE_AREA_TOL;
    if !pass {
        writeln!(err, "area mismatch: vigdergauz {av}, mconvex {am}, target {f}")?;
    }
    Ok(if pass { Outcome::Pass } else { Outcome::Criterion })
}

fn integral(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<Outcome> {
    let shape = match cfg.shape.inclusion() {
        Ok(s) => s,
        Err(e) => return config_fail(err, e),
    };
    if cfg.eps.is_empty() {
        return config_fail(err, "integral needs at least one cell.eps value");
    }
    let (m, kappa0) = match (shape.exponent(), curvature_at_gap(&shape)) {
        (Ok(m), Ok(k)) => (m, k),
        (Err(e), _) | (_, Err(e)) => return config_fail(err, e),
    };
    let s = cfg.integral_s.unwrap_or(0.5 * shape.halfwidth());
    let g = |x: f64| densepack::report::fmt_g(x, cfg.precision);
    let mut text = String::from("eps,numeric,leading,residual\n");
    for &eps in &cfg.eps {
        match gap_integral(m, kappa0, eps, s) {
            Ok(r) => text.push_str(&format!("{},{},{},{}\n", g(eps), g(r.numeric), g(r.leading), g(r.residual))),
            Err(e) => return solver_fail(err, format!("eps = {eps}: {e}")),
        }
    }
    match &cfg.csv {
        Some(path) => std::fs::write(path, &text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(Outcome::Pass)
}
