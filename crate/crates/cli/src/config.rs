//! Run configuration: flat `key = value` lines with dotted keys and `#`
//! comments.
//!
//! ```text
//! shape.kind = circle        # circle | ellipse | mconvex | vigdergauz
//! shape.r = 1
//! lame.lambda = 1
//! lame.mu = 1
//! cell.eps = 0.04, 0.02, 0.01, 0.005
//! solver.n1 = 240
//! ```
//!
//! [`RunConfig::to_canonical`] writes every key in a fixed order with
//! 17-digit numbers, so parsing the canonical text reproduces the same
//! configuration and the same text.

use std::collections::BTreeMap;
use std::str::FromStr;

use densepack::asymptotics::{CellTemplate, SolverConfig};
use densepack::fem::Preconditioner;
use densepack::geometry::{InclusionShape, LameParams};
use densepack::report::{fmt_f64, FULL_PRECISION};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("missing key `{0}`")]
    Missing(&'static str),
    #[error("key `{key}`: {msg}")]
    Value { key: String, msg: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShapeSpec {
    Circle { r: f64 },
    Ellipse { a: f64, b: f64 },
    MConvex { m: f64, r: f64 },
    Vigdergauz { f: f64 },
}

impl ShapeSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ShapeSpec::Circle { .. } => "circle",
            ShapeSpec::Ellipse { .. } => "ellipse",
            ShapeSpec::MConvex { .. } => "mconvex",
            ShapeSpec::Vigdergauz { .. } => "vigdergauz",
        }
    }

    /// The analytic inclusion; Vigdergauz shapes need a root solve and are
    /// built by the commands that use them.
    pub fn inclusion(&self) -> Result<InclusionShape<f64>, ConfigError> {
        let shape = match *self {
            ShapeSpec::Circle { r } => InclusionShape::circle(r),
            ShapeSpec::Ellipse { a, b } => InclusionShape::ellipse(a, b),
            ShapeSpec::MConvex { m, r } => InclusionShape::mconvex(m, r),
            ShapeSpec::Vigdergauz { .. } => {
                return Err(ConfigError::Invalid(
                    "Vigdergauz shapes have no gap coefficient; use the `shape` command".into(),
                ))
            }
        };
        shape.map_err(|e| ConfigError::Invalid(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub shape: ShapeSpec,
    pub lambda: f64,
    pub mu: f64,
    /// Fixed cell half-width; `None` keeps the cell tight (`halfwidth + ε/2`).
    pub l1: Option<f64>,
    pub eps: Vec<f64>,
    pub solver: SolverConfig,
    pub csv: Option<String>,
    pub precision: usize,
    pub aux_points: usize,
    pub compare_m: f64,
    pub integral_s: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            shape: ShapeSpec::Circle { r: 1.0 },
            lambda: 1.0,
            mu: 1.0,
            l1: None,
            eps: Vec::new(),
            solver: SolverConfig::default(),
            csv: None,
            precision: FULL_PRECISION,
            aux_points: 10_000,
            compare_m: 4.0,
            integral_s: None,
        }
    }
}

const KEYS: &[&str] = &[
    "shape.kind",
    "shape.r",
    "shape.a",
    "shape.b",
    "shape.m",
    "shape.f",
    "lame.lambda",
    "lame.mu",
    "cell.l1",
    "cell.eps",
    "solver.n1",
    "solver.n2",
    "solver.grading",
    "solver.tol",
    "solver.precond",
    "output.csv",
    "output.precision",
    "auxcheck.points",
    "compare.m",
    "integral.s",
];

fn shape_keys(kind: &str) -> Option<&'static [&'static str]> {
    Some(match kind {
        "circle" => &["shape.r"],
        "ellipse" => &["shape.a", "shape.b"],
        "mconvex" => &["shape.m", "shape.r"],
        "vigdergauz" => &["shape.f"],
        _ => return None,
    })
}

fn parse_value<T: FromStr>(key: &str, raw: &str) -> Result<T, ConfigError> {
    raw.parse().map_err(|_| ConfigError::Value { key: key.into(), msg: format!("cannot parse `{raw}`") })
}

struct Entries(BTreeMap<String, String>);

impl Entries {
    fn take(&mut self, key: &'static str) -> Option<String> {
        self.0.remove(key)
    }

    fn req<T: FromStr>(&mut self, key: &'static str) -> Result<T, ConfigError> {
        let raw = self.take(key).ok_or(ConfigError::Missing(key))?;
        parse_value(key, &raw)
    }

    fn opt<T: FromStr>(&mut self, key: &'static str) -> Result<Option<T>, ConfigError> {
        self.take(key).map(|raw| parse_value(key, &raw)).transpose()
    }
}

impl RunConfig {
    /// Parses configuration text. Syntax and types are checked here; the
    /// physical invariants are checked by [`RunConfig::validate`].
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut map = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::Syntax { line: k + 1, msg: "expected `key = value`".into() })?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(ConfigError::UnknownKey(key.into()));
            }
            if value.is_empty() {
                return Err(ConfigError::Syntax { line: k + 1, msg: format!("empty value for `{key}`") });
            }
            if map.insert(key.to_string(), value.to_string()).is_some() {
                return Err(ConfigError::Syntax { line: k + 1, msg: format!("duplicate key `{key}`") });
            }
        }
        let mut e = Entries(map);
        let d = RunConfig::default();

        let kind = e.take("shape.kind").unwrap_or_else(|| "circle".into());
        let allowed = shape_keys(&kind)
            .ok_or_else(|| ConfigError::Value { key: "shape.kind".into(), msg: format!("unknown shape `{kind}`") })?;
        for key in ["shape.r", "shape.a", "shape.b", "shape.m", "shape.f"] {
            if e.0.contains_key(key) && !allowed.contains(&key) {
                return Err(ConfigError::Value { key: key.into(), msg: format!("not used by shape `{kind}`") });
            }
        }
        let shape = match kind.as_str() {
            "circle" => ShapeSpec::Circle { r: e.opt("shape.r")?.unwrap_or(1.0) },
            "ellipse" => ShapeSpec::Ellipse { a: e.req("shape.a")?, b: e.req("shape.b")? },
            "mconvex" => ShapeSpec::MConvex { m: e.req("shape.m")?, r: e.opt("shape.r")?.unwrap_or(1.0) },
            _ => ShapeSpec::Vigdergauz { f: e.req("shape.f")? },
        };

        let eps = match e.take("cell.eps") {
            Some(raw) => {
                raw.split(',').map(|s| parse_value::<f64>("cell.eps", s.trim())).collect::<Result<Vec<_>, _>>()?
            }
            None => Vec::new(),
        };
        let precond = match e.take("solver.precond").as_deref() {
            None | Some("jacobi") => Preconditioner::Jacobi,
            Some("column") => Preconditioner::Column,
            Some(other) => {
                return Err(ConfigError::Value {
                    key: "solver.precond".into(),
                    msg: format!("expected `jacobi` or `column`, got `{other}`"),
                })
            }
        };
        let cfg = RunConfig {
            shape,
            lambda: e.opt("lame.lambda")?.unwrap_or(d.lambda),
            mu: e.opt("lame.mu")?.unwrap_or(d.mu),
            l1: e.opt("cell.l1")?,
            eps,
            solver: SolverConfig {
                n1: e.opt("solver.n1")?.unwrap_or(d.solver.n1),
                n2: e.opt("solver.n2")?.unwrap_or(d.solver.n2),
                grading: e.opt("solver.grading")?.unwrap_or(d.solver.grading),
                tol: e.opt("solver.tol")?.unwrap_or(d.solver.tol),
                precond,
            },
            csv: e.take("output.csv"),
            precision: e.opt("output.precision")?.unwrap_or(d.precision),
            aux_points: e.opt("auxcheck.points")?.unwrap_or(d.aux_points),
            compare_m: e.opt("compare.m")?.unwrap_or(d.compare_m),
            integral_s: e.opt("integral.s")?,
        };
        debug_assert!(e.0.is_empty(), "every known key is consumed");
        Ok(cfg)
    }

    /// Canonical text: every key in a fixed order, numbers at full precision.
    pub fn to_canonical(&self) -> String {
        let mut out = Vec::new();
        let mut put = |k: &str, v: String| out.push(format!("{k} = {v}"));
        put("shape.kind", self.shape.kind().into());
        match self.shape {
            ShapeSpec::Circle { r } => put("shape.r", fmt_f64(r)),
            ShapeSpec::Ellipse { a, b } => {
                put("shape.a", fmt_f64(a));
                put("shape.b", fmt_f64(b));
            }
            ShapeSpec::MConvex { m, r } => {
                put("shape.m", fmt_f64(m));
                put("shape.r", fmt_f64(r));
            }
            ShapeSpec::Vigdergauz { f } => put("shape.f", fmt_f64(f)),
        }
        put("lame.lambda", fmt_f64(self.lambda));
        put("lame.mu", fmt_f64(self.mu));
        if let Some(l1) = self.l1 {
            put("cell.l1", fmt_f64(l1));
        }
        if !self.eps.is_empty() {
            put("cell.eps", self.eps.iter().map(|&e| fmt_f64(e)).collect::<Vec<_>>().join(", "));
        }
        put("solver.n1", self.solver.n1.to_string());
        put("solver.n2", self.solver.n2.to_string());
        put("solver.grading", fmt_f64(self.solver.grading));
        put("solver.tol", fmt_f64(self.solver.tol));
        put(
            "solver.precond",
            match self.solver.precond {
                Preconditioner::Jacobi => "jacobi",
                Preconditioner::Column => "column",
            }
            .into(),
        );
        if let Some(csv) = &self.csv {
            put("output.csv", csv.clone());
        }
        put("output.precision", self.precision.to_string());
        put("auxcheck.points", self.aux_points.to_string());
        put("compare.m", fmt_f64(self.compare_m));
        if let Some(s) = self.integral_s {
            put("integral.s", fmt_f64(s));
        }
        let mut text = out.join("\n");
        text.push('\n');
        text
    }

    pub fn lame(&self) -> Result<LameParams<f64>, ConfigError> {
        LameParams::new(self.lambda, self.mu).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn template(&self) -> Result<CellTemplate, ConfigError> {
        Ok(CellTemplate { shape: self.shape.inclusion()?, l1: self.l1 })
    }

    /// Checks every field against the library invariants without solving
    /// anything.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        self.lame()?;
        match self.shape {
            ShapeSpec::Vigdergauz { f } => {
                if !(f > 0.0 && f < 1.0) {
                    return invalid(format!("shape.f = {f} must lie in (0, 1)"));
                }
            }
            _ => {
                let template = self.template()?;
                for &eps in &self.eps {
                    if !(eps > 0.0) {
                        return invalid(format!("cell.eps entries must be positive, got {eps}"));
                    }
                    template.cell(eps).map_err(|e| ConfigError::Invalid(e.to_string()))?;
                }
            }
        }
        if self.eps.windows(2).any(|w| w[1] >= w[0]) {
            return invalid("cell.eps must be strictly decreasing".into());
        }
        let s = &self.solver;
        if s.n1 < 4 || !s.n1.is_multiple_of(2) || s.n2 < 2 || !s.n2.is_multiple_of(2) {
            return invalid(format!("solver.n1 (>= 4) and solver.n2 must be even, got {}, {}", s.n1, s.n2));
        }
        if !(s.grading >= 1.0) {
            return invalid(format!("solver.grading must be at least 1, got {}", s.grading));
        }
        if !(s.tol > 0.0 && s.tol <= 1e-6) {
            return invalid(format!("solver.tol must lie in (0, 1e-6], got {}", s.tol));
        }
        if !(1..=FULL_PRECISION).contains(&self.precision) {
            return invalid(format!("output.precision must lie in 1..=17, got {}", self.precision));
        }
        if self.aux_points == 0 {
            return invalid("auxcheck.points must be positive".into());
        }
        if !(self.compare_m >= 2.0) {
            return invalid(format!("compare.m must be at least 2, got {}", self.compare_m));
        }
        if let Some(s) = self.integral_s {
            if !(s > 0.0) {
                return invalid(format!("integral.s must be positive, got {s}"));
            }
        }
        Ok(())
    }
}
