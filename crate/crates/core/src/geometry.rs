//! Inclusion shapes, the period cell and the thin-gap profile.
//!
//! Coordinates follow the translated cell: the lower inclusion `D₂` is
//! centred at the origin, the upper one `D₁` at `(0, 2L₂)`, and the gap is
//! centred at `(0, L₂)`. Gap profiles are written in a chart where the gap
//! midline sits at height zero.

use crate::error::{Error, Result};
use crate::real::Real;
use crate::specfun::{elliptic_f, elliptic_k, find_root, gamma, EllipticParam};

/// Isotropic Lamé constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LameParams<T> {
    pub lambda: T,
    pub mu: T,
}

impl<T: Real> LameParams<T> {
    /// Checks strong ellipticity (`mu > 0`, `lambda + mu > 0`).
    pub fn new(lambda: T, mu: T) -> Result<Self> {
        if !(mu > T::zero()) {
            return Err(Error::Ellipticity("mu > 0"));
        }
        if !(lambda + mu > T::zero()) {
            return Err(Error::Ellipticity("lambda + mu > 0"));
        }
        Ok(Self { lambda, mu })
    }

    /// Young's modulus `μ(3λ+2μ)/(λ+μ)`.
    pub fn young(&self) -> T {
        let (l, m) = (self.lambda, self.mu);
        m * (T::lit(3.0) * l + T::lit(2.0) * m) / (l + m)
    }

    /// Poisson ratio `λ/(2(λ+μ))`.
    pub fn poisson(&self) -> T {
        self.lambda / (T::lit(2.0) * (self.lambda + self.mu))
    }

    /// `λ + 2μ`, the longitudinal modulus.
    pub fn p_modulus(&self) -> T {
        self.lambda + T::lit(2.0) * self.mu
    }
}

/// Solved Vigdergauz parameters: volume fraction `f`, elliptic parameter
/// `p`, `h = (1−f)/(1+f)` and `M = (1−p)²/p²`. The shape lives in a unit
/// square cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vigdergauz<T> {
    pub f: T,
    pub p: EllipticParam<T>,
    pub h: T,
    pub big_m: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InclusionShape<T> {
    Ellipse { a: T, b: T },
    MConvex { m: T, r: T },
    Vigdergauz(Vigdergauz<T>),
}

impl<T: Real> InclusionShape<T> {
    pub fn ellipse(a: T, b: T) -> Result<Self> {
        if !(a > T::zero() && b > T::zero()) {
            return Err(Error::domain("ellipse semi-axes must be positive"));
        }
        Ok(Self::Ellipse { a, b })
    }

    pub fn circle(r: T) -> Result<Self> {
        Self::ellipse(r, r)
    }

    pub fn mconvex(m: T, r: T) -> Result<Self> {
        if !(m > T::lit(2.0)) {
            return Err(Error::domain(format!("m-convex exponent must exceed 2, got {m}")));
        }
        if !(r > T::zero()) {
            return Err(Error::domain("m-convex half-width must be positive"));
        }
        Ok(Self::MConvex { m, r })
    }

    /// Exponent of the leading term in the gap opening (2 for ellipses).
    pub fn exponent(&self) -> Result<T> {
        match *self {
            Self::Ellipse { .. } => Ok(T::lit(2.0)),
            Self::MConvex { m, .. } => Ok(m),
            Self::Vigdergauz(_) => Err(Error::UnsupportedShape("Vigdergauz inclusions have no apex expansion".into())),
        }
    }

    /// Extent of the inclusion along `x₁`.
    pub fn halfwidth(&self) -> T {
        match *self {
            Self::Ellipse { a, .. } => a,
            Self::MConvex { r, .. } => r,
            Self::Vigdergauz(v) => -vigdergauz_boundary_unchecked(&v, v.big_m).0,
        }
    }

    /// Height of the apex, i.e. the boundary height at `x₁ = 0`.
    pub fn apex(&self) -> T {
        match *self {
            Self::Ellipse { b, .. } => b,
            Self::MConvex { r, .. } => r,
            Self::Vigdergauz(v) => vigdergauz_boundary_unchecked(&v, T::one()).1,
        }
    }
}

/// Coefficient `κ₀` of `|x₁|^m` in the gap opening.
pub fn curvature_at_gap<T: Real>(shape: &InclusionShape<T>) -> Result<T> {
    match *shape {
        InclusionShape::Ellipse { a, b } => Ok(b / (a * a)),
        InclusionShape::MConvex { m, r } => Ok(T::lit(2.0) / m * r.powf(T::one() - m)),
        InclusionShape::Vigdergauz(_) => {
            Err(Error::UnsupportedShape("no gap coefficient for Vigdergauz inclusions".into()))
        }
    }
}

/// Upper branch of the boundary curve at `x1`.
pub fn boundary_height<T: Real>(shape: &InclusionShape<T>, x1: T) -> Result<T> {
    let hw = shape.halfwidth();
    let ax = x1.abs();
    let slack = T::lit(8.0) * T::epsilon() * hw;
    if !(ax <= hw + slack) {
        return Err(Error::domain(format!("|x1| = {ax} exceeds half-width {hw}")));
    }
    let ax = ax.min(hw);
    match *shape {
        InclusionShape::Ellipse { a, b } => {
            let s = ax / a;
            Ok(b * (T::one() - s * s).max(T::zero()).sqrt())
        }
        InclusionShape::MConvex { m, r } => {
            let v = (r.powf(m) - ax.powf(m)).max(T::zero());
            Ok(v.powf(T::one() / m))
        }
        InclusionShape::Vigdergauz(v) => {
            if ax == T::zero() {
                return Ok(shape.apex());
            }
            if ax >= hw {
                return Ok(T::zero());
            }
            // |x(t)| decreases monotonically from hw at t = M to 0 at t = 1
            let t = find_root(
                |t| -vigdergauz_boundary_unchecked(&v, t).0 - ax,
                v.big_m,
                T::one(),
                T::lit(4.0) * T::epsilon(),
            )?;
            Ok(vigdergauz_boundary_unchecked(&v, t).1)
        }
    }
}

/// Period cell with half-widths `L₁`, `L₂` and gap `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSpec<T> {
    pub l1: T,
    pub l2: T,
    pub eps: T,
    pub shape: InclusionShape<T>,
}

impl<T: Real> CellSpec<T> {
    /// Validates `2(L₂ − apex) = ε` and `halfwidth < L₁`.
    pub fn new(l1: T, l2: T, eps: T, shape: InclusionShape<T>) -> Result<Self> {
        if !(eps > T::zero()) {
            return Err(Error::domain("gap eps must be positive"));
        }
        if !(l1 > T::zero() && l2 > T::zero()) {
            return Err(Error::domain("cell half-widths must be positive"));
        }
        let apex = shape.apex();
        let mismatch = (T::lit(2.0) * (l2 - apex) - eps).abs();
        if mismatch > T::lit(1e3) * T::epsilon() * l2.max(T::one()) {
            return Err(Error::domain(format!(
                "inconsistent cell: 2(L2 - apex) = {} but eps = {eps}",
                T::lit(2.0) * (l2 - apex)
            )));
        }
        if !(shape.halfwidth() < l1) {
            return Err(Error::domain("inclusion must stay away from the side x1 = ±L1"));
        }
        Ok(Self { l1, l2, eps, shape })
    }

    /// Cell with `L₂ = apex + ε/2` and the given `L₁`.
    pub fn with_gap(shape: InclusionShape<T>, eps: T, l1: T) -> Result<Self> {
        let l2 = shape.apex() + T::lit(0.5) * eps;
        Self::new(l1, l2, eps, shape)
    }

    /// Cell with both half-widths exceeding the inclusion by `ε/2`.
    pub fn tight(shape: InclusionShape<T>, eps: T) -> Result<Self> {
        let l1 = shape.halfwidth() + T::lit(0.5) * eps;
        Self::with_gap(shape, eps, l1)
    }

    pub fn aspect(&self) -> T {
        self.l2 / self.l1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapMode {
    Exact,
    Simplified,
}

/// Thin-gap profile: `δ(x₁) = ε + h₁(x₁) − h₂(x₁)`, with `h₁ ≥ 0` the rise of
/// the upper boundary of the gap and `h₂ = −h₁ ≤ 0` the fall of the lower.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapProfile<T> {
    pub eps: T,
    pub kappa0: T,
    pub m: T,
    pub halfwidth: T,
    pub mode: GapMode,
    shape: InclusionShape<T>,
}

impl<T: Real> GapProfile<T> {
    /// Simplified profile `δ = ε + κ₀|x₁|^m` without a shape behind it.
    pub fn simplified(eps: T, kappa0: T, m: T, halfwidth: T) -> Result<Self> {
        if !(eps > T::zero() && kappa0 > T::zero() && halfwidth > T::zero()) {
            return Err(Error::domain("gap profile needs eps, kappa0, halfwidth > 0"));
        }
        if !(m >= T::lit(2.0)) {
            return Err(Error::domain("gap exponent must be at least 2"));
        }
        let shape = if m == T::lit(2.0) {
            InclusionShape::Ellipse { a: halfwidth, b: kappa0 * halfwidth * halfwidth }
        } else {
            InclusionShape::MConvex { m, r: halfwidth }
        };
        Ok(Self { eps, kappa0, m, halfwidth, mode: GapMode::Simplified, shape })
    }

    pub fn shape(&self) -> &InclusionShape<T> {
        &self.shape
    }

    /// Lower boundary of `D₁` in the gap chart, minus `ε/2`.
    pub fn h1(&self, x1: T) -> Result<T> {
        Ok(-self.h2(x1)?)
    }

    /// Upper boundary of `D₂` in the gap chart, plus `ε/2`.
    pub fn h2(&self, x1: T) -> Result<T> {
        match self.mode {
            GapMode::Simplified => Ok(-T::lit(0.5) * self.kappa0 * x1.abs().powf(self.m)),
            GapMode::Exact => Ok(boundary_height(&self.shape, x1)? - self.shape.apex()),
        }
    }

    /// Gap midline `(h₁+h₂)/2`; identically zero for these symmetric shapes.
    pub fn midline(&self, _x1: T) -> T {
        T::zero()
    }

    pub fn delta(&self, x1: T) -> Result<T> {
        Ok(self.eps + self.h1(x1)? - self.h2(x1)?)
    }

    /// `(δ, δ′, δ″)` of the simplified profile.
    pub fn delta_derivs(&self, x1: T) -> Result<(T, T, T)> {
        if self.mode != GapMode::Simplified {
            return Err(Error::Mode("closed-form derivatives need a simplified profile"));
        }
        let (m, k) = (self.m, self.kappa0);
        let ax = x1.abs();
        let d = self.eps + k * ax.powf(m);
        let d1 = m * k * x1.sign0() * ax.powf(m - T::one());
        let d2 = if m == T::lit(2.0) { T::lit(2.0) * k } else { m * (m - T::one()) * k * ax.powf(m - T::lit(2.0)) };
        Ok((d, d1, d2))
    }
}

/// Gap profile of a cell in the requested mode.
pub fn gap_profile<T: Real>(cell: &CellSpec<T>, mode: GapMode) -> Result<GapProfile<T>> {
    let kappa0 = curvature_at_gap(&cell.shape)?;
    let m = cell.shape.exponent()?;
    Ok(GapProfile { eps: cell.eps, kappa0, m, halfwidth: cell.shape.halfwidth(), mode, shape: cell.shape })
}

/// Largest volume fraction reachable by touching inclusions of exponent `m`.
pub fn max_volume_fraction<T: Real>(m: T) -> Result<T> {
    if !(m >= T::lit(2.0)) {
        return Err(Error::domain("exponent must be at least 2"));
    }
    if m == T::lit(2.0) {
        return Ok(T::FRAC_PI_4());
    }
    let g1 = gamma(T::one() / m)?;
    let g2 = gamma(T::lit(2.0) / m)?;
    Ok(g1 * g1 / (T::lit(2.0) * m * g2))
}

/// Area fraction of the inclusion in the square cell of half-width `L`.
pub fn volume_fraction<T: Real>(shape: &InclusionShape<T>, l: T) -> Result<T> {
    match *shape {
        InclusionShape::Ellipse { a, b } => {
            if a != b {
                return Err(Error::UnsupportedShape("volume fraction needs a circle".into()));
            }
            Ok(T::FRAC_PI_4() * a * a / (l * l))
        }
        InclusionShape::MConvex { m, r } => Ok(max_volume_fraction(m)? * r * r / (l * l)),
        InclusionShape::Vigdergauz(v) => Ok(v.f),
    }
}

/// Inclusion of exponent `m` with volume fraction `f_target` in the square
/// cell of half-width `L`. Returns a circle for `m = 2`.
pub fn match_fraction<T: Real>(f_target: T, m: T, l: T) -> Result<InclusionShape<T>> {
    let fmax = max_volume_fraction(m)?;
    if !(f_target > T::zero() && f_target < fmax) {
        return Err(Error::OutOfRange(format!("volume fraction {f_target} not in (0, {fmax})")));
    }
    let r = l * (f_target / fmax).sqrt();
    if m == T::lit(2.0) {
        InclusionShape::circle(r)
    } else {
        InclusionShape::mconvex(m, r)
    }
}

/// Solves `f = (1−h)/(1+h)` and `h = K(1−p)/K(p)` for the Vigdergauz shape.
pub fn vigdergauz_solve<T: Real>(f: T) -> Result<Vigdergauz<T>> {
    if !(f > T::zero() && f < T::one()) {
        return Err(Error::domain(format!("volume fraction {f} outside (0,1)")));
    }
    let h = (T::one() - f) / (T::one() + f);
    let ratio = |p: T| {
        let q = EllipticParam::new(p).expect("p bracketed inside (0,1)");
        elliptic_k(q.complement()) / elliptic_k(q) - h
    };
    let lo = T::lit(0.5);
    let hi = T::one() - T::lit(1e-12).max(T::lit(4.0) * T::epsilon());
    let p = find_root(ratio, lo, hi, T::lit(4.0) * T::epsilon())?;
    let param = EllipticParam::new(p)?;
    let q = (T::one() - p) / p;
    Ok(Vigdergauz { f, p: param, h, big_m: q * q })
}

/// Residual `K(1−p)/K(p) − h` of a solved Vigdergauz shape.
pub fn vigdergauz_residual<T: Real>(v: &Vigdergauz<T>) -> T {
    elliptic_k(v.p.complement()) / elliptic_k(v.p) - v.h
}

fn vigdergauz_boundary_unchecked<T: Real>(v: &Vigdergauz<T>, t: T) -> (T, T) {
    let scale = T::lit(2.0) * (T::one() + v.h) * elliptic_k(v.p);
    let sx = (T::one() - t).max(T::zero()).sqrt().min(T::one());
    let sy = (T::one() - v.big_m / t).max(T::zero()).sqrt().min(T::one());
    let fx = elliptic_f(sx, v.p).unwrap_or(T::nan());
    let fy = elliptic_f(sy, v.p).unwrap_or(T::nan());
    (-fx / scale, fy / scale)
}

/// Quarter-boundary point for `t ∈ [M, 1]`, running from `(x(M), 0)` with
/// `x(M) < 0` to `(0, y(1))`.
pub fn vigdergauz_boundary<T: Real>(v: &Vigdergauz<T>, t: T) -> Result<(T, T)> {
    if !(t >= v.big_m && t <= T::one()) {
        return Err(Error::domain(format!("t = {t} outside [{}, 1]", v.big_m)));
    }
    Ok(vigdergauz_boundary_unchecked(v, t))
}

/// Closed counterclockwise polygon with `n` vertices (the first vertex is
/// not repeated).
pub fn polygonize<T: Real>(shape: &InclusionShape<T>, n: usize) -> Result<Vec<(T, T)>> {
    if n < 8 {
        return Err(Error::domain("polygonize needs n >= 8"));
    }
    let two_pi = T::lit(2.0) * T::PI();
    match *shape {
        InclusionShape::Ellipse { a, b } => Ok((0..n)
            .map(|k| {
                let th = two_pi * T::lit(k as f64) / T::lit(n as f64);
                (a * th.cos(), b * th.sin())
            })
            .collect()),
        InclusionShape::MConvex { m, r } => {
            let e = T::lit(2.0) / m;
            Ok((0..n)
                .map(|k| {
                    let th = two_pi * T::lit(k as f64) / T::lit(n as f64);
                    let (s, c) = th.sin_cos();
                    (r * c.sign0() * c.abs().powf(e), r * s.sign0() * s.abs().powf(e))
                })
                .collect())
        }
        InclusionShape::Vigdergauz(v) => {
            let nq = n.div_ceil(4);
            // log spacing in t matches the t <-> M/t symmetry of the quarter;
            // the cosine map resolves the square-root behaviour at both ends
            let ln_m = v.big_m.ln();
            let quarter: Vec<(T, T)> = (0..nq)
                .map(|k| {
                    let sigma = T::lit(k as f64) / T::lit(nq as f64);
                    let s = T::lit(0.5) * (T::one() - (T::PI() * sigma).cos());
                    let t = ((T::one() - s) * ln_m).exp().clamp(v.big_m, T::one());
                    let (x, y) = vigdergauz_boundary_unchecked(&v, t);
                    (-x, y)
                })
                .collect();
            let mut out = Vec::with_capacity(4 * nq);
            out.extend(quarter.iter().copied());
            let (x1, y1) = vigdergauz_boundary_unchecked(&v, T::one());
            out.push((-x1, y1));
            out.extend(quarter.iter().skip(1).rev().map(|&(x, y)| (-x, y)));
            out.extend(quarter.iter().map(|&(x, y)| (-x, -y)));
            out.push((x1, -y1));
            out.extend(quarter.iter().skip(1).rev().map(|&(x, y)| (x, -y)));
            Ok(out)
        }
    }
}

/// Signed shoelace area; positive for counterclockwise polygons.
pub fn polygon_area<T: Real>(poly: &[(T, T)]) -> T {
    let n = poly.len();
    let mut acc = T::zero();
    for k in 0..n {
        let (x0, y0) = poly[k];
        let (x1, y1) = poly[(k + 1) % n];
        acc = acc + x0 * y1 - x1 * y0;
    }
    T::lit(0.5) * acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lame_validation() {
        assert!(LameParams::new(1.0, 0.0).is_err());
        assert_eq!(LameParams::new(-1.5, 1.0), Err(Error::Ellipticity("lambda + mu > 0")));
        let l = LameParams::new(1.0_f64, 1.0).unwrap();
        assert!((l.young() - 2.5).abs() < 1e-15);
        assert!((l.poisson() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn curvature_examples() {
        let e = InclusionShape::ellipse(1.0, 2.0).unwrap();
        assert_eq!(curvature_at_gap(&e).unwrap(), 2.0);
        let c = InclusionShape::circle(0.5).unwrap();
        assert_eq!(curvature_at_gap(&c).unwrap(), 2.0);
        let m = InclusionShape::mconvex(4.0, 1.0).unwrap();
        assert_eq!(curvature_at_gap(&m).unwrap(), 0.5);
    }

    #[test]
    fn boundary_height_examples() {
        let e = InclusionShape::ellipse(1.0, 2.0).unwrap();
        assert_eq!(boundary_height(&e, 0.0).unwrap(), 2.0);
        let m = InclusionShape::mconvex(4.0, 1.0).unwrap();
        assert_eq!(boundary_height(&m, 0.0).unwrap(), 1.0);
        let h = boundary_height(&m, 0.5).unwrap();
        assert!((h - (1.0f64 - 1.0 / 16.0).powf(0.25)).abs() < 1e-14);
        assert!(boundary_height(&m, 1.01).is_err());
    }

    #[test]
    fn gap_profile_examples() {
        let c = CellSpec::tight(InclusionShape::circle(1.0_f64).unwrap(), 0.01).unwrap();
        let s = gap_profile(&c, GapMode::Simplified).unwrap();
        assert!((s.delta(0.1).unwrap() - 0.02).abs() < 1e-15);
        let x = gap_profile(&c, GapMode::Exact).unwrap();
        let want = 0.01 + 2.0 * (1.0 - 0.99f64.sqrt());
        assert!((x.delta(0.1).unwrap() - want).abs() < 1e-15);
        let m = CellSpec::tight(InclusionShape::mconvex(4.0, 1.0).unwrap(), 0.01).unwrap();
        let sm = gap_profile(&m, GapMode::Simplified).unwrap();
        assert_eq!(sm.delta(0.0).unwrap(), 0.01);
    }

    #[test]
    fn cell_rejects_inconsistent_gap() {
        let c = InclusionShape::circle(1.0).unwrap();
        assert!(CellSpec::new(1.1, 1.1, 0.01, c).is_err());
        assert!(CellSpec::new(1.0, 1.005, 0.01, c).is_err());
        assert!(CellSpec::new(1.005, 1.005, 0.01, c).is_ok());
    }

    #[test]
    fn fractions() {
        let c = InclusionShape::circle(1.0).unwrap();
        assert!((volume_fraction(&c, 1.0).unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        let r = match_fraction(0.5, 2.0, 1.0).unwrap();
        match r {
            InclusionShape::Ellipse { a, .. } => {
                assert!((a - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-14)
            }
            _ => panic!("expected circle"),
        }
        assert!(match_fraction(0.8, 2.0, 1.0).is_err());
        assert!(volume_fraction(&InclusionShape::ellipse(1.0, 2.0).unwrap(), 1.0).is_err());
    }

    #[test]
    fn vigdergauz_rejects_large_fraction() {
        assert!(matches!(vigdergauz_solve(0.95), Err(Error::NoBracket { .. })));
    }
}
