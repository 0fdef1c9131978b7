//! Auxiliary gap fields `u_i = ū_i + ũ_i`.
//!
//! Everything here lives in the gap chart: `x₁` along the gap and `y`, the
//! height above the gap midline, so the gap is `|y| < δ(x₁)/2`. The Keller
//! part `ū_i` ramps linearly from 0 on the lower boundary to `ψ_i` on the
//! upper one; the corrector `ũ_i` vanishes on both and cancels the leading
//! part of the Lamé residual of the ramp.
//!
//! With `s₀ = |x₁|^{m−2}` and `s₁ = sgn(x₁)|x₁|^{m−1}` the fields are
//!
//! ```text
//! i = 1:  ū = (k, 0),  ũ = q·(A y s₀, B s₁)
//! i = 2:  ū = (0, k),  ũ = q·(C s₁, −D y s₀)
//! k = y/δ + 1/2,  q = y²/δ² − 1/4
//! ```

use crate::error::{Error, Result};
use crate::geometry::{GapMode, GapProfile, LameParams};
use crate::real::{even_pow, odd_pow, scaled_even_pow, scaled_odd_pow, Real};

/// Which unit load the cell problem carries: `ψ₁ = (1,0)` or `ψ₂ = (0,1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Load {
    Shear,
    Extension,
}

impl Load {
    pub fn from_index(i: usize) -> Result<Self> {
        match i {
            1 => Ok(Load::Shear),
            2 => Ok(Load::Extension),
            _ => Err(Error::domain(format!("load index must be 1 or 2, got {i}"))),
        }
    }

    pub fn index(self) -> usize {
        match self {
            Load::Shear => 1,
            Load::Extension => 2,
        }
    }

    /// Component of the displacement that carries the load (0-based).
    pub fn component(self) -> usize {
        self.index() - 1
    }

    pub fn psi<T: Real>(self) -> [T; 2] {
        match self {
            Load::Shear => [T::one(), T::zero()],
            Load::Extension => [T::zero(), T::one()],
        }
    }
}

/// Value, gradient and Hessian of a plane vector field.
///
/// `grad[k][j] = ∂_j u^{(k)}` and `hess[k][a][b] = ∂_a ∂_b u^{(k)}`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AuxEval<T> {
    pub value: [T; 2],
    pub grad: [[T; 2]; 2],
    pub hess: [[[T; 2]; 2]; 2],
}

impl<T: Real> AuxEval<T> {
    fn zero() -> Self {
        Self { value: [T::zero(); 2], grad: [[T::zero(); 2]; 2], hess: [[[T::zero(); 2]; 2]; 2] }
    }

    fn add(&self, o: &Self) -> Self {
        let mut r = *self;
        for k in 0..2 {
            r.value[k] = r.value[k] + o.value[k];
            for a in 0..2 {
                r.grad[k][a] = r.grad[k][a] + o.grad[k][a];
                for b in 0..2 {
                    r.hess[k][a][b] = r.hess[k][a][b] + o.hess[k][a][b];
                }
            }
        }
        r
    }
}

/// Keller ramp and corrector evaluated separately.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxParts<T> {
    pub keller: AuxEval<T>,
    pub corrector: AuxEval<T>,
}

impl<T: Real> AuxParts<T> {
    pub fn total(&self) -> AuxEval<T> {
        self.keller.add(&self.corrector)
    }
}

/// Remainder terms dropped from the cancellation identities, their
/// potentials in `y` (`∂_y T = R`) and the Lamé residual of `u_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualParts<T> {
    pub r11_11: T,
    pub r12_12: T,
    pub r22_11: T,
    pub r21_12: T,
    pub t11_11: T,
    pub t12_12: T,
    pub t22_11: T,
    pub t21_12: T,
    pub residual: [T; 2],
}

/// Energy density blocks of `(C∇u, ∇u)`.
///
/// `i_kj = (C∇u)_kj · ∂_j u^{(k)}`; `i12_1..i12_4` split `μ·(∂₁u¹ + ∂₂u¹ +
/// ∂₁u² + ∂₂u²)·∂₂u¹` term by term. The `keller_*` entries are the three
/// products that are not bounded by `C/δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyTerms<T> {
    pub i11: T,
    pub i12: T,
    pub i21: T,
    pub i22: T,
    pub i12_1: T,
    pub i12_2: T,
    pub i12_3: T,
    pub i12_4: T,
    pub keller_mixed: T,
    pub keller_square: T,
    pub keller_cross: T,
}

impl<T: Real> EnergyTerms<T> {
    pub fn block_sum(&self) -> T {
        self.i11 + self.i12 + self.i21 + self.i22
    }
}

/// Scalar function with its first and second partials in `(x₁, y)`.
#[derive(Clone, Copy)]
struct Jet<T> {
    v: T,
    d1: T,
    d2: T,
    d11: T,
    d12: T,
    d22: T,
}

impl<T: Real> Jet<T> {
    fn mul(self, o: Self) -> Self {
        Jet {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + self.v * o.d2,
            d11: self.d11 * o.v + T::lit(2.0) * self.d1 * o.d1 + self.v * o.d11,
            d12: self.d12 * o.v + self.d1 * o.d2 + self.d2 * o.d1 + self.v * o.d12,
            d22: self.d22 * o.v + T::lit(2.0) * self.d2 * o.d2 + self.v * o.d22,
        }
    }

    fn scale(self, c: T) -> Self {
        Jet { v: self.v * c, d1: self.d1 * c, d2: self.d2 * c, d11: self.d11 * c, d12: self.d12 * c, d22: self.d22 * c }
    }

    fn of_x1(v: T, d1: T, d11: T) -> Self {
        let z = T::zero();
        Jet { v, d1, d2: z, d11, d12: z, d22: z }
    }

    fn y(y: T) -> Self {
        let z = T::zero();
        Jet { v: y, d1: z, d2: T::one(), d11: z, d12: z, d22: z }
    }

    fn write(self, out: &mut AuxEval<T>, k: usize) {
        out.value[k] = self.v;
        out.grad[k] = [self.d1, self.d2];
        out.hess[k] = [[self.d11, self.d12], [self.d12, self.d22]];
    }
}

/// Coefficients of the correctors for exponent `m` and curvature `κ₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectorCoefs<T> {
    pub a1: T,
    pub b1: T,
    pub c2: T,
    pub d2: T,
}

pub fn corrector_coefs<T: Real>(m: T, kappa0: T, lame: &LameParams<T>) -> CorrectorCoefs<T> {
    let (l, mu) = (lame.lambda, lame.mu);
    let lp = lame.p_modulus();
    let half = T::lit(0.5);
    let three = T::lit(3.0);
    let mm1 = m * (m - T::one()) * half;
    CorrectorCoefs {
        a1: (T::lit(2.0) - mu / lp) * kappa0 / three * mm1,
        b1: (l + mu) / lp * kappa0 * m * half,
        c2: (l + mu) / mu * kappa0 * m * half,
        d2: l / (three * mu) * kappa0 * mm1,
    }
}

struct Local<T> {
    k: Jet<T>,
    q: Jet<T>,
    ys0: Jet<T>,
    s1: Jet<T>,
    delta: T,
    /// `κ₀²m²|x₁|^{2m−2}`, i.e. `δ′²`.
    dprime_sq: T,
}

fn local<T: Real>(x1: T, y: T, gap: &GapProfile<T>, check: bool) -> Result<Local<T>> {
    if gap.mode != GapMode::Simplified {
        return Err(Error::Mode("auxiliary fields need a simplified gap profile"));
    }
    let (d, d1, d11) = gap.delta_derivs(x1)?;
    let slack = T::one() + T::lit(64.0) * T::epsilon();
    if check && !(x1.abs() <= T::lit(0.5) * gap.halfwidth * slack) {
        return Err(Error::domain(format!("x1 = {x1} outside |x1| <= {}", T::lit(0.5) * gap.halfwidth)));
    }
    if check && !(y.abs() <= T::lit(0.5) * d * slack) {
        return Err(Error::domain(format!("y = {y} outside the gap |y| <= {}", d / T::lit(2.0))));
    }
    let m = gap.m;
    let two = T::lit(2.0);
    let d2 = d * d;
    let d3 = d2 * d;
    let d4 = d3 * d;
    let k = Jet {
        v: y / d + T::lit(0.5),
        d1: -y * d1 / d2,
        d2: T::one() / d,
        d11: -y * (d11 / d2 - two * d1 * d1 / d3),
        d12: -d1 / d2,
        d22: T::zero(),
    };
    let yy = y * y;
    let q = Jet {
        v: yy / d2 - T::lit(0.25),
        d1: -two * yy * d1 / d3,
        d2: two * y / d2,
        d11: -two * yy * (d11 / d3 - T::lit(3.0) * d1 * d1 / d4),
        d12: -T::lit(4.0) * y * d1 / d3,
        d22: two / d2,
    };
    let one = T::one();
    let three = T::lit(3.0);
    let s0 = Jet::of_x1(
        even_pow(x1, m - two),
        scaled_odd_pow(m - two, x1, m - three),
        scaled_even_pow((m - two) * (m - three), x1, m - T::lit(4.0)),
    );
    let s1 = Jet::of_x1(
        odd_pow(x1, m - one),
        scaled_even_pow(m - one, x1, m - two),
        scaled_odd_pow((m - one) * (m - two), x1, m - three),
    );
    Ok(Local { k, q, ys0: Jet::y(y).mul(s0), s1, delta: d, dprime_sq: d1 * d1 })
}

/// Keller ramp and corrector at `(x₁, y)`.
pub fn eval_aux_parts<T: Real>(
    load: Load,
    point: (T, T),
    lame: &LameParams<T>,
    gap: &GapProfile<T>,
) -> Result<AuxParts<T>> {
    parts_at(load, point, lame, gap, true)
}

/// The same closed forms without the `Ω_{r/2}` domain check, for probing
/// the printed formulas away from the gap.
pub fn eval_aux_formula<T: Real>(
    load: Load,
    point: (T, T),
    lame: &LameParams<T>,
    gap: &GapProfile<T>,
) -> Result<AuxParts<T>> {
    parts_at(load, point, lame, gap, false)
}

fn parts_at<T: Real>(
    load: Load,
    point: (T, T),
    lame: &LameParams<T>,
    gap: &GapProfile<T>,
    check: bool,
) -> Result<AuxParts<T>> {
    let loc = local(point.0, point.1, gap, check)?;
    let c = corrector_coefs(gap.m, gap.kappa0, lame);
    let mut keller = AuxEval::zero();
    let mut corrector = AuxEval::zero();
    match load {
        Load::Shear => {
            loc.k.write(&mut keller, 0);
            loc.q.mul(loc.ys0).scale(c.a1).write(&mut corrector, 0);
            loc.q.mul(loc.s1).scale(c.b1).write(&mut corrector, 1);
        }
        Load::Extension => {
            loc.k.write(&mut keller, 1);
            loc.q.mul(loc.s1).scale(c.c2).write(&mut corrector, 0);
            loc.q.mul(loc.ys0).scale(-c.d2).write(&mut corrector, 1);
        }
    }
    Ok(AuxParts { keller, corrector })
}

/// The auxiliary field `u_i = ū_i + ũ_i` at `(x₁, y)` with `|x₁| ≤ r/2`.
pub fn eval_aux<T: Real>(load: Load, point: (T, T), lame: &LameParams<T>, gap: &GapProfile<T>) -> Result<AuxEval<T>> {
    Ok(eval_aux_parts(load, point, lame, gap)?.total())
}

/// `(R, T)` pairs at a point: the common factor `κ₀²m²|x₁|^{2m−2}/δ³` times
/// `2y` (remainders) or `y²` (potentials).
fn remainders<T: Real>(loc: &Local<T>, y: T, lame: &LameParams<T>) -> ResidualParts<T> {
    let base = loc.dprime_sq / (loc.delta * loc.delta * loc.delta);
    let r = T::lit(2.0) * base * y;
    let t = base * y * y;
    let f1 = (lame.lambda + lame.mu) / lame.p_modulus();
    let f2 = (lame.lambda + lame.mu) / lame.mu;
    ResidualParts {
        r11_11: r,
        r12_12: -f1 * r,
        r22_11: r,
        r21_12: -f2 * r,
        t11_11: t,
        t12_12: -f1 * t,
        t22_11: t,
        t21_12: -f2 * t,
        residual: [T::zero(); 2],
    }
}

/// Remainders, potentials and the reduced Lamé residual `ℒ_{λ,μ} u_i`.
pub fn lame_residual<T: Real>(
    load: Load,
    point: (T, T),
    lame: &LameParams<T>,
    gap: &GapProfile<T>,
) -> Result<ResidualParts<T>> {
    let loc = local(point.0, point.1, gap, true)?;
    let parts = eval_aux_parts(load, point, lame, gap)?;
    let h = &parts.corrector.hess;
    let mut out = remainders(&loc, point.1, lame);
    let (l, mu) = (lame.lambda, lame.mu);
    let lp = lame.p_modulus();
    out.residual = match load {
        Load::Shear => {
            [lp * h[0][0][0] + lp * out.r11_11 + (l + mu) * out.r12_12, mu * h[1][0][0] + (l + mu) * h[0][0][1]]
        }
        Load::Extension => {
            [lp * h[0][0][0] + (l + mu) * h[1][0][1], mu * h[1][0][0] + mu * out.r22_11 + (l + mu) * out.r21_12]
        }
    };
    Ok(out)
}

/// Full Lamé operator `∇·C e(u)` applied to a field from its Hessian.
pub fn lame_operator<T: Real>(u: &AuxEval<T>, lame: &LameParams<T>) -> [T; 2] {
    let (l, mu) = (lame.lambda, lame.mu);
    let lp = lame.p_modulus();
    let h = &u.hess;
    [
        lp * h[0][0][0] + mu * h[0][1][1] + (l + mu) * h[1][0][1],
        mu * h[1][0][0] + lp * h[1][1][1] + (l + mu) * h[0][0][1],
    ]
}

/// The two combinations that vanish identically, each paired with the
/// largest absolute constituent term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cancellation<T> {
    pub c1: T,
    pub c2: T,
    pub scale1: T,
    pub scale2: T,
}

pub fn cancellation_check<T: Real>(
    load: Load,
    point: (T, T),
    lame: &LameParams<T>,
    gap: &GapProfile<T>,
) -> Result<Cancellation<T>> {
    let loc = local(point.0, point.1, gap, true)?;
    let parts = eval_aux_parts(load, point, lame, gap)?;
    let rem = remainders(&loc, point.1, lame);
    let hb = &parts.keller.hess;
    let ht = &parts.corrector.hess;
    let (l, mu) = (lame.lambda, lame.mu);
    let lp = lame.p_modulus();
    let lm = l + mu;
    let terms1: [T; 5];
    let terms2: [T; 5];
    match load {
        Load::Shear => {
            terms1 = [lp * hb[0][0][0], -lp * rem.r11_11, mu * ht[0][1][1], lm * ht[1][0][1], -lm * rem.r12_12];
            terms2 = [lp * ht[1][1][1], lm * hb[0][0][1], T::zero(), T::zero(), T::zero()];
        }
        Load::Extension => {
            terms1 = [lm * hb[1][0][1], mu * ht[0][1][1], T::zero(), T::zero(), T::zero()];
            terms2 = [lp * ht[1][1][1], mu * hb[1][0][0], -mu * rem.r22_11, lm * ht[0][0][1], -lm * rem.r21_12];
        }
    }
    let sum = |t: &[T; 5]| t.iter().fold(T::zero(), |s, &v| s + v);
    let big = |t: &[T; 5]| t.iter().fold(T::zero(), |s, &v| s.max(v.abs()));
    Ok(Cancellation { c1: sum(&terms1), c2: sum(&terms2), scale1: big(&terms1), scale2: big(&terms2) })
}

/// `(C∇u, ∇u)` from a displacement gradient.
pub fn energy_density<T: Real>(grad: &[[T; 2]; 2], lame: &LameParams<T>) -> T {
    let s = stress(grad, lame);
    let mut e = T::zero();
    for k in 0..2 {
        for j in 0..2 {
            e = e + s[k][j] * grad[k][j];
        }
    }
    e
}

fn stress<T: Real>(g: &[[T; 2]; 2], lame: &LameParams<T>) -> [[T; 2]; 2] {
    let div = g[0][0] + g[1][1];
    let (l, mu) = (lame.lambda, lame.mu);
    let shear = mu * (g[0][1] + g[1][0]);
    [[l * div + T::lit(2.0) * mu * g[0][0], shear], [shear, l * div + T::lit(2.0) * mu * g[1][1]]]
}

pub fn energy_density_terms<T: Real>(
    load: Load,
    point: (T, T),
    lame: &LameParams<T>,
    gap: &GapProfile<T>,
) -> Result<EnergyTerms<T>> {
    let parts = eval_aux_parts(load, point, lame, gap)?;
    let u = parts.total();
    let g = &u.grad;
    let s = stress(g, lame);
    let mu = lame.mu;
    let c = load.component();
    let gb = &parts.keller.grad;
    let gt = &parts.corrector.grad;
    Ok(EnergyTerms {
        i11: s[0][0] * g[0][0],
        i12: s[0][1] * g[0][1],
        i21: s[1][0] * g[1][0],
        i22: s[1][1] * g[1][1],
        i12_1: mu * g[0][0] * g[0][1],
        i12_2: mu * g[0][1] * g[0][1],
        i12_3: mu * g[1][0] * g[0][1],
        i12_4: mu * g[1][1] * g[0][1],
        keller_mixed: gb[c][0] * gb[c][1],
        keller_square: gb[c][1] * gb[c][1],
        keller_cross: gb[c][1] * gt[1 - c][1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gap(eps: f64, kappa: f64, m: f64) -> GapProfile<f64> {
        GapProfile::simplified(eps, kappa, m, 1.0).unwrap()
    }

    #[test]
    fn centre_value_and_slope() {
        let lame = LameParams::new(1.0, 1.0).unwrap();
        let g = gap(0.1, 1.0, 2.0);
        let u = eval_aux(Load::Shear, (0.0, 0.0), &lame, &g).unwrap();
        assert_eq!(u.value, [0.5, 0.0]);
        let p = eval_aux_parts(Load::Shear, (0.0, 0.0), &lame, &g).unwrap();
        assert!((p.keller.grad[0][1] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_values() {
        let lame = LameParams::new(2.0, 0.7).unwrap();
        let g = gap(0.01, 1.0, 2.0);
        let x1 = 0.2;
        let d = g.delta(x1).unwrap();
        for load in [Load::Shear, Load::Extension] {
            let lo = eval_aux(load, (x1, -0.5 * d), &lame, &g).unwrap();
            let hi = eval_aux(load, (x1, 0.5 * d), &lame, &g).unwrap();
            assert_eq!(lo.value, [0.0, 0.0]);
            assert_eq!(hi.value, load.psi());
        }
    }

    #[test]
    fn extension_corrector_slope_example() {
        let lame = LameParams::new(1.0, 1.0).unwrap();
        let g = gap(0.01, 1.0, 2.0);
        // (0.05, 0.01) lies above the gap (δ/2 = 0.00625), so only the
        // unchecked formula can be probed there
        let x = (0.05, 0.01);
        let p = eval_aux_formula(Load::Extension, x, &lame, &g).unwrap();
        assert!((p.corrector.grad[0][1] - 12.8).abs() < 1e-10);
        assert!(eval_aux(Load::Extension, x, &lame, &g).is_err());
    }

    #[test]
    fn outside_domain_and_mode() {
        let lame = LameParams::new(1.0, 1.0).unwrap();
        let g = gap(0.01, 1.0, 2.0);
        assert!(eval_aux(Load::Shear, (0.6, 0.0), &lame, &g).is_err());
        let cell =
            crate::geometry::CellSpec::tight(crate::geometry::InclusionShape::circle(1.0).unwrap(), 0.01).unwrap();
        let ex = crate::geometry::gap_profile(&cell, GapMode::Exact).unwrap();
        assert!(matches!(eval_aux(Load::Shear, (0.0, 0.0), &lame, &ex), Err(Error::Mode(_))));
    }

    #[test]
    fn remainder_vanishes_on_axis() {
        let lame = LameParams::new(1.0, 1.0).unwrap();
        let g = gap(0.01, 1.0, 2.0);
        let r = lame_residual(Load::Shear, (0.0, 0.002), &lame, &g).unwrap();
        assert_eq!(r.r11_11, 0.0);
    }

    #[test]
    fn keller_square_at_centre() {
        let lame = LameParams::new(1.0, 1.0).unwrap();
        let g = gap(0.01, 1.0, 2.0);
        let e = energy_density_terms(Load::Shear, (0.0, 0.0), &lame, &g).unwrap();
        assert!((lame.mu * e.keller_square - 1e4).abs() < 1e-8);
    }
}
