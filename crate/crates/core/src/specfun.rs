//! Special functions and scalar root finding.
//!
//! The elliptic integrals use the algebraic parameter convention
//! `F(x | p) = ∫₀ˣ ds / √((1 − s²)(1 − p s²))`, where `p` multiplies `s²`
//! directly. It is not a modulus `k` with `p = k²` hidden inside a `sin²θ`.

use crate::error::{Error, Result};
use crate::real::Real;

/// Elliptic parameter `p ∈ (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticParam<T> {
    p: T,
}

impl<T: Real> EllipticParam<T> {
    pub fn new(p: T) -> Result<Self> {
        if p > T::zero() && p < T::one() {
            Ok(Self { p })
        } else {
            Err(Error::domain(format!("elliptic parameter {p} outside (0,1)")))
        }
    }

    pub fn value(self) -> T {
        self.p
    }

    /// Complementary parameter `1 − p`.
    pub fn complement(self) -> Self {
        Self { p: T::one() - self.p }
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for positive arguments.
pub fn gamma<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(Error::domain(format!("gamma requires x > 0, got {x}")));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        // reflection keeps the series argument at or above 1/2
        let pi = T::PI();
        return pi / ((pi * x).sin() * gamma_unchecked(T::one() - x));
    }
    let z = x - T::one();
    let mut acc = T::lit(LANCZOS_COEF[0]);
    for (k, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc = acc + T::lit(c) / (z + T::lit(k as f64));
    }
    let t = z + T::lit(LANCZOS_G) + half;
    (T::lit(2.0) * T::PI()).sqrt() * t.powf(z + half) * (-t).exp() * acc
}

/// Carlson's symmetric integral `R_F(x, y, z)`; at most one argument may be 0.
pub fn carlson_rf<T: Real>(x: T, y: T, z: T) -> Result<T> {
    let zero = T::zero();
    if x < zero || y < zero || z < zero {
        return Err(Error::domain("carlson_rf arguments must be nonnegative"));
    }
    let nzero = [x, y, z].iter().filter(|v| **v == zero).count();
    if nzero > 1 {
        return Err(Error::domain("carlson_rf: at most one argument may vanish"));
    }
    let third = T::one() / T::lit(3.0);
    let quarter = T::lit(0.25);
    // truncation error after the series step scales like errtol^6
    let errtol = (T::lit(4.0) * T::epsilon()).powf(T::one() / T::lit(6.0));
    let (mut xt, mut yt, mut zt) = (x, y, z);
    let mut ave;
    let (mut dx, mut dy, mut dz);
    let mut iter = 0;
    loop {
        let sx = xt.sqrt();
        let sy = yt.sqrt();
        let sz = zt.sqrt();
        let alamb = sx * (sy + sz) + sy * sz;
        xt = quarter * (xt + alamb);
        yt = quarter * (yt + alamb);
        zt = quarter * (zt + alamb);
        ave = third * (xt + yt + zt);
        dx = (ave - xt) / ave;
        dy = (ave - yt) / ave;
        dz = (ave - zt) / ave;
        iter += 1;
        let worst = dx.abs().max(dy.abs()).max(dz.abs());
        if worst <= errtol || iter >= 100 {
            break;
        }
    }
    let e2 = dx * dy - dz * dz;
    let e3 = dx * dy * dz;
    let c1 = T::lit(1.0 / 24.0);
    let c2 = T::lit(0.1);
    let c3 = T::lit(3.0 / 44.0);
    let c4 = T::lit(1.0 / 14.0);
    Ok((T::one() + (c1 * e2 - c2 - c3 * e3) * e2 + c4 * e3) / ave.sqrt())
}

/// Incomplete elliptic integral of the first kind in algebraic form.
pub fn elliptic_f<T: Real>(x: T, p: EllipticParam<T>) -> Result<T> {
    if !(x >= T::zero() && x <= T::one()) {
        return Err(Error::domain(format!("elliptic_f requires x in [0,1], got {x}")));
    }
    if x == T::zero() {
        return Ok(T::zero());
    }
    let x2 = x * x;
    Ok(x * carlson_rf(T::one() - x2, T::one() - p.value() * x2, T::one())?)
}

/// Complete elliptic integral `K(p) = F(1 | p)` by the arithmetic-geometric mean.
pub fn elliptic_k<T: Real>(p: EllipticParam<T>) -> T {
    let mut a = T::one();
    let mut b = (T::one() - p.value()).sqrt();
    for _ in 0..64 {
        let an = T::lit(0.5) * (a + b);
        let bn = (a * b).sqrt();
        let done = (an - bn).abs() <= T::epsilon() * an;
        a = an;
        b = bn;
        if done {
            break;
        }
    }
    T::PI() / (T::lit(2.0) * a)
}

pub const ROOT_MAX_ITER: usize = 200;

/// Bracketed root finder: bisection safeguarded inverse interpolation.
///
/// Stops when the bracket is narrower than `tol` (plus a few ulps of the
/// iterate) or when `f` vanishes exactly.
pub fn find_root<T, F>(mut f: F, lo: T, hi: T, tol: T) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if fa.is_nan() || fb.is_nan() || (fa > T::zero()) == (fb > T::zero()) {
        return Err(Error::NoBracket { lo: lo.to_f64_lossy(), hi: hi.to_f64_lossy() });
    }
    let mut c = b;
    let mut fc = fb;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..ROOT_MAX_ITER {
        if (fb > T::zero()) == (fc > T::zero()) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = two * T::epsilon() * b.abs() + half * tol;
        let xm = half * (c - b);
        if xm.abs() <= tol1 || fb == T::zero() {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut pp, mut q);
            if a == c {
                pp = two * xm * s;
                q = T::one() - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                pp = s * (two * xm * qq * (qq - r) - (b - a) * (r - T::one()));
                q = (qq - T::one()) * (r - T::one()) * (s - T::one());
            }
            if pp > T::zero() {
                q = -q;
            }
            pp = pp.abs();
            let min1 = T::lit(3.0) * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if two * pp < min1.min(min2) {
                e = d;
                d = pp / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if d.abs() > tol1 {
            b = b + d;
        } else {
            b = b + if xm > T::zero() { tol1 } else { -tol1 };
        }
        fb = f(b);
    }
    Err(Error::NoConvergence { iterations: ROOT_MAX_ITER, residual: fb.abs().to_f64_lossy() })
}

const GK_XK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const GK_WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T) {
    let half = T::lit(0.5);
    let c = half * (a + b);
    let h = half * (b - a);
    let fc = f(c);
    let mut kron = fc * T::lit(GK_WK[7]);
    let mut gauss = fc * T::lit(GK_WG[3]);
    for j in 0..7 {
        let dx = h * T::lit(GK_XK[j]);
        let s = f(c - dx) + f(c + dx);
        kron = kron + T::lit(GK_WK[j]) * s;
        if j % 2 == 1 {
            gauss = gauss + T::lit(GK_WG[j / 2]) * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) quadrature of `f` on `[a, b]`.
///
/// Bisects the panel with the largest error estimate until the summed
/// estimate is below `rel_tol·|I|` or the panel budget runs out.
pub fn integrate<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, rel_tol: T) -> Result<T> {
    const MAX_PANELS: usize = 4000;
    let (v, e) = gk15(&mut f, a, b);
    let mut panels = vec![(a, b, v, e)];
    loop {
        let total: T = panels.iter().fold(T::zero(), |s, p| s + p.2);
        let err: T = panels.iter().fold(T::zero(), |s, p| s + p.3);
        let floor = T::lit(50.0) * T::epsilon() * total.abs();
        if err <= rel_tol * total.abs() || err <= floor {
            return Ok(total);
        }
        if panels.len() >= MAX_PANELS {
            return Err(Error::Quadrature { estimate: (err / total.abs()).to_f64_lossy() });
        }
        let (k, _) = panels.iter().enumerate().fold(
            (0, T::neg_infinity()),
            |best, (k, p)| {
                if p.3 > best.1 {
                    (k, p.3)
                } else {
                    best
                }
            },
        );
        let (pa, pb, _, _) = panels.swap_remove(k);
        let mid = T::lit(0.5) * (pa + pb);
        let (v1, e1) = gk15(&mut f, pa, mid);
        let (v2, e2) = gk15(&mut f, mid, pb);
        panels.push((pa, mid, v1, e1));
        panels.push((mid, pb, v2, e2));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_known_values() {
        assert!((gamma(1.0_f64).unwrap() - 1.0).abs() < 1e-14);
        assert!((gamma(0.5_f64).unwrap() - std::f64::consts::PI.sqrt()).abs() < 1e-13);
        assert!((gamma(5.0_f64).unwrap() - 24.0).abs() < 1e-11);
        assert!(gamma(0.0_f64).is_err());
        assert!(gamma(-1.0_f64).is_err());
    }

    #[test]
    fn gamma_f32() {
        let g = gamma(0.5_f32).unwrap();
        assert!((g - std::f32::consts::PI.sqrt()).abs() < 1e-5);
    }

    #[test]
    fn elliptic_small_cases() {
        let p = EllipticParam::new(0.5).unwrap();
        assert_eq!(elliptic_f(0.0, p).unwrap(), 0.0);
        assert!(elliptic_f(1.1, p).is_err());
        assert!(EllipticParam::new(1.0).is_err());
        assert!(EllipticParam::new(0.0).is_err());
        let tiny = EllipticParam::new(1e-14).unwrap();
        assert!((elliptic_k(tiny) - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!((elliptic_f(1.0, tiny).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn find_root_basics() {
        let r = find_root(|x: f64| x * x - 2.0, 1.0, 2.0, 1e-12).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
        let z = find_root(|x: f64| x, -1.0, 1.0, 1e-12).unwrap();
        assert!(z.abs() < 1e-12);
        assert!(matches!(find_root(|x: f64| x * x + 1.0, -1.0, 1.0, 1e-12), Err(Error::NoBracket { .. })));
    }

    #[test]
    fn integrate_polynomial_and_endpoint_singularity() {
        let v = integrate(|x: f64| x * x, 0.0, 3.0, 1e-12).unwrap();
        assert!((v - 9.0).abs() < 1e-12);
        let s = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10).unwrap();
        assert!((s - 2.0).abs() < 1e-8);
    }
}
