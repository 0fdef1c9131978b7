mod common;

use common::{rel_err, simpson, unit_lame};
use densepack::asymptotics::{
    eps_from_fraction_gap, equal_fraction_delta, gap_integral, leading_energy, leading_moduli, moduli_from_fraction,
    shape_factor, slope_window, summarize, sweep_passes, sweep_report, CellTemplate, SolverConfig, SweepSummary,
};
use densepack::auxfield::Load;
use densepack::fem::effective_moduli;
use densepack::geometry::{curvature_at_gap, match_fraction, InclusionShape};
use densepack::{CellSpec64, Error, LameParams64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// `(2/√(κ₀ε))·atan(s·√(κ₀/ε))`, the closed form of the m = 2 gap integral.
fn atan_oracle(kappa0: f64, eps: f64, s: f64) -> f64 {
    2.0 / (kappa0 * eps).sqrt() * (s * (kappa0 / eps).sqrt()).atan()
}

#[test]
fn leading_moduli_examples() {
    let lame = unit_lame();
    let square = CellSpec64::new(1.005, 1.005, 0.01, InclusionShape::circle(1.0).unwrap()).unwrap();
    let (mu, e) = leading_moduli(2.0, 1.0, &lame, &square).unwrap();
    assert!(rel_err(mu.value(1e-4), 100.0 * PI) < 1e-14);
    for eps in [1e-2, 1e-4, 1e-6] {
        assert!(rel_err(e.value(eps) / mu.value(eps), 2.5) < 1e-14);
    }
    let (_, e4) = leading_moduli(4.0, 0.5, &lame, &square).unwrap();
    let l2 = leading_energy(Load::Extension, 4.0, 0.5, &lame).unwrap();
    assert!(rel_err(e4.value(1e-4), 2.5 / 3.0 * l2.value(1e-4)) < 1e-14);
    assert!((e4.value(1e-4) / 2.5 - 2641.7).abs() < 0.1);
    assert_eq!(mu.exponent, 0.5);
    assert_eq!(e4.exponent, 0.75);
}

#[test]
fn exponent_two_is_the_limit_of_the_general_formula() {
    for kappa0 in [0.3, 1.0, 2.0] {
        let near = shape_factor(2.0 + 1e-9, kappa0);
        assert!(rel_err(near, PI / kappa0.sqrt()) < 1e-8);
    }
}

#[test]
fn leading_moduli_follow_energy_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..100 {
        let mu = rng.gen_range(0.1..5.0);
        let lame = LameParams64::new(rng.gen_range(-0.9..4.0) * mu, mu).unwrap();
        let m = if rng.gen_bool(0.5) { 2.0 } else { rng.gen_range(2.1..8.0) };
        let kappa0 = rng.gen_range(0.1..3.0);
        let eps = 10f64.powf(rng.gen_range(-5.0..-1.0));
        let shape = InclusionShape::circle(1.0).unwrap();
        let cell = CellSpec64::with_gap(shape, eps, rng.gen_range(1.01..3.0)).unwrap();
        let e1 = leading_energy(Load::Shear, m, kappa0, &lame).unwrap().value(eps);
        let e2 = leading_energy(Load::Extension, m, kappa0, &lame).unwrap().value(eps);
        let (mu_s, e_s) = effective_moduli(e1, e2, &cell, &lame);
        let (lm, le) = leading_moduli(m, kappa0, &lame, &cell).unwrap();
        assert!(rel_err(mu_s, lm.value(eps)) <= 1e-14);
        assert!(rel_err(e_s, le.value(eps)) <= 1e-14);
    }
}

#[test]
fn remark_values() {
    let lame = unit_lame();
    let (mu2, _) = moduli_from_fraction(2.0, &lame, 0.01).unwrap();
    assert!(rel_err(mu2, 12.53 * PI) <= 5e-3, "{}", mu2 / PI);
    let d4 = equal_fraction_delta(4.0f64, 0.01).unwrap();
    assert!((d4 - 0.151639).abs() < 1e-6);
    let (mu4, e4) = moduli_from_fraction(4.0, &lame, d4).unwrap();
    assert!(rel_err(mu4, 5.56 * PI) <= 1.5e-2, "{}", mu4 / PI);
    assert!(rel_err(e4 / mu4, lame.young()) < 1e-14);
    let (quarter, _) = moduli_from_fraction(2.0, &lame, 0.04).unwrap();
    assert!(rel_err(quarter, 0.5 * mu2) < 1e-15);
    assert!(matches!(moduli_from_fraction(2.0, &lame, 0.0), Err(Error::Domain(_))));
}

#[test]
fn fraction_and_gap_forms_differ_by_a_fixed_factor() {
    // Converting δ_f to ε and evaluating the gap form reproduces the fraction
    // form only up to 2^{1−1/m}; the factor is exact in the δ_f → 0 limit.
    let lame = unit_lame();
    for m in [2.0, 4.0] {
        let mut prev = f64::INFINITY;
        for delta in [1e-2, 1e-4, 1e-6] {
            let (frac, _) = moduli_from_fraction(m, &lame, delta).unwrap();
            let eps = eps_from_fraction_gap(m, delta, 1.0).unwrap();
            let f = densepack::geometry::max_volume_fraction(m).unwrap() - delta;
            let shape = match_fraction(f, m, 1.0).unwrap();
            let cell = CellSpec64::new(1.0, 1.0, eps, shape).unwrap();
            let kappa0 = curvature_at_gap(&shape).unwrap();
            let (gap, _) = leading_moduli(m, kappa0, &lame, &cell).unwrap();
            let dev = (frac / gap.value(eps) / 2f64.powf(1.0 - 1.0 / m) - 1.0).abs();
            assert!(dev < prev);
            prev = dev;
        }
        assert!(prev < 1e-5, "m={m}: {prev}");
    }
}

#[test]
fn gap_integral_matches_arctangent() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let eps = 10f64.powf(rng.gen_range(-6.0..-1.0));
        let s = rng.gen_range(0.05..2.0);
        let kappa0 = rng.gen_range(0.2..4.0);
        let g = gap_integral(2.0, kappa0, eps, s).unwrap();
        assert!(rel_err(g.numeric, atan_oracle(kappa0, eps, s)) <= 1e-12);
        assert!(rel_err(g.leading, PI / (kappa0 * eps).sqrt()) < 1e-15);
    }
    let g = gap_integral(2.0f64, 1.0, 1e-4, 0.5).unwrap();
    assert!((g.numeric - 310.159).abs() < 1e-3);
    assert!((g.residual + 4.0).abs() < 1e-3);
}

#[test]
fn gap_integral_general_exponent_matches_quadrature() {
    for &(m, kappa0, eps, s) in
        &[(4.0f64, 0.5, 1e-3, 0.5), (3.0, 2.0 / 3.0, 1e-2f64, 0.4), (6.0, 1.0 / 3.0, 1e-4, 0.5f64)]
    {
        // stretch x = w·sinh(u) so the ε-wide core and the tail both get points
        let w = (eps / kappa0).powf(1.0 / m);
        let umax = (s / w).asinh();
        let oracle = 2.0
            * simpson(
                |u| {
                    let x = w * u.sinh();
                    w * u.cosh() / (eps + kappa0 * x.powf(m))
                },
                0.0,
                umax,
                200_000,
            );
        let g = gap_integral(m, kappa0, eps, s).unwrap();
        assert!(rel_err(g.numeric, oracle) <= 1e-10, "m={m}");
    }
}

#[test]
fn quartic_residual_is_bounded() {
    let res: Vec<f64> = [1e-3, 1e-4, 1e-5].iter().map(|&e| gap_integral(4.0, 0.5, e, 0.5).unwrap().residual).collect();
    let max = res.iter().cloned().fold(f64::MIN, f64::max);
    let min = res.iter().cloned().fold(f64::MAX, f64::min);
    assert!((max - min).abs() < 0.1 * min.abs(), "{res:?}");
}

#[test]
fn gap_integral_rejects_bad_input() {
    assert!(gap_integral(2.0, 1.0, -1e-3, 0.5).is_err());
    assert!(gap_integral(2.0, 0.0, 1e-3, 0.5).is_err());
    assert!(gap_integral(1.5, 1.0, 1e-3, 0.5).is_err());
}

#[test]
fn sweep_rows_are_consistent() {
    let lame = unit_lame();
    let template = CellTemplate { shape: InclusionShape::circle(1.0).unwrap(), l1: None };
    let cfg = SolverConfig { n1: 96, n2: 8, ..SolverConfig::default() };
    // n2 = 8 is the smallest row count meeting the ε/8 rule
    let eps_list = [0.04, 0.02, 0.01, 0.005];
    let rows = sweep_report(&template, &lame, &eps_list, &cfg);
    assert_eq!(rows.len(), 4);
    let ok: Vec<_> = rows.iter().map(|r| r.as_ref().unwrap()).collect();
    for (r, &eps) in ok.iter().zip(&eps_list) {
        assert_eq!(r.eps, eps);
        assert_eq!(r.res1, r.e1 - r.lead1);
        assert_eq!(r.res2, r.e2 - r.lead2);
        let cell = template.cell(eps).unwrap();
        let (mu, e) = effective_moduli(r.e1, r.e2, &cell, &lame);
        assert_eq!((mu, e), (r.mu_star, r.e_star));
        assert!(r.e1 <= r.aux_energy[0] && r.e2 <= r.aux_energy[1]);
        assert!(r.dofs > 0 && r.iters > 0);
    }
    let bad = SolverConfig { n2: 4, ..cfg };
    let rows = sweep_report(&template, &lame, &[0.04, 0.005], &bad);
    assert!(rows.iter().all(|r| matches!(r, Err(Error::Resolution(_)))));
}

#[test]
fn summary_needs_three_rows_and_checks_windows() {
    assert!(summarize(&[]).is_err());
    assert_eq!(slope_window(2.0), (-0.55, -0.45));
    let (lo, hi) = slope_window(4.0);
    assert!((lo + 0.78).abs() < 1e-12 && (hi + 0.72).abs() < 1e-12);
    let good = SweepSummary { slope_e1: -0.5, spread_res1: 1.2, slope_e2: -0.5, spread_res2: 2.0 };
    assert!(sweep_passes(&good, 2.0));
    assert!(!sweep_passes(&good, 4.0));
    assert!(!sweep_passes(&SweepSummary { spread_res2: 2.6, ..good }, 2.0));
}

proptest! {
    #[test]
    fn gap_integral_monotone(
        eps in 1e-5f64..1e-1,
        s in 0.05f64..1.0,
        m in prop_oneof![Just(2.0f64), 2.5f64..8.0],
        kappa0 in 0.2f64..3.0,
    ) {
        let base = gap_integral(m, kappa0, eps, s).unwrap().numeric;
        prop_assert!(base > 0.0);
        prop_assert!(gap_integral(m, kappa0, eps, 1.1 * s).unwrap().numeric > base);
        prop_assert!(gap_integral(m, kappa0, 1.1 * eps, s).unwrap().numeric < base);
    }
}
