#![allow(dead_code)]

use densepack::geometry::{CellSpec, InclusionShape, LameParams};

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(n.is_multiple_of(2));
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * k as f64);
    }
    acc * h / 3.0
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

pub fn unit_lame() -> LameParams<f64> {
    LameParams::new(1.0, 1.0).unwrap()
}

pub fn circle_cell(eps: f64) -> CellSpec<f64> {
    CellSpec::tight(InclusionShape::circle(1.0).unwrap(), eps).unwrap()
}
