//! CSV rows for moduli and sweeps.

use crate::asymptotics::{SweepRow, SweepSummary};

pub const HEADER: &str = "eps,E1,E2,lead1,lead2,res1,res2,mu_star,e_star,sup_grad_v,sup_grad_w,dofs,iters";

pub fn sweep_header() -> String {
    format!("{HEADER},status")
}

/// Default significant digits: enough for doubles to round-trip exactly.
pub const FULL_PRECISION: usize = 17;

/// `%.17g`.
pub fn fmt_f64(x: f64) -> String {
    fmt_g(x, FULL_PRECISION)
}

/// C-style `%.{sig}g`: `sig` significant digits (clamped to 1..=17),
/// trailing zeros trimmed.
pub fn fmt_g(x: f64, sig: usize) -> String {
    let sig = sig.clamp(1, FULL_PRECISION);
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.prec$e}", prec = sig - 1);
    let (mant, exp) = s.split_once('e').expect("exponent form");
    let e: i32 = exp.parse().expect("integer exponent");
    let trim = |t: &str| -> String {
        if t.contains('.') {
            t.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            t.to_string()
        }
    };
    if e >= -4 && e < sig as i32 {
        let decimals = (sig as i32 - 1 - e) as usize;
        trim(&format!("{x:.decimals$}"))
    } else {
        let sign = if e < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mant), e.abs())
    }
}

pub fn row_fields(r: &SweepRow) -> Vec<String> {
    row_fields_with(r, FULL_PRECISION)
}

pub fn row_fields_with(r: &SweepRow, sig: usize) -> Vec<String> {
    let mut f: Vec<String> =
        [r.eps, r.e1, r.e2, r.lead1, r.lead2, r.res1, r.res2, r.mu_star, r.e_star, r.sup_grad_v, r.sup_grad_w]
            .iter()
            .map(|&v| fmt_g(v, sig))
            .collect();
    f.push(r.dofs.to_string());
    f.push(r.iters.to_string());
    f
}

pub fn format_row(r: &SweepRow) -> String {
    format_row_with(r, FULL_PRECISION)
}

pub fn format_row_with(r: &SweepRow, sig: usize) -> String {
    row_fields_with(r, sig).join(",")
}

/// A sweep line with status `OK`, or the `ε` and `FAILED` with empty cells.
pub fn format_sweep_line(eps: f64, row: Option<&SweepRow>) -> String {
    format_sweep_line_with(eps, row, FULL_PRECISION)
}

pub fn format_sweep_line_with(eps: f64, row: Option<&SweepRow>, sig: usize) -> String {
    match row {
        Some(r) => format!("{},OK", format_row_with(r, sig)),
        None => {
            let mut f = vec![fmt_g(eps, sig)];
            f.extend(std::iter::repeat_n(String::new(), 12));
            f.push("FAILED".into());
            f.join(",")
        }
    }
}

pub fn format_summary(s: &SweepSummary) -> String {
    format!(
        "# slope_E1={} spread_res1={} slope_E2={} spread_res2={}",
        fmt_f64(s.slope_e1),
        fmt_f64(s.spread_res1),
        fmt_f64(s.slope_e2),
        fmt_f64(s.spread_res2)
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-12, 1e300, 42.0, 123456.789, std::f64::consts::PI] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt_f64(0.04), "0.040000000000000001");
        assert_eq!(fmt_f64(42.0), "42");
        assert_eq!(fmt_f64(1e-5), "1.0000000000000001e-05");
        assert_eq!(HEADER.split(',').count(), 13);
    }

    #[test]
    fn reduced_precision() {
        assert_eq!(fmt_g(0.04, 6), "0.04");
        assert_eq!(fmt_g(123456789.0, 3), "1.23e+08");
        assert_eq!(fmt_g(9.996, 3), "10");
        assert_eq!(fmt_g(-0.000123456, 2), "-0.00012");
        assert_eq!(fmt_g(1.5, 0), "2");
    }
}
