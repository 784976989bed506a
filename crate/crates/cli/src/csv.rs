use std::fmt::Write;

use biphoton_core::Pattern;

/// `printf("%.12e")` rendering: signed two-digit exponent, `nan` for NaN.
pub fn c_exp(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    let s = format!("{v:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// One row per axis node. The numeric column is `nan` when there is no oracle
/// pattern.
pub fn patterns_csv(analytic: &Pattern, numeric: Option<&Pattern>) -> String {
    let mut out = String::from("x,density_analytic,density_numeric\n");
    for (j, x) in analytic.axis().nodes().enumerate() {
        let n = numeric.map_or(f64::NAN, |p| p.density()[j]);
        writeln!(out, "{},{},{}", c_exp(x), c_exp(analytic.density()[j]), c_exp(n)).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use biphoton_core::{Grid1D, Provenance};

    #[test]
    fn matches_printf() {
        assert_eq!(c_exp(0.0), "0.000000000000e+00");
        assert_eq!(c_exp(1.0), "1.000000000000e+00");
        assert_eq!(c_exp(-123.456), "-1.234560000000e+02");
        assert_eq!(c_exp(6.02e-23), "6.020000000000e-23");
        assert_eq!(c_exp(1e100), "1.000000000000e+100");
        assert_eq!(c_exp(f64::NAN), "nan");
    }

    #[test]
    fn layout() {
        let axis = Grid1D::centered(1.0, 4).unwrap();
        let p = Pattern::new(axis, vec![1.0; 4], Provenance::Analytic, "flat").unwrap();
        let text = patterns_csv(&p, None);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "x,density_analytic,density_numeric");
        assert_eq!(lines[1], "-1.000000000000e+00,5.000000000000e-01,nan");
        let both = patterns_csv(&p, Some(&p));
        assert!(both.lines().nth(3).unwrap().ends_with(",5.000000000000e-01,5.000000000000e-01"));
    }
}
