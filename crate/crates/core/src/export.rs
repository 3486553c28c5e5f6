//! Plain CSV tables: UTF-8, one header row, numbers in C `%.12e` style.

use std::fmt::Write as _;
use std::io::Write;

use crate::charpoly::Curve;
use crate::error::{param, Result};
use crate::nlsm::QuadratureResult;
use crate::spectra::HistogramEstimate;

/// Formats `x` like C's `printf("%.12e", x)`: `1.234567890123e+00`.
pub fn format_sci(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

#[derive(Clone, Debug, PartialEq)]
pub enum Field {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Field {
    fn render(&self, out: &mut String) {
        match self {
            Field::Num(x) => out.push_str(&format_sci(*x)),
            Field::Int(k) => {
                let _ = write!(out, "{k}");
            }
            Field::Text(s) => out.push_str(s),
        }
    }
}

impl From<f64> for Field {
    fn from(x: f64) -> Self {
        Field::Num(x)
    }
}

impl From<u64> for Field {
    fn from(k: u64) -> Self {
        Field::Int(k)
    }
}

impl From<&str> for Field {
    fn from(s: &str) -> Self {
        Field::Text(s.to_string())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Field>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Field>) -> Result<()> {
        if row.len() != self.header.len() {
            return param(format!("row has {} fields, header has {}", row.len(), self.header.len()));
        }
        if row.iter().any(|f| matches!(f, Field::Text(s) if s.contains([',', '"', '\n', '\r']))) {
            return param("text fields may not contain commas, quotes or newlines");
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, f) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                f.render(&mut out);
            }
            out.push('\n');
        }
        out
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }
}

pub fn histogram_table(h: &HistogramEstimate) -> Table {
    let mut t = Table::new(&["bin_left", "bin_right", "value", "std_error", "n_samples"]);
    for (i, w) in h.bin_edges.windows(2).enumerate() {
        t.rows.push(vec![w[0].into(), w[1].into(), h.values[i].into(), h.std_errors[i].into(), h.n_samples.into()]);
    }
    t
}

/// `arg` names the first column (`abs_z` or `abs_omega`).
pub fn curve_table(curve: &Curve, arg: &str, n_half: usize, g: f64) -> Table {
    let mut t = Table::new(&[arg, "n", "N", "g", "normalized_moment", "rel_std_error", "n_samples"]);
    for p in &curve.points {
        t.rows.push(vec![
            p.abs_z.into(),
            (p.n as u64).into(),
            (n_half as u64).into(),
            g.into(),
            p.normalized.into(),
            p.rel_std_error.into(),
            p.n_samples.into(),
        ]);
    }
    t
}

/// One row per grid point; `ln_value` stays finite when `value` overflows.
pub fn quadrature_table(arg: &str, args: &[f64], results: &[QuadratureResult]) -> Result<Table> {
    if args.len() != results.len() {
        return param("one quadrature result per grid point required");
    }
    let mut t = Table::new(&[arg, "value", "ln_value", "abs_error_est", "method", "nodes"]);
    for (&a, r) in args.iter().zip(results) {
        t.rows.push(vec![
            a.into(),
            r.actual().into(),
            r.ln_value().into(),
            (r.abs_error_est * r.log_scale.exp()).into(),
            r.method.name().into(),
            r.n_nodes.into(),
        ]);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_style_exponent() {
        assert_eq!(format_sci(1.234567890123), "1.234567890123e+00");
        assert_eq!(format_sci(-0.000123), "-1.230000000000e-04");
        assert_eq!(format_sci(0.0), "0.000000000000e+00");
        assert_eq!(format_sci(6.02e123), "6.020000000000e+123");
        assert_eq!(format_sci(f64::NAN), "nan");
    }

    #[test]
    fn csv_rows() {
        let mut t = Table::new(&["x", "k", "m"]);
        t.push(vec![0.5.into(), 3u64.into(), "tensor".into()]).unwrap();
        assert_eq!(t.to_csv(), "x,k,m\n5.000000000000e-01,3,tensor\n");
        assert!(t.push(vec![1.0.into()]).is_err());
        assert!(t.push(vec![1.0.into(), 1u64.into(), "a,b".into()]).is_err());
    }
}
