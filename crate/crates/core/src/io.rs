//! Deterministic CSV output: every float printed with 17 significant digits
//! in `%.17g` style, LF line endings.

use std::io::{Read, Write};

use thiserror::Error;

use crate::algorithms::IterateSequence;
use crate::certificates::ConditionReport;
use crate::dynamics::Trajectory;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("column '{0}' not found")]
    MissingColumn(String),
    #[error("row {row}: cannot parse '{value}' as a number")]
    Parse { row: usize, value: String },
}

/// C `%.17g`.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mant) = mant.strip_prefix('-').map_or(("", mant), |m| ("-", m));
    let digits: String = mant.chars().filter(|c| *c != '.').collect();

    if !(-4..17).contains(&exp) {
        let frac = digits[1..].trim_end_matches('0');
        let dot = if frac.is_empty() { "" } else { "." };
        let esign = if exp < 0 { '-' } else { '+' };
        return format!("{sign}{}{dot}{frac}e{esign}{:02}", &digits[..1], exp.abs());
    }
    let (int, frac) = if exp >= 0 {
        let split = exp as usize + 1;
        (digits[..split].to_string(), digits[split..].to_string())
    } else {
        ("0".to_string(), "0".repeat((-exp - 1) as usize) + &digits)
    };
    let frac = frac.trim_end_matches('0');
    if frac.is_empty() {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

fn numbered(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (1..=n).map(move |i| format!("{prefix}_{i}"))
}

/// Columns `t, x_i, v_i, fgap, grad_norm_sq, energy, int_values, int_grads`.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, out: W) -> Result<(), IoError> {
    let n = traj.samples.first().map_or(0, |s| s.x.len());
    let mut w = writer(out);
    let mut header = vec!["t".to_string()];
    header.extend(numbered("x", n));
    header.extend(numbered("v", n));
    header.extend(["fgap", "grad_norm_sq", "energy", "int_values", "int_grads"].map(String::from));
    w.write_record(&header)?;
    for s in &traj.samples {
        let row = std::iter::once(s.t)
            .chain(s.x.iter().copied())
            .chain(s.v.iter().copied())
            .chain([s.fgap, s.grad_norm_sq, s.energy, s.int_values, s.int_grads])
            .map(fmt_g17);
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `t`, then each condition's margin, then each relative margin (`rel_<name>`).
pub fn write_margins_csv<W: Write>(report: &ConditionReport, out: W) -> Result<(), IoError> {
    let mut w = writer(out);
    let mut header = vec!["t".to_string()];
    header.extend(report.names.iter().cloned());
    header.extend(report.names.iter().map(|n| format!("rel_{n}")));
    w.write_record(&header)?;
    for (i, t) in report.grid.iter().enumerate() {
        let row = std::iter::once(*t)
            .chain(report.margins.iter().map(|c| c[i]))
            .chain(report.relative.iter().map(|c| c[i]))
            .map(fmt_g17);
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `k, x_i, fgap, k2_fgap`.
pub fn write_iterates_csv<W: Write>(seq: &IterateSequence, out: W) -> Result<(), IoError> {
    let n = seq.iterates.first().map_or(0, |it| it.x.len());
    let mut w = writer(out);
    let mut header = vec!["k".to_string()];
    header.extend(numbered("x", n));
    header.extend(["fgap", "k2_fgap"].map(String::from));
    w.write_record(&header)?;
    for it in &seq.iterates {
        let k = it.k as f64;
        let mut row = vec![it.k.to_string()];
        row.extend(it.x.iter().map(|v| fmt_g17(*v)));
        row.push(fmt_g17(it.fgap));
        row.push(fmt_g17(k * k * it.fgap));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the named numeric columns of a CSV with a header row.
pub fn read_columns<R: Read>(input: R, names: &[&str]) -> Result<Vec<Vec<f64>>, IoError> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    let idx: Vec<usize> = names
        .iter()
        .map(|n| headers.iter().position(|h| h == *n).ok_or_else(|| IoError::MissingColumn(n.to_string())))
        .collect::<Result<_, _>>()?;
    let mut cols = vec![Vec::new(); names.len()];
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        for (c, &i) in idx.iter().enumerate() {
            let raw = rec.get(i).unwrap_or("");
            let v = raw.trim().parse::<f64>().map_err(|_| IoError::Parse { row: row + 1, value: raw.to_string() })?;
            cols[c].push(v);
        }
    }
    Ok(cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn g17_matches_c_printf() {
        let cases = [
            (0.1, "0.10000000000000001"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (1e17, "1e+17"),
            (1e16, "10000000000000000"),
            (123456.789, "123456.789"),
            (1e-4, "0.0001"),
            (1.5e-5, "1.5e-05"),
            (f64::MAX, "1.7976931348623157e+308"),
            (5e-324, "4.9406564584124654e-324"),
            (0.125, "0.125"),
            (1.0 / 3.0, "0.33333333333333331"),
            (0.0, "0"),
        ];
        for (x, want) in cases {
            assert_eq!(fmt_g17(x), want, "{x:e}");
        }
        assert_eq!(fmt_g17(f64::NAN), "nan");
        assert_eq!(fmt_g17(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn g17_matches_printf_fixture() {
        let fixture = include_str!("../tests/data/g17_printf.txt");
        for line in fixture.lines() {
            let (hex, want) = line.split_once(' ').unwrap();
            let x = f64::from_bits(u64::from_str_radix(hex, 16).unwrap());
            assert_eq!(fmt_g17(x), want);
        }
    }

    #[test]
    fn columns_round_trip() {
        let csv = "t,fgap,x_1\n1,0.5,3\n2,0.25,4\n";
        let cols = read_columns(csv.as_bytes(), &["fgap", "t"]).unwrap();
        assert_eq!(cols, vec![vec![0.5, 0.25], vec![1.0, 2.0]]);
        assert!(matches!(read_columns(csv.as_bytes(), &["nope"]), Err(IoError::MissingColumn(_))));
    }

    proptest! {
        #[test]
        fn g17_round_trips(bits in any::<u64>()) {
            let x = f64::from_bits(bits);
            prop_assume!(x.is_finite());
            let back: f64 = fmt_g17(x).parse().unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
