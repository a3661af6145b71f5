//! CSV rendering of sweep records. Floats carry 12 significant digits, nulls
//! are empty fields and booleans are `true`/`false`.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::inequalities::VerdictRecord;
use crate::measures::MeasureRecord;

pub const CSV_HEADER: [&str; 18] = [
    "t", "tau", "gamma0", "lambda", "g", "P_I", "CP_I", "NM1", "NM2", "d", "lhs_p", "rhs_p",
    "ok_p", "ok_p_strict", "lhs_cp", "rhs_cp", "ok_cp", "singular",
];

/// `printf("%.12g")`: 12 significant digits, trailing zeros removed,
/// exponent form outside `1e-4 <= |x| < 1e12`.
pub fn format_g12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (11 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt_f(x: Option<f64>) -> String {
    x.map(format_g12).unwrap_or_default()
}

fn opt_b(x: Option<bool>) -> String {
    x.map(|b| b.to_string()).unwrap_or_default()
}

pub fn csv_row(r: &VerdictRecord) -> Vec<String> {
    let m = &r.measures;
    vec![
        format_g12(m.t),
        format_g12(m.tau),
        format_g12(m.gamma0),
        format_g12(m.lambda),
        opt_f(m.g),
        opt_f(m.p_i),
        opt_f(m.cp_i),
        opt_f(m.nm1),
        opt_f(m.nm2),
        opt_f(m.d),
        opt_f(r.lhs_p),
        opt_f(r.rhs_p),
        opt_b(r.ok_p),
        opt_b(r.ok_p_strict),
        opt_f(r.lhs_cp),
        opt_f(r.rhs_cp),
        opt_b(r.ok_cp),
        m.singular.to_string(),
    ]
}

fn csv_err(e: impl std::fmt::Display) -> Error {
    Error::Config(format!("csv: {e}"))
}

pub fn write_csv<W: Write>(out: W, records: &[VerdictRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in records {
        w.write_record(csv_row(r)).map_err(csv_err)?;
    }
    w.flush().map_err(csv_err)
}

pub fn to_csv_string(records: &[VerdictRecord]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, records)?;
    String::from_utf8(buf).map_err(csv_err)
}

fn parse_f(field: &str, row: usize, col: &str) -> Result<Option<f64>> {
    if field.is_empty() {
        return Ok(None);
    }
    field
        .parse()
        .map(Some)
        .map_err(|_| Error::Config(format!("row {row}: bad number {field:?} in column {col}")))
}

fn parse_b(field: &str, row: usize, col: &str) -> Result<Option<bool>> {
    match field {
        "" => Ok(None),
        "true" => Ok(Some(true)),
        "false" => Ok(Some(false)),
        _ => Err(Error::Config(format!("row {row}: bad boolean {field:?} in column {col}"))),
    }
}

/// Reads records written by [`write_csv`]. Optimizer argument metadata is not
/// part of the CSV and comes back as `None`.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<VerdictRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers().map_err(csv_err)?;
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Config(format!("unexpected CSV header: {header:?}")));
    }
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(csv_err)?;
        let n = i + 1;
        let f = |k: usize| parse_f(&row[k], n, CSV_HEADER[k]);
        let b = |k: usize| parse_b(&row[k], n, CSV_HEADER[k]);
        let need = |k: usize| {
            f(k)?.ok_or_else(|| Error::Config(format!("row {n}: {} is required", CSV_HEADER[k])))
        };
        let measures = MeasureRecord {
            t: need(0)?,
            tau: need(1)?,
            gamma0: need(2)?,
            lambda: need(3)?,
            g: f(4)?,
            p_i: f(5)?,
            cp_i: f(6)?,
            nm1: f(7)?,
            nm2: f(8)?,
            d: f(9)?,
            p_i_states: None,
            nm1_state: None,
            nm1_gamma0: None,
            nm2_gamma0: None,
            d_gamma0s: None,
            d_states: None,
            singular: b(17)?
                .ok_or_else(|| Error::Config(format!("row {n}: singular is required")))?,
        };
        out.push(VerdictRecord {
            measures,
            lhs_p: f(10)?,
            rhs_p: f(11)?,
            ok_p: b(12)?,
            ok_p_strict: b(13)?,
            lhs_cp: f(14)?,
            rhs_cp: f(15)?,
            ok_cp: b(16)?,
        });
    }
    Ok(out)
}
