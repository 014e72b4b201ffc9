//! Text formats: raw intensity tables, χ traces, Bell reports and Fock
//! coefficient tables.

use std::fmt::Write as _;
use std::io::{self, Write};

use crate::bell::{Basis, BellResult, RawRow, TracePoint};
use crate::error::{Error, Result};
use crate::optics::DetectorRecord;
use crate::quantum::FockExpansion;

const TABLE_COLUMNS: [&str; 5] = ["basis", "i1", "i2", "i3", "i4"];

/// Parses a delimiter-separated table with header `basis,i1,i2,i3,i4`.
///
/// The delimiter is `;`, tab or `,`, whichever the header uses. Numbers may
/// use a decimal comma (`7,99`) when the delimiter is not a comma or the
/// field is quoted. Extra columns are ignored; `#` starts a comment line.
/// Line numbers in errors count every line of `text`, starting at 1.
pub fn parse_raw_table(text: &str) -> Result<Vec<RawRow>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));

    let (header_no, header_line) = lines.next().ok_or(Error::Table {
        line: 1,
        message: "empty table".into(),
    })?;
    let delimiter = if header_line.contains(';') {
        b';'
    } else if header_line.contains('\t') {
        b'\t'
    } else {
        b','
    };
    let split = |line_no: usize, line: &str| -> Result<csv::StringRecord> {
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(delimiter)
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(line.as_bytes());
        match reader.records().next() {
            Some(Ok(r)) => Ok(r),
            Some(Err(e)) => Err(Error::Table {
                line: line_no,
                message: e.to_string(),
            }),
            None => Ok(csv::StringRecord::new()),
        }
    };

    let headers = split(header_no, header_line)?;
    let mut columns = [0usize; 5];
    for (slot, name) in columns.iter_mut().zip(TABLE_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::Table {
                line: header_no,
                message: format!("header is missing column `{name}`"),
            })?;
    }
    let width = headers.len();

    let mut rows = Vec::new();
    for (line, text) in lines {
        let record = split(line, text)?;
        if record.len() != width {
            return Err(Error::Table {
                line,
                message: format!("expected {width} fields, found {}", record.len()),
            });
        }
        let label = &record[columns[0]];
        let basis = Basis::parse(label).ok_or_else(|| Error::Table {
            line,
            message: format!("unknown basis `{label}`"),
        })?;
        let mut values = [0.0; 4];
        for (v, &col) in values.iter_mut().zip(&columns[1..]) {
            *v = parse_decimal(&record[col]).ok_or_else(|| Error::Table {
                line,
                message: format!("`{}` is not a number", &record[col]),
            })?;
        }
        let record =
            DetectorRecord::new(values[0], values[1], values[2], values[3]).map_err(|e| {
                Error::Table {
                    line,
                    message: e.to_string(),
                }
            })?;
        rows.push(RawRow { basis, record });
    }
    Ok(rows)
}

/// Accepts `.` or `,` as the decimal separator.
pub fn parse_decimal(field: &str) -> Option<f64> {
    let field = field.trim();
    if field.matches(',').count() == 1 && !field.contains('.') {
        field.replace(',', ".").parse().ok()
    } else {
        field.parse().ok()
    }
}

pub fn write_raw_table<W: Write>(rows: &[RawRow], out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TABLE_COLUMNS)?;
    for r in rows {
        let [i1, i2, i3, i4] = r.record.as_array();
        w.write_record([
            r.basis.label().to_string(),
            fmt_num(i1),
            fmt_num(i2),
            fmt_num(i3),
            fmt_num(i4),
        ])?;
    }
    w.flush()
}

/// `chi,i1,i2,i3,i4`.
pub fn write_trace<W: Write>(trace: &[TracePoint], out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["chi", "i1", "i2", "i3", "i4"])?;
    for p in trace {
        let [i1, i2, i3, i4] = p.record.as_array();
        w.write_record([p.chi, i1, i2, i3, i4].map(fmt_num))?;
    }
    w.flush()
}

/// `n_vv,n_hh,re,im,prob`.
pub fn write_fock_table<W: Write>(exp: &FockExpansion, out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n_vv", "n_hh", "re", "im", "prob"])?;
    for (q, m, c) in exp.iter() {
        w.write_record([
            q.to_string(),
            m.to_string(),
            fmt_num(c.re),
            fmt_num(c.im),
            fmt_num(c.norm_sqr()),
        ])?;
    }
    w.flush()
}

/// Key-value report, one `key = value` per line.
pub fn format_bell_result(r: &BellResult) -> String {
    let mut s = String::new();
    for (k, v) in [
        ("m11", r.m11),
        ("m12", r.m12),
        ("m21", r.m21),
        ("m22", r.m22),
        ("s", r.s),
    ] {
        let _ = writeln!(s, "{k} = {}", fmt_num(v));
    }
    s
}

/// Fixed 12-decimal rendering; negative zero prints as zero.
pub fn fmt_num(x: f64) -> String {
    let s = format!("{x:.12}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::{analyze_raw_table, chi_ramp_trace, BellSettings};
    use crate::quantum::coherent_mns;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    const TABLE2: &str = "basis,i1,i2,i3,i4\n\
        a1b1,7.99,10.4,41.6,38.4\n\
        a1b2,13.6,10.4,30.8,43.6\n\
        a2b1,36.4,40.4,10.8,12.8\n\
        a2b2,13.2,11.6,29.6,45.2\n";

    #[test]
    fn parses_dot_decimals() {
        let rows = parse_raw_table(TABLE2).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[2].basis, Basis::A2B1);
        assert_abs_diff_eq!(rows[0].record.i_tot, 98.39, epsilon = 1e-12);
    }

    #[test]
    fn parses_comma_decimals_with_semicolons() {
        let text = "# best data, 10 mV units\n\
            basis;i1;i2;i3;i4;i_tot;M\n\
            (α₁, β₁);7,99;10,4;41,6;38,4;98,39;0,626\n\
            (α₁, β₂);13,6;10,4;30,8;43,6;98,4;0,512\n\
            (α₂, β₁);36,4;40,4;10,8;12,8;100,4;-0,530\n\
            (α₂, β₂);13,2;11,6;29,6;45,2;99,6;0,502\n";
        let a = analyze_raw_table(&parse_raw_table(text).unwrap()).unwrap();
        let b = analyze_raw_table(&parse_raw_table(TABLE2).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn quoted_comma_decimals() {
        let text = "basis,i1,i2,i3,i4\ns11,\"7,99\",\"10,4\",\"41,6\",\"38,4\"\n";
        let rows = parse_raw_table(text).unwrap();
        assert_abs_diff_eq!(rows[0].record.i1, 7.99);
    }

    #[test]
    fn errors_name_the_line() {
        let bad = "basis,i1,i2,i3,i4\na1b1,1,2,3,4\na1b2,1,2,x,4\n";
        assert_eq!(
            parse_raw_table(bad).unwrap_err(),
            Error::Table {
                line: 3,
                message: "`x` is not a number".into()
            }
        );
        let short = "basis,i1,i2,i3,i4\na1b1,1,2,3\n";
        assert!(matches!(
            parse_raw_table(short),
            Err(Error::Table { line: 2, .. })
        ));
        let unknown = "basis,i1,i2,i3,i4\n\na9b9,1,2,3,4\n";
        let e = parse_raw_table(unknown).unwrap_err();
        assert!(matches!(e, Error::Table { line: 3, .. }), "{e:?}");
        let negative = "basis,i1,i2,i3,i4\na1b1,1,-2,3,4\n";
        assert!(matches!(
            parse_raw_table(negative),
            Err(Error::Table { line: 2, .. })
        ));
        let header = "basis,i1,i2,i3\na1b1,1,2,3\n";
        assert!(matches!(
            parse_raw_table(header),
            Err(Error::Table { line: 1, .. })
        ));
        assert!(parse_raw_table("  \n").is_err());
    }

    #[test]
    fn decimal_parsing() {
        assert_eq!(parse_decimal("0,626"), Some(0.626));
        assert_eq!(parse_decimal("-0.53"), Some(-0.53));
        assert_eq!(parse_decimal("1,2,3"), None);
        assert_eq!(parse_decimal(""), None);
    }

    #[test]
    fn raw_table_round_trip() {
        let rows = parse_raw_table(TABLE2).unwrap();
        let mut out = Vec::new();
        write_raw_table(&rows, &mut out).unwrap();
        assert_eq!(
            parse_raw_table(std::str::from_utf8(&out).unwrap()).unwrap(),
            rows
        );
    }

    #[test]
    fn trace_csv_shape() {
        let trace = chi_ramp_trace(0.0, &BellSettings::canonical().s11, 8).unwrap();
        let mut out = Vec::new();
        write_trace(&trace, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("chi,i1,i2,i3,i4"));
        assert_eq!(lines.count(), 8);
    }

    #[test]
    fn fock_csv_shape() {
        let mut out = Vec::new();
        write_fock_table(&coherent_mns(Complex64::new(1.0, 0.0), 2), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n_vv,n_hh,re,im,prob");
        assert_eq!(lines.len(), 1 + 6);
        assert!(lines[1].starts_with("0,0,0.606530659713,0.000000000000,"));
    }

    #[test]
    fn key_value_report() {
        let r = BellResult::from_correlations(0.5, 0.5, -0.5, 0.5);
        let text = format_bell_result(&r);
        assert!(text.contains("m21 = -0.500000000000\n"));
        assert!(text.ends_with("s = 2.000000000000\n"));
        assert_eq!(fmt_num(-0.0), "0.000000000000");
        assert_eq!(fmt_num(-1e-20), "0.000000000000");
    }
}
