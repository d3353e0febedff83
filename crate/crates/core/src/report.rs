//! Report rows and their JSON, CSV and text renderings.
//!
//! Every rendering is built from the same [`Row`] strings, so the text table
//! is a re-layout of the JSON fields and never re-rounds anything. Output is
//! ASCII: hex floats use `*` for the multiplication sign.

use serde::Serialize;

use crate::fpround::{format_hex, Float};
use crate::interval::Interval;
use crate::metrics::ErrorReport;

/// Fully resolved parameters of a run, echoed in every report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResolvedConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<String>,
    pub precision: String,
    pub rounding: String,
    pub format: String,
    pub hex: bool,
}

/// One certified interval with its error summary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Row {
    pub t: Option<u64>,
    pub lo_hex: String,
    pub hi_hex: String,
    pub lo_dec: String,
    pub hi_dec: String,
    pub e_abs: String,
    pub e_rel: String,
    pub approx: String,
}

/// Hex float with an ASCII multiplication sign.
pub fn ascii_hex<F: Float>(x: F) -> String {
    format_hex(x).replace('\u{b7}', "*")
}

impl Row {
    pub fn new<F: Float>(t: Option<u64>, iv: &Interval<F>) -> Self {
        let err = ErrorReport::new(iv);
        Row {
            t,
            lo_hex: ascii_hex(iv.lo()),
            hi_hex: ascii_hex(iv.hi()),
            lo_dec: format!("{:?}", iv.lo()),
            hi_dec: format!("{:?}", iv.hi()),
            e_abs: err.e_abs_display,
            e_rel: err.e_rel_display,
            approx: err.approx,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub config: ResolvedConfig,
    pub rows: Vec<Row>,
}

fn config_line(config: &ResolvedConfig) -> String {
    format!("# config {}\n", serde_json::to_string(config).expect("serializable config"))
}

/// `{"config": {...}, "rows": [...]}` followed by a newline.
pub fn emit_json(report: &Report) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(report).expect("serializable report");
    out.push(b'\n');
    out
}

pub const CSV_HEADER: &str = "t,lo_hex,hi_hex,lo_dec,hi_dec,e_abs,e_rel,approx";

/// A `# config` comment line, the header, then one line per row. No field
/// contains a comma or a quote, so no quoting is needed.
pub fn emit_csv(report: &Report) -> Vec<u8> {
    let mut out = config_line(&report.config);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &report.rows {
        let t = r.t.map(|t| t.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{t},{},{},{},{},{},{},{}\n",
            r.lo_hex, r.hi_hex, r.lo_dec, r.hi_dec, r.e_abs, r.e_rel, r.approx
        ));
    }
    out.into_bytes()
}

/// Aligned text table: `t`, bounds (hex or decimal), errors and the
/// 7-digit approximation.
pub fn emit_table(report: &Report, hex: bool) -> Vec<u8> {
    let header = ["t", "lo", "hi", "e_abs", "e_rel", "approx"];
    let mut cells: Vec<[String; 6]> = vec![header.map(String::from)];
    for r in &report.rows {
        let (lo, hi) = if hex {
            (r.lo_hex.clone(), r.hi_hex.clone())
        } else {
            (r.lo_dec.clone(), r.hi_dec.clone())
        };
        cells.push([
            r.t.map(|t| t.to_string()).unwrap_or_else(|| "-".into()),
            lo,
            hi,
            r.e_abs.clone(),
            r.e_rel.clone(),
            r.approx.clone(),
        ]);
    }
    let mut width = [0usize; 6];
    for row in &cells {
        for (w, c) in width.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = config_line(&report.config);
    for row in &cells {
        let line: Vec<String> = row
            .iter()
            .zip(width)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> ResolvedConfig {
        ResolvedConfig {
            command: "table".into(),
            family: Some("multinomial".into()),
            n: Some(500),
            d: Some(365),
            ell: Some(3),
            thresholds: Some("4..4".into()),
            params: Some("uniform".into()),
            precision: "binary64".into(),
            rounding: "strong".into(),
            format: "json".into(),
            hex: false,
        }
    }

    #[test]
    fn zero_row() {
        let r = Row::new(Some(4), &Interval::<f64>::ZERO);
        assert_eq!(
            (r.lo_hex.as_str(), r.e_abs.as_str(), r.e_rel.as_str(), r.approx.as_str()),
            ("0", "0", "0", "0")
        );
    }

    #[test]
    fn empty_reports() {
        let rep = Report {
            config: config(),
            rows: vec![],
        };
        let csv = String::from_utf8(emit_csv(&rep)).unwrap();
        assert_eq!(csv.lines().nth(1), Some(CSV_HEADER));
        assert_eq!(csv.lines().count(), 2);
        let v: serde_json::Value = serde_json::from_slice(&emit_json(&rep)).unwrap();
        assert_eq!(v["rows"], serde_json::json!([]));
        assert_eq!(v["config"]["n"], 500);
    }

    #[test]
    fn renderings_share_fields() {
        let iv = Interval::new(0.25f64, 0.5).unwrap();
        let rep = Report {
            config: config(),
            rows: vec![Row::new(Some(7), &iv)],
        };
        let json = emit_json(&rep);
        assert!(json.is_ascii());
        let v: serde_json::Value = serde_json::from_slice(&json).unwrap();
        let row = &v["rows"][0];
        let table = String::from_utf8(emit_table(&rep, true)).unwrap();
        let fields: Vec<&str> = table.lines().nth(2).unwrap().split_whitespace().collect();
        assert_eq!(fields[0], "7");
        for (f, key) in fields[1..].iter().zip(["lo_hex", "hi_hex", "e_abs", "e_rel", "approx"]) {
            assert_eq!(*f, row[key].as_str().unwrap());
        }
        assert_eq!(row["lo_hex"], "1.0000000000000*2^-2");
    }
}
