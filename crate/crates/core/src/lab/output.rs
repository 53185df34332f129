//! Result rows and their CSV / JSON encodings.

use super::config::Format;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Rows that can be written as a fixed-column CSV table.
pub trait Record: Serialize {
    const HEADER: &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

/// 17 significant digits, enough to round-trip an `f64`.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_real(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

/// Integers below 2^53 are written exactly, larger sizes as reals.
fn size(x: Option<f64>) -> String {
    match x {
        Some(v) if v.fract() == 0.0 && v.abs() < 9.007_199_254_740_992e15 => format!("{}", v as i64),
        other => opt_real(other),
    }
}

fn opt_bool(x: Option<bool>) -> String {
    x.map(|b| b.to_string()).unwrap_or_default()
}

/// One bound evaluation, optionally with its empirical check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub equation_tag: String,
    pub model: String,
    pub n: Option<f64>,
    pub m: Option<u64>,
    pub z: Option<f64>,
    pub epsilon: Option<f64>,
    pub p: Option<f64>,
    pub bound_known: f64,
    pub bound_c_coeff: f64,
    pub empirical: Option<f64>,
    pub dkw_radius: Option<f64>,
    pub se: Option<f64>,
    /// `None` for rows carrying the unspecified constant and for rows
    /// without an empirical check.
    pub pass: Option<bool>,
}

impl Record for ResultRow {
    const HEADER: &'static [&'static str] = &[
        "equation_tag",
        "model",
        "n",
        "m",
        "z",
        "epsilon",
        "p",
        "bound_known",
        "bound_c_coeff",
        "empirical",
        "dkw_radius",
        "se",
        "pass",
    ];

    fn fields(&self) -> Vec<String> {
        vec![
            self.equation_tag.clone(),
            self.model.clone(),
            size(self.n),
            self.m.map(|m| m.to_string()).unwrap_or_default(),
            opt_real(self.z),
            opt_real(self.epsilon),
            opt_real(self.p),
            real(self.bound_known),
            real(self.bound_c_coeff),
            opt_real(self.empirical),
            opt_real(self.dkw_radius),
            opt_real(self.se),
            opt_bool(self.pass),
        ]
    }
}

/// One line of the counterexample table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example41Row {
    pub epsilon: f64,
    pub n: f64,
    pub lhs_exact: f64,
    pub lhs_floor: f64,
    pub e_abs_w_delta: f64,
    pub e_abs_delta: f64,
    pub component_cap: f64,
    pub shorack_rhs: f64,
    pub alpha: f64,
    pub sum_g3: f64,
    pub bg_bracket: f64,
    pub ratio_shorack: f64,
    pub ratio_bg: f64,
    pub mc_replicates: Option<u64>,
    /// Monte Carlo `P(T ≤ εc₀)`, compared with `Φ(ε^{2/3})`.
    pub mc_prob: Option<f64>,
    pub mc_prob_se: Option<f64>,
    /// Monte Carlo `E|WΔ| + E|Δ|`.
    pub mc_components: Option<f64>,
    pub mc_components_se: Option<f64>,
    pub mc_pass: Option<bool>,
}

impl Record for Example41Row {
    const HEADER: &'static [&'static str] = &[
        "epsilon",
        "n",
        "lhs_exact",
        "lhs_floor",
        "e_abs_w_delta",
        "e_abs_delta",
        "component_cap",
        "shorack_rhs",
        "alpha",
        "sum_g3",
        "bg_bracket",
        "ratio_shorack",
        "ratio_bg",
        "mc_replicates",
        "mc_prob",
        "mc_prob_se",
        "mc_components",
        "mc_components_se",
        "mc_pass",
    ];

    fn fields(&self) -> Vec<String> {
        let mut f: Vec<String> = [
            self.epsilon,
            self.n,
            self.lhs_exact,
            self.lhs_floor,
            self.e_abs_w_delta,
            self.e_abs_delta,
            self.component_cap,
            self.shorack_rhs,
            self.alpha,
            self.sum_g3,
            self.bg_bracket,
            self.ratio_shorack,
            self.ratio_bg,
        ]
        .into_iter()
        .map(real)
        .collect();
        f[1] = size(Some(self.n));
        f.push(self.mc_replicates.map(|r| r.to_string()).unwrap_or_default());
        f.extend([self.mc_prob, self.mc_prob_se, self.mc_components, self.mc_components_se].map(opt_real));
        f.push(opt_bool(self.mc_pass));
        f
    }
}

/// Encode `rows` in the requested format.
pub fn encode<R: Record>(rows: &[R], format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
            w.write_record(R::HEADER).map_err(csv_err)?;
            for r in rows {
                w.write_record(r.fields()).map_err(csv_err)?;
            }
            w.into_inner().map_err(|e| Error::Io(e.into_error()))
        }
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(rows).map_err(|e| Error::Numeric(format!("JSON encoding: {e}")))?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Write rows to `sink`; an empty table is an error.
pub fn emit_results<R: Record>(rows: &[R], format: Format, sink: &mut dyn Write) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Domain("no result rows to write".into()));
    }
    sink.write_all(&encode(rows, format)?)?;
    sink.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(pass: Option<bool>) -> ResultRow {
        ResultRow {
            equation_tag: "eq2.5".into(),
            model: "linear:rademacher:n=100".into(),
            n: Some(100.0),
            m: None,
            z: None,
            epsilon: None,
            p: None,
            bound_known: 0.61,
            bound_c_coeff: 0.0,
            empirical: Some(0.039_788),
            dkw_radius: Some(0.009_6),
            se: Some(0.0),
            pass,
        }
    }

    #[test]
    fn csv_layout() {
        let out = String::from_utf8(encode(&[row(Some(true))], Format::Csv).unwrap()).unwrap();
        let mut lines = out.split("\r\n");
        assert_eq!(lines.next().unwrap(), ResultRow::HEADER.join(","));
        let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(fields.len(), 13);
        assert_eq!(fields[2], "100");
        assert_eq!(fields[3], "");
        assert_eq!(fields[7], "6.0999999999999999e-1");
        assert_eq!(fields[12], "true");
        assert_eq!(fields[7].parse::<f64>().unwrap(), 0.61);
    }

    #[test]
    fn csv_quoting() {
        let mut r = row(None);
        r.model = "a,\"b\"".into();
        let out = String::from_utf8(encode(&[r], Format::Csv).unwrap()).unwrap();
        assert!(out.contains("eq2.5,\"a,\"\"b\"\"\",100,"));
        let mut rd = csv::Reader::from_reader(out.as_bytes());
        let rec = rd.records().next().unwrap().unwrap();
        assert_eq!(&rec[1], "a,\"b\"");
        assert_eq!(&rec[12], "");
    }

    #[test]
    fn json_round_trip_and_stability() {
        let rows = vec![row(Some(false)), row(None)];
        let a = encode(&rows, Format::Json).unwrap();
        assert_eq!(a, encode(&rows, Format::Json).unwrap());
        let back: Vec<ResultRow> = serde_json::from_slice(&a).unwrap();
        assert_eq!(back, rows);
        let text = String::from_utf8(a).unwrap();
        assert!(text.find("\"equation_tag\"").unwrap() < text.find("\"pass\"").unwrap());
    }

    #[test]
    fn large_sizes_are_written_as_reals() {
        assert_eq!(size(Some(1e20)), "1.0000000000000000e20");
        assert_eq!(size(Some(1e8)), "100000000");
    }

    #[test]
    fn empty_tables_are_rejected() {
        let mut sink = Vec::new();
        assert!(emit_results::<ResultRow>(&[], Format::Csv, &mut sink).is_err());
    }
}
