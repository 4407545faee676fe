use std::io::Write;

use num_rational::BigRational;
use serde::Serialize;

use crate::error::Result;

/// One line of the experiment report. Rationals are written as `p/q`, big
/// integers as decimal strings; absent values are empty in CSV and `null`
/// in JSON.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ReportRow {
    pub family: String,
    pub params: String,
    pub index: usize,
    #[serde(rename = "R")]
    pub r: usize,
    #[serde(rename = "edges_G")]
    pub edges_g: usize,
    #[serde(rename = "edges_H")]
    pub edges_h: Option<usize>,
    pub density: Option<String>,
    pub density_decimal: Option<String>,
    #[serde(rename = "dL_measured")]
    pub dl_measured: Option<String>,
    #[serde(rename = "dL_budget")]
    pub dl_budget: Option<String>,
    pub bad_fraction: Option<String>,
    pub degenerate: Option<bool>,
    pub correction_size: Option<usize>,
    pub rank_upper: Option<String>,
    pub rank_lower_ab: Option<usize>,
    pub betti: Option<usize>,
    pub trs: Option<String>,
    pub log_trs_over_index: Option<String>,
    pub gamma_d: Option<String>,
    pub runtime_ms: Option<u64>,
    pub error: Option<String>,
}

pub const COLUMNS: [&str; 21] = [
    "family",
    "params",
    "index",
    "R",
    "edges_G",
    "edges_H",
    "density",
    "density_decimal",
    "dL_measured",
    "dL_budget",
    "bad_fraction",
    "degenerate",
    "correction_size",
    "rank_upper",
    "rank_lower_ab",
    "betti",
    "trs",
    "log_trs_over_index",
    "gamma_d",
    "runtime_ms",
    "error",
];

/// `p/q`, also for integers.
pub fn ratio_string(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn write_csv<W: Write>(rows: &[ReportRow], w: W) -> Result<()> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    let io = |e: csv::Error| crate::Error::Io(e.to_string());
    out.write_record(COLUMNS).map_err(io)?;
    for row in rows {
        out.serialize(row).map_err(io)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(rows: &[ReportRow], mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, rows).map_err(|e| crate::Error::Io(e.to_string()))?;
    writeln!(w)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_matches_fields() {
        let row = ReportRow {
            family: "torus".into(),
            params: "k=2 n=8".into(),
            index: 64,
            r: 2,
            edges_g: 128,
            density: Some("3/2".into()),
            ..Default::default()
        };
        let mut buf = Vec::new();
        write_csv(std::slice::from_ref(&row), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), COLUMNS.join(","));
        assert!(lines
            .next()
            .unwrap()
            .starts_with("torus,k=2 n=8,64,2,128,,3/2,"));

        let value = serde_json::to_value(&row).unwrap();
        let keys: Vec<&str> = value
            .as_object()
            .unwrap()
            .keys()
            .map(String::as_str)
            .collect();
        let mut expected = COLUMNS.to_vec();
        expected.sort_unstable();
        let mut keys = keys;
        keys.sort_unstable();
        assert_eq!(keys, expected);
    }

    #[test]
    fn integers_keep_denominator() {
        assert_eq!(ratio_string(&BigRational::from_integer(2.into())), "2/1");
    }
}
