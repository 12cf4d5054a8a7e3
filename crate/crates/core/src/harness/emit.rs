use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Value};

use super::sweep::{SweepRow, SweepTable};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str =
    "sweep_kind,sweep_value,method,trials,mean_se_bps_hz,std_se_bps_hz,mean_qcqp_objective,mean_sweeps_used";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(Error::Config(format!("unknown output format {s:?}"))),
        }
    }
}

/// Nine significant digits, shortest form; `inf`, `-inf` and `nan` spelled out.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("valid float");
    format!("{rounded}")
}

pub fn to_csv(table: &SweepTable) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in &table.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            table.kind,
            format_number(row.sweep_value),
            row.method,
            row.trials,
            format_number(row.mean_se_bps_hz),
            format_number(row.std_se_bps_hz),
            format_number(row.mean_qcqp_objective),
            format_number(row.mean_sweeps_used),
        )
        .expect("writing to a String");
    }
    out
}

fn number(x: f64) -> Value {
    if x.is_finite() {
        json!(format_number(x).parse::<f64>().expect("formatted float"))
    } else {
        json!(format_number(x))
    }
}

pub fn to_json(table: &SweepTable) -> Result<String> {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| {
            json!({
                "sweep_kind": table.kind,
                "sweep_value": number(r.sweep_value),
                "method": r.method,
                "trials": r.trials,
                "mean_se_bps_hz": number(r.mean_se_bps_hz),
                "std_se_bps_hz": number(r.std_se_bps_hz),
                "mean_qcqp_objective": number(r.mean_qcqp_objective),
                "mean_sweeps_used": number(r.mean_sweeps_used),
                "errors": r.errors,
            })
        })
        .collect();
    let mut scenario = serde_json::to_value(&table.scenario)?;
    // JSON has no infinity; spell non-finite scenario numbers out.
    sanitize(&mut scenario, &table.scenario)?;
    let doc = json!({
        "sweep_kind": table.kind,
        "scenario": scenario,
        "rows": rows,
    });
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

fn sanitize(value: &mut Value, scenario: &crate::config::ScenarioConfig) -> Result<()> {
    if let Value::Object(map) = value {
        for (key, k) in [("rician_kappa1", scenario.rician_kappa1), ("rician_kappa2", scenario.rician_kappa2)] {
            if !k.is_finite() {
                map.insert(key.into(), json!(format_number(k)));
            }
        }
    }
    Ok(())
}

/// Writes the table as CSV or JSON.
pub fn write_table(table: &SweepTable, format: OutputFormat, path: impl AsRef<Path>) -> Result<()> {
    let text = match format {
        OutputFormat::Csv => to_csv(table),
        OutputFormat::Json => to_json(table)?,
    };
    std::fs::write(path, text)?;
    Ok(())
}

fn parse_number(s: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::Config(format!("bad number {s:?} in CSV")))
}

/// Reads back a CSV produced by [`to_csv`] as `(sweep_kind, rows)`.
pub fn parse_csv(text: &str) -> Result<Vec<(String, SweepRow)>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::Config("unexpected CSV header".into()));
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 8 {
                return Err(Error::Config(format!("expected 8 fields: {line:?}")));
            }
            Ok((
                f[0].to_string(),
                SweepRow {
                    sweep_value: parse_number(f[1])?,
                    method: f[2].to_string(),
                    trials: f[3]
                        .parse()
                        .map_err(|_| Error::Config(format!("bad trial count {:?}", f[3])))?,
                    mean_se_bps_hz: parse_number(f[4])?,
                    std_se_bps_hz: parse_number(f[5])?,
                    mean_qcqp_objective: parse_number(f[6])?,
                    mean_sweeps_used: parse_number(f[7])?,
                    errors: 0,
                },
            ))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ExperimentConfig, SweepKind};
    use proptest::prelude::*;

    fn table(rows: Vec<SweepRow>) -> SweepTable {
        SweepTable {
            kind: SweepKind::Bits,
            scenario: ExperimentConfig::reference().scenario,
            rows,
            records: Vec::new(),
        }
    }

    fn row(v: f64, se: f64) -> SweepRow {
        SweepRow {
            sweep_value: v,
            method: "iterative".into(),
            trials: 10,
            mean_se_bps_hz: se,
            std_se_bps_hz: 0.5,
            mean_qcqp_objective: 1.5e7,
            mean_sweeps_used: 2.25,
            errors: 0,
        }
    }

    #[test]
    fn number_format() {
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(0.1 + 0.2), "0.3");
        assert_eq!(format_number(123.4567891234), "123.456789");
        assert_eq!(format_number(f64::INFINITY), "inf");
        assert_eq!(format_number(-0.000123456789123), "-0.000123456789");
    }

    #[test]
    fn empty_table_is_header_only() {
        assert_eq!(to_csv(&table(vec![])), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn csv_layout() {
        let csv = to_csv(&table(vec![row(f64::INFINITY, 42.123456789)]));
        assert_eq!(csv.lines().nth(1).unwrap(), "bits,inf,iterative,10,42.1234568,0.5,15000000,2.25");
    }

    #[test]
    fn json_is_valid_and_mirrors_rows() {
        let text = to_json(&table(vec![row(1.0, 3.0), row(f64::INFINITY, 4.0)])).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["rows"].as_array().unwrap().len(), 2);
        assert_eq!(v["rows"][1]["sweep_value"], "inf");
        assert_eq!(v["scenario"]["rician_kappa1"], "inf");
        assert_eq!(v["scenario"]["num_streams"], 16);
    }

    proptest! {
        #[test]
        fn csv_round_trip_keeps_nine_digits(se in -1e6f64..1e6, v in 0.0f64..300.0) {
            let t = table(vec![row(v, se)]);
            let back = parse_csv(&to_csv(&t)).unwrap();
            prop_assert_eq!(back.len(), 1);
            let got = &back[0].1;
            prop_assert!((got.mean_se_bps_hz - se).abs() <= 5e-9 * se.abs().max(f64::MIN_POSITIVE));
            prop_assert!((got.sweep_value - v).abs() <= 5e-9 * v.abs().max(f64::MIN_POSITIVE));
        }
    }
}
