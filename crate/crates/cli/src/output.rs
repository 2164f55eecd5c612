use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Map, Value};
use torus_orbits::census::CensusRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

pub const CENSUS_FORMAT: &str = "torus-orbits-census";
pub const CENSUS_VERSION: u32 = 1;
pub const CENSUS_COLUMNS: [&str; 7] = [
    "rank",
    "weights",
    "type",
    "pi1",
    "action",
    "verified",
    "class_size",
];

/// A flat result record; field order is preserved in every format.
#[derive(Default)]
pub struct Record {
    fields: Vec<(String, Value)>,
}

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn field(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).expect("serializable field");
        self.fields.push((key.to_string(), v));
        self
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

pub fn emit(out: &mut dyn Write, format: Format, record: &Record) -> anyhow::Result<()> {
    match format {
        Format::Table => {
            let width = record
                .fields
                .iter()
                .map(|(k, _)| k.len())
                .max()
                .unwrap_or(0);
            for (k, v) in &record.fields {
                writeln!(out, "{k:<width$}  {}", plain(v))?;
            }
        }
        Format::Json => {
            let obj: Map<String, Value> = record.fields.iter().cloned().collect();
            writeln!(out, "{}", Value::Object(obj))?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(record.fields.iter().map(|(k, _)| k.as_str()))?;
            w.write_record(record.fields.iter().map(|(_, v)| plain(v)))?;
            w.flush()?;
        }
    }
    Ok(())
}

fn census_values(row: &CensusRow) -> Vec<Value> {
    vec![
        json!(row.canonical.rank()),
        json!(row.canonical.to_string()),
        json!(row.manifold.to_string()),
        json!(row.pi1.to_string()),
        serde_json::to_value(row.realization).expect("serializable"),
        json!(row.verified),
        json!(row.class_size),
    ]
}

fn action_text(row: &CensusRow) -> String {
    row.realization.map(|r| r.to_string()).unwrap_or_default()
}

/// Census table. JSON is newline-delimited: a header object, then one record per class.
pub fn emit_census(
    out: &mut dyn Write,
    format: Format,
    rank: usize,
    bound: i64,
    rows: &[CensusRow],
) -> anyhow::Result<()> {
    match format {
        Format::Json => {
            let header = json!({
                "format": CENSUS_FORMAT,
                "version": CENSUS_VERSION,
                "rank": rank,
                "bound": bound,
                "columns": CENSUS_COLUMNS,
                "rows": rows.len(),
            });
            writeln!(out, "{header}")?;
            for row in rows {
                let obj: Map<String, Value> = CENSUS_COLUMNS
                    .iter()
                    .map(|c| c.to_string())
                    .zip(census_values(row))
                    .collect();
                writeln!(out, "{}", Value::Object(obj))?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CENSUS_COLUMNS)?;
            for row in rows {
                let mut cells: Vec<String> = census_values(row).iter().map(plain).collect();
                cells[4] = action_text(row);
                w.write_record(&cells)?;
            }
            w.flush()?;
        }
        Format::Table => {
            let body: Vec<[String; 5]> = rows
                .iter()
                .map(|r| {
                    [
                        r.canonical.to_string(),
                        r.manifold.to_string(),
                        r.pi1.to_string(),
                        action_text(r),
                        r.verified.to_string(),
                    ]
                })
                .collect();
            let titles = ["weights", "type", "pi1", "action", "verified"];
            let widths: Vec<usize> = (0..5)
                .map(|i| {
                    body.iter()
                        .map(|r| r[i].len())
                        .chain([titles[i].len()])
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |cells: [&str; 5]| {
                cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:<w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
                    .trim_end()
                    .to_string()
            };
            writeln!(out, "{}", line(titles))?;
            for r in &body {
                writeln!(out, "{}", line([&r[0], &r[1], &r[2], &r[3], &r[4]]))?;
            }
            writeln!(
                out,
                "{} classes (rank {rank}, entries in [-{bound},{bound}])",
                rows.len()
            )?;
        }
    }
    Ok(())
}
