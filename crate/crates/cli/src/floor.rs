use std::path::Path;

use attenuant_core::schemes::{self, Branch, FloorValue};
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::output::{fmt12, round12, write_json};

#[derive(Debug, Serialize)]
pub struct FloorRow {
    pub lambda: f64,
    pub branch: &'static str,
    pub n: Option<usize>,
    pub value: f64,
}

impl From<&FloorValue> for FloorRow {
    fn from(f: &FloorValue) -> Self {
        let (branch, n) = match f.choice.branch {
            Branch::Vacuum => ("vacuum", None),
            Branch::XiOneThird => ("xi_one_third", None),
            Branch::Fock(n) => ("fock", Some(n)),
        };
        Self { lambda: round12(f.lambda), branch, n, value: round12(f.value) }
    }
}

#[derive(Debug, Serialize)]
struct FloorReport<'a> {
    config: &'a RunConfig,
    small_lambda_asymptote: f64,
    global_min: &'a FloorRow,
    points: &'a [FloorRow],
}

pub fn run(config: &RunConfig, lambda: Option<f64>, lambda_min: f64) -> Result<(), CliError> {
    let values = match lambda {
        Some(l) => vec![schemes::capacity_floor(l, config.eps)?],
        None => {
            let grid = schemes::floor_grid(lambda_min, config.eps, config.resolution)?;
            schemes::floor_sweep(&grid, config.eps)?
        }
    };
    let rows: Vec<FloorRow> = values.iter().map(FloorRow::from).collect();
    let min = rows
        .iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .ok_or_else(|| CliError::Config("empty λ grid".into()))?;
    match config.format {
        Format::Json => write_json(
            &FloorReport {
                config,
                small_lambda_asymptote: round12(schemes::small_lambda_asymptote()),
                global_min: min,
                points: &rows,
            },
            config.output.as_deref(),
        ),
        Format::Csv => write_csv(&rows, config.output.as_deref()),
    }
}

fn write_csv(rows: &[FloorRow], out: Option<&Path>) -> Result<(), CliError> {
    let sink: Box<dyn std::io::Write> = match out {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["lambda", "branch", "n", "value"])?;
    for r in rows {
        w.write_record([fmt12(r.lambda), r.branch.to_string(), r.n.map(|n| n.to_string()).unwrap_or_default(), fmt12(r.value)])?;
    }
    w.flush()?;
    Ok(())
}
