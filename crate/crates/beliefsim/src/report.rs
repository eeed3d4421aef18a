//! Table rendering and file output: CSV and aligned markdown mirroring the
//! result-table layout, histogram data files, and the run manifest.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::harness::{RbHistogram, ScenarioConfig, SweepResult};
use crate::procedures::Procedure;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("failed writing {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

/// Output table format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TableFormat {
    Csv,
    Markdown,
}

impl TableFormat {
    pub fn extension(self) -> &'static str {
        match self {
            TableFormat::Csv => "csv",
            TableFormat::Markdown => "md",
        }
    }
}

impl std::str::FromStr for TableFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "markdown" | "md" => Ok(TableFormat::Markdown),
            _ => Err(format!("unknown format '{s}' (expected csv or markdown)")),
        }
    }
}

/// The metrics a table can be rendered for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricId {
    Mse,
    MinMse,
    Re,
    Pe,
    Pc,
    Dprime,
}

impl MetricId {
    pub const ALL: [MetricId; 6] = [
        MetricId::Mse,
        MetricId::MinMse,
        MetricId::Re,
        MetricId::Pe,
        MetricId::Pc,
        MetricId::Dprime,
    ];

    pub fn id(self) -> &'static str {
        match self {
            MetricId::Mse => "mse",
            MetricId::MinMse => "min_mse",
            MetricId::Re => "re",
            MetricId::Pe => "pe",
            MetricId::Pc => "pc",
            MetricId::Dprime => "dprime",
        }
    }

    fn title(self) -> &'static str {
        match self {
            MetricId::Mse => "Expected Mean-Squared Error",
            MetricId::MinMse => "Minimum Possible Mean-Squared Error",
            MetricId::Re => "Expected Relative Error",
            MetricId::Pe => "Expected Error Mass",
            MetricId::Pc => "Expected Correct Mass",
            MetricId::Dprime => "Expected d'",
        }
    }

    /// Printed decimal places in markdown: three everywhere except d'
    /// with two.
    fn markdown_decimals(self) -> usize {
        match self {
            MetricId::Dprime => 2,
            _ => 3,
        }
    }
}

impl std::str::FromStr for MetricId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MetricId::ALL
            .iter()
            .copied()
            .find(|m| m.id() == s)
            .ok_or_else(|| format!("unknown metric '{s}'"))
    }
}

/// The tabled value and its standard error for one cell. Relative error
/// and d' report the run-level statistics; the rest are per-case means.
fn cell_values(
    result: &SweepResult,
    metric: MetricId,
    row: usize,
    procedure: Procedure,
) -> (f64, f64, u32) {
    if metric == MetricId::MinMse {
        let agg = &result.rows[row].min_mse;
        return (agg.mean, agg.std_error, agg.excluded);
    }
    let cell = result.rows[row]
        .cell(procedure)
        .expect("procedure present in sweep");
    match metric {
        MetricId::Mse => (cell.mse.mean, cell.mse.std_error, cell.mse.excluded),
        MetricId::Pe => (cell.pe.mean, cell.pe.std_error, cell.pe.excluded),
        MetricId::Pc => (cell.pc.mean, cell.pc.std_error, cell.pc.excluded),
        MetricId::Re => (
            cell.re_aggregate.value,
            cell.re_aggregate.std_error,
            cell.re.excluded,
        ),
        MetricId::Dprime => (
            cell.dprime_aggregate.value,
            cell.dprime_aggregate.std_error,
            cell.dprime.excluded,
        ),
        MetricId::MinMse => unreachable!(),
    }
}

fn format_value(value: f64, decimals: usize) -> String {
    if value.is_nan() {
        "nan".into()
    } else {
        format!("{value:.*}", decimals)
    }
}

/// Procedures of the sweep in fixed table-column order.
fn column_order(config: &ScenarioConfig) -> Vec<Procedure> {
    Procedure::ALL
        .into_iter()
        .filter(|p| config.procedures.contains(p))
        .collect()
}

/// Renders one metric as a table. CSV carries the mean at three decimals
/// plus full-precision standard-error and exclusion-count companions (and
/// the z-score diagnostic next to d'); markdown mirrors the printed-table
/// layout, with the MSE table ending in the Minimum Possible column.
pub fn render_table(result: &SweepResult, metric: MetricId, format: TableFormat) -> String {
    let columns = column_order(&result.config);
    match format {
        TableFormat::Csv => render_csv(result, metric, &columns),
        TableFormat::Markdown => render_markdown(result, metric, &columns),
    }
}

fn render_csv(result: &SweepResult, metric: MetricId, columns: &[Procedure]) -> String {
    let per_case_companions = matches!(metric, MetricId::Re | MetricId::Dprime);
    let mut header = vec!["error_range".to_string()];
    if metric == MetricId::MinMse {
        header.push("min_mse".into());
        header.push("min_mse_se".into());
    } else {
        for p in columns {
            header.push(p.id().to_string());
            header.push(format!("{}_se", p.id()));
            header.push(format!("{}_excluded", p.id()));
            if per_case_companions {
                header.push(format!("{}_case_mean", p.id()));
                header.push(format!("{}_case_se", p.id()));
            }
            if metric == MetricId::Dprime {
                header.push(format!("{}_z_approx", p.id()));
            }
        }
        if metric == MetricId::Mse {
            header.push("min_mse".into());
            header.push("min_mse_se".into());
        }
    }
    let mut out = header.join(",");
    out.push('\n');

    for (row_index, row) in result.rows.iter().enumerate() {
        let mut fields = vec![format!("{:.3}", row.range)];
        if metric == MetricId::MinMse {
            fields.push(format_value(row.min_mse.mean, 3));
            fields.push(format!("{}", row.min_mse.std_error));
        } else {
            for &p in columns {
                let (mean, se, excluded) = cell_values(result, metric, row_index, p);
                fields.push(format_value(mean, 3));
                fields.push(format!("{se}"));
                fields.push(format!("{excluded}"));
                if per_case_companions {
                    let cell = row.cell(p).expect("procedure present");
                    let case = match metric {
                        MetricId::Re => &cell.re,
                        _ => &cell.dprime,
                    };
                    fields.push(format!("{}", case.mean));
                    fields.push(format!("{}", case.std_error));
                }
                if metric == MetricId::Dprime {
                    let z = row.cell(p).expect("procedure present").dprime_z.mean;
                    fields.push(format!("{z}"));
                }
            }
            if metric == MetricId::Mse {
                fields.push(format_value(row.min_mse.mean, 3));
                fields.push(format!("{}", row.min_mse.std_error));
            }
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

fn render_markdown(result: &SweepResult, metric: MetricId, columns: &[Procedure]) -> String {
    let decimals = metric.markdown_decimals();
    let mut headers = vec!["Error Range".to_string()];
    if metric == MetricId::MinMse {
        headers.push("Minimum Possible".into());
    } else {
        headers.extend(columns.iter().map(|p| p.table_label().to_string()));
        if metric == MetricId::Mse {
            headers.push("Minimum Possible".into());
        }
    }

    let mut rows: Vec<Vec<String>> = Vec::new();
    for (row_index, row) in result.rows.iter().enumerate() {
        let mut fields = vec![format!("{:.3}", row.range)];
        if metric == MetricId::MinMse {
            fields.push(format_value(row.min_mse.mean, decimals));
        } else {
            for &p in columns {
                let (mean, _, _) = cell_values(result, metric, row_index, p);
                fields.push(format_value(mean, decimals));
            }
            if metric == MetricId::Mse {
                fields.push(format_value(row.min_mse.mean, decimals));
            }
        }
        rows.push(fields);
    }

    let widths: Vec<usize> = headers
        .iter()
        .enumerate()
        .map(|(i, h)| {
            rows.iter()
                .map(|r| r[i].len())
                .chain(std::iter::once(h.len()))
                .max()
                .unwrap()
        })
        .collect();

    let mut out = format!(
        "{} for scenario {}\n\n",
        metric.title(),
        result.config.scenario
    );
    let fmt_row = |fields: &[String]| {
        let cells: Vec<String> = fields
            .iter()
            .zip(&widths)
            .map(|(f, w)| format!("{f:>w$}"))
            .collect();
        format!("| {} |\n", cells.join(" | "))
    };
    out.push_str(&fmt_row(&headers));
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    out.push_str(&format!("| {} |\n", rule.join(" | ")));
    for row in &rows {
        out.push_str(&fmt_row(row));
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<(), ReportError> {
    fs::write(path, contents).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes one metric table to `destination`.
pub fn write_table(
    result: &SweepResult,
    metric: MetricId,
    format: TableFormat,
    destination: &Path,
) -> Result<(), ReportError> {
    write_file(destination, &render_table(result, metric, format))
}

/// Renders one histogram as CSV: one line per bin.
pub fn render_histogram_csv(histogram: &RbHistogram) -> String {
    let mut out = String::from("bin_low,bin_high,mass_given_H_true,mass_given_H_false\n");
    for bin in &histogram.bins {
        out.push_str(&format!(
            "{:.2},{:.2},{},{}\n",
            bin.lo, bin.hi, bin.mass_given_h_true, bin.mass_given_h_false
        ));
    }
    out
}

pub fn write_histogram_csv(histogram: &RbHistogram, destination: &Path) -> Result<(), ReportError> {
    write_file(destination, &render_histogram_csv(histogram))
}

/// Written alongside every output batch: the exact configuration, tool
/// version and produced files. Re-running the tool with the recorded
/// configuration reproduces every listed file byte for byte.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub timestamp_unix: u64,
    pub config: ScenarioConfig,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(config: &ScenarioConfig, outputs: Vec<String>) -> Self {
        let timestamp_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        RunManifest {
            tool: "beliefsim".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            timestamp_unix,
            config: config.clone(),
            outputs,
        }
    }

    pub fn write(&self, destination: &Path) -> Result<(), ReportError> {
        let body = serde_json::to_string_pretty(self).expect("manifest serializes");
        write_file(destination, &format!("{body}\n"))
    }
}
