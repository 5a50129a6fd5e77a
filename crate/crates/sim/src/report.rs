//! Report emission: the pinned CSV layout, a JSON mirror, and a matplotlib
//! sidecar script that reads the data file by relative path.

use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::OutputFormat;
use crate::experiment::{CorrelationRecord, OracleRecord};

/// Exact column layout of an experiment CSV. Changing this breaks consumers.
pub const CSV_HEADER: &str =
    "eta,N_pp,N_pm,N_mp,N_mm,N_p0,N_m0,N_0p,N_0m,N_00,g,E_mc,E_stderr,E_oracle,E_quantum";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("nothing to report: record list is empty")]
    NothingToReport,
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("serialization failed: {0}")]
    Serialize(#[from] serde_json::Error),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ReportError + '_ {
    move |source| ReportError::Io { path: path.display().to_string(), source }
}

pub fn render_csv(records: &[CorrelationRecord]) -> Result<String, ReportError> {
    if records.is_empty() {
        return Err(ReportError::NothingToReport);
    }
    let mut out = String::with_capacity(records.len() * 96 + CSV_HEADER.len() + 1);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.eta,
            r.n_pp,
            r.n_pm,
            r.n_mp,
            r.n_mm,
            r.n_p0,
            r.n_m0,
            r.n_0p,
            r.n_0m,
            r.n_00,
            r.g,
            r.e_mc,
            r.e_stderr,
            r.e_oracle,
            r.e_quantum
        ));
    }
    Ok(out)
}

pub fn render_json(records: &[CorrelationRecord]) -> Result<String, ReportError> {
    if records.is_empty() {
        return Err(ReportError::NothingToReport);
    }
    let mut out = serde_json::to_string_pretty(records)?;
    out.push('\n');
    Ok(out)
}

pub fn render_records(
    records: &[CorrelationRecord],
    format: OutputFormat,
) -> Result<String, ReportError> {
    match format {
        OutputFormat::Csv => render_csv(records),
        OutputFormat::Json => render_json(records),
    }
}

/// Oracle-only table (no Monte Carlo columns).
pub fn render_oracle(
    records: &[OracleRecord],
    format: OutputFormat,
) -> Result<String, ReportError> {
    if records.is_empty() {
        return Err(ReportError::NothingToReport);
    }
    match format {
        OutputFormat::Csv => {
            let mut out = String::from("eta,p_opposite,p_same,p_single,E_oracle,E_quantum\n");
            for r in records {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.eta, r.p_opposite, r.p_same, r.p_single, r.e_oracle, r.e_quantum
                ));
            }
            Ok(out)
        }
        OutputFormat::Json => {
            let mut out = serde_json::to_string_pretty(records)?;
            out.push('\n');
            Ok(out)
        }
    }
}

/// Path of the plot sidecar that accompanies a data file.
pub fn sidecar_path(data_path: &Path) -> PathBuf {
    let mut name = data_path.file_name().unwrap_or_default().to_os_string();
    name.push(".plot.py");
    data_path.with_file_name(name)
}

/// A matplotlib script plotting the three correlation series against eta.
/// It references the data file by its bare file name, so the pair can move
/// together between directories.
pub fn plot_script(data_file_name: &str, format: OutputFormat) -> String {
    let loader = match format {
        OutputFormat::Csv => format!(
            "import csv\n\
             with open({data_file_name:?}) as fh:\n\
             \x20   rows = [{{k: float(v) for k, v in row.items()}} for row in csv.DictReader(fh)]\n"
        ),
        OutputFormat::Json => format!(
            "import json\n\
             with open({data_file_name:?}) as fh:\n\
             \x20   rows = json.load(fh)\n"
        ),
    };
    format!(
        "#!/usr/bin/env python3\n\
         # Correlation vs eta for the run stored in {data_file_name}.\n\
         import matplotlib\n\
         matplotlib.use(\"Agg\")\n\
         import matplotlib.pyplot as plt\n\
         {loader}\
         eta = [r[\"eta\"] for r in rows]\n\
         plt.figure(figsize=(7, 4.5))\n\
         plt.errorbar(eta, [r[\"E_mc\"] for r in rows], yerr=[r[\"E_stderr\"] for r in rows],\n\
         \x20            fmt=\"o\", ms=3, capsize=2, label=\"Monte Carlo\")\n\
         plt.plot(eta, [r[\"E_oracle\"] for r in rows], \"-\", lw=1, label=\"quadrature oracle\")\n\
         plt.plot(eta, [r[\"E_quantum\"] for r in rows], \"--\", lw=1, label=\"-cos(eta)\")\n\
         plt.xlabel(\"eta (rad)\")\n\
         plt.ylabel(\"E(eta)\")\n\
         plt.legend()\n\
         plt.tight_layout()\n\
         plt.savefig({png_name:?}, dpi=150)\n\
         print(\"wrote\", {png_name:?})\n",
        data_file_name = data_file_name,
        loader = loader,
        png_name = format!("{data_file_name}.png"),
    )
}

/// Writes the data file and its plot sidecar.
pub fn write_report(
    records: &[CorrelationRecord],
    format: OutputFormat,
    path: &Path,
) -> Result<(), ReportError> {
    let body = render_records(records, format)?;
    write_with_sidecar(&body, format, path)
}

/// Writes arbitrary rendered content plus the sidecar referencing it.
pub fn write_with_sidecar(
    body: &str,
    format: OutputFormat,
    path: &Path,
) -> Result<(), ReportError> {
    let mut file = std::fs::File::create(path).map_err(io_err(path))?;
    file.write_all(body.as_bytes()).map_err(io_err(path))?;
    let data_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let sidecar = sidecar_path(path);
    std::fs::write(&sidecar, plot_script(&data_name, format)).map_err(io_err(&sidecar))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_record(eta: f64) -> CorrelationRecord {
        CorrelationRecord {
            eta,
            n_pp: 1,
            n_pm: 2,
            n_mp: 3,
            n_mm: 4,
            n_p0: 5,
            n_m0: 6,
            n_0p: 7,
            n_0m: 8,
            n_00: 9,
            g: 0.25,
            e_mc: -0.123456789,
            e_stderr: 0.001,
            e_oracle: -0.12,
            e_quantum: -0.125,
        }
    }

    #[test]
    fn csv_has_header_plus_one_line_per_record() {
        let records: Vec<_> = (0..37).map(|i| sample_record(i as f64 * 0.08)).collect();
        let csv = render_csv(&records).unwrap();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines.len(), 38);
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[1].starts_with("0,1,2,3,4,5,6,7,8,9,0.25,"));
    }

    #[test]
    fn empty_records_error() {
        assert!(matches!(render_csv(&[]), Err(ReportError::NothingToReport)));
        assert!(matches!(render_json(&[]), Err(ReportError::NothingToReport)));
    }

    #[test]
    fn json_round_trips() {
        let records: Vec<_> = (0..5).map(|i| sample_record(i as f64 * 0.7)).collect();
        let json = render_json(&records).unwrap();
        let parsed: Vec<CorrelationRecord> = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed, records);
        // field names mirror the CSV columns
        assert!(json.contains("\"N_pp\""));
        assert!(json.contains("\"E_mc\""));
    }

    #[test]
    fn sidecar_references_data_file() {
        let script = plot_script("run.csv", OutputFormat::Csv);
        assert!(script.contains("\"run.csv\""));
        assert!(script.contains("run.csv.png"));
        let script = plot_script("run.json", OutputFormat::Json);
        assert!(script.contains("json.load"));
    }

    #[test]
    fn write_report_creates_both_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_report(&[sample_record(0.1)], OutputFormat::Csv, &path).unwrap();
        assert!(path.exists());
        assert!(dir.path().join("out.csv.plot.py").exists());
    }
}
