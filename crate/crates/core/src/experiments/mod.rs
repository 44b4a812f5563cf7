//! Reproducible experiment drivers behind the `qra` binary.
//!
//! Every command turns an [`ExperimentConfig`] plus a seed into a [`Report`]:
//! result rows (one measured value each, with the analytic value and standard
//! error when they exist), plot-ready curves, and pass/fail checks over the
//! run's own invariants. Rows go to one CSV, curves to a two-column CSV each,
//! and the whole report to a JSON summary. Same config, same seed, same
//! bytes.

pub mod epsilon_bound;
pub mod hash_impossibility;
pub mod protocol;
pub mod sample_length;
pub mod swap_rotation;
pub mod tomography_cost;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};

pub const COMMANDS: &[&str] = &[
    "swap_rotation",
    "sample_length",
    "tomography_cost",
    "protocol",
    "hash_impossibility",
    "epsilon_bound",
];

/// Fixed header of the result CSV.
pub const CSV_HEADER: &str = "experiment,params,measured,analytic,std_err,trials,seed";

/// One measured value. `std_err` is always set when `measured` is an
/// empirical frequency; `analytic` whenever a closed form exists.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub params: String,
    pub measured: f64,
    pub analytic: Option<f64>,
    pub std_err: Option<f64>,
    pub trials: u64,
    pub seed: u64,
}

impl ResultRow {
    fn csv_line(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{}",
            self.experiment,
            self.params,
            self.measured,
            opt(self.analytic),
            opt(self.std_err),
            self.trials,
            self.seed
        )
    }
}

/// A named invariant verdict; any failure turns the run's exit code to 2.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Plot-ready curve; written as a two-column CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Curve {
    pub name: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub rows: Vec<ResultRow>,
    pub curves: Vec<Curve>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(command: &str, seed: u64) -> Self {
        Report {
            command: command.to_string(),
            seed,
            rows: Vec::new(),
            curves: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn row(
        &mut self,
        params: String,
        measured: f64,
        analytic: Option<f64>,
        std_err: Option<f64>,
        trials: u64,
    ) {
        self.rows.push(ResultRow {
            experiment: self.command.clone(),
            params,
            measured,
            analytic,
            std_err,
            trials,
            seed: self.seed,
        });
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check::new(name, passed, detail));
    }

    /// Write rows, curves, and the JSON summary under `out_dir`; returns the
    /// paths written.
    pub fn write(&self, out_dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(out_dir)?;
        let mut written = Vec::new();

        let rows_path = out_dir.join(format!("{}_rows.csv", self.command));
        let mut csv = String::from(CSV_HEADER);
        csv.push('\n');
        for r in &self.rows {
            csv.push_str(&r.csv_line());
            csv.push('\n');
        }
        std::fs::write(&rows_path, csv)?;
        written.push(rows_path);

        for curve in &self.curves {
            let path = out_dir.join(format!("{}_curve_{}.csv", self.command, curve.name));
            let mut text = format!("{},{}\n", curve.x_label, curve.y_label);
            for (x, y) in &curve.points {
                let _ = writeln!(text, "{x},{y}");
            }
            std::fs::write(&path, text)?;
            written.push(path);
        }

        let summary_path = out_dir.join(format!("{}_summary.json", self.command));
        #[derive(Serialize)]
        struct Summary<'a> {
            command: &'a str,
            seed: u64,
            passed: bool,
            checks: &'a [Check],
            rows: &'a [ResultRow],
            curves: Vec<&'a str>,
        }
        let summary = Summary {
            command: &self.command,
            seed: self.seed,
            passed: self.all_passed(),
            checks: &self.checks,
            rows: &self.rows,
            curves: self.curves.iter().map(|c| c.name.as_str()).collect(),
        };
        std::fs::write(&summary_path, serde_json::to_string_pretty(&summary)?)?;
        written.push(summary_path);
        Ok(written)
    }
}

/// Dispatch a command by name.
pub fn run_command(
    command: &str,
    cfg: &ExperimentConfig,
    seed: u64,
    trials: Option<u64>,
) -> Result<Report> {
    cfg.check_experiment(command)?;
    match command {
        "swap_rotation" => swap_rotation::run(cfg, seed, trials),
        "sample_length" => sample_length::run(cfg, seed, trials),
        "tomography_cost" => tomography_cost::run(cfg, seed, trials),
        "protocol" => protocol::run(cfg, seed, trials),
        "hash_impossibility" => hash_impossibility::run(cfg, seed, trials),
        "epsilon_bound" => epsilon_bound::run(cfg, seed, trials),
        other => Err(Error::InvalidArgument(format!(
            "unknown experiment '{other}'; expected one of {}",
            COMMANDS.join(", ")
        ))),
    }
}

/// `|measured - analytic| <= slack`, with a tiny absolute floor so exact
/// cases (std err zero) compare cleanly.
pub(crate) fn within(measured: f64, analytic: f64, slack: f64) -> bool {
    (measured - analytic).abs() <= slack + 1e-12
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rows_render_missing_fields_empty() {
        let row = ResultRow {
            experiment: "x".into(),
            params: "a=1".into(),
            measured: 0.5,
            analytic: None,
            std_err: Some(0.01),
            trials: 100,
            seed: 7,
        };
        assert_eq!(row.csv_line(), "x,a=1,0.5,,0.01,100,7");
    }

    #[test]
    fn unknown_command_is_rejected() {
        let cfg = ExperimentConfig::default();
        assert!(run_command("nope", &cfg, 0, None).is_err());
    }

    #[test]
    fn report_files_land_in_the_out_dir() {
        let dir = tempfile::tempdir().unwrap();
        let mut rep = Report::new("demo", 3);
        rep.row("q=0".into(), 1.0, Some(1.0), None, 10);
        rep.curves.push(Curve {
            name: "main".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            points: vec![(0.0, 1.0), (1.0, 2.0)],
        });
        rep.check("demo_check", true, "fine".into());
        let files = rep.write(dir.path()).unwrap();
        assert_eq!(files.len(), 3);
        let csv = std::fs::read_to_string(&files[0]).unwrap();
        assert!(csv.starts_with(CSV_HEADER));
        let curve = std::fs::read_to_string(&files[1]).unwrap();
        assert_eq!(curve, "x,y\n0,1\n1,2\n");
        let summary = std::fs::read_to_string(&files[2]).unwrap();
        assert!(summary.contains("\"passed\": true"));
    }
}
