//! Experiment reports: a self-contained JSON document plus CSV density exports.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::{best_record, errors, times, RunRecord};
use crate::io::config::ExperimentConfig;
use crate::io::{write_atomic, write_unique};
use crate::stats::{export_density, summarize, Density, DistributionStats, CI_METHOD};

pub const TOOLKIT: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Summary and density of one outcome column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnAnalysis {
    pub stats: DistributionStats,
    /// Absent when all samples are identical.
    pub density: Option<Density>,
}

impl ColumnAnalysis {
    pub fn of(samples: &[f64], n_grid: usize) -> Result<Self> {
        match export_density(samples, n_grid) {
            Ok(density) => Ok(ColumnAnalysis {
                stats: summarize(samples, &density),
                density: Some(density),
            }),
            Err(Error::DegenerateSample { .. }) => Ok(ColumnAnalysis {
                stats: crate::stats::infer_stats(samples, n_grid)?,
                density: None,
            }),
            Err(e) => Err(e),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub toolkit: String,
    pub version: String,
    pub generated_at: String,
    pub ci_method: String,
    pub config: ExperimentConfig,
    pub records: Vec<RunRecord>,
    pub error: ColumnAnalysis,
    pub time: ColumnAnalysis,
    pub best_run: RunRecord,
}

impl ExperimentReport {
    /// Builds a report; needs at least two records for the density estimates.
    pub fn new(config: ExperimentConfig, records: Vec<RunRecord>) -> Result<Self> {
        let n_grid = config.density_points;
        let error = ColumnAnalysis::of(&errors(&records), n_grid)?;
        let time = ColumnAnalysis::of(&times(&records), n_grid)?;
        let best_run = best_record(&records)
            .cloned()
            .ok_or(Error::TooFewSamples { need: 2, got: 0 })?;
        Ok(ExperimentReport {
            toolkit: TOOLKIT.to_string(),
            version: VERSION.to_string(),
            generated_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            ci_method: CI_METHOD.to_string(),
            config,
            records,
            error,
            time,
            best_run,
        })
    }

    /// Recomputes the error and time analyses from the stored records.
    pub fn reanalyze(&self) -> Result<(ColumnAnalysis, ColumnAnalysis)> {
        let n_grid = self.config.density_points;
        Ok((
            ColumnAnalysis::of(&errors(&self.records), n_grid)?,
            ColumnAnalysis::of(&times(&self.records), n_grid)?,
        ))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is always serializable") + "\n"
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
    }

    /// Default file stem: `<material>-<algorithm>-<strategy>-seed<seed>`.
    pub fn stem(&self) -> String {
        let strategy = self.best_run.strategy.replace('%', "pct");
        format!(
            "{}-{}-{}-seed{}",
            self.config.material, self.best_run.algorithm, strategy, self.config.seed
        )
    }

    /// Writes `<stem>.json` and the density CSVs into `dir`, never replacing an
    /// earlier report: a numeric suffix is added when the stem is taken.
    /// Returns the JSON path.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let (path, stem) = write_unique(dir, &self.stem(), "json", self.to_json().as_bytes())?;
        for (column, analysis) in [("error", &self.error), ("time", &self.time)] {
            if let Some(d) = &analysis.density {
                let csv_path = dir.join(format!("{stem}.{column}_density.csv"));
                write_atomic(&csv_path, density_csv(column, d).as_bytes(), false)?;
            }
        }
        Ok(path)
    }

    /// Human-readable table in the layout Best/Worst, Max. Likelihood, 95% bounds.
    pub fn summary_table(&self) -> String {
        summary_table(&self.error.stats, &self.time.stats)
    }
}

fn density_csv(column: &str, d: &Density) -> String {
    let mut out = format!("{column},density\n");
    for (x, y) in d.grid.iter().zip(&d.density) {
        let _ = writeln!(out, "{x:e},{y:e}");
    }
    out
}

/// Rows: Best Case, Worst Case, Max. Likelihood, 95% Lower, 95% Upper.
pub fn summary_table(error: &DistributionStats, time: &DistributionStats) -> String {
    let rows = [
        ("Best Case", error.best, time.best),
        ("Worst Case", error.worst, time.worst),
        ("Max. Likelihood", error.ml_estimate, time.ml_estimate),
        ("95% Lower", error.ci_lower, time.ci_lower),
        ("95% Upper", error.ci_upper, time.ci_upper),
    ];
    let mut out = String::new();
    let _ = writeln!(out, "{:<16} {:>14} {:>12}", "", "Error [%]", "Time [s]");
    for (label, e, t) in rows {
        let _ = writeln!(out, "{label:<16} {e:>14.6} {t:>12.3}");
    }
    let mut notes = Vec::new();
    for (name, s) in [("error", error), ("time", time)] {
        if s.ml_outside_ci {
            notes.push(format!("{name}: density mode lies outside the 95% interval (multimodal)"));
        }
        if s.ci_clamped {
            notes.push(format!("{name}: interval clipped to the observed range"));
        }
    }
    for n in notes {
        let _ = writeln!(out, "note: {n}");
    }
    out
}
