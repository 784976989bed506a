use std::fs;
use std::path::{Path, PathBuf};

use biphoton_core::pipeline::{run_keeping_screen, GridPlan};
use biphoton_core::{ComplexField2D, ExperimentParams, PipelineError, Report, ScenarioKind};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ConfigError, OutputKind, ScenarioSpec, SweepParam};
use crate::{csv, snapshot, svg};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("pipeline stage {0}")]
    Pipeline(#[from] PipelineError),
    #[error("numeric oracle skipped: {0}")]
    OracleSkipped(String),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0} sweep point(s) failed")]
    SweepPoints(usize),
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

impl RunError {
    /// Process exit code: 1 for configuration and IO problems, 2 for numeric
    /// failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) | RunError::Write { .. } | RunError::Pool(_) => 1,
            RunError::Pipeline(_) | RunError::OracleSkipped(_) | RunError::SweepPoints(_) => 2,
        }
    }
}

/// Writes through a sibling temporary file and a rename, so readers never see
/// a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    let wrap = |source| RunError::Write {
        path: path.to_path_buf(),
        source,
    };
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
    fs::write(&tmp, bytes).map_err(wrap)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        wrap(e)
    })
}

fn plan_for(spec: &ScenarioSpec, params: &ExperimentParams) -> Result<GridPlan, PipelineError> {
    let mut plan = GridPlan::auto(params).map_err(|source| PipelineError {
        stage: "plan",
        source,
    })?;
    if let Some(screen) = spec.grid {
        plan.screen = screen;
    }
    Ok(plan)
}

pub fn report_json(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("report serializes") + "\n"
}

fn write_outputs(
    spec: &ScenarioSpec,
    report: &Report,
    screen: Option<&ComplexField2D>,
    dir: &Path,
    stem: &str,
) -> Result<Vec<PathBuf>, RunError> {
    fs::create_dir_all(dir).map_err(|source| RunError::Write {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    for kind in &spec.outputs {
        let (path, bytes) = match kind {
            OutputKind::Csv => (
                dir.join(format!("{stem}.csv")),
                csv::patterns_csv(&report.analytic, report.numeric.as_ref()).into_bytes(),
            ),
            OutputKind::Svg => {
                let title = format!("{} ({})", report.kind, report.layout.detection);
                (
                    dir.join(format!("{stem}.svg")),
                    svg::render(&title, &report.analytic, report.numeric.as_ref()).into_bytes(),
                )
            }
            OutputKind::Report => (dir.join(format!("{stem}.report.json")), report_json(report).into_bytes()),
            OutputKind::Snapshot => {
                let Some(field) = screen else { continue };
                let mut bytes = Vec::new();
                snapshot::write(field, &mut bytes).expect("in-memory write");
                (dir.join(format!("{stem}.field.bin")), bytes)
            }
        };
        write_atomic(&path, &bytes)?;
        written.push(path);
    }
    Ok(written)
}

fn run_point(
    spec: &ScenarioSpec,
    params: &ExperimentParams,
    dir: &Path,
    stem: &str,
) -> Result<(Report, Vec<PathBuf>), RunError> {
    let plan = plan_for(spec, params)?;
    let (report, screen) = run_keeping_screen(spec.scenario, params, &plan)?;
    let files = write_outputs(spec, &report, screen.as_ref(), dir, stem)?;
    Ok((report, files))
}

/// Runs the configured scenario once and writes its outputs. A skipped oracle
/// is reported as an error after the analytic outputs are written.
pub fn run_scenario(spec: &ScenarioSpec, dir: &Path) -> Result<(Report, Vec<PathBuf>), RunError> {
    spec.validate()?;
    let (report, files) = run_point(spec, &spec.params, dir, spec.scenario.name())?;
    if let Some(reason) = &report.oracle_skipped {
        return Err(RunError::OracleSkipped(reason.clone()));
    }
    Ok((report, files))
}

/// Summary line of one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub spacing_analytic: Option<f64>,
    pub spacing_numeric: Option<f64>,
    pub visibility_analytic: Option<f64>,
    pub visibility_numeric: Option<f64>,
    pub p_same: Option<f64>,
    pub p_diff: Option<f64>,
    pub p_diff_oracle: Option<f64>,
    pub central_l2_err: Option<f64>,
    pub oracle_skipped: Option<String>,
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct SweepReport {
    pub scenario: ScenarioKind,
    pub param: SweepParam,
    pub rows: Vec<SweepRow>,
    #[serde(skip)]
    pub reports: Vec<Result<Report, String>>,
}

impl SweepReport {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }

    pub fn summary_csv(&self) -> String {
        let opt = |v: Option<f64>| csv::c_exp(v.unwrap_or(f64::NAN));
        let mut out = format!(
            "{},spacing_analytic,spacing_numeric,visibility_analytic,visibility_numeric,p_same,p_diff,p_diff_oracle,central_l2_err\n",
            self.param.name()
        );
        for r in &self.rows {
            out += &[
                csv::c_exp(r.value),
                opt(r.spacing_analytic),
                opt(r.spacing_numeric),
                opt(r.visibility_analytic),
                opt(r.visibility_numeric),
                opt(r.p_same),
                opt(r.p_diff),
                opt(r.p_diff_oracle),
                opt(r.central_l2_err),
            ]
            .join(",");
            out.push('\n');
        }
        out
    }
}

fn row(value: f64, result: &Result<Report, String>) -> SweepRow {
    match result {
        Ok(r) => SweepRow {
            value,
            spacing_analytic: r.analytic_metrics.map(|m| m.spacing),
            spacing_numeric: r.numeric_metrics.map(|m| m.spacing),
            visibility_analytic: r.analytic_metrics.map(|m| m.visibility),
            visibility_numeric: r.numeric_metrics.map(|m| m.visibility),
            p_same: Some(r.case_weights.analytic.p_same),
            p_diff: Some(r.case_weights.analytic.p_diff),
            p_diff_oracle: r.case_weights.oracle.map(|w| w.p_diff),
            central_l2_err: r.comparison_central.map(|c| c.l2_err),
            oracle_skipped: r.oracle_skipped.clone(),
            error: None,
        },
        Err(e) => SweepRow {
            value,
            spacing_analytic: None,
            spacing_numeric: None,
            visibility_analytic: None,
            visibility_numeric: None,
            p_same: None,
            p_diff: None,
            p_diff_oracle: None,
            central_l2_err: None,
            oracle_skipped: None,
            error: Some(e.clone()),
        },
    }
}

/// Runs every sweep point on at most `jobs` threads. Points are independent;
/// a failing point is recorded in its row and the others still run. Results
/// keep the order of the configured values.
pub fn run_sweep(spec: &ScenarioSpec, dir: &Path, jobs: usize) -> Result<SweepReport, RunError> {
    spec.validate()?;
    let sweep = spec
        .sweep
        .as_ref()
        .ok_or_else(|| ConfigError::Sweep("no sweep configured".into()))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| RunError::Pool(e.to_string()))?;
    let scenario = spec.scenario.name();
    let param = sweep.param.name();
    let results: Vec<Result<Report, String>> = pool.install(|| {
        sweep
            .values
            .par_iter()
            .enumerate()
            .map(|(i, &v)| {
                let params = sweep.param.apply(&spec.params, v);
                let stem = format!("{scenario}_{param}_{i:02}");
                run_point(spec, &params, dir, &stem)
                    .map(|(report, _)| report)
                    .map_err(|e| e.to_string())
            })
            .collect()
    });
    let rows = sweep.values.iter().zip(&results).map(|(&v, r)| row(v, r)).collect();
    let report = SweepReport {
        scenario: spec.scenario,
        param: sweep.param,
        rows,
        reports: results,
    };
    let stem = format!("{scenario}_sweep_{param}");
    write_atomic(&dir.join(format!("{stem}.csv")), report.summary_csv().as_bytes())?;
    let json = serde_json::to_string_pretty(&report).expect("summary serializes") + "\n";
    write_atomic(&dir.join(format!("{stem}.json")), json.as_bytes())?;
    Ok(report)
}
