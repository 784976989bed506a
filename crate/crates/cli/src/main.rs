use std::path::PathBuf;
use std::process::ExitCode;

use biphoton_cli::checks;
use biphoton_cli::config::{ScenarioSpec, SweepSpec};
use biphoton_cli::runner::{run_scenario, run_sweep, RunError};
use clap::Parser;

/// Simulates position-entangled photon pairs through a double slit.
#[derive(Debug, Parser)]
#[command(name = "simulate", version)]
struct Cli {
    /// JSON scenario config (see docs/config.md).
    #[arg(long, required_unless_present = "check")]
    config: Option<PathBuf>,
    /// Override the scenario: biphoton_coincidence, nonlocal_coincidence or conditional_single.
    #[arg(long)]
    scenario: Option<String>,
    /// Sweep one parameter, e.g. `sigma=0.1,0.5,1`.
    #[arg(long)]
    sweep: Option<String>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads for sweeps.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Run the acceptance criteria at the default parameters.
    #[arg(long)]
    check: bool,
}

fn load(cli: &Cli) -> Result<ScenarioSpec, RunError> {
    let mut spec = match &cli.config {
        Some(path) => ScenarioSpec::load(path)?,
        None => ScenarioSpec::default(),
    };
    if let Some(name) = &cli.scenario {
        spec = spec.with_scenario_name(name)?;
    }
    if let Some(arg) = &cli.sweep {
        spec.sweep = Some(SweepSpec::parse(arg)?);
    }
    Ok(spec)
}

fn simulate(cli: &Cli) -> Result<(), RunError> {
    let spec = load(cli)?;
    if spec.sweep.is_some() {
        let report = run_sweep(&spec, &cli.out, cli.jobs)?;
        for row in &report.rows {
            match &row.error {
                Some(e) => eprintln!("{} = {}: {e}", report.param.name(), row.value),
                None => println!(
                    "{} = {}: spacing {:.4}, p_diff/p_same {:.3e}{}",
                    report.param.name(),
                    row.value,
                    row.spacing_analytic.unwrap_or(f64::NAN),
                    row.p_diff.zip(row.p_same).map_or(f64::NAN, |(d, s)| d / s),
                    if row.oracle_skipped.is_some() { " (oracle skipped)" } else { "" },
                ),
            }
        }
        if report.failures() > 0 {
            return Err(RunError::SweepPoints(report.failures()));
        }
        return Ok(());
    }
    let (report, files) = run_scenario(&spec, &cli.out)?;
    if let Some(m) = report.analytic_metrics {
        println!("{}: fringe spacing {:.4} (analytic)", report.kind, m.spacing);
    }
    if let Some(m) = report.numeric_metrics {
        println!("{}: fringe spacing {:.4} (oracle)", report.kind, m.spacing);
    }
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.check {
        let results = checks::run_all();
        for r in &results {
            println!("{r}");
        }
        let failed = results.iter().filter(|r| !r.passed).count();
        println!("{} of {} criteria passed", results.len() - failed, results.len());
        return ExitCode::from(if failed == 0 { 0 } else { 3 });
    }
    match simulate(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
