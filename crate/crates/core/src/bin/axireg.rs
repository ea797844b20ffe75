use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use axireg::config::{read_config, render_config};
use axireg::diagnostics::Exponent;
use axireg::dynamics::{Simulation, SolverConfig};
use axireg::grid::{make_grid, Parity, ScalarField};
use axireg::io::{snapshot_name, write_series, write_snapshot};
use axireg::offline::recompute_dir;
use axireg::plot::{emit_plots, PlotOptions};
use axireg::verify::{run_suite, Suite};
use axireg::{Error, State};

#[derive(Parser)]
#[command(name = "axireg", version, about = "Axisymmetric Navier-Stokes runs and regularity monitors")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate a configuration and write snapshots, series and plots.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Log-scale y axis on the criteria plots.
        #[arg(long)]
        log_plots: bool,
    },
    /// Recompute every monitor from a snapshot directory.
    Criteria {
        #[arg(long)]
        snapshots: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "2")]
        p: String,
        #[arg(long, default_value = "2")]
        q: String,
        #[arg(long, default_value_t = 4)]
        s: u32,
    },
    /// Run built-in invariant suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Refinement study of a configuration.
    Convergence {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 3)]
        levels: u32,
    },
}

/// Exit status 2 for usage and configuration errors, 1 for everything else.
fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::Config { .. } | Error::UnknownScenario(_) | Error::InvalidArgument(_) | Error::InvalidGrid(_) => {
            ExitCode::from(2)
        }
        _ => ExitCode::from(1),
    }
}

fn cmd_run(config: &Path, out: &Path, log_plots: bool) -> Result<ExitCode, Error> {
    let cfg = read_config(config)?;
    let mut sim = Simulation::new(&cfg)?;
    let snap_dir = out.join("snapshots");
    fs::create_dir_all(&snap_dir)?;
    fs::write(out.join("config.txt"), render_config(&cfg))?;

    let mut index = 0;
    let mut save = |state: &State| -> Result<(), Error> {
        write_snapshot(state, cfg.nu, &snap_dir.join(snapshot_name(index)))?;
        index += 1;
        Ok(())
    };
    save(sim.state())?;
    let outcome = sim.run_to_end(|s| if s.snapshot_due() { save(s.state()) } else { Ok(()) });

    // partial output is flushed even after an abort
    write_series(sim.series(), &out.join("series.csv"))?;
    if sim.series().len() >= 2 {
        emit_plots(&sim.series().rows, &out.join("plots"), PlotOptions { log_criteria: log_plots })?;
    }
    match outcome {
        Ok(()) => {
            let last = sim.latest_row();
            println!(
                "t = {:.6}  steps = {}  rows = {}  E = {:.6e}  critA_int = {:.6e}  critB_int = {:.6e}",
                last.t,
                sim.steps(),
                sim.series().len(),
                last.energy,
                last.crit_a_int,
                last.crit_b_int
            );
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => {
            eprintln!("run aborted, partial output kept in {}", out.display());
            Ok(fail(&e))
        }
    }
}

fn cmd_criteria(snapshots: &Path, out: &Path, p: &str, q: &str, s: u32) -> Result<ExitCode, Error> {
    let (p, q) = (Exponent::parse(p)?, Exponent::parse(q)?);
    if s < 3 {
        return Err(Error::InvalidArgument(format!("--s must be >= 3, got {s}")));
    }
    let report = recompute_dir(snapshots, s, p, q)?;
    write_series(&report.series, out)?;
    println!(
        "rows = {}  ||r^(1+d) u1||_(Lp,Lq) = {:.16e}",
        report.series.len(),
        report.weighted_lpq
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(suite: &str) -> Result<ExitCode, Error> {
    let suite: Suite = suite.parse()?;
    let checks = run_suite(suite)?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    for c in &checks {
        println!("{c}");
    }
    println!("{} checks, {failed} failed", checks.len());
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

/// Average of the two fine radial cells under each coarse cell; the coarse
/// axial nodes coincide with every other fine node.
fn restrict(fine: &ScalarField, coarse: &std::sync::Arc<axireg::Grid>) -> ScalarField {
    let vals = (0..coarse.len())
        .map(|k| {
            let (i, j) = (k % coarse.nr(), k / coarse.nr());
            0.5 * (fine.at(2 * i, 2 * j) + fine.at(2 * i + 1, 2 * j))
        })
        .collect();
    ScalarField::from_values(coarse, vals, Parity::Even).expect("sizes match")
}

fn cmd_convergence(config: &Path, levels: u32) -> Result<ExitCode, Error> {
    let base = read_config(config)?;
    if levels < 2 {
        return Err(Error::InvalidArgument("--levels must be >= 2".into()));
    }
    let mut finals = Vec::new();
    for l in 0..levels {
        let cfg = SolverConfig {
            grid: base.grid.refined(1 << l),
            ..base.clone()
        };
        let mut sim = Simulation::new(&cfg)?;
        sim.run_to_end(|_| Ok(()))?;
        println!("level {l}: {}x{}  steps = {}", cfg.grid.nr, cfg.grid.nz, sim.steps());
        finals.push(sim.state().clone());
    }
    let mut diffs = Vec::new();
    for w in finals.windows(2) {
        let coarse = make_grid(w[0].grid().spec())?;
        let du = restrict(&w[1].u1, &coarse).zip(&w[0].u1, Parity::Even, |a, b| a - b).max_abs();
        let dw = restrict(&w[1].omega1, &coarse).zip(&w[0].omega1, Parity::Even, |a, b| a - b).max_abs();
        diffs.push((du, dw));
    }
    for (l, d) in diffs.iter().enumerate() {
        println!("levels {l}-{}: max|du1| = {:.3e}  max|domega1| = {:.3e}", l + 1, d.0, d.1);
    }
    for (l, w) in diffs.windows(2).enumerate() {
        let ou = (w[0].0 / w[1].0).log2();
        let ow = (w[0].1 / w[1].1).log2();
        println!("observed order {l}: u1 {ou:.3}  omega1 {ow:.3}");
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Run { config, out, log_plots } => cmd_run(config, out, *log_plots),
        Cmd::Criteria { snapshots, out, p, q, s } => cmd_criteria(snapshots, out, p, q, *s),
        Cmd::Verify { suite } => cmd_verify(suite),
        Cmd::Convergence { config, levels } => cmd_convergence(config, *levels),
    };
    result.unwrap_or_else(|e| fail(&e))
}
