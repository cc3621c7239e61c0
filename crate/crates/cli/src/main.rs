use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use imreg_cli::{
    cmd_run, cmd_sweep, cmd_verify, CliError, GridAxis, EXIT_CHECK_FAILED, EXIT_NUMERIC, EXIT_OK,
};

/// Nonparametric internal-model output regulation: scenarios, checks, sweeps.
#[derive(Parser)]
#[command(name = "imreg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write its trace, metrics and plot data.
    Run {
        /// Preset name (duffing, cstr, bioreactor) or path to a TOML file.
        scenario: String,
        /// Override a scenario key, e.g. `--set sim.horizon=20`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Skip the plot-data directory.
        #[arg(long)]
        no_plot: bool,
    },
    /// Run verification suites: sylvester, equivalence, lemma1, gradients or all.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a scenario over the cartesian product of parameter values.
    Sweep {
        scenario: String,
        /// One axis, e.g. `--grid exo.sigma=0.1,0.5,1.0`. Repeatable.
        #[arg(long = "grid", value_name = "KEY=V1,V2,..")]
        grid: Vec<String>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
}

fn execute(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Run {
            scenario,
            set,
            out,
            no_plot,
        } => {
            let r = cmd_run(&scenario, &set, &out, !no_plot)?;
            println!("{}: {} samples", r.name, r.rows);
            println!("trace   {}", r.trace_path.display());
            println!("metrics {}", r.metrics_path.display());
            if let Some(d) = &r.plot_dir {
                println!("plot    {}", d.display());
            }
            let settle = r
                .metrics
                .settle_time
                .map_or("none".into(), |t| format!("{t:.2} s"));
            println!(
                "settle_time(0.05) = {settle}  tail_rms(e) = {:.3e}  max|e| = {:.3e}",
                r.metrics.tail_rms, r.metrics.max_abs_e
            );
            Ok(EXIT_OK)
        }
        Command::Verify { suite, seed } => {
            let recs = cmd_verify(&suite, seed)?;
            for r in &recs {
                println!("{r}");
            }
            let failed = recs.iter().filter(|r| !r.passed).count();
            println!("{} checks, {} failed", recs.len(), failed);
            Ok(if failed == 0 {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            })
        }
        Command::Sweep {
            scenario,
            grid,
            set,
            out,
            workers,
        } => {
            let axes = grid
                .iter()
                .map(|g| GridAxis::parse(g))
                .collect::<Result<Vec<_>, _>>()?;
            let (path, rows) = cmd_sweep(&scenario, &set, &axes, workers, &out)?;
            let failed = rows.iter().filter(|r| r.result.is_err()).count();
            println!(
                "{} points, {} failed -> {}",
                rows.len(),
                failed,
                path.display()
            );
            Ok(if failed == 0 { EXIT_OK } else { EXIT_NUMERIC })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
