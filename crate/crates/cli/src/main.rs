mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use thermolyap::fields::{read_snapshot, write_snapshot};
use thermolyap::functionals::{
    feireisl_relative_energy, multipliers_closed_form, multipliers_numeric, v_meq, v_neq,
    FunctionalReport, Multipliers, SteadyReference,
};
use thermolyap::simulator::{run_simulation, write_time_series};
use thermolyap::verify::run_all;
use thermolyap::Error;

use config::{ConfigError, RunConfig};

#[derive(Parser)]
#[command(name = "thermolyap", about = "Lyapunov functionals for heat-conducting compressible fluids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate v_meq, v_neq and the relative energy of a snapshot
    Eval {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        snapshot: PathBuf,
        /// Steady reference snapshot for v_neq and the relative energy
        #[arg(long)]
        steady: Option<PathBuf>,
        /// Write JSON here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form and numerically identified Lagrange multipliers
    Multipliers {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every verification suite
    Verify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Integrate the 1D equations from the configured perturbation
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Time-series CSV
        #[arg(long)]
        out: PathBuf,
        /// Final-state snapshot CSV
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
    Version,
}

#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Runtime(#[from] Error),
    #[error("{0} of {1} checks failed")]
    Verification(usize, usize),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Verification(..) => 1,
            Failure::Config(_) | Failure::Input(_) => 2,
            Failure::Runtime(Error::Config(_)) => 2,
            Failure::Runtime(_) => 3,
        }
    }
}

fn load_snapshot(path: &Path, config: &RunConfig) -> Result<thermolyap::StateFields, Failure> {
    let (grid, w) = read_snapshot(path).map_err(|e| Failure::Input(e.to_string()))?;
    let expected = config.grid;
    if grid.n_cells() != expected.n_cells()
        || (grid.length() - expected.length()).abs() > 1e-9 * expected.length()
    {
        return Err(Failure::Input(format!(
            "{}: grid ({} cells, length {}) does not match config ({} cells, length {})",
            path.display(),
            grid.n_cells(),
            grid.length(),
            expected.n_cells(),
            expected.length()
        )));
    }
    Ok(w)
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("plain data serializes") + "\n";
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Runtime(Error::from(e))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct EvalOutput {
    v_meq: FunctionalReport,
    v_neq: FunctionalReport,
    feireisl: f64,
}

#[derive(Serialize)]
struct MultiplierOutput {
    closed_form: Multipliers,
    numeric: Multipliers,
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Version => {
            println!("thermolyap {}", env!("CARGO_PKG_VERSION"));
            Ok(())
        }
        Command::Eval {
            config,
            snapshot,
            steady,
            out,
        } => {
            let c = RunConfig::load(&config)?;
            let eos = c.eos.normalized_at(c.reference.state())?;
            let w = load_snapshot(&snapshot, &c)?;
            let steady = match steady {
                Some(path) => SteadyReference::new(&eos, &c.grid, load_snapshot(&path, &c)?)
                    .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?,
                None => SteadyReference::homogeneous(&c.grid, c.reference),
            };
            let report = EvalOutput {
                v_meq: v_meq(&eos, c.reference, &c.grid, &w)?,
                v_neq: v_neq(&eos, &steady, &c.grid, &w)?,
                feireisl: feireisl_relative_energy(&eos, &c.grid, &w, &steady.fields)?,
            };
            emit(&report, out.as_deref())
        }
        Command::Multipliers { config, out } => {
            let c = RunConfig::load(&config)?;
            let report = MultiplierOutput {
                closed_form: multipliers_closed_form(&c.eos, c.reference)?,
                numeric: multipliers_numeric(&c.eos, c.reference, &c.grid)?,
            };
            emit(&report, out.as_deref())
        }
        Command::Verify { config } => {
            let c = RunConfig::load(&config)?;
            let checks = run_all(&c.eos, c.reference, &c.grid, c.verify)?;
            let failed = checks.iter().filter(|r| !r.passed).count();
            for r in &checks {
                let mark = if r.passed { "PASS" } else { "FAIL" };
                println!("{mark} {} {}: {:.3e} (tol {:e})", r.suite, r.name, r.value, r.tolerance);
            }
            println!("{} of {} checks passed", checks.len() - failed, checks.len());
            if failed > 0 {
                return Err(Failure::Verification(failed, checks.len()));
            }
            Ok(())
        }
        Command::Simulate {
            config,
            out,
            snapshot,
        } => {
            let c = RunConfig::load(&config)?;
            match run_simulation(&c.sim) {
                Ok(tr) => {
                    write_time_series(&out, &tr.records)?;
                    if let Some(path) = snapshot {
                        write_snapshot(&path, &c.grid, &tr.final_state)?;
                    }
                    Ok(())
                }
                Err(Error::SimulationAborted {
                    t,
                    reason,
                    last_state,
                }) => {
                    if let Some(path) = snapshot {
                        write_snapshot(&path, &c.grid, &last_state)?;
                        eprintln!("last good state (t = {t}) written to {}", path.display());
                    }
                    Err(Failure::Runtime(Error::SimulationAborted {
                        t,
                        reason,
                        last_state,
                    }))
                }
                Err(e) => Err(e.into()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
