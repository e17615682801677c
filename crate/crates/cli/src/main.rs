use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use susylab::eigensolve::SolverOptions;
use susylab_cli::config::WindingSpec;
use susylab_cli::report::write_curves;
use susylab_cli::scenario::{builtin_ids, resolve};
use susylab_cli::{exit, run_scenario, CliError, Outcome, RunOptions, ScenarioConfig, Stage};

#[derive(Parser, Debug)]
#[command(
    name = "susylab",
    version,
    about = "Supersymmetric partner potentials: spectra, node counts, QMF relations"
)]
struct Cli {
    /// Write the JSON report here instead of stdout (a directory for `scenario run-all`).
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Write CSV curves into this directory.
    #[arg(long, global = true, value_name = "DIR")]
    csv_dir: Option<PathBuf>,
    /// Override the eigensolver tolerance.
    #[arg(long, global = true, value_name = "X")]
    tol_solver: Option<f64>,
    /// Seed for the inverse-iteration start vectors.
    #[arg(long, global = true, value_name = "S", default_value_t = SolverOptions::default().seed)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ConfigArg {
    /// Built-in scenario id or path to a JSON config.
    #[arg(long, value_name = "F")]
    config: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Partner potentials and closed-form identities.
    Partners(ConfigArg),
    /// Richardson-refined spectra of both partners.
    Spectrum {
        #[command(flatten)]
        config: ConfigArg,
        /// Number of degenerate pairs.
        #[arg(long)]
        levels: Option<usize>,
    },
    /// Node-count criterion and QMF relations.
    Gozzi(ConfigArg),
    /// Isospectral deformation sweep.
    Deform {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            value_name = "L[,L...]"
        )]
        lambda: Vec<f64>,
    },
    /// Contour integrals of the oscillator QMF for n = 0..=N.
    Winding {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, value_name = "N")]
        n: Option<usize>,
    },
    /// Full scenario runs.
    #[command(subcommand)]
    Scenario(ScenarioCommand),
}

#[derive(Subcommand, Debug)]
enum ScenarioCommand {
    /// Run one built-in scenario or config file.
    Run {
        #[arg(value_name = "ID|FILE")]
        target: String,
    },
    /// Run every built-in scenario concurrently.
    RunAll,
    /// List the built-in scenario ids.
    List,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

fn dispatch(cli: &Cli) -> Result<i32, CliError> {
    let load = |arg: &ConfigArg, default: &str| resolve(arg.config.as_deref().unwrap_or(default));
    let (config, stages) = match &cli.command {
        Command::Partners(c) => (load(c, "ho-unbroken")?, vec![Stage::Identities]),
        Command::Spectrum { config, levels } => {
            let mut c = load(config, "ho-unbroken")?;
            if let Some(k) = levels {
                c.levels = *k;
            }
            (c, vec![Stage::Spectra])
        }
        Command::Gozzi(c) => (
            load(c, "ho-unbroken")?,
            vec![Stage::Gozzi, Stage::Relations],
        ),
        Command::Deform { config, lambda } => {
            let mut c = load(config, "deform-sweep")?;
            if !lambda.is_empty() {
                c.lambdas = Some(lambda.clone());
            }
            (c, vec![Stage::Deformation])
        }
        Command::Winding { config, n } => {
            let mut c = load(config, "winding")?;
            if let Some(n) = n {
                let mut spec = c.winding.clone().unwrap_or(WindingSpec {
                    max_n: *n,
                    samples_per_side: susylab::susyqhj::RectContour::DEFAULT_SAMPLES,
                    y_half: 1.0,
                    margin: 2.0,
                });
                spec.max_n = *n;
                c.winding = Some(spec);
            }
            (c, vec![Stage::Winding])
        }
        Command::Scenario(ScenarioCommand::Run { target }) => {
            (resolve(target)?, Stage::ALL.to_vec())
        }
        Command::Scenario(ScenarioCommand::RunAll) => return run_all(cli),
        Command::Scenario(ScenarioCommand::List) => {
            for id in builtin_ids() {
                println!("{id}");
            }
            return Ok(exit::SUCCESS);
        }
    };
    let config = apply_overrides(config, cli, cli.json.as_deref(), cli.csv_dir.as_deref())?;
    let outcome = run_scenario(&config, &RunOptions::only(cli.seed, &stages))?;
    emit(&config, &outcome, true)
}

fn apply_overrides(
    mut c: ScenarioConfig,
    cli: &Cli,
    json: Option<&Path>,
    csv_dir: Option<&Path>,
) -> Result<ScenarioConfig, CliError> {
    if let Some(t) = cli.tol_solver {
        c.tolerances.solver = t;
    }
    if let Some(p) = json {
        c.outputs.report_path = Some(p.display().to_string());
    }
    if let Some(d) = csv_dir {
        c.outputs.csv_dir = Some(d.display().to_string());
    }
    c.validate()?;
    Ok(c)
}

/// Writes the report (to stdout when no path is configured) and curves,
/// then returns the exit status.
fn emit(
    config: &ScenarioConfig,
    outcome: &Outcome,
    stdout_fallback: bool,
) -> Result<i32, CliError> {
    let report = &outcome.report;
    match &config.outputs.report_path {
        Some(p) => report.write(Path::new(p))?,
        None if stdout_fallback => print!("{}", report.render()),
        None => {}
    }
    if let Some(dir) = &config.outputs.csv_dir {
        write_curves(Path::new(dir), &outcome.curves)?;
    }
    let failed: Vec<&str> = report
        .verdicts
        .iter()
        .filter(|(_, v)| !**v)
        .map(|(k, _)| k.as_str())
        .collect();
    if failed.is_empty() {
        eprintln!(
            "{}: all {} verdicts true",
            report.scenario_id,
            report.verdicts.len()
        );
    } else {
        eprintln!(
            "{}: failed verdicts: {}",
            report.scenario_id,
            failed.join(", ")
        );
    }
    for e in &report.errors {
        eprintln!(
            "{}: {} error in {}: {}",
            report.scenario_id, e.kind, e.stage, e.message
        );
    }
    Ok(report.exit_code())
}

fn run_all(cli: &Cli) -> Result<i32, CliError> {
    let ids: Vec<&str> = builtin_ids().collect();
    let results: Vec<Result<i32, CliError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = ids
            .iter()
            .map(|id| {
                scope.spawn(move || -> Result<i32, CliError> {
                    let json = cli.json.as_ref().map(|d| d.join(format!("{id}.json")));
                    let csv = cli.csv_dir.as_ref().map(|d| d.join(id));
                    let config =
                        apply_overrides(resolve(id)?, cli, json.as_deref(), csv.as_deref())?;
                    let outcome = run_scenario(&config, &RunOptions::all(cli.seed))?;
                    emit(&config, &outcome, false)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scenario thread panicked"))
            .collect()
    });
    let mut worst = exit::SUCCESS;
    for (id, r) in ids.iter().zip(results) {
        let code = match r {
            Ok(code) => code,
            Err(e) => {
                eprintln!("{id}: error: {e}");
                e.exit_code()
            }
        };
        println!(
            "{id}\t{}",
            if code == exit::SUCCESS {
                "PASS"
            } else {
                "FAIL"
            }
        );
        worst = worst.max(code);
    }
    Ok(worst)
}
