use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use warplab::bundle::{render_table, reports_csv, write_outputs};
use warplab::{
    parse_config, run_suite, scenarios, sweep, Error, ExitStatus, RayonExecutor, ReportBundle, Result, Scenario, Suite,
};

#[derive(Parser)]
#[command(
    name = "warplab",
    version,
    about = "Numerical checks for diffusions on model manifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a check suite on a scenario.
    Run(RunArgs),
    /// List the built-in scenarios.
    ListScenarios,
    /// Print the canonical configuration of a built-in scenario.
    ShowScenario { name: String },
    /// Applicability and drift fit across delta / (sigma sqrt(d-1)).
    Sweep {
        #[command(flatten)]
        source: Source,
        /// Comma-separated ratios.
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 1.0, 1.5, 2.0, 2.5, 3.0])]
        ratios: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Scenario file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in scenario name.
    #[arg(long)]
    scenario: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    /// curvature, measure, drift, coupling, harnack, contractivity or all.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for reports.csv, plot CSVs and provenance.txt.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Csv,
}

fn load(source: &Source) -> Result<Scenario> {
    match (&source.config, &source.scenario) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?;
            parse_config(&text)
        }
        (None, Some(name)) => scenarios::load(name),
        (None, None) => unreachable!("clap requires a source"),
    }
}

fn print(bundle: &ReportBundle, format: Format) -> Result<()> {
    match format {
        Format::Table => print!("{}", render_table(bundle)),
        Format::Csv => print!("{}", reports_csv(bundle)?),
    }
    Ok(())
}

fn run(args: &RunArgs) -> Result<ExitStatus> {
    let mut scenario = load(&args.source)?;
    let suite: Suite = args.suite.parse()?;
    if let Some(seed) = args.seed {
        scenario.simulation.seed = seed;
    }
    let exec = RayonExecutor::from_env()?;
    let bundle = run_suite(&scenario, suite, &exec)?;
    if let Some(dir) = &args.out {
        write_outputs(&bundle, dir)?;
    }
    print(&bundle, args.format)?;
    Ok(bundle.exit_status())
}

fn dispatch(cli: Cli) -> Result<ExitStatus> {
    match cli.command {
        Command::Run(args) => run(&args),
        Command::ListScenarios => {
            for (name, description, _) in scenarios::BUILTIN {
                println!("{name:<16} {description}");
            }
            Ok(ExitStatus::Pass)
        }
        Command::ShowScenario { name } => {
            print!("{}", warplab::emit_config(&scenarios::load(&name)?));
            Ok(ExitStatus::Pass)
        }
        Command::Sweep { source, ratios, format } => {
            let bundle = sweep(&load(&source)?, &ratios)?;
            print(&bundle, format)?;
            Ok(ExitStatus::Pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                ExitStatus::ConfigError.code() as u8
            } else {
                0
            });
        }
    };
    match dispatch(cli) {
        Ok(status) => ExitCode::from(status.code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(ExitStatus::ConfigError.code() as u8)
        }
    }
}
