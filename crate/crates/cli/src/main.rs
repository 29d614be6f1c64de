use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use triad_cli::config::{self, Config};
use triad_cli::run::{run_analytic, run_couplings, run_evolve, run_flux};
use triad_cli::{run_config, scenarios, CliError, CliResult, Format, RunContext, Written};

#[derive(Parser)]
#[command(name = "triad", version, about = "Magnon, Andreev spin qubit and transmon three-body simulator")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Scenario config file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for output tables and the run manifest.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Worker threads for sweeps and entanglement (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Reserved; the dynamics is deterministic. Recorded in the manifest.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Resolved coupling strengths and mode frequencies.
    Couplings,
    /// Magnetic flux of the sphere through the loop.
    Flux,
    /// Time evolution with the outputs the config requests.
    Evolve,
    /// Time evolution with entanglement measures.
    Entanglement,
    /// Closed-form collapse-revival series.
    Analytic,
    /// Parameter sweep from the config's [sweep] section.
    Sweep,
    /// Run or list the bundled figure scenarios.
    Scenario {
        name: Option<String>,
        /// List bundled scenarios.
        #[arg(long)]
        list: bool,
        /// Print the scenario file instead of running it.
        #[arg(long)]
        show: bool,
    },
}

fn load_config(path: &Option<PathBuf>, optional: bool) -> CliResult<Config> {
    match path {
        Some(p) => config::load(p),
        None if optional => config::parse("schema_version = 1"),
        None => Err(CliError::Config("this command needs --config <path>".into())),
    }
}

fn execute(cli: Cli) -> CliResult<Option<Written>> {
    let g = &cli.global;
    if let Some(n) = g.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Config(e.to_string()))?;
    }
    let ctx = |command: &str| RunContext { out_dir: g.out_dir.clone(), format: g.format, command: command.into(), seed: g.seed, threads: g.threads };
    let written = match &cli.command {
        Command::Couplings => run_couplings(&ctx("couplings"), &load_config(&g.config, true)?)?,
        Command::Flux => run_flux(&ctx("flux"), &load_config(&g.config, true)?)?,
        Command::Evolve => run_evolve(&ctx("evolve"), &load_config(&g.config, false)?, false)?,
        Command::Entanglement => run_evolve(&ctx("entanglement"), &load_config(&g.config, false)?, true)?,
        Command::Analytic => run_analytic(&ctx("analytic"), &load_config(&g.config, false)?)?,
        Command::Sweep => triad_cli::sweep::run_sweep(&ctx("sweep"), &load_config(&g.config, false)?)?,
        Command::Scenario { name, list, show } => {
            if *list {
                for b in scenarios::BUNDLED {
                    let desc = config::parse(b.source)?.description.unwrap_or_default();
                    println!("{:<36} {desc}", b.name);
                }
                return Ok(None);
            }
            let cfg = match (name, &g.config) {
                (Some(n), None) => {
                    if *show {
                        print!("{}", scenarios::find(n)?.source);
                        return Ok(None);
                    }
                    scenarios::load(n)?
                }
                (None, Some(_)) => load_config(&g.config, false)?,
                (Some(_), Some(_)) => return Err(CliError::Config("give a scenario name or --config, not both".into())),
                (None, None) => return Err(CliError::Config("give a scenario name, --config or --list".into())),
            };
            run_config(&ctx(&format!("scenario {}", cfg.display_name())), &cfg)?
        }
    };
    Ok(Some(written))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(Some(w)) => {
            for f in &w.files {
                println!("{}", f.display());
            }
            if let Some(d) = w.overlay_deviation {
                println!("overlay max population deviation: {d:.3e}");
            }
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
