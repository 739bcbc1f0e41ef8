use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use eit_cli::driver::{self, resolve_out_dir};
use eit_cli::{load_config, CliError};

#[derive(Parser)]
#[command(name = "eit", version, about = "EIT medium simulations from JSON scenario configs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory (overrides output.dir in the config)
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Suppress progress messages
    #[arg(long, global = true)]
    quiet: bool,
    /// Worker threads for sweeps and propagation (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario
    Run { config: PathBuf },
    /// Run a scenario once per value of one parameter
    Sweep {
        config: PathBuf,
        /// Dotted path to a number in the config, e.g. field.omega_c.0
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Print the canonical parameters as a config
    Canonical {
        /// Units of gamma_ab with c = 1 instead of SI
        #[arg(long)]
        dimensionless: bool,
    },
    /// Run the cross-module validation checks
    Validate,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("config error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().expect("thread pool is built once");
    }
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            if let CliError::Config(_) = e {
                eprintln!("usage: eit run <config.json> | eit sweep <config.json> --param <path> --values <list>");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: &Cli) -> Result<ExitCode, CliError> {
    let say = |msg: String| {
        if !cli.quiet {
            eprintln!("{msg}");
        }
    };
    match &cli.command {
        Command::Run { config } => {
            let cfg = load_config(config)?;
            let dir = resolve_out_dir(cli.out_dir.as_deref(), Some(&cfg), "eit-out");
            for w in driver::run(&cfg, &dir)? {
                say(format!("warning: {w}"));
            }
            say(format!("{} run written to {}", cfg.scenario.name(), dir.display()));
        }
        Command::Sweep { config, param, values } => {
            let cfg = load_config(config)?;
            let dir = resolve_out_dir(cli.out_dir.as_deref(), Some(&cfg), "eit-out");
            for w in driver::sweep(&cfg, param, values, &dir)? {
                say(format!("warning: {w}"));
            }
            say(format!("{} runs over {param} written to {}", values.len(), dir.display()));
        }
        Command::Canonical { dimensionless } => {
            let cfg = driver::canonical(*dimensionless);
            println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
        }
        Command::Validate => {
            let dir = resolve_out_dir(cli.out_dir.as_deref(), None, "eit-out");
            let (reports, ok) = driver::validate(&dir)?;
            print!("{}", driver::report_table(&reports));
            say(format!("report written to {}", dir.join("validation.json").display()));
            if !ok {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
