use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lambda_mb_cli::run::EXIT_USAGE;
use lambda_mb_cli::{parse_config, run_scenario, scenarios, Engine, RunOptions};

#[derive(Parser)]
#[command(name = "lambda-mb", version, about = "Exact and numerical Maxwell-Bloch solitons in a Lambda medium")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// Run a canned scenario instead of a config file
    #[arg(long, global = true)]
    scenario: Option<String>,

    /// Override the configured engine
    #[arg(long, global = true, value_parser = Engine::NAMES)]
    engine: Option<String>,

    /// Override the output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Verification only; write no files
    #[arg(long, global = true)]
    check: bool,

    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a config file
    Run { config: PathBuf },
    /// List canned scenarios
    List,
}

fn usage(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let parsed = match (&cli.command, &cli.scenario) {
        (Some(Command::List), _) => {
            for name in scenarios::names() {
                println!("{name}");
            }
            return ExitCode::SUCCESS;
        }
        (Some(Command::Run { .. }), Some(_)) => {
            return usage("give either `run <config>` or `--scenario`, not both")
        }
        (Some(Command::Run { config }), None) => match std::fs::read_to_string(config) {
            Ok(text) => parse_config(&text),
            Err(e) => return usage(&format!("cannot read {}: {e}", config.display())),
        },
        (None, Some(name)) => match scenarios::canned(name) {
            Some(cfg) => cfg,
            None => {
                let known: Vec<_> = scenarios::names().collect();
                return usage(&format!("unknown scenario '{name}' (known: {})", known.join(", ")));
            }
        },
        (None, None) => return usage("nothing to do: give `run <config>` or `--scenario <name>`"),
    };
    let mut cfg = match parsed {
        Ok(cfg) => cfg,
        Err(e) => return usage(&e.to_string()),
    };
    if let Some(e) = cli.engine.as_deref().and_then(Engine::from_name) {
        cfg.engine = e;
    }
    if let Some(out) = cli.out {
        cfg.out = out;
    }
    let opts = RunOptions { check_only: cli.check, quiet: cli.quiet };
    ExitCode::from(run_scenario(&cfg, opts) as u8)
}
