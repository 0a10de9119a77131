use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use shintani_forge::{run_command, Command, Outcome, RunOptions, ScenarioConfig};

#[derive(Parser)]
#[command(name = "shintani-forge", version, about = "Run exact Shintani domain scenarios")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args)]
struct Common {
    /// JSON scenario configuration
    #[arg(long)]
    config: PathBuf,
    /// run only this scenario
    #[arg(long)]
    scenario: Option<String>,
    /// output directory for reports and artifacts
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// seed for sampling scenarios
    #[arg(long)]
    seed: Option<u64>,
    /// starting precision in bits
    #[arg(long)]
    bits: Option<u32>,
}

#[derive(Subcommand)]
enum Cmd {
    /// every scenario
    Verify(Common),
    /// construction scenarios
    Construct(Common),
    /// case and inclusion scenarios
    Classify(Common),
    /// set identity scenarios
    Identities(Common),
    /// fundamental domain sampling
    Fdcheck(Common),
    /// Colmez domain figures
    Render(Common),
    /// cover figures
    Cover(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, c) = match cli.cmd {
        Cmd::Verify(c) => (Command::Verify, c),
        Cmd::Construct(c) => (Command::Construct, c),
        Cmd::Classify(c) => (Command::Classify, c),
        Cmd::Identities(c) => (Command::Identities, c),
        Cmd::Fdcheck(c) => (Command::Fdcheck, c),
        Cmd::Render(c) => (Command::Render, c),
        Cmd::Cover(c) => (Command::Cover, c),
    };
    let code = |o: Outcome| ExitCode::from(o.exit_code() as u8);
    let cfg = match ScenarioConfig::load(&c.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {}", e);
            return code(Outcome::Error);
        }
    };
    let max_bits = match std::env::var("SHINTANI_MAX_BITS") {
        Ok(v) => match v.trim().parse() {
            Ok(b) => Some(b),
            Err(_) => {
                eprintln!("error: SHINTANI_MAX_BITS must be a positive integer, got `{}`", v);
                return code(Outcome::Error);
            }
        },
        Err(_) => None,
    };
    let opts = RunOptions { out: c.out, seed: c.seed, bits: c.bits, max_bits };
    match run_command(&cfg, cmd, c.scenario.as_deref(), &opts) {
        Ok((outcome, paths, reports)) => {
            for r in &reports {
                match &r.error {
                    Some(e) => eprintln!("{}: {} ({})", r.scenario, r.outcome, e),
                    None => eprintln!("{}: {}", r.scenario, r.outcome),
                }
            }
            for p in paths {
                println!("{}", p.display());
            }
            code(outcome)
        }
        Err(e) => {
            eprintln!("error: cannot write output: {}", e);
            code(Outcome::Error)
        }
    }
}
