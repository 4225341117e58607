use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ro_arena_bench::{enumerate, table, ExperimentConfig, Result};

#[derive(Parser)]
#[command(
    name = "ro-arena",
    version,
    about = "Random-order online algorithm benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated instance file.
    Gen {
        /// Generator spec, e.g. halves:n=1000,eps=0.01
        #[arg(long)]
        instance: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; standard output if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run seeded trials and write one CSV row per trial.
    Run(RunArgs),
    /// Exact expectation over every arrival order (n <= 10).
    Enumerate {
        #[arg(long)]
        alg: String,
        #[arg(long)]
        instance: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Evaluate every wait-and-pick prefix length instead.
        #[arg(long)]
        sweep: bool,
    },
    /// Pool CSV files into a per-(algorithm, instance) table.
    Report {
        #[arg(required = true)]
        csv: Vec<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alg: Option<String>,
    /// Generator spec or instance file.
    #[arg(long)]
    instance: Option<String>,
    /// adv, adv:<asc|desc|maxfirst|maxlast>, ro or iid.
    #[arg(long)]
    order: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Distinct instances to cycle through.
    #[arg(long)]
    instances: Option<u64>,
    /// Request distribution file for metric problems.
    #[arg(long)]
    dist: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen {
            instance,
            seed,
            out,
        } => {
            let text = ro_arena_bench::gen(&instance, seed)?;
            match out {
                Some(p) => table::write_atomic(&p, text.as_bytes())?,
                None => print!("{text}"),
            }
        }
        Command::Run(a) => {
            let base = match &a.config {
                Some(p) => ExperimentConfig::from_file(p)?,
                None => ExperimentConfig::default(),
            };
            let cfg = base.merged(ExperimentConfig {
                alg: a.alg,
                instance: a.instance,
                order: a.order,
                trials: a.trials,
                seed: a.seed,
                jobs: a.jobs,
                out: a.out,
                instances: a.instances,
                dist: a.dist,
            });
            let (bytes, summary) = ro_arena_bench::run(&cfg)?;
            if cfg.out.is_none() {
                print!("{}", String::from_utf8_lossy(&bytes));
                eprint!("{summary}");
            } else {
                print!("{summary}");
            }
        }
        Command::Enumerate {
            alg,
            instance,
            seed,
            sweep,
        } => {
            print!(
                "{}",
                enumerate::enumerate(&alg, &instance, seed, sweep)?.text()
            );
        }
        Command::Report { csv } => {
            print!("{}", table::report_text(&table::report_files(&csv)?));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ro-arena: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
