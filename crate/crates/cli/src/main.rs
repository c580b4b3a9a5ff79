//! `lingpt`: drives corpus annotation, vocabulary building, auxiliary
//! pre-training, NLI fine-tuning, evaluation and benchmarking from one TOML
//! config. Exit codes: 0 success, 1 run failure, 2 configuration or input
//! error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "lingpt",
    version,
    about = "Linguistic auxiliary pre-training for NLI"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the configured run directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Build the subword vocabulary from the training split.
    BuildVocab(Common),
    /// Merge corpus, CoNLL-U and WordNet into the labelled dataset.
    Annotate(Common),
    /// Run the auxiliary pre-training schedule.
    Pretrain(Common),
    /// Fine-tune the pre-trained checkpoint on NLI.
    Finetune(Common),
    /// Score the fine-tuned checkpoint on the test split.
    Evaluate(Common),
    /// Finite-difference check of the analytic gradients on a tiny model.
    Gradcheck(Common),
    /// Pre-train, fine-tune and evaluate several configurations over seeds.
    Bench(Common),
    /// Write a generated NLI corpus with CoNLL-U annotations.
    Synth {
        #[arg(long, default_value_t = 2000)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

pub enum Failure {
    Config(anyhow::Error),
    Run(anyhow::Error),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("LINGPT_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth { n, seed, out } => commands::synth_cmd(n, seed, &out),
        Command::BuildVocab(c) => with_config(&c, commands::build_vocab_cmd),
        Command::Annotate(c) => with_config(&c, commands::annotate),
        Command::Pretrain(c) => with_config(&c, commands::pretrain_cmd),
        Command::Finetune(c) => with_config(&c, commands::finetune_cmd),
        Command::Evaluate(c) => with_config(&c, commands::evaluate_cmd),
        Command::Gradcheck(c) => with_config(&c, commands::gradcheck_cmd),
        Command::Bench(c) => with_config(&c, commands::bench_cmd),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn with_config(c: &Common, f: fn(&RunConfig) -> Result<(), Failure>) -> Result<(), Failure> {
    let cfg = RunConfig::load(&c.config, c.seed, c.out.as_deref()).map_err(Failure::Config)?;
    f(&cfg)
}
