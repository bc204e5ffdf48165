use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use votekit::criteria::Criterion;
use votekit::RuleId;

mod commands;
mod io;

use io::Usage;

/// Social choice rules for ensembles of agents.
#[derive(Debug, Parser)]
#[command(name = "votekit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Aggregate each question of a profile file under one rule.
    Aggregate(AggregateArgs),
    /// Accuracy report for a dataset with gold answers.
    Evaluate(EvaluateArgs),
    /// Generate a synthetic dataset.
    Synth(SynthArgs),
    /// Search for criterion violations and print the compliance table.
    Check(CheckArgs),
    /// Write the consultation a dictator would be shown for each question.
    ExportConsultation(ExportArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Profile file, `-` for standard input.
    input: PathBuf,
    /// Abort on the first malformed line instead of skipping it.
    #[arg(long)]
    strict: bool,
    /// Agents every question must have; inferred when omitted.
    #[arg(long)]
    agents: Option<usize>,
    /// Inclusive score bounds, `MIN:MAX`.
    #[arg(long, default_value = "0:10", value_parser = io::parse_range)]
    range: votekit::ScoreRange,
}

#[derive(Debug, Args)]
struct AggregateArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_parser = io::parse_rule)]
    rule: RuleId,
    #[arg(long)]
    seed: Option<u64>,
    /// `echo`, `replay:FILE` or `synthetic:COMPETENCE:DEFERENCE`.
    #[arg(long)]
    dictator: Option<String>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SubsetArg {
    Prefix,
    Random,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Comma-separated; all rules the configuration supports by default.
    #[arg(long, value_delimiter = ',', value_parser = io::parse_rule)]
    rules: Vec<RuleId>,
    /// Required when a requested rule or sweep is random.
    #[arg(long)]
    seed: Option<u64>,
    /// Repetitions of the random rules, each with its own derived seed.
    #[arg(long, default_value_t = 1)]
    runs: usize,
    /// `echo`, `replay:FILE` or `synthetic:COMPETENCE:DEFERENCE`.
    #[arg(long)]
    dictator: Option<String>,
    #[arg(long, default_value = "blind_dictatorial", value_parser = io::parse_rule)]
    baseline: RuleId,
    /// Admit scored profiles whose individual ballots are valid.
    #[arg(long)]
    partial_scores: bool,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    /// Report JSON; standard output by default.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Per-subject CSV.
    #[arg(long)]
    subjects: Option<PathBuf>,
    /// Ensemble sizes for a quorum sweep.
    #[arg(long, value_delimiter = ',')]
    quorum: Vec<usize>,
    #[arg(long, value_enum, default_value = "prefix")]
    subset: SubsetArg,
    /// Numbers of corrupted agents for a robustness sweep.
    #[arg(long, value_delimiter = ',')]
    robustness: Vec<usize>,
    /// Rule used by the sweeps.
    #[arg(long, default_value = "plurality", value_parser = io::parse_rule)]
    sweep_rule: RuleId,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 1000)]
    questions: usize,
    #[arg(long, default_value_t = 10)]
    agents: usize,
    #[arg(long, default_value_t = 4)]
    choices: usize,
    /// Chance that an agent puts the gold answer first.
    #[arg(long)]
    competence: f64,
    /// Chance that the rest of a competent ballot is shuffled.
    #[arg(long, default_value_t = 1.0)]
    noise: f64,
    /// Comma-separated subject names, assigned round robin.
    #[arg(long, value_delimiter = ',')]
    subjects: Vec<String>,
    /// Per-subject competence, `SUBJECT=P`; repeatable.
    #[arg(long = "subject-competence", value_parser = io::parse_assignment)]
    subject_competence: Vec<(String, f64)>,
    /// Also emit scored ballots.
    #[arg(long)]
    scores: bool,
    #[arg(long, default_value = "0:10", value_parser = io::parse_range)]
    range: votekit::ScoreRange,
    #[arg(long)]
    seed: u64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// Comma-separated; all deterministic rules by default.
    #[arg(long, value_delimiter = ',', value_parser = io::parse_rule)]
    rules: Vec<RuleId>,
    /// Comma-separated; all criteria by default.
    #[arg(long, value_delimiter = ',', value_parser = io::parse_criterion)]
    criteria: Vec<Criterion>,
    #[arg(long, short, default_value_t = 3)]
    m: usize,
    #[arg(long, default_value_t = 7)]
    n_max: usize,
    /// Directory receiving one replayable file per witness.
    #[arg(long)]
    witness_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Informed,
    Misinformed,
}

#[derive(Debug, Args)]
struct ExportArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Aggregate(a) => commands::aggregate(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Synth(a) => commands::synth(a),
        Command::Check(a) => commands::check(a),
        Command::ExportConsultation(a) => commands::export_consultation(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.is::<Usage>() { 1 } else { 2 })
        }
    }
}
