use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{Context, Result};
use votekit::criteria::Criterion;
use votekit::format::{read_records, read_replay, RecordSet};
use votekit::rules::oracle::{CompetenceOracle, EchoPlurality, ReplayOracle};
use votekit::rules::DictatorOracle;
use votekit::{RuleId, ScoreRange};

use crate::InputArgs;

/// An invocation error; exits with status 1.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::error::Error for Usage {}

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

pub fn parse_range(s: &str) -> Result<ScoreRange, String> {
    let (lo, hi) = s.split_once(':').ok_or("expected MIN:MAX")?;
    let lo = lo.trim().parse().map_err(|e| format!("bad minimum: {e}"))?;
    let hi = hi.trim().parse().map_err(|e| format!("bad maximum: {e}"))?;
    ScoreRange::new(lo, hi).map_err(|e| e.to_string())
}

pub fn parse_rule(s: &str) -> Result<RuleId, String> {
    s.parse()
        .map_err(|e: votekit::rules::UnknownRule| e.to_string())
}

pub fn parse_criterion(s: &str) -> Result<Criterion, String> {
    s.parse()
        .map_err(|e: votekit::criteria::CriteriaError| e.to_string())
}

pub fn parse_assignment(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.rsplit_once('=').ok_or("expected NAME=VALUE")?;
    Ok((k.to_string(), v.parse().map_err(|e| format!("{e}"))?))
}

fn open(path: &Path) -> Result<Box<dyn BufRead>> {
    if path == Path::new("-") {
        return Ok(Box::new(BufReader::new(io::stdin())));
    }
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(Box::new(BufReader::new(f)))
}

/// Reads a profile file, reporting skipped lines on standard error.
pub fn read_input(args: &InputArgs) -> Result<RecordSet> {
    let set = read_records(open(&args.input)?, args.strict)
        .with_context(|| format!("{}", args.input.display()))?;
    for e in &set.errors {
        eprintln!("{}: skipped {e}", args.input.display());
    }
    Ok(set)
}

pub fn sink(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

pub fn require_seed(seed: Option<u64>, why: &str) -> Result<u64> {
    seed.ok_or_else(|| usage(format!("--seed is required {why}")))
}

/// `echo`, `replay:FILE` or `synthetic:COMPETENCE:DEFERENCE`.
pub fn dictator(spec: &str) -> Result<Arc<dyn DictatorOracle>> {
    if spec == "echo" {
        return Ok(Arc::new(EchoPlurality));
    }
    if let Some(path) = spec.strip_prefix("replay:") {
        let ballots = read_replay(open(Path::new(path))?).with_context(|| path.to_string())?;
        return Ok(Arc::new(ReplayOracle::new(path, ballots)));
    }
    if let Some(rest) = spec.strip_prefix("synthetic:") {
        let probs: Vec<f64> = rest
            .split(':')
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| usage(format!("bad dictator `{spec}`")))?;
        if let [competence, deference] = probs[..] {
            if [competence, deference]
                .iter()
                .all(|p| (0.0..=1.0).contains(p))
            {
                return Ok(Arc::new(CompetenceOracle {
                    competence,
                    deference,
                }));
            }
        }
    }
    Err(usage(format!(
        "bad dictator `{spec}` (expected echo, replay:FILE or synthetic:COMPETENCE:DEFERENCE)"
    )))
}
