//! Pluggable dictators for the informed and misinformed dictatorial rules.

use std::collections::HashMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use super::plurality;
use crate::profile::{Alt, AlternativeSet, Profile};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("no recorded dictator ballot for question `{0}`")]
    MissingQuestion(String),
    #[error("{0}")]
    Failed(String),
}

/// What a dictator knows about the question besides the consultation.
#[derive(Debug, Clone, Copy)]
pub struct DictatorContext<'a> {
    pub question_id: &'a str,
    pub alternatives: &'a AlternativeSet,
    /// Ground truth, visible only to simulated dictators.
    pub gold: Option<Alt>,
    pub seed: u64,
}

/// A dictator reviews a consultation profile and answers with a ranking of
/// labels. The calling rule validates the answer.
pub trait DictatorOracle: Send + Sync + fmt::Debug {
    fn name(&self) -> String;

    fn decide(
        &self,
        ctx: &DictatorContext<'_>,
        consultation: &Profile,
    ) -> Result<Vec<String>, OracleError>;

    /// Implementations that cannot be called concurrently return `true`;
    /// the evaluation harness then runs single-threaded.
    fn serial_only(&self) -> bool {
        false
    }
}

/// Answers with the plurality ranking of whatever it is shown.
#[derive(Debug, Clone, Copy, Default)]
pub struct EchoPlurality;

impl DictatorOracle for EchoPlurality {
    fn name(&self) -> String {
        "echo-plurality".into()
    }

    fn decide(
        &self,
        _: &DictatorContext<'_>,
        consultation: &Profile,
    ) -> Result<Vec<String>, OracleError> {
        let out = plurality(consultation);
        Ok(consultation.alternatives().labels_of(&out.order))
    }
}

/// Replays recorded dictator ballots keyed by question id.
#[derive(Debug, Clone, Default)]
pub struct ReplayOracle {
    source: String,
    ballots: HashMap<String, Vec<String>>,
}

impl ReplayOracle {
    pub fn new(source: impl Into<String>, ballots: HashMap<String, Vec<String>>) -> Self {
        ReplayOracle {
            source: source.into(),
            ballots,
        }
    }

    pub fn len(&self) -> usize {
        self.ballots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ballots.is_empty()
    }
}

impl DictatorOracle for ReplayOracle {
    fn name(&self) -> String {
        format!("replay:{}", self.source)
    }

    fn decide(&self, ctx: &DictatorContext<'_>, _: &Profile) -> Result<Vec<String>, OracleError> {
        self.ballots
            .get(ctx.question_id)
            .cloned()
            .ok_or_else(|| OracleError::MissingQuestion(ctx.question_id.to_string()))
    }
}

/// Simulated dictator. With probability `deference` it adopts the plurality
/// ranking of the consultation; otherwise it votes on its own, putting the
/// gold answer first with probability `competence` and shuffling the rest.
#[derive(Debug, Clone, Copy)]
pub struct CompetenceOracle {
    pub competence: f64,
    pub deference: f64,
}

impl DictatorOracle for CompetenceOracle {
    fn name(&self) -> String {
        format!("synthetic:{}:{}", self.competence, self.deference)
    }

    fn decide(
        &self,
        ctx: &DictatorContext<'_>,
        consultation: &Profile,
    ) -> Result<Vec<String>, OracleError> {
        let mut rng = seed::stream(ctx.seed, ctx.question_id, "dictator", 0);
        if rng.gen_bool(self.deference) {
            return EchoPlurality.decide(ctx, consultation);
        }
        let m = ctx.alternatives.len();
        let mut order: Vec<Alt> = (0..m).collect();
        order.shuffle(&mut rng);
        if let Some(gold) = ctx.gold {
            if rng.gen_bool(self.competence) {
                order.retain(|&a| a != gold);
                order.insert(0, gold);
            }
        }
        Ok(ctx.alternatives.labels_of(&order))
    }
}
