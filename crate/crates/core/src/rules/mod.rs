//! Aggregation rules. Every rule maps a profile to a full collective
//! ranking; ties are broken toward the lower alternative index and each
//! position where that happened is recorded in [`CollectiveRanking::ties`].

use std::cmp::Ord;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::profile::{Alt, AlternativeSet, Profile, ProfileError, ScoreRange, ScoredProfile};

mod borda;
mod bucklin;
mod dictatorial;
mod irv;
mod minimax;
pub mod oracle;
mod plurality;
mod range;
mod ranked_pairs;

pub use borda::borda;
pub use bucklin::bucklin;
pub use dictatorial::{
    blind_dictatorial, fabricate_consultation, informed_dictatorial, misinformed_dictatorial,
};
pub use irv::irv;
pub use minimax::minimax;
pub use oracle::{DictatorContext, DictatorOracle, OracleError};
pub use plurality::plurality;
pub use range::range_voting;
pub use ranked_pairs::ranked_pairs;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleId {
    BlindDictatorial,
    InformedDictatorial,
    MisinformedDictatorial,
    RangeVoting,
    Plurality,
    Bucklin,
    Borda,
    Irv,
    Minimax,
    RankedPairs,
}

impl RuleId {
    pub const ALL: [RuleId; 10] = [
        RuleId::BlindDictatorial,
        RuleId::InformedDictatorial,
        RuleId::MisinformedDictatorial,
        RuleId::RangeVoting,
        RuleId::Plurality,
        RuleId::Bucklin,
        RuleId::Borda,
        RuleId::Irv,
        RuleId::Minimax,
        RuleId::RankedPairs,
    ];

    /// Rules whose output depends only on the ballots.
    pub const DETERMINISTIC: [RuleId; 7] = [
        RuleId::RangeVoting,
        RuleId::Plurality,
        RuleId::Bucklin,
        RuleId::Borda,
        RuleId::Irv,
        RuleId::Minimax,
        RuleId::RankedPairs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleId::BlindDictatorial => "blind_dictatorial",
            RuleId::InformedDictatorial => "informed_dictatorial",
            RuleId::MisinformedDictatorial => "misinformed_dictatorial",
            RuleId::RangeVoting => "range_voting",
            RuleId::Plurality => "plurality",
            RuleId::Bucklin => "bucklin",
            RuleId::Borda => "borda",
            RuleId::Irv => "irv",
            RuleId::Minimax => "minimax",
            RuleId::RankedPairs => "ranked_pairs",
        }
    }

    pub fn is_deterministic(self) -> bool {
        Self::DETERMINISTIC.contains(&self)
    }

    pub fn needs_scores(self) -> bool {
        self == RuleId::RangeVoting
    }

    pub fn needs_dictator(self) -> bool {
        matches!(
            self,
            RuleId::InformedDictatorial | RuleId::MisinformedDictatorial
        )
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown rule `{0}` (expected one of {names})", names = RuleId::ALL.map(RuleId::name).join(", "))]
pub struct UnknownRule(pub String);

impl FromStr for RuleId {
    type Err = UnknownRule;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RuleId::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| UnknownRule(s.to_string()))
    }
}

/// Rule-specific per-alternative metadata, indexed by alternative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scores {
    None,
    /// Plurality counts, Borda points, range sums, minimax worst disfavor.
    Totals(Vec<i64>),
    /// Bucklin: round at which the alternative first held a majority, and
    /// its cumulative count at that round.
    Bucklin(Vec<(usize, u64)>),
    /// IRV: elimination round (1-based); the survivor gets `m`.
    EliminationRound(Vec<usize>),
    /// Dictatorial rules: whose ballot was adopted.
    Dictator(String),
}

/// A rule's output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollectiveRanking {
    pub rule: RuleId,
    /// Best first; `order[0]` is the winner.
    pub order: Vec<Alt>,
    pub scores: Scores,
    /// Ascending positions `i` where the canonical tie-break decided between
    /// `order[i]` and what follows it.
    pub ties: Vec<usize>,
    /// Fingerprint of the configuration that produced this ranking.
    pub config: Option<String>,
}

impl CollectiveRanking {
    pub(crate) fn new(rule: RuleId, order: Vec<Alt>, scores: Scores, mut ties: Vec<usize>) -> Self {
        ties.sort_unstable();
        ties.dedup();
        CollectiveRanking {
            rule,
            order,
            scores,
            ties,
            config: None,
        }
    }

    pub fn winner(&self) -> Alt {
        self.order[0]
    }

    /// 0-based rank of `alt`.
    pub fn position(&self, alt: Alt) -> usize {
        self.order
            .iter()
            .position(|&a| a == alt)
            .expect("full ranking")
    }
}

/// Sorts `0..m` by ascending `key`, lower index first among equals, and
/// reports where equal keys met.
pub(crate) fn order_by_key<K: Ord>(m: usize, key: impl Fn(Alt) -> K) -> (Vec<Alt>, Vec<usize>) {
    let keys: Vec<K> = (0..m).map(key).collect();
    let mut order: Vec<Alt> = (0..m).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]).then(a.cmp(&b)));
    let ties = order
        .windows(2)
        .enumerate()
        .filter(|(_, w)| keys[w[0]] == keys[w[1]])
        .map(|(i, _)| i)
        .collect();
    (order, ties)
}

#[derive(Clone, Default)]
pub struct RuleConfig {
    pub seed: u64,
    pub range: ScoreRange,
    pub dictator: Option<Arc<dyn DictatorOracle>>,
}

impl fmt::Debug for RuleConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fingerprint())
    }
}

impl RuleConfig {
    pub fn with_seed(seed: u64) -> Self {
        RuleConfig {
            seed,
            ..Default::default()
        }
    }

    pub fn fingerprint(&self) -> String {
        format!(
            "seed={};range={}..={};dictator={}",
            self.seed,
            self.range.min,
            self.range.max,
            self.dictator
                .as_ref()
                .map_or_else(|| "none".to_string(), |d| d.name())
        )
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuleError {
    #[error("{rule} needs {needed} input")]
    InputKindMismatch { rule: RuleId, needed: &'static str },
    #[error("no dictator oracle configured")]
    OracleUnavailable,
    #[error("dictator returned an invalid ballot: {0}")]
    OracleBallotInvalid(ProfileError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

/// Everything a rule may need to decide one question.
#[derive(Debug, Clone, Copy)]
pub struct RuleInput<'a> {
    pub question_id: &'a str,
    pub alternatives: &'a AlternativeSet,
    /// Size of the electorate; used to fabricate misinformed consultations.
    pub electorate: usize,
    pub ordinal: Option<&'a Profile>,
    pub scored: Option<&'a ScoredProfile>,
    /// Only synthetic dictator oracles look at this.
    pub gold: Option<Alt>,
}

impl<'a> RuleInput<'a> {
    pub fn ordinal(question_id: &'a str, profile: &'a Profile) -> Self {
        RuleInput {
            question_id,
            alternatives: profile.alternatives(),
            electorate: profile.n(),
            ordinal: Some(profile),
            scored: None,
            gold: None,
        }
    }

    pub fn scored(question_id: &'a str, profile: &'a ScoredProfile) -> Self {
        RuleInput {
            question_id,
            alternatives: profile.alternatives(),
            electorate: profile.n(),
            ordinal: None,
            scored: Some(profile),
            gold: None,
        }
    }
}

/// Dispatches to the rule named by `id`.
pub fn run_rule(
    id: RuleId,
    input: &RuleInput<'_>,
    cfg: &RuleConfig,
) -> Result<CollectiveRanking, RuleError> {
    let ordinal = || {
        input.ordinal.ok_or(RuleError::InputKindMismatch {
            rule: id,
            needed: "ordinal ballot",
        })
    };
    let mut out = match id {
        RuleId::Plurality => plurality(ordinal()?),
        RuleId::Bucklin => bucklin(ordinal()?),
        RuleId::Borda => borda(ordinal()?),
        RuleId::Irv => irv(ordinal()?),
        RuleId::Minimax => minimax(ordinal()?),
        RuleId::RankedPairs => ranked_pairs(ordinal()?),
        RuleId::RangeVoting => {
            let sp = input.scored.ok_or(RuleError::InputKindMismatch {
                rule: id,
                needed: "scored ballot",
            })?;
            check_range(sp, cfg.range)?;
            range_voting(sp)
        }
        RuleId::BlindDictatorial => blind_dictatorial(ordinal()?, cfg, input.question_id),
        RuleId::InformedDictatorial => {
            let oracle = cfg
                .dictator
                .as_deref()
                .ok_or(RuleError::OracleUnavailable)?;
            informed_dictatorial(ordinal()?, oracle, &context(input, cfg))?
        }
        RuleId::MisinformedDictatorial => {
            let oracle = cfg
                .dictator
                .as_deref()
                .ok_or(RuleError::OracleUnavailable)?;
            misinformed_dictatorial(
                input.alternatives,
                input.electorate,
                oracle,
                &context(input, cfg),
            )?
        }
    };
    out.config = Some(cfg.fingerprint());
    Ok(out)
}

fn context<'a>(input: &RuleInput<'a>, cfg: &RuleConfig) -> DictatorContext<'a> {
    DictatorContext {
        question_id: input.question_id,
        alternatives: input.alternatives,
        gold: input.gold,
        seed: cfg.seed,
    }
}

fn check_range(sp: &ScoredProfile, range: ScoreRange) -> Result<(), ProfileError> {
    for b in sp.ballots() {
        for (a, &s) in b.scores.iter().enumerate() {
            if !range.contains(s) {
                return Err(ProfileError::ScoreOutOfRange {
                    agent: b.agent.clone(),
                    label: sp.alternatives().label(a).to_string(),
                    score: s,
                    min: range.min,
                    max: range.max,
                });
            }
        }
    }
    Ok(())
}
