//! Synthetic electorates.
//!
//! An agent of competence `p` ranks the gold alternative first with
//! probability `p` and orders the rest at random; otherwise its whole
//! ballot is a uniform random permutation. Every draw comes from
//! [`seed::stream`] addressed by question id and agent index.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::profile::{
    agent_ids, Alt, AlternativeSet, Ballot, Profile, ProfileError, ScoreRange, ScoredBallot,
    ScoredProfile,
};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("invalid electorate: {0}")]
    InvalidSpec(String),
    #[error("cannot replace {k} of {n} agents")]
    KOutOfRange { k: usize, n: usize },
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElectorateSpec {
    pub n_agents: usize,
    pub m: usize,
    pub competence: f64,
    /// Chance that the non-gold part of a competent ballot is shuffled;
    /// otherwise it keeps index order. `1.0` is a uniform shuffle.
    pub noise: f64,
    pub seed: u64,
    /// Per-subject competence overriding `competence`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub subject_competence: BTreeMap<String, f64>,
}

impl ElectorateSpec {
    pub fn new(n_agents: usize, m: usize, competence: f64, seed: u64) -> Self {
        ElectorateSpec {
            n_agents,
            m,
            competence,
            noise: 1.0,
            seed,
            subject_competence: BTreeMap::new(),
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |msg: String| Err(SynthError::InvalidSpec(msg));
        if self.n_agents == 0 {
            return bad("at least one agent is required".into());
        }
        if self.m < 2 {
            return bad(format!(
                "at least two alternatives are required, got {}",
                self.m
            ));
        }
        let probs = std::iter::once(("competence", self.competence))
            .chain(std::iter::once(("noise", self.noise)))
            .chain(
                self.subject_competence
                    .values()
                    .map(|&p| ("subject competence", p)),
            );
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} {p} is not a probability"));
            }
        }
        Ok(())
    }

    pub fn competence_for(&self, subject: &str) -> f64 {
        self.subject_competence
            .get(subject)
            .copied()
            .unwrap_or(self.competence)
    }
}

/// A multiple-choice question with a known answer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Question {
    pub id: String,
    pub subject: String,
    pub alternatives: AlternativeSet,
    pub gold: Alt,
}

/// `count` questions over `m` lettered choices, subjects assigned round
/// robin, gold drawn uniformly per question.
pub fn make_questions(
    count: usize,
    m: usize,
    subjects: &[String],
    seed: u64,
) -> Result<Vec<Question>, SynthError> {
    let alternatives = AlternativeSet::lettered(m)?;
    let width = count.to_string().len().max(4);
    let default = ["general".to_string()];
    let subjects = if subjects.is_empty() {
        &default[..]
    } else {
        subjects
    };
    Ok((0..count)
        .map(|i| {
            let id = format!("q{i:0width$}");
            let gold = seed::stream(seed, &id, "gold", 0).gen_range(0..m);
            Question {
                subject: subjects[i % subjects.len()].clone(),
                alternatives: alternatives.clone(),
                gold,
                id,
            }
        })
        .collect())
}

/// A uniformly random ranking of `alts`.
pub fn random_ballot<R: Rng + ?Sized>(
    agent: impl Into<String>,
    alts: &AlternativeSet,
    rng: &mut R,
) -> Ballot {
    let mut ranking: Vec<Alt> = (0..alts.len()).collect();
    ranking.shuffle(rng);
    Ballot {
        agent: agent.into(),
        ranking,
    }
}

/// Uniform integer scores within `range`.
pub fn random_scores<R: Rng + ?Sized>(
    agent: impl Into<String>,
    m: usize,
    range: ScoreRange,
    rng: &mut R,
) -> ScoredBallot {
    ScoredBallot {
        agent: agent.into(),
        scores: (0..m)
            .map(|_| rng.gen_range(range.min..=range.max))
            .collect(),
    }
}

fn agents(n: usize) -> Vec<String> {
    agent_ids(n, "a")
}

pub fn generate_profile(q: &Question, spec: &ElectorateSpec) -> Result<Profile, SynthError> {
    spec.validate()?;
    let p = spec.competence_for(&q.subject);
    let m = q.alternatives.len();
    let ballots = agents(spec.n_agents)
        .into_iter()
        .enumerate()
        .map(|(i, agent)| {
            let mut rng = seed::stream(spec.seed, &q.id, "agent", i as u64);
            if !rng.gen_bool(p) {
                return random_ballot(agent, &q.alternatives, &mut rng);
            }
            let mut rest: Vec<Alt> = (0..m).filter(|&a| a != q.gold).collect();
            if rng.gen_bool(spec.noise) {
                rest.shuffle(&mut rng);
            }
            let mut ranking = vec![q.gold];
            ranking.extend(rest);
            Ballot { agent, ranking }
        })
        .collect();
    Ok(Profile::new(q.alternatives.clone(), ballots)?)
}

/// Scored ballots: a competent agent gives the gold `range.max`, every
/// other score is uniform in `range`.
pub fn generate_scored_profile(
    q: &Question,
    spec: &ElectorateSpec,
    range: ScoreRange,
) -> Result<ScoredProfile, SynthError> {
    spec.validate()?;
    let p = spec.competence_for(&q.subject);
    let m = q.alternatives.len();
    let ballots = agents(spec.n_agents)
        .into_iter()
        .enumerate()
        .map(|(i, agent)| {
            let mut rng = seed::stream(spec.seed, &q.id, "scores", i as u64);
            let competent = rng.gen_bool(p);
            let mut b = random_scores(agent, m, range, &mut rng);
            if competent {
                b.scores[q.gold] = range.max;
            }
            b
        })
        .collect();
    Ok(ScoredProfile::new(q.alternatives.clone(), range, ballots)?)
}

fn check_k(k: usize, n: usize) -> Result<(), SynthError> {
    if k > n {
        return Err(SynthError::KOutOfRange { k, n });
    }
    Ok(())
}

/// Replaces the ballots of the first `k` agents (canonical order) with
/// random ones.
pub fn corrupt_profile(
    p: &Profile,
    k: usize,
    seed: u64,
    question_id: &str,
) -> Result<Profile, SynthError> {
    check_k(k, p.n())?;
    let replacements = (0..k)
        .map(|i| {
            let mut rng = seed::stream(seed, question_id, "corrupt", i as u64);
            let b = random_ballot("", p.alternatives(), &mut rng);
            (i, b.ranking)
        })
        .collect();
    Ok(p.with_rankings_replaced(replacements)?)
}

pub fn corrupt_scored_profile(
    p: &ScoredProfile,
    k: usize,
    seed: u64,
    question_id: &str,
) -> Result<ScoredProfile, SynthError> {
    check_k(k, p.n())?;
    let replacements = (0..k)
        .map(|i| {
            let mut rng = seed::stream(seed, question_id, "corrupt-scores", i as u64);
            (i, random_scores("", p.m(), p.range(), &mut rng).scores)
        })
        .collect();
    Ok(p.with_scores_replaced(replacements)?)
}
