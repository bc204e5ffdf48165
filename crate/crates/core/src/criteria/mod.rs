//! Voting criteria: checkers and an exhaustive counterexample search.
//!
//! Each criterion is checked as the implication below on a concrete
//! instance; "winner" is `order[0]` of the rule's collective ranking.
//!
//! * majority: an alternative ranked first by more than half of the agents
//!   wins.
//! * condorcet: an alternative beating every other head to head wins.
//! * monotonicity: if `a` wins and the only change is `a` moving up on some
//!   ballots, `a` still wins.
//! * consistency: if two disjoint electorates both elect `a`, their union
//!   elects `a`.
//! * iia: removing any alternative other than the winner `a` does not put
//!   some `b` above `a`. Checking only the runner-up as `b` would miss
//!   every IRV and ranked pairs failure with three alternatives, since both
//!   rules rank the winner above the runner-up whenever it wins their duel.
//!
//! Scored elections (range voting) use the rankings implied by the scores
//! for the majority and Condorcet tests, and treat a raise as an increased
//! score for the winner.

use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::profile::{
    preference_order, Alt, Profile, ProfileError, Rankings, ScoredProfile, Weighted,
};
use crate::rules::{self, CollectiveRanking, RuleId};
use crate::tally::{pairwise_tally, PairwiseTally};

mod matrix;
mod search;

pub use matrix::{compliance_matrix, expected_compliance, Cell, ComplianceMatrix};
pub use search::{search_counterexample, MAX_ALTERNATIVES, MAX_VOTERS, SEARCH_SCORE_RANGE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Majority,
    Monotonicity,
    Consistency,
    Iia,
    Condorcet,
}

impl Criterion {
    pub const ALL: [Criterion; 5] = [
        Criterion::Majority,
        Criterion::Monotonicity,
        Criterion::Consistency,
        Criterion::Iia,
        Criterion::Condorcet,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Criterion::Majority => "majority",
            Criterion::Monotonicity => "monotonicity",
            Criterion::Consistency => "consistency",
            Criterion::Iia => "iia",
            Criterion::Condorcet => "condorcet",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = CriteriaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Criterion::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CriteriaError::UnknownCriterion(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CriteriaError {
    #[error("unknown criterion `{0}` (expected one of majority, monotonicity, consistency, iia, condorcet)")]
    UnknownCriterion(String),
    #[error("{0} is randomized and cannot be checked")]
    RandomizedRule(RuleId),
    #[error("instance does not fit the check: {0}")]
    InstanceKindMismatch(String),
    #[error("search bounds m={m}, n_max={n_max} exceed m <= 4, n_max <= 7")]
    BoundsTooLarge { m: usize, n_max: usize },
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

/// An ordinal or scored election.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Election {
    Ordinal(Profile),
    Scored(ScoredProfile),
}

impl Election {
    pub fn alternatives(&self) -> &crate::profile::AlternativeSet {
        match self {
            Election::Ordinal(p) => p.alternatives(),
            Election::Scored(p) => p.alternatives(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Election::Ordinal(p) => p.n(),
            Election::Scored(p) => p.n(),
        }
    }

    /// Rankings as cast, or as implied by the scores.
    pub fn preference_profile(&self) -> Cow<'_, Profile> {
        match self {
            Election::Ordinal(p) => Cow::Borrowed(p),
            Election::Scored(p) => Cow::Owned(p.preference_profile()),
        }
    }

    fn pool(&self) -> Pool<'_> {
        match self {
            Election::Ordinal(p) => Pool::Ordinal(Weighted {
                m: p.m(),
                items: p
                    .ballots()
                    .iter()
                    .map(|b| (Cow::Borrowed(b.ranking.as_slice()), 1))
                    .collect(),
            }),
            Election::Scored(p) => Pool::Scored(Weighted {
                m: p.m(),
                items: p
                    .ballots()
                    .iter()
                    .map(|b| (Cow::Borrowed(b.scores.as_slice()), 1))
                    .collect(),
            }),
        }
    }
}

/// Input to [`check_criterion`]. `perturbed` is the raised profile for
/// monotonicity, the second electorate for consistency, and optionally one
/// restriction of `base` for IIA (all single removals are tried otherwise).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub base: Election,
    pub perturbed: Option<Election>,
}

/// A replayable criterion violation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub criterion: Criterion,
    pub rule: RuleId,
    pub base: Election,
    pub perturbed: Option<Election>,
    pub explanation: String,
}

impl Witness {
    pub fn instance(&self) -> Instance {
        Instance {
            base: self.base.clone(),
            perturbed: self.perturbed.clone(),
        }
    }

    /// Electorate size of the witness (both parts for consistency).
    pub fn size(&self) -> usize {
        match (self.criterion, &self.perturbed) {
            (Criterion::Consistency, Some(p)) => self.base.n() + p.n(),
            _ => self.base.n(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Violation(String),
}

impl Verdict {
    pub fn is_violation(&self) -> bool {
        matches!(self, Verdict::Violation(_))
    }
}

/// Alternative ranked first by more than half of the ballots.
pub fn majority_favorite<R: Rankings + ?Sized>(profile: &R) -> Option<Alt> {
    let m = profile.num_alternatives();
    let mut firsts = vec![0u64; m];
    let mut n = 0;
    profile.for_each_ranking(|r, w| {
        firsts[r[0]] += w;
        n += w;
    });
    (0..m).find(|&a| 2 * firsts[a] > n)
}

/// Alternative with a positive margin against every other, if any.
pub fn condorcet_winner(tally: &PairwiseTally) -> Option<Alt> {
    tally.condorcet_winner()
}

/// Weighted ballots in the form the checkers work on.
#[derive(Debug, Clone)]
pub(crate) enum Pool<'a> {
    Ordinal(Weighted<Cow<'a, [Alt]>>),
    Scored(Weighted<Cow<'a, [i64]>>),
}

impl Pool<'_> {
    pub(crate) fn rank(&self, rule: RuleId) -> CollectiveRanking {
        match (self, rule) {
            (Pool::Ordinal(w), RuleId::Plurality) => rules::plurality(w),
            (Pool::Ordinal(w), RuleId::Bucklin) => rules::bucklin(w),
            (Pool::Ordinal(w), RuleId::Borda) => rules::borda(w),
            (Pool::Ordinal(w), RuleId::Irv) => rules::irv(w),
            (Pool::Ordinal(w), RuleId::Minimax) => rules::minimax(w),
            (Pool::Ordinal(w), RuleId::RankedPairs) => rules::ranked_pairs(w),
            (Pool::Scored(w), RuleId::RangeVoting) => rules::range_voting(w),
            _ => unreachable!("kind checked before ranking"),
        }
    }

    fn implied_rankings(&self) -> Cow<'_, Weighted<Cow<'_, [Alt]>>> {
        match self {
            Pool::Ordinal(w) => Cow::Borrowed(w),
            Pool::Scored(w) => Cow::Owned(Weighted {
                m: w.m,
                items: w
                    .items
                    .iter()
                    .map(|(s, k)| (Cow::Owned(preference_order(s)), *k))
                    .collect(),
            }),
        }
    }

    fn majority_favorite(&self) -> Option<Alt> {
        majority_favorite(self.implied_rankings().as_ref())
    }

    fn condorcet_winner(&self) -> Option<Alt> {
        pairwise_tally(self.implied_rankings().as_ref()).condorcet_winner()
    }

    /// The pool with alternative `c` removed; indices above `c` shift down.
    fn without(&self, c: Alt) -> Pool<'static> {
        let shift = |a: Alt| if a > c { a - 1 } else { a };
        match self {
            Pool::Ordinal(w) => Pool::Ordinal(Weighted {
                m: w.m - 1,
                items: w
                    .items
                    .iter()
                    .map(|(r, k)| {
                        let r: Vec<Alt> =
                            r.iter().filter(|&&a| a != c).map(|&a| shift(a)).collect();
                        (Cow::Owned(r), *k)
                    })
                    .collect(),
            }),
            Pool::Scored(w) => Pool::Scored(Weighted {
                m: w.m - 1,
                items: w
                    .items
                    .iter()
                    .map(|(s, k)| {
                        let s: Vec<i64> = s
                            .iter()
                            .enumerate()
                            .filter(|&(a, _)| a != c)
                            .map(|(_, &v)| v)
                            .collect();
                        (Cow::Owned(s), *k)
                    })
                    .collect(),
            }),
        }
    }
}

fn label(a: Alt) -> String {
    // Search pools carry no labels; checks on real elections relabel.
    format!("#{a}")
}

pub(crate) fn majority_violation(rule: RuleId, pool: &Pool<'_>) -> Option<String> {
    let fav = pool.majority_favorite()?;
    let won = pool.rank(rule).winner();
    (won != fav).then(|| format!("majority favorite {} loses to {}", label(fav), label(won)))
}

pub(crate) fn condorcet_violation(rule: RuleId, pool: &Pool<'_>) -> Option<String> {
    let cw = pool.condorcet_winner()?;
    let won = pool.rank(rule).winner();
    (won != cw).then(|| format!("Condorcet winner {} loses to {}", label(cw), label(won)))
}

/// The first removed alternative (by index) after which the winner loses.
pub(crate) fn iia_violation(rule: RuleId, pool: &Pool<'_>) -> Option<(Alt, String)> {
    let a = pool.rank(rule).winner();
    (0..pool_m(pool)).filter(|&c| c != a).find_map(|c| {
        let shift = |x: Alt| if x > c { x - 1 } else { x };
        let unshift = |x: Alt| if x >= c { x + 1 } else { x };
        let won = pool.without(c).rank(rule).winner();
        (won != shift(a)).then(|| {
            let why = format!(
                "removing {} puts {} above winner {}",
                label(c),
                label(unshift(won)),
                label(a)
            );
            (c, why)
        })
    })
}

fn pool_m(pool: &Pool<'_>) -> usize {
    match pool {
        Pool::Ordinal(w) => w.m,
        Pool::Scored(w) => w.m,
    }
}

pub(crate) fn monotonicity_violation(
    rule: RuleId,
    base: &Pool<'_>,
    raised: &Pool<'_>,
) -> Option<String> {
    let a = base.rank(rule).winner();
    let won = raised.rank(rule).winner();
    (won != a).then(|| format!("raising winner {} makes {} win", label(a), label(won)))
}

pub(crate) fn consistency_violation(
    rule: RuleId,
    first: &Pool<'_>,
    second: &Pool<'_>,
    union: &Pool<'_>,
) -> Option<String> {
    let a = first.rank(rule).winner();
    if second.rank(rule).winner() != a {
        return None;
    }
    let won = union.rank(rule).winner();
    (won != a).then(|| {
        format!(
            "both parts elect {} but their union elects {}",
            label(a),
            label(won)
        )
    })
}

/// Replaces `#i` placeholders with the election's labels.
fn relabel(text: String, election: &Election) -> String {
    let alts = election.alternatives();
    let mut out = text;
    for a in (0..alts.len()).rev() {
        out = out.replace(&format!("#{a}"), alts.label(a));
    }
    out
}

fn check_kind(rule: RuleId, e: &Election) -> Result<(), CriteriaError> {
    match (rule.needs_scores(), e) {
        (true, Election::Scored(_)) | (false, Election::Ordinal(_)) => Ok(()),
        (true, _) => Err(CriteriaError::InstanceKindMismatch(format!(
            "{rule} needs a scored election"
        ))),
        (false, _) => Err(CriteriaError::InstanceKindMismatch(format!(
            "{rule} needs an ordinal election"
        ))),
    }
}

fn require_perturbed(
    instance: &Instance,
    criterion: Criterion,
) -> Result<&Election, CriteriaError> {
    instance.perturbed.as_ref().ok_or_else(|| {
        CriteriaError::InstanceKindMismatch(format!("{criterion} needs a second election"))
    })
}

/// Evaluates `criterion` for `rule` on one instance.
pub fn check_criterion(
    rule: RuleId,
    criterion: Criterion,
    instance: &Instance,
) -> Result<Verdict, CriteriaError> {
    if !rule.is_deterministic() {
        return Err(CriteriaError::RandomizedRule(rule));
    }
    let base = &instance.base;
    check_kind(rule, base)?;
    if let Some(p) = &instance.perturbed {
        check_kind(rule, p)?;
    }
    let pool = base.pool();
    let found = match criterion {
        Criterion::Majority => majority_violation(rule, &pool),
        Criterion::Condorcet => condorcet_violation(rule, &pool),
        Criterion::Iia => match &instance.perturbed {
            None => iia_violation(rule, &pool).map(|(_, why)| why),
            Some(restricted) => iia_against(rule, base, restricted)?,
        },
        Criterion::Monotonicity => {
            let raised = require_perturbed(instance, criterion)?;
            let winner = pool.rank(rule).winner();
            check_raise(base, raised, winner)?;
            monotonicity_violation(rule, &pool, &raised.pool())
        }
        Criterion::Consistency => {
            let second = require_perturbed(instance, criterion)?;
            if second.alternatives() != base.alternatives() {
                return Err(CriteriaError::InstanceKindMismatch(
                    "electorates vote on different alternatives".into(),
                ));
            }
            let union = match (base, second) {
                (Election::Ordinal(x), Election::Ordinal(y)) => Election::Ordinal(x.union(y)?),
                (Election::Scored(x), Election::Scored(y)) => Election::Scored(x.union(y)?),
                _ => unreachable!("kinds checked"),
            };
            consistency_violation(rule, &pool, &second.pool(), &union.pool())
        }
    };
    Ok(match found {
        Some(why) => Verdict::Violation(relabel(why, base)),
        None => Verdict::Pass,
    })
}

/// IIA against one given restriction of `base`.
fn iia_against(
    rule: RuleId,
    base: &Election,
    restricted: &Election,
) -> Result<Option<String>, CriteriaError> {
    let alts = base.alternatives();
    let keep: Vec<Alt> = restricted
        .alternatives()
        .labels()
        .iter()
        .map(|l| {
            alts.index_of(l).ok_or_else(|| {
                CriteriaError::InstanceKindMismatch(format!("`{l}` is not a base alternative"))
            })
        })
        .collect::<Result<_, _>>()?;
    let expected = match base {
        Election::Ordinal(p) => Election::Ordinal(p.restrict(&keep)?),
        Election::Scored(p) => Election::Scored(p.restrict(&keep)?),
    };
    if &expected != restricted {
        return Err(CriteriaError::InstanceKindMismatch(
            "second election is not a restriction of the first".into(),
        ));
    }
    let a = base.pool().rank(rule).winner();
    let Some(ra) = restricted.alternatives().index_of(alts.label(a)) else {
        return Err(CriteriaError::InstanceKindMismatch(
            "restriction drops the winner".into(),
        ));
    };
    let won = restricted.pool().rank(rule).winner();
    Ok((won != ra).then(|| {
        format!(
            "restricting to {{{}}} puts {} above winner {}",
            restricted.alternatives().labels().join(", "),
            label(keep[won]),
            label(a)
        )
    }))
}

/// Confirms `raised` differs from `base` only by moving `winner` up.
fn check_raise(base: &Election, raised: &Election, winner: Alt) -> Result<(), CriteriaError> {
    let bad = |why: &str| Err(CriteriaError::InstanceKindMismatch(why.to_string()));
    if base.alternatives() != raised.alternatives() || base.n() != raised.n() {
        return bad("raised election has different alternatives or agents");
    }
    match (base, raised) {
        (Election::Ordinal(x), Election::Ordinal(y)) => {
            for (b, r) in x.ballots().iter().zip(y.ballots()) {
                let others_b: Vec<Alt> =
                    b.ranking.iter().copied().filter(|&a| a != winner).collect();
                let others_r: Vec<Alt> =
                    r.ranking.iter().copied().filter(|&a| a != winner).collect();
                if b.agent != r.agent
                    || others_b != others_r
                    || r.position(winner) > b.position(winner)
                {
                    return bad("a ballot changed other than by raising the winner");
                }
            }
        }
        (Election::Scored(x), Election::Scored(y)) => {
            for (b, r) in x.ballots().iter().zip(y.ballots()) {
                let same_others = (0..x.m()).all(|a| a == winner || b.scores[a] == r.scores[a]);
                if b.agent != r.agent || !same_others || r.scores[winner] < b.scores[winner] {
                    return bad("a ballot changed other than by raising the winner");
                }
            }
        }
        _ => unreachable!("kinds checked"),
    }
    Ok(())
}
