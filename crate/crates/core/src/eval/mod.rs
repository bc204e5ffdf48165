//! Accuracy harness for ensembles answering multiple-choice questions.
//!
//! A question counts for a rule only if its profile is valid for the
//! ballot kind the rule consumes. Accuracies are pooled ratios: the hits of
//! all runs over the valid questions of all runs, as a percentage. Each
//! question is decided independently from seed-addressed randomness, so
//! results do not depend on question order or on the number of workers.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::format::ProfileRecord;
use crate::profile::{Alt, AlternativeSet, Profile, ProfileError, ScoreRange, ScoredProfile};
use crate::rules::{
    run_rule, CollectiveRanking, DictatorOracle, RuleConfig, RuleError, RuleId, RuleInput,
};
use crate::seed;
use crate::synth::{self, SynthError};

mod subjects;

pub use subjects::{subject_report, subjects_csv, SubjectDelta, SubjectTable, Summary};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("k = {k} is outside 1..={max}")]
    KOutOfRange { k: usize, max: usize },
    #[error("quorum {size} exceeds the {available} agents available")]
    SizeExceedsEnsemble { size: usize, available: usize },
    #[error("{0} was not evaluated")]
    RuleNotEvaluated(RuleId),
    #[error("subjects differ between {rule} and {baseline}")]
    SubjectSetMismatch { rule: RuleId, baseline: RuleId },
    #[error("at least one run is required")]
    NoRuns,
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

/// Raw question records plus the ensemble size every profile must match.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub records: Vec<ProfileRecord>,
    pub expected_n: usize,
    /// Lines skipped while reading, reported with the validity statistics.
    pub malformed_lines: usize,
}

impl Dataset {
    /// With `expected_n = None` the ensemble size is the most common number
    /// of distinct agents per question, the larger one on a tie.
    pub fn new(
        records: Vec<ProfileRecord>,
        expected_n: Option<usize>,
        malformed_lines: usize,
    ) -> Self {
        let expected_n = expected_n.unwrap_or_else(|| {
            let mut freq = BTreeMap::<usize, usize>::new();
            for r in &records {
                *freq
                    .entry(
                        r.ballots
                            .iter()
                            .map(|b| &b.agent)
                            .collect::<BTreeSet<_>>()
                            .len(),
                    )
                    .or_default() += 1;
            }
            freq.into_iter()
                .max_by_key(|&(n, c)| (c, n))
                .map_or(0, |(n, _)| n)
        });
        Dataset {
            records,
            expected_n,
            malformed_lines,
        }
    }

    /// Synthetic dataset: one record per question, with scored ballots when
    /// `scores` is given.
    pub fn synthetic(
        questions: &[synth::Question],
        spec: &synth::ElectorateSpec,
        scores: Option<ScoreRange>,
    ) -> Result<Self, SynthError> {
        let records = questions
            .par_iter()
            .map(|q| {
                let p = synth::generate_profile(q, spec)?;
                let mut r =
                    ProfileRecord::from_profile(q.id.clone(), q.subject.clone(), &p, Some(q.gold));
                if let Some(range) = scores {
                    r = r.with_scores(&synth::generate_scored_profile(q, spec, range)?);
                }
                Ok(r)
            })
            .collect::<Result<Vec<_>, SynthError>>()?;
        Ok(Dataset::new(records, Some(spec.n_agents), 0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FilterOptions {
    pub range: ScoreRange,
    /// Admit scored profiles with missing or invalid ballots, keeping the
    /// individually valid ballots.
    pub partial_scores: bool,
}

/// A question ready for aggregation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalItem {
    pub id: String,
    pub subject: String,
    pub alternatives: AlternativeSet,
    pub gold: Alt,
    pub ordinal: Option<Profile>,
    pub scored: Option<ScoredProfile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidSet {
    pub items: Vec<EvalItem>,
    pub expected_n: usize,
}

/// Profile validity counts. Questions without a gold answer are counted
/// once in `no_gold` and nowhere else.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ValidityStats {
    pub questions: usize,
    pub malformed_lines: usize,
    pub expected_agents: usize,
    pub no_gold: usize,
    pub complete_ordinal: usize,
    pub complete_scored: usize,
    /// Scored profiles admitted only through partial salvage.
    pub partial_scored: usize,
    /// Questions whose full ensemble profile can be shown to a dictator.
    pub informed_eligible: usize,
    pub misinformed_eligible: usize,
    /// Rejected ordinal profiles by first failure.
    pub ordinal_rejections: BTreeMap<String, usize>,
    /// Rejected scored profiles by first failure.
    pub scored_rejections: BTreeMap<String, usize>,
}

fn reason(e: &ProfileError) -> &'static str {
    match e {
        ProfileError::TooFewAlternatives(_)
        | ProfileError::DuplicateAlternative(_)
        | ProfileError::AlternativeOutOfRange(_)
        | ProfileError::SubsetTooSmall(_)
        | ProfileError::InvalidRange(..) => "bad_choices",
        ProfileError::UnknownAlternative(_) => "unknown_alternative",
        ProfileError::DuplicateEntry(_) => "duplicate_entry",
        ProfileError::IncompleteRanking(_) => "incomplete_ranking",
        ProfileError::MissingAgents(_) => "missing_agents",
        ProfileError::ExtraAgents(_) => "extra_agents",
        ProfileError::DuplicateAgentId(_) => "duplicate_agent",
        ProfileError::EmptyProfile => "no_ballots",
        ProfileError::MismatchedAlternatives(_) => "mismatched_alternatives",
        ProfileError::ScoreOutOfRange { .. } => "score_out_of_range",
        ProfileError::MissingScore { .. } => "missing_score",
    }
}

fn salvage(r: &ProfileRecord, opts: &FilterOptions) -> Option<ScoredProfile> {
    let alts = r.alternatives().ok()?;
    let mut seen = BTreeSet::new();
    let ballots: Vec<_> = r
        .scored_ballots(opts.range)?
        .into_iter()
        .flatten()
        .filter(|b| seen.insert(b.agent.clone()))
        .collect();
    crate::profile::build_scored_profile(alts, opts.range, ballots, None).ok()
}

/// Splits a dataset into evaluable questions and validity statistics.
pub fn filter_valid(ds: &Dataset, opts: &FilterOptions) -> (ValidSet, ValidityStats) {
    let mut stats = ValidityStats {
        questions: ds.records.len(),
        malformed_lines: ds.malformed_lines,
        expected_agents: ds.expected_n,
        ..Default::default()
    };
    let mut items = Vec::new();
    for r in &ds.records {
        let (Some(gold), Ok(alternatives)) = (r.gold_index(), r.alternatives()) else {
            stats.no_gold += 1;
            continue;
        };
        stats.misinformed_eligible += 1;
        let ordinal = match r.ordinal_profile(Some(ds.expected_n)) {
            Ok(p) => {
                stats.complete_ordinal += 1;
                stats.informed_eligible += 1;
                Some(p)
            }
            Err(e) => {
                *stats
                    .ordinal_rejections
                    .entry(reason(&e).into())
                    .or_default() += 1;
                None
            }
        };
        let scored = match (&r.scores, r.scored_profile(opts.range, Some(ds.expected_n))) {
            (None, _) => {
                *stats
                    .scored_rejections
                    .entry("no_scores".into())
                    .or_default() += 1;
                None
            }
            (Some(_), Ok(p)) => {
                stats.complete_scored += 1;
                Some(p)
            }
            (Some(_), Err(e)) => {
                *stats
                    .scored_rejections
                    .entry(reason(&e).into())
                    .or_default() += 1;
                let p = if opts.partial_scores {
                    salvage(r, opts)
                } else {
                    None
                };
                if p.is_some() {
                    stats.partial_scored += 1;
                }
                p
            }
        };
        items.push(EvalItem {
            id: r.id.clone(),
            subject: r.subject.clone(),
            alternatives,
            gold,
            ordinal,
            scored,
        });
    }
    (
        ValidSet {
            items,
            expected_n: ds.expected_n,
        },
        stats,
    )
}

#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub rules: Vec<RuleId>,
    pub seed: u64,
    pub runs: usize,
    pub range: ScoreRange,
    pub dictator: Option<Arc<dyn DictatorOracle>>,
    /// Rule the deltas are taken against.
    pub baseline: Option<RuleId>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            rules: RuleId::ALL.to_vec(),
            seed: 0,
            runs: 1,
            range: ScoreRange::default(),
            dictator: None,
            baseline: Some(RuleId::BlindDictatorial),
        }
    }
}

impl EvalConfig {
    /// Seed of run `r`.
    pub fn run_seed(&self, r: usize) -> u64 {
        seed::derive_seed(self.seed, "run", r as u64)
    }

    fn rule_config(&self, r: usize) -> RuleConfig {
        RuleConfig {
            seed: self.run_seed(r),
            range: self.range,
            dictator: self.dictator.clone(),
        }
    }

    fn serial(&self) -> bool {
        self.dictator.as_ref().is_some_and(|d| d.serial_only())
    }
}

/// Outcome of one question under one rule in one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuestionResult {
    pub question_id: String,
    pub subject: String,
    pub rule: RuleId,
    pub order: Vec<Alt>,
    pub gold: Alt,
    /// 1-based; 0 when not valid.
    pub rank_of_gold: usize,
    pub valid: bool,
    /// Why a question that had a profile could not be decided.
    pub error: Option<String>,
}

fn decide(
    item: &EvalItem,
    rule: RuleId,
    cfg: &RuleConfig,
    electorate: usize,
) -> Option<Result<CollectiveRanking, RuleError>> {
    let mut input = RuleInput {
        question_id: &item.id,
        alternatives: &item.alternatives,
        electorate,
        ordinal: item.ordinal.as_ref(),
        scored: item.scored.as_ref(),
        gold: Some(item.gold),
    };
    match rule {
        RuleId::RangeVoting => {
            item.scored.as_ref()?;
        }
        RuleId::MisinformedDictatorial => {
            input.ordinal = None;
        }
        _ => {
            item.ordinal.as_ref()?;
        }
    }
    Some(run_rule(rule, &input, cfg))
}

/// Decides every item under `rule`, in item order.
pub fn question_results(
    items: &[EvalItem],
    rule: RuleId,
    cfg: &RuleConfig,
    electorate: usize,
    serial: bool,
) -> Vec<QuestionResult> {
    let one = |item: &EvalItem| {
        let mut res = QuestionResult {
            question_id: item.id.clone(),
            subject: item.subject.clone(),
            rule,
            order: Vec::new(),
            gold: item.gold,
            rank_of_gold: 0,
            valid: false,
            error: None,
        };
        match decide(item, rule, cfg, electorate) {
            None => {}
            Some(Err(e)) => res.error = Some(e.to_string()),
            Some(Ok(out)) => {
                res.rank_of_gold = out.position(item.gold) + 1;
                res.order = out.order;
                res.valid = true;
            }
        }
        res
    };
    if serial {
        items.iter().map(one).collect()
    } else {
        items.par_iter().map(one).collect()
    }
}

fn pct(hits: u64, valid: u64) -> Option<f64> {
    (valid > 0).then(|| 100.0 * hits as f64 / valid as f64)
}

/// Share of valid results with the gold answer in the first `k` places.
pub fn hit_rate_at_k(results: &[QuestionResult], k: usize) -> Result<Option<f64>, EvalError> {
    let max = results
        .iter()
        .filter(|r| r.valid)
        .map(|r| r.order.len())
        .max()
        .unwrap_or(0);
    if k == 0 || (max > 0 && k > max) {
        return Err(EvalError::KOutOfRange { k, max });
    }
    let valid = results.iter().filter(|r| r.valid).count() as u64;
    let hits = results
        .iter()
        .filter(|r| r.valid && r.rank_of_gold <= k)
        .count() as u64;
    Ok(pct(hits, valid))
}

/// Share of valid results whose winner is the gold answer.
pub fn accuracy(results: &[QuestionResult]) -> Option<f64> {
    hit_rate_at_k(results, 1).unwrap_or(None)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunStats {
    pub seed: u64,
    pub valid: u64,
    pub hits: u64,
    pub accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubjectStats {
    pub valid: u64,
    pub hits: u64,
    pub accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuleReport {
    pub rule: RuleId,
    /// Valid questions per run.
    pub valid: u64,
    /// Questions with a valid profile that the rule still failed to decide.
    pub failures: u64,
    pub accuracy: Option<f64>,
    /// Accuracy minus the baseline's, in points.
    pub delta: Option<f64>,
    /// k → percentage with the gold answer in the first k places.
    pub hit_rate: BTreeMap<usize, Option<f64>>,
    pub subjects: BTreeMap<String, SubjectStats>,
    pub runs: Vec<RunStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub seed: u64,
    pub runs: usize,
    pub baseline: Option<RuleId>,
    pub validity: ValidityStats,
    pub rules: Vec<RuleReport>,
}

impl EvalReport {
    pub fn rule(&self, rule: RuleId) -> Option<&RuleReport> {
        self.rules.iter().find(|r| r.rule == rule)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

#[derive(Default)]
struct Tally {
    valid: u64,
    failures: u64,
    /// `at[k - 1]`: results with the gold answer in the first k places.
    at: Vec<u64>,
    subjects: BTreeMap<String, (u64, u64)>,
}

impl Tally {
    fn add(&mut self, results: &[QuestionResult]) -> (u64, u64) {
        let (mut valid, mut hits) = (0, 0);
        for r in results {
            if r.error.is_some() {
                self.failures += 1;
            }
            let s = self.subjects.entry(r.subject.clone()).or_default();
            if !r.valid {
                continue;
            }
            valid += 1;
            s.0 += 1;
            if r.rank_of_gold == 1 {
                hits += 1;
                s.1 += 1;
            }
            if self.at.len() < r.order.len() {
                self.at.resize(r.order.len(), 0);
            }
            for k in r.rank_of_gold..=r.order.len() {
                self.at[k - 1] += 1;
            }
        }
        self.valid += valid;
        (valid, hits)
    }
}

/// Evaluates `rule` over `runs` runs; `prepare` may rewrite each item for
/// a run (quorum subsets, corruption) given that run's seed.
fn rule_report<F>(
    items: &[EvalItem],
    rule: RuleId,
    cfg: &EvalConfig,
    electorate: usize,
    prepare: F,
) -> Result<RuleReport, EvalError>
where
    F: Fn(&EvalItem, u64) -> Result<EvalItem, EvalError> + Sync,
{
    if cfg.runs == 0 {
        return Err(EvalError::NoRuns);
    }
    let mut tally = Tally::default();
    let mut runs = Vec::new();
    let mut first_valid = 0;
    for r in 0..cfg.runs {
        let rc = cfg.rule_config(r);
        let prepared = items
            .par_iter()
            .map(|it| prepare(it, rc.seed))
            .collect::<Result<Vec<_>, _>>()?;
        let results = question_results(&prepared, rule, &rc, electorate, cfg.serial());
        let (valid, hits) = tally.add(&results);
        if r == 0 {
            first_valid = valid;
        }
        runs.push(RunStats {
            seed: rc.seed,
            valid,
            hits,
            accuracy: pct(hits, valid),
        });
    }
    let hits: u64 = runs.iter().map(|r| r.hits).sum();
    Ok(RuleReport {
        rule,
        valid: first_valid,
        failures: tally.failures,
        accuracy: pct(hits, tally.valid),
        delta: None,
        hit_rate: tally
            .at
            .iter()
            .enumerate()
            .map(|(i, &h)| (i + 1, pct(h, tally.valid)))
            .collect(),
        subjects: tally
            .subjects
            .into_iter()
            .filter(|(_, (v, _))| *v > 0)
            .map(|(s, (v, h))| {
                (
                    s,
                    SubjectStats {
                        valid: v,
                        hits: h,
                        accuracy: pct(h, v),
                    },
                )
            })
            .collect(),
        runs,
    })
}

fn unchanged(item: &EvalItem, _: u64) -> Result<EvalItem, EvalError> {
    Ok(item.clone())
}

/// Aggregates every valid question under every configured rule.
pub fn evaluate(
    valid: &ValidSet,
    stats: &ValidityStats,
    cfg: &EvalConfig,
) -> Result<EvalReport, EvalError> {
    let mut rules = cfg
        .rules
        .iter()
        .map(|&rule| rule_report(&valid.items, rule, cfg, valid.expected_n, unchanged))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(base) = cfg.baseline {
        let base_acc = match rules.iter().find(|r| r.rule == base) {
            Some(r) => r.accuracy,
            None => rule_report(&valid.items, base, cfg, valid.expected_n, unchanged)?.accuracy,
        };
        for r in &mut rules {
            r.delta = r.accuracy.zip(base_acc).map(|(a, b)| a - b);
        }
    }
    Ok(EvalReport {
        seed: cfg.seed,
        runs: cfg.runs,
        baseline: cfg.baseline,
        validity: stats.clone(),
        rules,
    })
}

/// One point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub x: usize,
    pub valid: u64,
    pub accuracy: Option<f64>,
    pub runs: Vec<RunStats>,
}

impl CurvePoint {
    fn from_report(x: usize, r: RuleReport) -> Self {
        CurvePoint {
            x,
            valid: r.valid,
            accuracy: r.accuracy,
            runs: r.runs,
        }
    }
}

/// How quorum subsets are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Subset {
    /// The first `s` agents in canonical order.
    #[default]
    Prefix,
    /// `s` agents drawn per question and run.
    Random,
}

fn smallest_ensemble(items: &[EvalItem], rule: RuleId) -> usize {
    items
        .iter()
        .filter_map(|it| match rule {
            RuleId::RangeVoting => it.scored.as_ref().map(|p| p.n()),
            _ => it.ordinal.as_ref().map(|p| p.n()),
        })
        .min()
        .unwrap_or(0)
}

fn random_subset(n: usize, s: usize, run_seed: u64, id: &str) -> Vec<usize> {
    let mut rng = seed::stream(run_seed, id, "quorum", s as u64);
    let mut keep = sample(&mut rng, n, s).into_vec();
    keep.sort_unstable();
    keep
}

fn subset_item(
    item: &EvalItem,
    s: usize,
    mode: Subset,
    run_seed: u64,
) -> Result<EvalItem, EvalError> {
    let mut out = item.clone();
    match mode {
        Subset::Prefix => {
            out.ordinal = item.ordinal.as_ref().map(|p| p.prefix(s)).transpose()?;
            out.scored = item.scored.as_ref().map(|p| p.prefix(s)).transpose()?;
        }
        Subset::Random => {
            if let Some(p) = &item.ordinal {
                let keep = random_subset(p.n(), s, run_seed, &item.id);
                let ballots = keep.iter().map(|&i| p.ballots()[i].clone()).collect();
                out.ordinal = Some(Profile::new(p.alternatives().clone(), ballots)?);
            }
            if let Some(p) = &item.scored {
                let keep = random_subset(p.n(), s, run_seed, &item.id);
                let ballots = keep.iter().map(|&i| p.ballots()[i].clone()).collect();
                out.scored = Some(ScoredProfile::new(
                    p.alternatives().clone(),
                    p.range(),
                    ballots,
                )?);
            }
        }
    }
    Ok(out)
}

/// Accuracy of `rule` on sub-ensembles of each size.
pub fn quorum_sweep(
    valid: &ValidSet,
    rule: RuleId,
    sizes: &[usize],
    mode: Subset,
    cfg: &EvalConfig,
) -> Result<Vec<CurvePoint>, EvalError> {
    let available = smallest_ensemble(&valid.items, rule);
    sizes
        .iter()
        .map(|&s| {
            if s == 0 || s > available {
                return Err(EvalError::SizeExceedsEnsemble { size: s, available });
            }
            let r = rule_report(&valid.items, rule, cfg, s, |it, seed| {
                subset_item(it, s, mode, seed)
            })?;
            Ok(CurvePoint::from_report(s, r))
        })
        .collect()
}

/// Accuracy of `rule` with the first `k` agents replaced by random voters.
pub fn robustness_sweep(
    valid: &ValidSet,
    rule: RuleId,
    k_values: &[usize],
    cfg: &EvalConfig,
) -> Result<Vec<CurvePoint>, EvalError> {
    let available = smallest_ensemble(&valid.items, rule);
    k_values
        .iter()
        .map(|&k| {
            if k > available {
                return Err(EvalError::Synth(SynthError::KOutOfRange {
                    k,
                    n: available,
                }));
            }
            let r = rule_report(&valid.items, rule, cfg, valid.expected_n, |it, seed| {
                let mut out = it.clone();
                out.ordinal = it
                    .ordinal
                    .as_ref()
                    .map(|p| synth::corrupt_profile(p, k, seed, &it.id))
                    .transpose()?;
                out.scored = it
                    .scored
                    .as_ref()
                    .map(|p| synth::corrupt_scored_profile(p, k, seed, &it.id))
                    .transpose()?;
                Ok(out)
            })?;
            Ok(CurvePoint::from_report(k, r))
        })
        .collect()
}
