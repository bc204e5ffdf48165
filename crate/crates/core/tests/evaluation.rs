use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use votekit::eval::{
    evaluate, filter_valid, quorum_sweep, subject_report, Dataset, EvalConfig, EvalReport,
    FilterOptions, RuleReport, SubjectStats, Subset, ValidityStats,
};
use votekit::rules::oracle::CompetenceOracle;
use votekit::synth::{make_questions, ElectorateSpec};
use votekit::{RuleId, ScoreRange};

fn dataset(count: usize, m: usize, spec: &ElectorateSpec, subjects: &[&str]) -> Dataset {
    let subjects: Vec<String> = subjects.iter().map(|s| s.to_string()).collect();
    let qs = make_questions(count, m, &subjects, spec.seed).unwrap();
    Dataset::synthetic(&qs, spec, Some(ScoreRange::default())).unwrap()
}

fn config(runs: usize) -> EvalConfig {
    EvalConfig {
        seed: 99,
        runs,
        dictator: Some(Arc::new(CompetenceOracle {
            competence: 0.5,
            deference: 0.5,
        })),
        ..Default::default()
    }
}

fn report(ds: &Dataset, cfg: &EvalConfig) -> EvalReport {
    let (valid, stats) = filter_valid(ds, &FilterOptions::default());
    evaluate(&valid, &stats, cfg).unwrap()
}

#[test]
fn question_order_does_not_matter() {
    let spec = ElectorateSpec::new(7, 4, 0.45, 12);
    let ds = dataset(300, 4, &spec, &["a", "b", "c"]);
    let mut shuffled = ds.clone();
    shuffled.records.shuffle(&mut ChaCha8Rng::seed_from_u64(3));
    let cfg = config(3);
    assert_eq!(
        report(&ds, &cfg).to_json(),
        report(&shuffled, &cfg).to_json()
    );
}

#[test]
fn hit_rate_identities() {
    let spec = ElectorateSpec::new(5, 5, 0.3, 4);
    let r = report(&dataset(400, 5, &spec, &[]), &config(2));
    for rule in &r.rules {
        assert_eq!(rule.hit_rate[&1], rule.accuracy, "{}", rule.rule);
        assert_eq!(rule.hit_rate[&5], Some(100.0), "{}", rule.rule);
        let rates: Vec<f64> = rule.hit_rate.values().map(|v| v.unwrap()).collect();
        assert!(rates.windows(2).all(|w| w[0] <= w[1]), "{}", rule.rule);
    }
}

#[test]
fn deterministic_rules_average_to_their_single_run() {
    let spec = ElectorateSpec::new(9, 4, 0.35, 8);
    let ds = dataset(250, 4, &spec, &[]);
    let one = report(&ds, &config(1));
    let five = report(&ds, &config(5));
    for rule in RuleId::DETERMINISTIC {
        assert_eq!(
            one.rule(rule).unwrap().accuracy,
            five.rule(rule).unwrap().accuracy,
            "{rule}"
        );
    }
}

#[test]
fn full_quorum_matches_evaluate() {
    let spec = ElectorateSpec::new(10, 4, 0.4, 21);
    let ds = dataset(300, 4, &spec, &["x", "y"]);
    let (valid, stats) = filter_valid(&ds, &FilterOptions::default());
    let cfg = config(3);
    let full = evaluate(&valid, &stats, &cfg).unwrap();
    for rule in [
        RuleId::Plurality,
        RuleId::RangeVoting,
        RuleId::BlindDictatorial,
        RuleId::MisinformedDictatorial,
    ] {
        let points = quorum_sweep(&valid, rule, &[10], Subset::Prefix, &cfg).unwrap();
        let r = full.rule(rule).unwrap();
        assert_eq!(
            serde_json::to_string(&points[0].runs).unwrap(),
            serde_json::to_string(&r.runs).unwrap(),
            "{rule}"
        );
        assert_eq!(points[0].accuracy, r.accuracy);
    }
}

fn subject_row(valid: u64, hits: u64) -> SubjectStats {
    SubjectStats {
        valid,
        hits,
        accuracy: Some(100.0 * hits as f64 / valid as f64),
    }
}

fn rule_report(rule: RuleId, subjects: BTreeMap<String, SubjectStats>) -> RuleReport {
    RuleReport {
        rule,
        valid: 0,
        failures: 0,
        accuracy: None,
        delta: None,
        hit_rate: BTreeMap::new(),
        subjects,
        runs: vec![],
    }
}

#[test]
fn one_question_is_one_point() {
    let rows = |hits| BTreeMap::from([("law".to_string(), subject_row(100, hits))]);
    let r = EvalReport {
        seed: 0,
        runs: 1,
        baseline: None,
        validity: ValidityStats::default(),
        rules: vec![
            rule_report(RuleId::Borda, rows(61)),
            rule_report(RuleId::Plurality, rows(60)),
        ],
    };
    let t = subject_report(&r, RuleId::Borda, RuleId::Plurality).unwrap();
    assert_eq!(t.rows[0].delta, Some(1.0));
    let t = subject_report(&r, RuleId::Plurality, RuleId::Borda).unwrap();
    assert_eq!(t.rows[0].delta, Some(-1.0));
    let t = subject_report(&r, RuleId::Borda, RuleId::Borda).unwrap();
    assert_eq!(t.rows[0].delta, Some(0.0));
    assert!(subject_report(&r, RuleId::Irv, RuleId::Borda).is_err());
}

#[test]
fn subject_competence_spreads_deltas() {
    let mut spec = ElectorateSpec::new(10, 4, 0.4, 5);
    spec.subject_competence = [("easy", 0.7), ("mid", 0.4), ("hard", 0.1)]
        .iter()
        .map(|&(s, p)| (s.to_string(), p))
        .collect();
    let r = report(
        &dataset(1500, 4, &spec, &["easy", "mid", "hard"]),
        &config(1),
    );
    let t = subject_report(&r, RuleId::Plurality, RuleId::BlindDictatorial).unwrap();
    assert_eq!(t.rows.len(), 3);
    let s = t.summary.unwrap();
    assert!(s.max - s.min > 5.0, "{s:?}");
    let same = subject_report(&r, RuleId::Borda, RuleId::Borda).unwrap();
    assert!(same.rows.iter().all(|row| row.delta == Some(0.0)));
}
