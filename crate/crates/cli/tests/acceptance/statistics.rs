use std::sync::Arc;

use votekit::eval::{
    evaluate, filter_valid, quorum_sweep, robustness_sweep, Dataset, EvalConfig, EvalReport,
    FilterOptions, Subset, ValidSet,
};
use votekit::rules::oracle::CompetenceOracle;
use votekit::synth::{make_questions, ElectorateSpec};
use votekit::{RuleId, ScoreRange};

use crate::Verdict;

/// An evaluation kept for the identity checks.
pub struct Run {
    pub label: String,
    pub m: usize,
    pub valid: ValidSet,
    pub cfg: EvalConfig,
    pub report: EvalReport,
}

#[derive(Default)]
pub struct Shared {
    pub runs: Vec<Run>,
    jury: Option<usize>,
}

fn electorate(label: &str, questions: usize, m: usize, p: f64, seed: u64) -> Run {
    let spec = ElectorateSpec::new(10, m, p, seed);
    let qs = make_questions(questions, m, &[], seed).unwrap();
    let ds = Dataset::synthetic(&qs, &spec, Some(ScoreRange::default())).unwrap();
    let (valid, stats) = filter_valid(&ds, &FilterOptions::default());
    let cfg = EvalConfig {
        seed: seed ^ 0xE7A1,
        runs: 1,
        dictator: Some(Arc::new(CompetenceOracle {
            competence: p,
            deference: 0.5,
        })),
        ..Default::default()
    };
    let report = evaluate(&valid, &stats, &cfg).unwrap();
    Run {
        label: label.into(),
        m,
        valid,
        cfg,
        report,
    }
}

fn accuracies(r: &EvalReport) -> Vec<(RuleId, f64)> {
    r.rules
        .iter()
        .map(|x| (x.rule, x.accuracy.unwrap_or(f64::NAN)))
        .collect()
}

fn within(values: &[(RuleId, f64)], centre: f64, tol: f64) -> (bool, String) {
    let ok = values.iter().all(|&(_, a)| (a - centre).abs() <= tol);
    let worst = values
        .iter()
        .max_by(|a, b| (a.1 - centre).abs().total_cmp(&(b.1 - centre).abs()))
        .map(|(r, a)| format!("{r} {a:.2}%"))
        .unwrap_or_default();
    let lo = values.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    let hi = values.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
    (
        ok,
        format!(
            "{} rules in [{lo:.2}, {hi:.2}] (target {centre}±{tol}, farthest {worst})",
            values.len()
        ),
    )
}

/// Criterion 5.
pub fn random_baseline(shared: &mut Shared) -> Verdict {
    let four = electorate("random m=4", 5000, 4, 0.0, 501);
    let ten = electorate("random m=10", 5000, 10, 0.0, 502);
    let (ok4, d4) = within(&accuracies(&four.report), 25.0, 2.0);
    let (ok10, d10) = within(&accuracies(&ten.report), 10.0, 1.5);
    shared.runs.push(four);
    shared.runs.push(ten);
    Verdict::new(ok4 && ok10, format!("m=4: {d4}; m=10: {d10}"))
}

fn jury(shared: &mut Shared) -> &Run {
    if shared.jury.is_none() {
        shared
            .runs
            .push(electorate("p=0.4 m=4", 10_000, 4, 0.4, 601));
        shared.jury = Some(shared.runs.len() - 1);
    }
    &shared.runs[shared.jury.unwrap()]
}

/// Criterion 6.
pub fn jury_and_quorum(shared: &mut Shared) -> Verdict {
    let run = jury(shared);
    let sizes: Vec<usize> = (1..=10).collect();
    let curve = quorum_sweep(
        &run.valid,
        RuleId::Plurality,
        &sizes,
        Subset::Prefix,
        &run.cfg,
    )
    .unwrap();
    let acc: Vec<f64> = curve.iter().map(|c| c.accuracy.unwrap()).collect();
    let single = acc[0];
    let plurality = run
        .report
        .rule(RuleId::Plurality)
        .unwrap()
        .accuracy
        .unwrap();
    let blind = run
        .report
        .rule(RuleId::BlindDictatorial)
        .unwrap()
        .accuracy
        .unwrap();
    let pass = (single - 55.0).abs() <= 1.5 && plurality >= single + 10.0 && acc[2] > acc[0];
    let shape = acc
        .iter()
        .map(|a| format!("{a:.1}"))
        .collect::<Vec<_>>()
        .join(" ");
    Verdict::new(
        pass,
        format!(
            "single agent {single:.2}% (55±1.5; blind dictator {blind:.2}%), 10-agent plurality {plurality:.2}% (+{:.2}, need +10), quorum s=1..10: {shape}",
            plurality - single
        ),
    )
}

/// Criterion 7.
pub fn robustness(shared: &mut Shared) -> Verdict {
    let run = jury(shared);
    let ks: Vec<usize> = (0..=10).collect();
    let curve = robustness_sweep(&run.valid, RuleId::Plurality, &ks, &run.cfg).unwrap();
    let acc: Vec<f64> = curve.iter().map(|c| c.accuracy.unwrap()).collect();
    let base = run
        .report
        .rule(RuleId::Plurality)
        .unwrap()
        .accuracy
        .unwrap();
    let worst_rise = acc
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    let pass = worst_rise <= 1.0 && acc[0] == base && (acc[10] - 25.0).abs() <= 2.0;
    let shape = acc
        .iter()
        .map(|a| format!("{a:.1}"))
        .collect::<Vec<_>>()
        .join(" ");
    Verdict::new(
        pass,
        format!(
            "plurality k=0..10: {shape}; largest rise {worst_rise:.2} (max 1), k=0 {} baseline {base:.2}, k=10 {:.2}% (25±2)",
            if acc[0] == base { "equals" } else { "differs from" },
            acc[10]
        ),
    )
}

/// Criterion 8.
pub fn metric_identities(shared: &mut Shared) -> Verdict {
    jury(shared);
    let mut problems = Vec::new();
    let mut checked = 0;
    for run in &shared.runs {
        for r in &run.report.rules {
            checked += 1;
            if r.hit_rate.get(&1) != Some(&r.accuracy) {
                problems.push(format!("{} {}: hit@1 != accuracy", run.label, r.rule));
            }
            if r.hit_rate.get(&run.m) != Some(&Some(100.0)) {
                problems.push(format!("{} {}: hit@{} != 100", run.label, r.rule, run.m));
            }
            let full = quorum_sweep(
                &run.valid,
                r.rule,
                &[run.valid.expected_n],
                Subset::Prefix,
                &run.cfg,
            )
            .unwrap();
            let same = serde_json::to_string(&full[0].runs).unwrap()
                == serde_json::to_string(&r.runs).unwrap()
                && full[0].accuracy == r.accuracy
                && full[0].valid == r.valid;
            if !same {
                problems.push(format!(
                    "{} {}: full quorum differs from evaluate",
                    run.label, r.rule
                ));
            }
        }
    }
    let labels = shared
        .runs
        .iter()
        .map(|r| r.label.as_str())
        .collect::<Vec<_>>()
        .join(", ");
    Verdict::new(
        problems.is_empty() && checked > 0,
        format!(
            "{checked} rule evaluations ({labels}): hit@1 = accuracy, hit@m = 100%, full quorum byte-identical{}",
            if problems.is_empty() { String::new() } else { format!("; {}", problems.join("; ")) }
        ),
    )
}
