use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufReader;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;

use votekit::eval::{
    evaluate, filter_valid, question_results, Dataset, EvalConfig, FilterOptions, ValidityStats,
};
use votekit::format::read_records;
use votekit::rules::oracle::EchoPlurality;
use votekit::{RuleConfig, RuleId};

use crate::{fixture, Verdict};

fn votekit(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_votekit"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(String::from_utf8_lossy(&out.stderr).into_owned());
    }
    Ok(out.stdout)
}

fn evaluate_cli(
    data: &Path,
    dir: &Path,
    tag: &str,
    workers: &str,
) -> Result<(Vec<u8>, Vec<u8>), String> {
    let report = dir.join(format!("report-{tag}.json"));
    let csv = dir.join(format!("subjects-{tag}.csv"));
    votekit(&[
        "evaluate",
        data.to_str().unwrap(),
        "--seed",
        "11",
        "--runs",
        "3",
        "--dictator",
        "synthetic:0.5:0.5",
        "--workers",
        workers,
        "--report",
        report.to_str().unwrap(),
        "--subjects",
        csv.to_str().unwrap(),
        "--quorum",
        "1,5,10",
        "--robustness",
        "0,5,10",
    ])?;
    Ok((
        fs::read(report).map_err(|e| e.to_string())?,
        fs::read(csv).map_err(|e| e.to_string())?,
    ))
}

/// Criterion 9.
pub fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.jsonl");
    let result = (|| {
        let synth = votekit(&[
            "synth",
            "--questions",
            "3000",
            "--competence",
            "0.4",
            "--subjects",
            "a,b,c",
            "--scores",
            "--seed",
            "901",
        ])?;
        fs::write(&data, &synth).map_err(|e| e.to_string())?;
        let first = evaluate_cli(&data, dir.path(), "a", "1")?;
        let again = evaluate_cli(&data, dir.path(), "b", "1")?;
        let wide = evaluate_cli(&data, dir.path(), "c", "8")?;
        Ok::<_, String>((first, again, wide))
    })();
    match result {
        Err(e) => Verdict::new(false, format!("command failed: {e}")),
        Ok((first, again, wide)) => {
            let pass = first == again && first == wide && !first.0.is_empty();
            Verdict::new(
                pass,
                format!(
                    "3000 questions, 3 runs, all rules with sweeps: report {} bytes and subject CSV {} bytes {} across reruns and 1 vs 8 workers",
                    first.0.len(),
                    first.1.len(),
                    if pass { "identical" } else { "DIFFER" }
                ),
            )
        }
    }
}

fn counts(pairs: &[(&str, usize)]) -> BTreeMap<String, usize> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

/// Criterion 10.
pub fn validity() -> Verdict {
    let path = fixture("validity.jsonl");
    let set = read_records(BufReader::new(File::open(&path).unwrap()), false).unwrap();
    let ds = Dataset::new(set.records, None, set.errors.len());
    let (valid, stats) = filter_valid(&ds, &FilterOptions::default());
    let hand_counted = ValidityStats {
        questions: 11,
        malformed_lines: 1,
        expected_agents: 3,
        no_gold: 1,
        complete_ordinal: 4,
        complete_scored: 5,
        partial_scored: 0,
        informed_eligible: 4,
        misinformed_eligible: 10,
        ordinal_rejections: counts(&[
            ("duplicate_agent", 1),
            ("duplicate_entry", 1),
            ("extra_agents", 1),
            ("incomplete_ranking", 1),
            ("missing_agents", 1),
            ("unknown_alternative", 1),
        ]),
        scored_rejections: counts(&[
            ("missing_agents", 1),
            ("missing_score", 1),
            ("no_scores", 1),
            ("score_out_of_range", 2),
        ]),
    };
    let mut problems = Vec::new();
    if stats != hand_counted {
        problems.push(format!("stats {stats:?}"));
    }

    let ordinal = ["q01", "q05", "q06", "q10"];
    let scored = ["q01", "q02", "q07", "q10", "q11"];
    let all = [
        "q01", "q02", "q03", "q04", "q05", "q06", "q07", "q09", "q10", "q11",
    ];
    let cfg = EvalConfig {
        seed: 3,
        dictator: Some(Arc::new(EchoPlurality)),
        ..Default::default()
    };
    let report = evaluate(&valid, &stats, &cfg).unwrap();
    for rule in RuleId::ALL {
        let want: &[&str] = match rule {
            RuleId::RangeVoting => &scored,
            RuleId::MisinformedDictatorial => &all,
            _ => &ordinal,
        };
        let rc = RuleConfig {
            seed: 3,
            dictator: cfg.dictator.clone(),
            ..Default::default()
        };
        let got: Vec<String> = question_results(&valid.items, rule, &rc, valid.expected_n, false)
            .into_iter()
            .filter(|r| r.valid)
            .map(|r| r.question_id)
            .collect();
        if got != want {
            problems.push(format!("{rule} admits {got:?}"));
        }
        let denominator = report.rule(rule).map(|r| r.valid);
        if denominator != Some(want.len() as u64) {
            problems.push(format!("{rule} denominator {denominator:?}"));
        }
    }

    let cli = votekit(&[
        "evaluate",
        path.to_str().unwrap(),
        "--seed",
        "3",
        "--dictator",
        "echo",
    ])
    .map_err(|e| e.to_string())
    .and_then(|out| serde_json::from_slice::<serde_json::Value>(&out).map_err(|e| e.to_string()));
    match cli {
        Ok(v) if v["validity"] == serde_json::to_value(&hand_counted).unwrap() => {}
        Ok(v) => problems.push(format!("cli validity {}", v["validity"])),
        Err(e) => problems.push(format!("cli: {e}")),
    }

    Verdict::new(
        problems.is_empty(),
        format!(
            "11 questions + 1 malformed line: 4 ordinal / 5 scored / 10 misinformed admitted, rejections match the hand count{}",
            if problems.is_empty() { String::new() } else { format!("; {}", problems.join("; ")) }
        ),
    )
}
