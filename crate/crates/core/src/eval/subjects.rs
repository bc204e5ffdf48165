use std::fmt::Write as _;

use serde::Serialize;

use super::{EvalError, EvalReport};
use crate::rules::RuleId;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubjectDelta {
    pub subject: String,
    pub valid: u64,
    pub accuracy: Option<f64>,
    pub baseline_accuracy: Option<f64>,
    pub delta: Option<f64>,
}

/// Distribution of per-subject deltas. Quartiles interpolate linearly
/// between order statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let h = p * (v.len() - 1) as f64;
            let lo = h.floor() as usize;
            let hi = h.ceil() as usize;
            v[lo] + (h - lo as f64) * (v[hi] - v[lo])
        };
        Some(Summary {
            min: v[0],
            q1: q(0.25),
            median: q(0.5),
            q3: q(0.75),
            max: v[v.len() - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubjectTable {
    pub rule: RuleId,
    pub baseline: RuleId,
    pub rows: Vec<SubjectDelta>,
    pub summary: Option<Summary>,
}

/// CSV of several tables, one row per (rule, subject).
pub fn subjects_csv(tables: &[SubjectTable]) -> String {
    let mut out = String::from("rule,baseline,subject,valid,accuracy,baseline_accuracy,delta\n");
    for t in tables {
        t.write_rows(&mut out);
    }
    out
}

impl SubjectTable {
    fn write_rows(&self, out: &mut String) {
        let num = |x: Option<f64>| x.map(|v| format!("{v:.4}")).unwrap_or_default();
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                self.rule,
                self.baseline,
                csv_field(&r.subject),
                r.valid,
                num(r.accuracy),
                num(r.baseline_accuracy),
                num(r.delta)
            );
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Per-subject accuracy of `rule` against `baseline`.
pub fn subject_report(
    report: &EvalReport,
    rule: RuleId,
    baseline: RuleId,
) -> Result<SubjectTable, EvalError> {
    let r = report.rule(rule).ok_or(EvalError::RuleNotEvaluated(rule))?;
    let b = report
        .rule(baseline)
        .ok_or(EvalError::RuleNotEvaluated(baseline))?;
    if !r.subjects.keys().eq(b.subjects.keys()) {
        return Err(EvalError::SubjectSetMismatch { rule, baseline });
    }
    let rows: Vec<_> = r
        .subjects
        .iter()
        .zip(b.subjects.values())
        .map(|((subject, s), bs)| SubjectDelta {
            subject: subject.clone(),
            valid: s.valid,
            accuracy: s.accuracy,
            baseline_accuracy: bs.accuracy,
            delta: s.accuracy.zip(bs.accuracy).map(|(a, b)| a - b),
        })
        .collect();
    let deltas: Vec<f64> = rows.iter().filter_map(|r| r.delta).collect();
    Ok(SubjectTable {
        rule,
        baseline,
        summary: Summary::of(&deltas),
        rows,
    })
}
