use std::fmt::Write as _;

use super::{search_counterexample, CriteriaError, Criterion, Witness};
use crate::rules::RuleId;

/// The classical compliance of a rule: `Some(true)` when the rule is known
/// to satisfy the criterion, `Some(false)` when it is known to fail it and
/// `None` for rules outside the reference table.
pub fn expected_compliance(rule: RuleId, criterion: Criterion) -> Option<bool> {
    use Criterion::*;
    let fails: &[Criterion] = match rule {
        RuleId::RangeVoting => &[Majority, Condorcet],
        RuleId::Plurality => &[Iia, Condorcet],
        RuleId::Borda => &[Majority, Iia, Condorcet],
        RuleId::Irv => &[Monotonicity, Consistency, Iia, Condorcet],
        RuleId::RankedPairs => &[Consistency, Iia],
        _ => return None,
    };
    Some(!fails.contains(&criterion))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub rule: RuleId,
    pub criterion: Criterion,
    pub witness: Option<Witness>,
}

/// Search results for every (rule, criterion) pair at fixed bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplianceMatrix {
    pub m: usize,
    pub n_max: usize,
    pub rules: Vec<RuleId>,
    pub criteria: Vec<Criterion>,
    /// Row-major: rule by rule, criteria in `criteria` order.
    pub cells: Vec<Cell>,
}

pub fn compliance_matrix(
    rules: &[RuleId],
    criteria: &[Criterion],
    m: usize,
    n_max: usize,
) -> Result<ComplianceMatrix, CriteriaError> {
    let mut cells = Vec::new();
    for &rule in rules {
        for &criterion in criteria {
            let witness = search_counterexample(rule, criterion, m, n_max)?;
            cells.push(Cell {
                rule,
                criterion,
                witness,
            });
        }
    }
    Ok(ComplianceMatrix {
        m,
        n_max,
        rules: rules.to_vec(),
        criteria: criteria.to_vec(),
        cells,
    })
}

impl ComplianceMatrix {
    pub fn cell(&self, rule: RuleId, criterion: Criterion) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.rule == rule && c.criterion == criterion)
    }

    /// Cells whose outcome disagrees with [`expected_compliance`].
    pub fn mismatches(&self) -> Vec<&Cell> {
        self.cells
            .iter()
            .filter(|c| {
                expected_compliance(c.rule, c.criterion).is_some_and(|ok| ok == c.witness.is_some())
            })
            .collect()
    }

    /// Text table: `x n=K` where a witness with K agents was found, `ok`
    /// where none exists within bounds. A trailing `!` marks a cell that
    /// disagrees with the reference table.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# m={} n_max={}", self.m, self.n_max);
        let _ = write!(out, "{:<14}", "rule");
        for c in &self.criteria {
            let _ = write!(out, "{:>14}", c.name());
        }
        out.push('\n');
        for &rule in &self.rules {
            let _ = write!(out, "{:<14}", rule.name());
            for &criterion in &self.criteria {
                let cell = self.cell(rule, criterion).expect("full matrix");
                let mut text = match &cell.witness {
                    Some(w) => format!("x n={}", w.size()),
                    None => "ok".to_string(),
                };
                if expected_compliance(rule, criterion)
                    .is_some_and(|ok| ok == cell.witness.is_some())
                {
                    text.push('!');
                }
                let _ = write!(out, "{text:>14}");
            }
            out.push('\n');
        }
        out
    }
}
