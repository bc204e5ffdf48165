use std::collections::BTreeSet;
use std::fmt::Display;
use std::fs;
use std::io::Write;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde_json::{json, Value};
use votekit::criteria::{compliance_matrix, CriteriaError, Criterion};
use votekit::eval::{self, Dataset, EvalConfig, FilterOptions, Subset};
use votekit::format::{
    header_line, witness_records, ConsultationRecord, ProfileRecord, RankingRecord,
};
use votekit::rules::{fabricate_consultation, DictatorOracle};
use votekit::synth::{make_questions, ElectorateSpec};
use votekit::{run_rule, RuleConfig, RuleId, RuleInput, ScoreRange};

use crate::io::{self, read_input, require_seed, sink, usage};
use crate::{AggregateArgs, CheckArgs, EvaluateArgs, ExportArgs, Mode, SubsetArg, SynthArgs};

fn range_json(r: ScoreRange) -> Value {
    json!([r.min, r.max])
}

/// Electorate of a record: `agents` when given, else its distinct agents.
fn electorate(r: &ProfileRecord, agents: Option<usize>) -> usize {
    agents.unwrap_or_else(|| {
        r.ballots
            .iter()
            .map(|b| &b.agent)
            .collect::<BTreeSet<_>>()
            .len()
    })
}

fn aggregate_one(
    r: &ProfileRecord,
    rule: RuleId,
    cfg: &RuleConfig,
    agents: Option<usize>,
) -> RankingRecord {
    let fail = |e: &dyn Display| RankingRecord::failed(&r.id, rule, e);
    let alternatives = match r.alternatives() {
        Ok(a) => a,
        Err(e) => return fail(&e),
    };
    let mut cfg = cfg.clone();
    if let Some([min, max]) = r.witness.as_ref().and_then(|w| w.range) {
        match ScoreRange::new(min, max) {
            Ok(range) => cfg.range = range,
            Err(e) => return fail(&e),
        }
    }
    let mut ordinal = None;
    let mut scored = None;
    if rule.needs_scores() {
        if r.scores.is_none() {
            return fail(&"missing field `scores`");
        }
        match r.scored_profile(cfg.range, agents) {
            Ok(p) => scored = Some(p),
            Err(e) => return fail(&e),
        }
    } else if rule != RuleId::MisinformedDictatorial {
        match r.ordinal_profile(agents) {
            Ok(p) => ordinal = Some(p),
            Err(e) => return fail(&e),
        }
    }
    let input = RuleInput {
        question_id: &r.id,
        alternatives: &alternatives,
        electorate: electorate(r, agents),
        ordinal: ordinal.as_ref(),
        scored: scored.as_ref(),
        gold: r.gold_index(),
    };
    match run_rule(rule, &input, &cfg) {
        Ok(out) => RankingRecord::new(&r.id, &out, &alternatives),
        Err(e) => fail(&e),
    }
}

fn dictator_for(
    spec: Option<&str>,
    needed: bool,
    what: &str,
) -> Result<Option<std::sync::Arc<dyn DictatorOracle>>> {
    match spec {
        Some(s) => Ok(Some(io::dictator(s)?)),
        None if needed => Err(usage(format!("{what} needs --dictator"))),
        None => Ok(None),
    }
}

pub fn aggregate(a: AggregateArgs) -> Result<()> {
    let seed = if a.rule.is_deterministic() {
        a.seed.unwrap_or(0)
    } else {
        require_seed(a.seed, &format!("for {}", a.rule))?
    };
    let dictator = dictator_for(
        a.dictator.as_deref(),
        a.rule.needs_dictator(),
        a.rule.name(),
    )?;
    let set = read_input(&a.input)?;
    if a.rule.needs_scores()
        && !set.records.is_empty()
        && set.records.iter().all(|r| r.scores.is_none())
    {
        bail!(
            "{}: no record has the `scores` field {} needs",
            a.input.input.display(),
            a.rule
        );
    }
    let serial = dictator.as_ref().is_some_and(|d| d.serial_only());
    let cfg = RuleConfig {
        seed,
        range: a.input.range,
        dictator,
    };
    let one = |r: &ProfileRecord| aggregate_one(r, a.rule, &cfg, a.input.agents);
    let out: Vec<RankingRecord> = if serial {
        set.records.iter().map(one).collect()
    } else {
        set.records.par_iter().map(one).collect()
    };
    let mut w = sink(a.output.as_ref())?;
    let header = json!({
        "rule": a.rule,
        "seed": seed,
        "range": range_json(a.input.range),
        "dictator": cfg.dictator.as_ref().map(|d| d.name()),
        "malformed_lines": set.errors.len(),
    });
    writeln!(w, "{}", header_line("votekit aggregate", header))?;
    for r in &out {
        writeln!(w, "{}", serde_json::to_string(r)?)?;
    }
    w.flush()?;
    Ok(())
}

pub fn evaluate(a: EvaluateArgs) -> Result<()> {
    if let Some(n) = a.workers {
        if n == 0 {
            return Err(usage("--workers must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    if a.runs == 0 {
        return Err(usage("--runs must be positive"));
    }
    let dictator = a.dictator.as_deref().map(io::dictator).transpose()?;
    let mut rules = if a.rules.is_empty() {
        RuleId::ALL
            .into_iter()
            .filter(|r| dictator.is_some() || !r.needs_dictator())
            .collect()
    } else {
        a.rules.clone()
    };
    if !rules.contains(&a.baseline) {
        rules.push(a.baseline);
    }
    if dictator.is_none() {
        if let Some(r) = rules.iter().find(|r| r.needs_dictator()) {
            return Err(usage(format!("{r} needs --dictator")));
        }
    }
    let stochastic = rules.iter().any(|r| !r.is_deterministic())
        || !a.robustness.is_empty()
        || (!a.quorum.is_empty() && a.subset == SubsetArg::Random);
    let seed = if stochastic {
        require_seed(a.seed, "for stochastic rules and sweeps")?
    } else {
        a.seed.unwrap_or(0)
    };

    let set = read_input(&a.input)?;
    let ds = Dataset::new(set.records, a.input.agents, set.errors.len());
    let opts = FilterOptions {
        range: a.input.range,
        partial_scores: a.partial_scores,
    };
    let (valid, stats) = eval::filter_valid(&ds, &opts);
    let cfg = EvalConfig {
        rules: rules.clone(),
        seed,
        runs: a.runs,
        range: a.input.range,
        dictator: dictator.clone(),
        baseline: Some(a.baseline),
    };
    let report = eval::evaluate(&valid, &stats, &cfg)?;

    let mut tables = Vec::new();
    for &rule in &rules {
        match eval::subject_report(&report, rule, a.baseline) {
            Ok(t) => tables.push(t),
            Err(e) => eprintln!("subjects: skipping {rule}: {e}"),
        }
    }
    let mut value = serde_json::to_value(&report)?;
    let obj = value.as_object_mut().expect("report is an object");
    obj.insert("command".into(), json!("votekit evaluate"));
    obj.insert("range".into(), range_json(a.input.range));
    obj.insert(
        "dictator".into(),
        json!(dictator.as_ref().map(|d| d.name())),
    );
    obj.insert(
        "subject_deltas".into(),
        Value::Object(
            tables
                .iter()
                .map(|t| (t.rule.to_string(), json!(t.summary)))
                .collect(),
        ),
    );
    if !a.quorum.is_empty() {
        let mode = match a.subset {
            SubsetArg::Prefix => Subset::Prefix,
            SubsetArg::Random => Subset::Random,
        };
        let points = eval::quorum_sweep(&valid, a.sweep_rule, &a.quorum, mode, &cfg)?;
        obj.insert(
            "quorum".into(),
            json!({"rule": a.sweep_rule, "subset": format!("{:?}", a.subset).to_lowercase(), "points": points}),
        );
    }
    if !a.robustness.is_empty() {
        let points = eval::robustness_sweep(&valid, a.sweep_rule, &a.robustness, &cfg)?;
        obj.insert(
            "robustness".into(),
            json!({"rule": a.sweep_rule, "points": points}),
        );
    }

    let mut w = sink(a.report.as_ref())?;
    writeln!(w, "{}", serde_json::to_string_pretty(&value)?)?;
    w.flush()?;
    if let Some(path) = &a.subjects {
        fs::write(path, eval::subjects_csv(&tables))
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

pub fn synth(a: SynthArgs) -> Result<()> {
    let spec = ElectorateSpec {
        n_agents: a.agents,
        m: a.choices,
        competence: a.competence,
        noise: a.noise,
        seed: a.seed,
        subject_competence: a.subject_competence.into_iter().collect(),
    };
    spec.validate().map_err(|e| usage(e.to_string()))?;
    let questions = make_questions(a.questions, a.choices, &a.subjects, a.seed)
        .map_err(|e| usage(e.to_string()))?;
    let scores = a.scores.then_some(a.range);
    let ds = Dataset::synthetic(&questions, &spec, scores)?;
    let mut w = sink(a.output.as_ref())?;
    let header = json!({
        "seed": a.seed,
        "questions": a.questions,
        "subjects": a.subjects,
        "spec": spec,
        "scores": scores.map(range_json),
    });
    writeln!(w, "{}", header_line("votekit synth", header))?;
    for r in &ds.records {
        writeln!(w, "{}", r.to_line())?;
    }
    w.flush()?;
    Ok(())
}

pub fn check(a: CheckArgs) -> Result<()> {
    let rules = if a.rules.is_empty() {
        RuleId::DETERMINISTIC.to_vec()
    } else {
        a.rules
    };
    let criteria = if a.criteria.is_empty() {
        Criterion::ALL.to_vec()
    } else {
        a.criteria
    };
    let matrix = compliance_matrix(&rules, &criteria, a.m, a.n_max).map_err(|e| match e {
        CriteriaError::Profile(_) => anyhow::Error::new(e),
        _ => usage(e.to_string()),
    })?;
    print!("{}", matrix.render());
    for c in matrix.mismatches() {
        eprintln!(
            "{} / {}: differs from the reference table",
            c.rule, c.criterion
        );
    }
    if let Some(dir) = &a.witness_dir {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        for cell in &matrix.cells {
            let Some(witness) = &cell.witness else {
                continue;
            };
            let path = dir.join(format!("{}-{}.jsonl", cell.rule, cell.criterion));
            let mut text = header_line(
                "votekit check",
                json!({"rule": cell.rule, "criterion": cell.criterion, "m": a.m, "n_max": a.n_max}),
            );
            text.push('\n');
            for r in witness_records(witness) {
                text.push_str(&r.to_line());
                text.push('\n');
            }
            fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        }
    }
    Ok(())
}

pub fn export_consultation(a: ExportArgs) -> Result<()> {
    let seed = match a.mode {
        Mode::Misinformed => Some(require_seed(a.seed, "for misinformed consultations")?),
        Mode::Informed => a.seed,
    };
    let set = read_input(&a.input)?;
    let mut w = sink(a.output.as_ref())?;
    let mode = format!("{:?}", a.mode).to_lowercase();
    writeln!(
        w,
        "{}",
        header_line(
            "votekit export-consultation",
            json!({"mode": mode, "seed": seed})
        )
    )?;
    for r in &set.records {
        let record = match (a.mode, r.alternatives()) {
            (_, Err(e)) => Err(e),
            (Mode::Informed, Ok(_)) => r
                .ordinal_profile(a.input.agents)
                .map(|p| ConsultationRecord::new(&r.id, &mode, &p)),
            (Mode::Misinformed, Ok(alts)) => {
                let n = electorate(r, a.input.agents);
                let fake = fabricate_consultation(&alts, n, seed.unwrap_or_default(), &r.id);
                Ok(ConsultationRecord::new(&r.id, &mode, &fake))
            }
        };
        match record {
            Ok(c) => writeln!(w, "{}", serde_json::to_string(&c)?)?,
            Err(e) => eprintln!("{}: skipped: {e}", r.id),
        }
    }
    w.flush()?;
    Ok(())
}
