//! JSON-lines records.
//!
//! A profile file holds one question per line:
//!
//! ```json
//! {"id": "q1", "subject": "physics", "choices": ["A", "B", "C"], "gold": "B",
//!  "ballots": [{"agent": "a01", "ranking": ["B", "A", "C"]}],
//!  "scores": [{"agent": "a01", "scores": {"A": 3, "B": 9, "C": 0}}]}
//! ```
//!
//! `subject`, `gold` and `scores` are optional. Lines holding an object with
//! a `comment` key and no `id` are headers and carry provenance only. Blank
//! lines are ignored. Ballot contents are not checked here: a profile with
//! a bad ballot is still a well-formed record, and is filtered later.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::BufRead;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;
use thiserror::Error;

use crate::criteria::{Criterion, Election, Witness};
use crate::profile::{
    build_profile, build_scored_profile, validate_ballot, validate_scores, Alt, AlternativeSet,
    Profile, ProfileError, ScoreRange, ScoredBallot, ScoredProfile,
};
use crate::rules::{CollectiveRanking, RuleId, Scores};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawBallot {
    pub agent: String,
    pub ranking: Vec<String>,
}

/// Label → score pairs in file order. Repeated labels are kept so that
/// validation can reject them.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ScoreEntries(pub Vec<(String, i64)>);

impl Serialize for ScoreEntries {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for ScoreEntries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct EntriesVisitor;

        impl<'de> Visitor<'de> for EntriesVisitor {
            type Value = ScoreEntries;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an object mapping choice labels to integer scores")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<ScoreEntries, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = map.next_entry::<String, i64>()? {
                    out.push((k, v));
                }
                Ok(ScoreEntries(out))
            }
        }

        d.deserialize_map(EntriesVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawScores {
    pub agent: String,
    pub scores: ScoreEntries,
}

/// Marks a record as half of a criterion witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessNote {
    pub criterion: Criterion,
    pub rule: RuleId,
    /// `base` or `perturbed`.
    pub role: String,
    pub explanation: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<[i64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub id: String,
    #[serde(default)]
    pub subject: String,
    pub choices: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold: Option<String>,
    pub ballots: Vec<RawBallot>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scores: Option<Vec<RawScores>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessNote>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct LineError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Line(#[from] LineError),
    #[error("read failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("witness file: {0}")]
    Witness(String),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

impl ProfileRecord {
    /// Record-level checks: non-empty id, at least two distinct choices,
    /// gold among the choices.
    pub fn check(&self) -> Result<(), String> {
        if self.id.is_empty() {
            return Err("empty `id`".into());
        }
        let alts = AlternativeSet::new(self.choices.iter().cloned())
            .map_err(|e| format!("`choices`: {e}"))?;
        if let Some(g) = &self.gold {
            if alts.index_of(g).is_none() {
                return Err(format!("`gold` {g:?} is not among the choices"));
            }
        }
        Ok(())
    }

    pub fn alternatives(&self) -> Result<AlternativeSet, ProfileError> {
        AlternativeSet::new(self.choices.iter().cloned())
    }

    pub fn gold_index(&self) -> Option<Alt> {
        let g = self.gold.as_ref()?;
        self.choices.iter().position(|c| c == g)
    }

    /// Validates every ballot, then the electorate. `expected_n = None`
    /// accepts whatever number of distinct agents is present.
    pub fn ordinal_profile(&self, expected_n: Option<usize>) -> Result<Profile, ProfileError> {
        let alts = self.alternatives()?;
        let ballots = self
            .ballots
            .iter()
            .map(|b| validate_ballot(b.agent.clone(), &b.ranking, &alts))
            .collect::<Result<Vec<_>, _>>()?;
        let n = expected_n.unwrap_or(ballots.len());
        build_profile(alts, ballots, n)
    }

    /// Individually validated scored ballots, or the first failure.
    pub fn scored_ballots(
        &self,
        range: ScoreRange,
    ) -> Option<Vec<Result<ScoredBallot, ProfileError>>> {
        let alts = self.alternatives().ok()?;
        let raw = self.scores.as_ref()?;
        Some(
            raw.iter()
                .map(|s| {
                    validate_scores(
                        s.agent.clone(),
                        s.scores.0.iter().map(|(k, v)| (k.as_str(), *v)),
                        &alts,
                        range,
                    )
                })
                .collect(),
        )
    }

    pub fn scored_profile(
        &self,
        range: ScoreRange,
        expected_n: Option<usize>,
    ) -> Result<ScoredProfile, ProfileError> {
        let alts = self.alternatives()?;
        let ballots = self
            .scored_ballots(range)
            .ok_or(ProfileError::EmptyProfile)?
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?;
        build_scored_profile(alts, range, ballots, expected_n)
    }

    pub fn from_profile(
        id: impl Into<String>,
        subject: impl Into<String>,
        p: &Profile,
        gold: Option<Alt>,
    ) -> Self {
        let alts = p.alternatives();
        ProfileRecord {
            id: id.into(),
            subject: subject.into(),
            choices: alts.labels().to_vec(),
            gold: gold.map(|g| alts.label(g).to_string()),
            ballots: p
                .ballots()
                .iter()
                .map(|b| RawBallot {
                    agent: b.agent.clone(),
                    ranking: alts.labels_of(&b.ranking),
                })
                .collect(),
            scores: None,
            witness: None,
        }
    }

    pub fn with_scores(mut self, sp: &ScoredProfile) -> Self {
        let alts = sp.alternatives();
        self.scores = Some(
            sp.ballots()
                .iter()
                .map(|b| RawScores {
                    agent: b.agent.clone(),
                    scores: ScoreEntries(
                        b.scores
                            .iter()
                            .enumerate()
                            .map(|(a, &s)| (alts.label(a).to_string(), s))
                            .collect(),
                    ),
                })
                .collect(),
        );
        self
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("records always serialize")
    }
}

/// Parses one line. `Ok(None)` for blank and header lines.
pub fn parse_record_line(line: &str) -> Result<Option<ProfileRecord>, String> {
    if line.trim().is_empty() {
        return Ok(None);
    }
    let value: Value = serde_json::from_str(line).map_err(|e| format!("invalid JSON: {e}"))?;
    let Value::Object(obj) = &value else {
        return Err("expected a JSON object".into());
    };
    if obj.contains_key("comment") && !obj.contains_key("id") {
        return Ok(None);
    }
    // Parsed again from text: going through `Value` would merge repeated
    // score labels.
    let record: ProfileRecord = serde_json::from_str(line).map_err(|e| e.to_string())?;
    record.check()?;
    Ok(Some(record))
}

/// Records of a file, with the line number of each.
#[derive(Debug, Clone, Default)]
pub struct RecordSet {
    pub records: Vec<ProfileRecord>,
    pub lines: Vec<usize>,
    /// Lines that were skipped, in file order.
    pub errors: Vec<LineError>,
    /// Header objects, in file order.
    pub headers: Vec<Value>,
}

/// Reads a profile file. With `strict` the first malformed line is an
/// error; otherwise it is skipped and listed in [`RecordSet::errors`].
pub fn read_records<R: BufRead>(reader: R, strict: bool) -> Result<RecordSet, FormatError> {
    let mut out = RecordSet::default();
    let mut seen = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let number = i + 1;
        let parsed = parse_record_line(&line).and_then(|r| match r {
            Some(r) if !seen.insert(r.id.clone()) => {
                Err(format!("duplicate question id `{}`", r.id))
            }
            other => Ok(other),
        });
        match parsed {
            Ok(Some(r)) => {
                out.records.push(r);
                out.lines.push(number);
            }
            Ok(None) => {
                if let Ok(v @ Value::Object(_)) = serde_json::from_str::<Value>(&line) {
                    out.headers.push(v);
                }
            }
            Err(message) => {
                let e = LineError {
                    line: number,
                    message,
                };
                if strict {
                    return Err(e.into());
                }
                out.errors.push(e);
            }
        }
    }
    Ok(out)
}

/// A header line: `{"comment": text, ...fields}`.
pub fn header_line(comment: &str, fields: Value) -> String {
    let mut obj = serde_json::Map::new();
    obj.insert("comment".into(), Value::String(comment.into()));
    if let Value::Object(extra) = fields {
        obj.extend(extra);
    }
    Value::Object(obj).to_string()
}

/// One aggregation result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingRecord {
    pub id: String,
    pub rule: RuleId,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub order: Vec<String>,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub scores: Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ties: Vec<usize>,
    /// Set when the question could not be decided under this rule.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RankingRecord {
    pub fn new(id: impl Into<String>, out: &CollectiveRanking, alts: &AlternativeSet) -> Self {
        let by_label = |f: &dyn Fn(usize) -> Value, len: usize| {
            Value::Object(
                (0..len)
                    .map(|a| (alts.label(a).to_string(), f(a)))
                    .collect(),
            )
        };
        let scores = match &out.scores {
            Scores::None => Value::Null,
            Scores::Totals(v) => by_label(&|a| Value::from(v[a]), v.len()),
            Scores::EliminationRound(v) => by_label(&|a| Value::from(v[a]), v.len()),
            Scores::Bucklin(v) => by_label(
                &|a| serde_json::json!({"round": v[a].0, "count": v[a].1}),
                v.len(),
            ),
            Scores::Dictator(who) => serde_json::json!({ "dictator": who }),
        };
        RankingRecord {
            id: id.into(),
            rule: out.rule,
            order: alts.labels_of(&out.order),
            scores,
            ties: out.ties.clone(),
            error: None,
        }
    }

    pub fn failed(id: impl Into<String>, rule: RuleId, error: impl fmt::Display) -> Self {
        RankingRecord {
            id: id.into(),
            rule,
            order: Vec::new(),
            scores: Value::Null,
            ties: Vec::new(),
            error: Some(error.to_string()),
        }
    }
}

/// The payload a dictator answers: the consultation ballots, without agent
/// ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsultationRecord {
    pub id: String,
    /// `informed` or `misinformed`.
    pub mode: String,
    pub choices: Vec<String>,
    pub consultation: Vec<Vec<String>>,
}

impl ConsultationRecord {
    pub fn new(id: impl Into<String>, mode: &str, p: &Profile) -> Self {
        let alts = p.alternatives();
        ConsultationRecord {
            id: id.into(),
            mode: mode.into(),
            choices: alts.labels().to_vec(),
            consultation: p
                .ballots()
                .iter()
                .map(|b| alts.labels_of(&b.ranking))
                .collect(),
        }
    }
}

/// A dictator's answer to one question.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayRecord {
    pub id: String,
    pub ranking: Vec<String>,
}

pub fn parse_replay_line(line: &str) -> Result<Option<ReplayRecord>, String> {
    if line.trim().is_empty() {
        return Ok(None);
    }
    let value: Value = serde_json::from_str(line).map_err(|e| format!("invalid JSON: {e}"))?;
    if matches!(&value, Value::Object(o) if o.contains_key("comment") && !o.contains_key("id")) {
        return Ok(None);
    }
    serde_json::from_value(value)
        .map(Some)
        .map_err(|e| e.to_string())
}

/// Reads a replay file into a question id → ranking map. Replay files are
/// always read strictly: a dictator answer that cannot be parsed is not
/// something to skip silently.
pub fn read_replay<R: BufRead>(reader: R) -> Result<HashMap<String, Vec<String>>, FormatError> {
    let mut out = HashMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let err = |message: String| LineError {
            line: i + 1,
            message,
        };
        if let Some(r) = parse_replay_line(&line).map_err(err)? {
            if out.insert(r.id.clone(), r.ranking).is_some() {
                return Err(err(format!("duplicate question id `{}`", r.id)).into());
            }
        }
    }
    Ok(out)
}

fn election_record(id: String, e: &Election, note: WitnessNote) -> ProfileRecord {
    let mut r = match e {
        Election::Ordinal(p) => ProfileRecord::from_profile(id, "", p, None),
        Election::Scored(sp) => {
            ProfileRecord::from_profile(id, "", &sp.preference_profile(), None).with_scores(sp)
        }
    };
    r.witness = Some(note);
    r
}

/// A witness as one or two profile records.
pub fn witness_records(w: &Witness) -> Vec<ProfileRecord> {
    let stem = format!("{}-{}", w.rule, w.criterion);
    let range = match &w.base {
        Election::Scored(sp) => Some([sp.range().min, sp.range().max]),
        Election::Ordinal(_) => None,
    };
    let note = |role: &str| WitnessNote {
        criterion: w.criterion,
        rule: w.rule,
        role: role.into(),
        explanation: w.explanation.clone(),
        range,
    };
    let mut out = vec![election_record(
        format!("{stem}-base"),
        &w.base,
        note("base"),
    )];
    if let Some(p) = &w.perturbed {
        out.push(election_record(
            format!("{stem}-perturbed"),
            p,
            note("perturbed"),
        ));
    }
    out
}

fn record_election(r: &ProfileRecord, note: &WitnessNote) -> Result<Election, FormatError> {
    Ok(match note.range {
        Some([min, max]) => Election::Scored(r.scored_profile(ScoreRange::new(min, max)?, None)?),
        None => Election::Ordinal(r.ordinal_profile(None)?),
    })
}

/// Rebuilds a witness from the records written by [`witness_records`].
pub fn witness_from_records(records: &[ProfileRecord]) -> Result<Witness, FormatError> {
    let bad = |m: &str| FormatError::Witness(m.to_string());
    let mut base = None;
    let mut perturbed = None;
    for r in records {
        let note = r
            .witness
            .as_ref()
            .ok_or_else(|| bad("record without a witness block"))?;
        let slot = match note.role.as_str() {
            "base" => &mut base,
            "perturbed" => &mut perturbed,
            other => return Err(bad(&format!("unknown role `{other}`"))),
        };
        if slot.is_some() {
            return Err(bad(&format!("two `{}` records", note.role)));
        }
        *slot = Some((note.clone(), record_election(r, note)?));
    }
    let (note, base) = base.ok_or_else(|| bad("no base record"))?;
    if let Some((other, _)) = &perturbed {
        if (other.criterion, other.rule) != (note.criterion, note.rule) {
            return Err(bad("records belong to different witnesses"));
        }
    }
    Ok(Witness {
        criterion: note.criterion,
        rule: note.rule,
        base,
        perturbed: perturbed.map(|(_, e)| e),
        explanation: note.explanation,
    })
}
