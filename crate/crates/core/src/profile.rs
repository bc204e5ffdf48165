//! Alternatives, ballots and profiles.
//!
//! A [`Profile`] is the unit every rule consumes: one strict total ordering
//! per agent over a shared [`AlternativeSet`]. Ballots are kept sorted by
//! agent id, so two profiles holding the same ballots compare equal
//! regardless of the order they were collected in. "Canonical agent order"
//! elsewhere in the crate always means this order.

use std::collections::HashSet;

use thiserror::Error;

/// Index of an alternative within its [`AlternativeSet`].
pub type Alt = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("at least two alternatives are required, got {0}")]
    TooFewAlternatives(usize),
    #[error("alternative `{0}` is listed twice")]
    DuplicateAlternative(String),
    #[error("unknown alternative `{0}`")]
    UnknownAlternative(String),
    #[error("alternative index {0} is out of range")]
    AlternativeOutOfRange(usize),
    #[error("`{0}` appears more than once in the ranking")]
    DuplicateEntry(String),
    #[error("ranking is incomplete, missing {}", .0.join(", "))]
    IncompleteRanking(Vec<String>),
    #[error("{0} agent(s) missing from the profile")]
    MissingAgents(usize),
    #[error("{0} more ballot(s) than expected agents")]
    ExtraAgents(usize),
    #[error("agent `{0}` cast more than one ballot")]
    DuplicateAgentId(String),
    #[error("a profile needs at least one ballot")]
    EmptyProfile,
    #[error("ballot of agent `{0}` does not match the alternative set")]
    MismatchedAlternatives(String),
    #[error("restriction must keep at least two alternatives, got {0}")]
    SubsetTooSmall(usize),
    #[error("agent `{agent}` scored `{label}` with {score}, outside [{min}, {max}]")]
    ScoreOutOfRange {
        agent: String,
        label: String,
        score: i64,
        min: i64,
        max: i64,
    },
    #[error("agent `{agent}` gave no score for `{label}`")]
    MissingScore { agent: String, label: String },
    #[error("score range [{0}, {1}] is empty")]
    InvalidRange(i64, i64),
}

pub type Result<T> = std::result::Result<T, ProfileError>;

/// The alternatives of one decision. Index order doubles as the canonical
/// tie-break order: a lower index wins every tie.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlternativeSet {
    labels: Vec<String>,
}

impl AlternativeSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() < 2 {
            return Err(ProfileError::TooFewAlternatives(labels.len()));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(ProfileError::DuplicateAlternative(l.clone()));
            }
        }
        Ok(AlternativeSet { labels })
    }

    /// `A`, `B`, `C`, ... for `m <= 26`, `A1`.. style labels beyond that.
    pub fn lettered(m: usize) -> Result<Self> {
        if m <= 26 {
            Self::new((0..m).map(|i| ((b'A' + i as u8) as char).to_string()))
        } else {
            Self::new((0..m).map(|i| format!("A{i:03}")))
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, alt: Alt) -> &str {
        &self.labels[alt]
    }

    pub fn index_of(&self, label: &str) -> Option<Alt> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn labels_of(&self, order: &[Alt]) -> Vec<String> {
        order.iter().map(|&a| self.labels[a].clone()).collect()
    }

    fn restricted(&self, keep: &[Alt]) -> Result<Self> {
        Self::new(keep.iter().map(|&a| self.labels[a].clone()))
    }
}

/// One agent's strict ranking, most preferred first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ballot {
    pub agent: String,
    pub ranking: Vec<Alt>,
}

impl Ballot {
    /// Builds a ballot from alternative indices, checking it is a permutation
    /// of `0..alts.len()`.
    pub fn from_indices(
        agent: impl Into<String>,
        ranking: Vec<Alt>,
        alts: &AlternativeSet,
    ) -> Result<Self> {
        let m = alts.len();
        let mut seen = vec![false; m];
        for &a in &ranking {
            if a >= m {
                return Err(ProfileError::AlternativeOutOfRange(a));
            }
            if std::mem::replace(&mut seen[a], true) {
                return Err(ProfileError::DuplicateEntry(alts.label(a).to_string()));
            }
        }
        let missing = missing_labels(&seen, alts);
        if !missing.is_empty() {
            return Err(ProfileError::IncompleteRanking(missing));
        }
        Ok(Ballot {
            agent: agent.into(),
            ranking,
        })
    }

    /// Position of `alt` in this ballot, 0 = top.
    pub fn position(&self, alt: Alt) -> usize {
        self.ranking
            .iter()
            .position(|&a| a == alt)
            .expect("complete ballot")
    }

    pub fn top(&self) -> Alt {
        self.ranking[0]
    }
}

fn missing_labels(seen: &[bool], alts: &AlternativeSet) -> Vec<String> {
    seen.iter()
        .enumerate()
        .filter(|(_, &s)| !s)
        .map(|(a, _)| alts.label(a).to_string())
        .collect()
}

/// Checks that `raw` is a complete, duplicate-free ranking of `alts` and
/// binds its labels to indices.
pub fn validate_ballot<S: AsRef<str>>(
    agent: impl Into<String>,
    raw: &[S],
    alts: &AlternativeSet,
) -> Result<Ballot> {
    let mut seen = vec![false; alts.len()];
    let mut ranking = Vec::with_capacity(raw.len());
    for label in raw {
        let label = label.as_ref();
        let a = alts
            .index_of(label)
            .ok_or_else(|| ProfileError::UnknownAlternative(label.to_string()))?;
        if std::mem::replace(&mut seen[a], true) {
            return Err(ProfileError::DuplicateEntry(label.to_string()));
        }
        ranking.push(a);
    }
    let missing = missing_labels(&seen, alts);
    if !missing.is_empty() {
        return Err(ProfileError::IncompleteRanking(missing));
    }
    Ok(Ballot {
        agent: agent.into(),
        ranking,
    })
}

fn check_agents<'a>(
    agents: impl Iterator<Item = &'a str>,
    len: usize,
    expected_n: usize,
) -> Result<()> {
    if len == 0 {
        return Err(ProfileError::EmptyProfile);
    }
    let mut seen = HashSet::new();
    for agent in agents {
        if !seen.insert(agent) {
            return Err(ProfileError::DuplicateAgentId(agent.to_string()));
        }
    }
    if len < expected_n {
        return Err(ProfileError::MissingAgents(expected_n - len));
    }
    if len > expected_n {
        return Err(ProfileError::ExtraAgents(len - expected_n));
    }
    Ok(())
}

/// All agents' ballots over one alternative set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    alternatives: AlternativeSet,
    ballots: Vec<Ballot>,
}

/// Assembles a profile from individually validated ballots. Fails unless
/// exactly `expected_n` distinct agents are present.
pub fn build_profile(
    alternatives: AlternativeSet,
    mut ballots: Vec<Ballot>,
    expected_n: usize,
) -> Result<Profile> {
    check_agents(
        ballots.iter().map(|b| b.agent.as_str()),
        ballots.len(),
        expected_n,
    )?;
    let m = alternatives.len();
    if let Some(b) = ballots.iter().find(|b| b.ranking.len() != m) {
        return Err(ProfileError::MismatchedAlternatives(b.agent.clone()));
    }
    ballots.sort_by(|a, b| a.agent.cmp(&b.agent));
    Ok(Profile {
        alternatives,
        ballots,
    })
}

impl Profile {
    /// Profile holding all of `ballots`, whatever their count.
    pub fn new(alternatives: AlternativeSet, ballots: Vec<Ballot>) -> Result<Self> {
        let n = ballots.len();
        build_profile(alternatives, ballots, n)
    }

    /// Builds a profile from bare index rankings, naming agents `v01`, `v02`, ...
    pub fn from_rankings(alternatives: AlternativeSet, rankings: Vec<Vec<Alt>>) -> Result<Self> {
        let ids = agent_ids(rankings.len(), "v");
        let ballots = rankings
            .into_iter()
            .zip(ids)
            .map(|(r, id)| Ballot::from_indices(id, r, &alternatives))
            .collect::<Result<Vec<_>>>()?;
        Self::new(alternatives, ballots)
    }

    pub fn alternatives(&self) -> &AlternativeSet {
        &self.alternatives
    }

    pub fn m(&self) -> usize {
        self.alternatives.len()
    }

    pub fn n(&self) -> usize {
        self.ballots.len()
    }

    /// Ballots in canonical agent order.
    pub fn ballots(&self) -> &[Ballot] {
        &self.ballots
    }

    /// Keeps only `keep`, preserving each ballot's relative order. The new
    /// alternative set lists the kept alternatives in their original index
    /// order, so tie-break priority is unchanged.
    pub fn restrict(&self, keep: &[Alt]) -> Result<Profile> {
        let (keep, remap) = restriction_map(keep, self.m())?;
        let alternatives = self.alternatives.restricted(&keep)?;
        let ballots = self
            .ballots
            .iter()
            .map(|b| Ballot {
                agent: b.agent.clone(),
                ranking: b.ranking.iter().filter_map(|&a| remap[a]).collect(),
            })
            .collect();
        Ok(Profile {
            alternatives,
            ballots,
        })
    }

    /// The first `size` agents in canonical order.
    pub fn prefix(&self, size: usize) -> Result<Profile> {
        if size == 0 {
            return Err(ProfileError::EmptyProfile);
        }
        if size > self.n() {
            return Err(ProfileError::MissingAgents(size - self.n()));
        }
        Ok(Profile {
            alternatives: self.alternatives.clone(),
            ballots: self.ballots[..size].to_vec(),
        })
    }

    /// Same agents, with the rankings of the agents at `positions` (canonical
    /// order) swapped for `rankings`.
    pub fn with_rankings_replaced(&self, replacements: Vec<(usize, Vec<Alt>)>) -> Result<Profile> {
        let mut ballots = self.ballots.clone();
        for (pos, ranking) in replacements {
            let agent = ballots[pos].agent.clone();
            ballots[pos] = Ballot::from_indices(agent, ranking, &self.alternatives)?;
        }
        Ok(Profile {
            alternatives: self.alternatives.clone(),
            ballots,
        })
    }

    /// Disjoint union of two electorates over the same alternatives.
    pub fn union(&self, other: &Profile) -> Result<Profile> {
        if self.alternatives != other.alternatives {
            return Err(ProfileError::MismatchedAlternatives(
                other.ballots[0].agent.clone(),
            ));
        }
        let ballots: Vec<Ballot> = self.ballots.iter().chain(&other.ballots).cloned().collect();
        Profile::new(self.alternatives.clone(), ballots)
    }
}

fn restriction_map(keep: &[Alt], m: usize) -> Result<(Vec<Alt>, Vec<Option<Alt>>)> {
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&bad) = keep.iter().find(|&&a| a >= m) {
        return Err(ProfileError::AlternativeOutOfRange(bad));
    }
    if keep.len() < 2 {
        return Err(ProfileError::SubsetTooSmall(keep.len()));
    }
    let mut remap = vec![None; m];
    for (new, &old) in keep.iter().enumerate() {
        remap[old] = Some(new);
    }
    Ok((keep, remap))
}

/// Zero-padded ids `prefix01`.. so lexicographic order matches numeric order.
pub fn agent_ids(n: usize, prefix: &str) -> Vec<String> {
    let width = n.to_string().len().max(2);
    (1..=n).map(|i| format!("{prefix}{i:0width$}")).collect()
}

/// Inclusive bounds of a cardinal score scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ScoreRange {
    pub min: i64,
    pub max: i64,
}

impl ScoreRange {
    pub fn new(min: i64, max: i64) -> Result<Self> {
        if min >= max {
            return Err(ProfileError::InvalidRange(min, max));
        }
        Ok(ScoreRange { min, max })
    }

    pub fn contains(&self, score: i64) -> bool {
        (self.min..=self.max).contains(&score)
    }
}

impl Default for ScoreRange {
    fn default() -> Self {
        ScoreRange { min: 0, max: 10 }
    }
}

/// One agent's cardinal scores, indexed by alternative.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScoredBallot {
    pub agent: String,
    pub scores: Vec<i64>,
}

impl ScoredBallot {
    /// Ordering implied by the scores; equal scores fall back to index order.
    pub fn preference_order(&self) -> Vec<Alt> {
        preference_order(&self.scores)
    }
}

pub(crate) fn preference_order(scores: &[i64]) -> Vec<Alt> {
    let mut order: Vec<Alt> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].cmp(&scores[a]).then(a.cmp(&b)));
    order
}

/// Validates one agent's label → score pairs against `alts` and `range`.
pub fn validate_scores<'a, I>(
    agent: impl Into<String>,
    raw: I,
    alts: &AlternativeSet,
    range: ScoreRange,
) -> Result<ScoredBallot>
where
    I: IntoIterator<Item = (&'a str, i64)>,
{
    let agent = agent.into();
    let mut scores: Vec<Option<i64>> = vec![None; alts.len()];
    for (label, score) in raw {
        let a = alts
            .index_of(label)
            .ok_or_else(|| ProfileError::UnknownAlternative(label.to_string()))?;
        if scores[a].is_some() {
            return Err(ProfileError::DuplicateEntry(label.to_string()));
        }
        if !range.contains(score) {
            return Err(ProfileError::ScoreOutOfRange {
                agent,
                label: label.to_string(),
                score,
                min: range.min,
                max: range.max,
            });
        }
        scores[a] = Some(score);
    }
    let scores = scores
        .into_iter()
        .enumerate()
        .map(|(a, s)| {
            s.ok_or_else(|| ProfileError::MissingScore {
                agent: agent.clone(),
                label: alts.label(a).to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScoredBallot { agent, scores })
}

/// Cardinal counterpart of [`Profile`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoredProfile {
    alternatives: AlternativeSet,
    range: ScoreRange,
    ballots: Vec<ScoredBallot>,
}

/// Assembles a scored profile. `expected_n = None` accepts any non-empty set
/// of distinct agents (used for partial-profile salvage).
pub fn build_scored_profile(
    alternatives: AlternativeSet,
    range: ScoreRange,
    mut ballots: Vec<ScoredBallot>,
    expected_n: Option<usize>,
) -> Result<ScoredProfile> {
    let len = ballots.len();
    check_agents(
        ballots.iter().map(|b| b.agent.as_str()),
        len,
        expected_n.unwrap_or(len),
    )?;
    for b in &ballots {
        if b.scores.len() != alternatives.len() {
            return Err(ProfileError::MismatchedAlternatives(b.agent.clone()));
        }
        for (a, &s) in b.scores.iter().enumerate() {
            if !range.contains(s) {
                return Err(ProfileError::ScoreOutOfRange {
                    agent: b.agent.clone(),
                    label: alternatives.label(a).to_string(),
                    score: s,
                    min: range.min,
                    max: range.max,
                });
            }
        }
    }
    ballots.sort_by(|a, b| a.agent.cmp(&b.agent));
    Ok(ScoredProfile {
        alternatives,
        range,
        ballots,
    })
}

impl ScoredProfile {
    pub fn new(
        alternatives: AlternativeSet,
        range: ScoreRange,
        ballots: Vec<ScoredBallot>,
    ) -> Result<Self> {
        build_scored_profile(alternatives, range, ballots, None)
    }

    pub fn from_score_vectors(
        alternatives: AlternativeSet,
        range: ScoreRange,
        vectors: Vec<Vec<i64>>,
    ) -> Result<Self> {
        let ballots = agent_ids(vectors.len(), "v")
            .into_iter()
            .zip(vectors)
            .map(|(agent, scores)| ScoredBallot { agent, scores })
            .collect();
        Self::new(alternatives, range, ballots)
    }

    pub fn alternatives(&self) -> &AlternativeSet {
        &self.alternatives
    }

    pub fn range(&self) -> ScoreRange {
        self.range
    }

    pub fn m(&self) -> usize {
        self.alternatives.len()
    }

    pub fn n(&self) -> usize {
        self.ballots.len()
    }

    pub fn ballots(&self) -> &[ScoredBallot] {
        &self.ballots
    }

    /// Ordinal profile implied by the scores.
    pub fn preference_profile(&self) -> Profile {
        Profile {
            alternatives: self.alternatives.clone(),
            ballots: self
                .ballots
                .iter()
                .map(|b| Ballot {
                    agent: b.agent.clone(),
                    ranking: b.preference_order(),
                })
                .collect(),
        }
    }

    pub fn restrict(&self, keep: &[Alt]) -> Result<ScoredProfile> {
        let (keep, _) = restriction_map(keep, self.m())?;
        Ok(ScoredProfile {
            alternatives: self.alternatives.restricted(&keep)?,
            range: self.range,
            ballots: self
                .ballots
                .iter()
                .map(|b| ScoredBallot {
                    agent: b.agent.clone(),
                    scores: keep.iter().map(|&a| b.scores[a]).collect(),
                })
                .collect(),
        })
    }

    pub fn prefix(&self, size: usize) -> Result<ScoredProfile> {
        if size == 0 {
            return Err(ProfileError::EmptyProfile);
        }
        Ok(ScoredProfile {
            alternatives: self.alternatives.clone(),
            range: self.range,
            ballots: self.ballots[..size.min(self.n())].to_vec(),
        })
    }

    pub fn with_scores_replaced(&self, replacements: Vec<(usize, Vec<i64>)>) -> Result<Self> {
        let mut ballots = self.ballots.clone();
        for (pos, scores) in replacements {
            ballots[pos].scores = scores;
        }
        build_scored_profile(self.alternatives.clone(), self.range, ballots, None)
    }

    pub fn union(&self, other: &ScoredProfile) -> Result<ScoredProfile> {
        if self.alternatives != other.alternatives {
            return Err(ProfileError::MismatchedAlternatives(
                other.ballots[0].agent.clone(),
            ));
        }
        let ballots = self.ballots.iter().chain(&other.ballots).cloned().collect();
        Self::new(self.alternatives.clone(), self.range, ballots)
    }
}

/// Read access to a multiset of rankings. Rules are written against this so
/// the counterexample search can feed them weighted ballot types directly.
pub trait Rankings {
    fn num_alternatives(&self) -> usize;
    fn for_each_ranking(&self, f: impl FnMut(&[Alt], u64));

    fn total_weight(&self) -> u64 {
        let mut n = 0;
        self.for_each_ranking(|_, w| n += w);
        n
    }
}

/// Read access to a multiset of score vectors.
pub trait ScoreVectors {
    fn num_alternatives(&self) -> usize;
    fn for_each_scores(&self, f: impl FnMut(&[i64], u64));
}

impl Rankings for Profile {
    fn num_alternatives(&self) -> usize {
        self.m()
    }

    fn for_each_ranking(&self, mut f: impl FnMut(&[Alt], u64)) {
        for b in &self.ballots {
            f(&b.ranking, 1);
        }
    }

    fn total_weight(&self) -> u64 {
        self.n() as u64
    }
}

impl ScoreVectors for ScoredProfile {
    fn num_alternatives(&self) -> usize {
        self.m()
    }

    fn for_each_scores(&self, mut f: impl FnMut(&[i64], u64)) {
        for b in &self.ballots {
            f(&b.scores, 1);
        }
    }
}

/// Ballot types with multiplicities.
#[derive(Debug, Clone)]
pub(crate) struct Weighted<B> {
    pub m: usize,
    pub items: Vec<(B, u64)>,
}

impl<B: AsRef<[Alt]>> Rankings for Weighted<B> {
    fn num_alternatives(&self) -> usize {
        self.m
    }

    fn for_each_ranking(&self, mut f: impl FnMut(&[Alt], u64)) {
        for (b, w) in &self.items {
            f(b.as_ref(), *w);
        }
    }
}

impl<B: AsRef<[i64]>> ScoreVectors for Weighted<B> {
    fn num_alternatives(&self) -> usize {
        self.m
    }

    fn for_each_scores(&self, mut f: impl FnMut(&[i64], u64)) {
        for (b, w) in &self.items {
            f(b.as_ref(), *w);
        }
    }
}
