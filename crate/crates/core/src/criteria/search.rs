//! Exhaustive counterexample search.
//!
//! Profiles are enumerated as sorted multisets of ballot types, smallest
//! electorate first and lexicographically within a size, which quotients
//! out anonymity. Ordinal rules use all `m!` rankings as types. Range
//! voting uses honest score vectors over `0..=3`: one type per ranking and
//! per choice of strictly decreasing scores.
//!
//! Blocks of the enumeration are tested in parallel, but the witness
//! returned is always the first in enumeration order.

use std::borrow::Cow;

use rayon::prelude::*;

use super::{
    check_criterion, condorcet_violation, consistency_violation, iia_violation, majority_violation,
    monotonicity_violation, relabel, CriteriaError, Criterion, Election, Pool, Verdict, Witness,
};
use crate::profile::{
    agent_ids, Alt, AlternativeSet, Profile, ScoreRange, ScoredBallot, ScoredProfile, Weighted,
};
use crate::rules::RuleId;

pub const MAX_ALTERNATIVES: usize = 4;
pub const MAX_VOTERS: usize = 7;
/// Score range of the range-voting search.
pub const SEARCH_SCORE_RANGE: ScoreRange = ScoreRange { min: 0, max: 3 };

const BLOCK: usize = 4096;

enum Types {
    Ordinal(Vec<Vec<Alt>>),
    Scored(Vec<Vec<i64>>),
}

fn permutations(m: usize) -> Vec<Vec<Alt>> {
    fn go(prefix: &mut Vec<Alt>, used: &mut [bool], out: &mut Vec<Vec<Alt>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for a in 0..used.len() {
            if !used[a] {
                used[a] = true;
                prefix.push(a);
                go(prefix, used, out);
                prefix.pop();
                used[a] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; m], &mut out);
    out
}

/// Strictly decreasing `len`-tuples from `max..=min`, lexicographically
/// descending.
fn decreasing(len: usize, min: i64, max: i64) -> Vec<Vec<i64>> {
    if len == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for top in (min..=max).rev() {
        for rest in decreasing(len - 1, min, top - 1) {
            let mut v = vec![top];
            v.extend(rest);
            out.push(v);
        }
    }
    out
}

impl Types {
    fn new(rule: RuleId, m: usize) -> Self {
        let perms = permutations(m);
        if !rule.needs_scores() {
            return Types::Ordinal(perms);
        }
        let values = decreasing(m, SEARCH_SCORE_RANGE.min, SEARCH_SCORE_RANGE.max);
        let mut out = Vec::new();
        for r in &perms {
            for v in &values {
                let mut s = vec![0; m];
                for (i, &a) in r.iter().enumerate() {
                    s[a] = v[i];
                }
                out.push(s);
            }
        }
        Types::Scored(out)
    }

    fn len(&self) -> usize {
        match self {
            Types::Ordinal(t) => t.len(),
            Types::Scored(t) => t.len(),
        }
    }

    fn m(&self) -> usize {
        match self {
            Types::Ordinal(t) => t[0].len(),
            Types::Scored(t) => t[0].len(),
        }
    }

    /// Pool of a sorted multiset of type indices.
    fn pool(&self, seq: &[usize]) -> Pool<'_> {
        let m = self.m();
        let mut groups: Vec<(usize, u64)> = Vec::new();
        for &t in seq {
            match groups.last_mut() {
                Some((last, k)) if *last == t => *k += 1,
                _ => groups.push((t, 1)),
            }
        }
        match self {
            Types::Ordinal(ts) => Pool::Ordinal(Weighted {
                m,
                items: groups
                    .iter()
                    .map(|&(t, k)| (Cow::Borrowed(ts[t].as_slice()), k))
                    .collect(),
            }),
            Types::Scored(ts) => Pool::Scored(Weighted {
                m,
                items: groups
                    .iter()
                    .map(|&(t, k)| (Cow::Borrowed(ts[t].as_slice()), k))
                    .collect(),
            }),
        }
    }

    fn election(&self, seq: &[usize], prefix: &str) -> Election {
        let alts = AlternativeSet::lettered(self.m()).expect("m >= 2");
        let ids = agent_ids(seq.len(), prefix);
        match self {
            Types::Ordinal(ts) => {
                let ballots = ids
                    .into_iter()
                    .zip(seq)
                    .map(|(id, &t)| crate::profile::Ballot {
                        agent: id,
                        ranking: ts[t].clone(),
                    })
                    .collect();
                Election::Ordinal(Profile::new(alts, ballots).expect("valid search profile"))
            }
            Types::Scored(ts) => {
                let ballots = ids
                    .into_iter()
                    .zip(seq)
                    .map(|(id, &t)| ScoredBallot {
                        agent: id,
                        scores: ts[t].clone(),
                    })
                    .collect();
                Election::Scored(
                    ScoredProfile::new(alts, SEARCH_SCORE_RANGE, ballots)
                        .expect("valid search profile"),
                )
            }
        }
    }

    /// Every way to move `winner` up on a ballot of type `t`, smallest move
    /// first. Scored ballots gain one point.
    fn raises(&self, t: usize, winner: Alt) -> Vec<Raised> {
        match self {
            Types::Ordinal(ts) => {
                let r = &ts[t];
                let p = r.iter().position(|&a| a == winner).expect("complete");
                (0..p)
                    .rev()
                    .map(|q| {
                        let mut v = r.clone();
                        v.remove(p);
                        v.insert(q, winner);
                        Raised::Ordinal(v)
                    })
                    .collect()
            }
            Types::Scored(ts) => {
                let s = &ts[t];
                if s[winner] >= SEARCH_SCORE_RANGE.max {
                    return vec![];
                }
                let mut v = s.clone();
                v[winner] += 1;
                vec![Raised::Scored(v)]
            }
        }
    }
}

#[derive(Debug, Clone)]
enum Raised {
    Ordinal(Vec<Alt>),
    Scored(Vec<i64>),
}

/// A base pool with some ballots swapped for raised versions.
fn raised_pool<'a>(base: &Pool<'a>, swaps: &[(usize, &'a Raised)], types: &'a Types) -> Pool<'a> {
    match (base, types) {
        (Pool::Ordinal(w), Types::Ordinal(ts)) => {
            let mut items = w.items.clone();
            for &(t, r) in swaps {
                take_one(&mut items, ts[t].as_slice());
                let Raised::Ordinal(v) = r else {
                    unreachable!()
                };
                items.push((Cow::Borrowed(v.as_slice()), 1));
            }
            Pool::Ordinal(Weighted { m: w.m, items })
        }
        (Pool::Scored(w), Types::Scored(ts)) => {
            let mut items = w.items.clone();
            for &(t, r) in swaps {
                take_one(&mut items, ts[t].as_slice());
                let Raised::Scored(v) = r else { unreachable!() };
                items.push((Cow::Borrowed(v.as_slice()), 1));
            }
            Pool::Scored(Weighted { m: w.m, items })
        }
        _ => unreachable!("pool built from these types"),
    }
}

fn take_one<T: PartialEq + Clone>(items: &mut Vec<(Cow<'_, [T]>, u64)>, ballot: &[T]) {
    let i = items
        .iter()
        .position(|(b, k)| *k > 0 && b.as_ref() == ballot)
        .expect("type present");
    items[i].1 -= 1;
}

/// Sorted multisets of size `n` over `0..t`, in lexicographic order.
struct Multisets {
    t: usize,
    next: Option<Vec<usize>>,
}

impl Multisets {
    fn new(t: usize, n: usize) -> Self {
        Multisets {
            t,
            next: Some(vec![0; n]),
        }
    }
}

impl Iterator for Multisets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        if let Some(i) = (0..succ.len()).rev().find(|&i| succ[i] + 1 < self.t) {
            let v = succ[i] + 1;
            for x in &mut succ[i..] {
                *x = v;
            }
            self.next = Some(succ);
        }
        Some(cur)
    }
}

/// First hit of `test` over `items`, scanning in parallel blocks.
fn first_hit<I, T, R>(items: I, test: impl Fn(&T) -> Option<R> + Sync) -> Option<R>
where
    I: Iterator<Item = T>,
    T: Send + Sync,
    R: Send,
{
    let mut items = items.peekable();
    while items.peek().is_some() {
        let block: Vec<T> = items.by_ref().take(BLOCK).collect();
        if let Some(hit) = block.par_iter().find_map_first(&test) {
            return Some(hit);
        }
    }
    None
}

/// Searches profiles with `m` alternatives and at most `n_max` agents for a
/// violation of `criterion` by `rule`.
pub fn search_counterexample(
    rule: RuleId,
    criterion: Criterion,
    m: usize,
    n_max: usize,
) -> Result<Option<Witness>, CriteriaError> {
    if !rule.is_deterministic() {
        return Err(CriteriaError::RandomizedRule(rule));
    }
    if !(2..=MAX_ALTERNATIVES).contains(&m) || n_max > MAX_VOTERS {
        return Err(CriteriaError::BoundsTooLarge { m, n_max });
    }
    let types = Types::new(rule, m);
    let found = match criterion {
        Criterion::Majority | Criterion::Condorcet | Criterion::Iia => {
            search_single(rule, criterion, &types, n_max)
        }
        Criterion::Monotonicity => search_monotonicity(rule, &types, n_max),
        Criterion::Consistency => search_consistency(rule, &types, n_max),
    };
    if let Some(w) = &found {
        let verdict = check_criterion(rule, criterion, &w.instance())?;
        assert!(
            matches!(verdict, Verdict::Violation(_)),
            "search produced a witness that does not replay: {w:?}"
        );
    }
    Ok(found)
}

fn search_single(
    rule: RuleId,
    criterion: Criterion,
    types: &Types,
    n_max: usize,
) -> Option<Witness> {
    for n in 1..=n_max {
        let hit = first_hit(Multisets::new(types.len(), n), |seq: &Vec<usize>| {
            let pool = types.pool(seq);
            match criterion {
                Criterion::Majority => {
                    majority_violation(rule, &pool).map(|w| (seq.clone(), None, w))
                }
                Criterion::Condorcet => {
                    condorcet_violation(rule, &pool).map(|w| (seq.clone(), None, w))
                }
                _ => iia_violation(rule, &pool).map(|(c, w)| (seq.clone(), Some(c), w)),
            }
        });
        if let Some((seq, removed, why)) = hit {
            let base = types.election(&seq, "v");
            let perturbed = removed.map(|c| {
                let keep: Vec<Alt> = (0..types.m()).filter(|&a| a != c).collect();
                match &base {
                    Election::Ordinal(p) => Election::Ordinal(p.restrict(&keep).expect("m >= 3")),
                    Election::Scored(p) => Election::Scored(p.restrict(&keep).expect("m >= 3")),
                }
            });
            return Some(Witness {
                criterion,
                rule,
                explanation: relabel(why, &base),
                base,
                perturbed,
            });
        }
    }
    None
}

/// Distinct values of a sorted sequence with the index of their first use.
fn distinct(seq: &[usize]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for (i, &t) in seq.iter().enumerate() {
        if out.last().map(|&(u, _)| u) != Some(t) {
            out.push((t, i));
        }
    }
    out
}

/// Agent positions and replacement ballots of a raise.
type Swap = Vec<(usize, Raised)>;

fn monotonicity_hit(rule: RuleId, types: &Types, seq: &[usize]) -> Option<(Swap, String)> {
    let base = types.pool(seq);
    let winner = base.rank(rule).winner();
    let kinds = distinct(seq);
    let raises: Vec<Vec<Raised>> = kinds
        .iter()
        .map(|&(t, _)| types.raises(t, winner))
        .collect();
    let count = |i: usize| seq.iter().filter(|&&t| t == kinds[i].0).count();

    for (i, rs) in raises.iter().enumerate() {
        for r in rs {
            let p = raised_pool(&base, &[(kinds[i].0, r)], types);
            if let Some(why) = monotonicity_violation(rule, &base, &p) {
                return Some((vec![(kinds[i].1, r.clone())], why));
            }
        }
    }
    for i in 0..kinds.len() {
        for j in i..kinds.len() {
            if i == j && count(i) < 2 {
                continue;
            }
            for (x, r1) in raises[i].iter().enumerate() {
                let from = if i == j { x } else { 0 };
                for r2 in &raises[j][from..] {
                    let p = raised_pool(&base, &[(kinds[i].0, r1), (kinds[j].0, r2)], types);
                    if let Some(why) = monotonicity_violation(rule, &base, &p) {
                        let second = if i == j { kinds[j].1 + 1 } else { kinds[j].1 };
                        return Some((vec![(kinds[i].1, r1.clone()), (second, r2.clone())], why));
                    }
                }
            }
        }
    }
    None
}

fn search_monotonicity(rule: RuleId, types: &Types, n_max: usize) -> Option<Witness> {
    for n in 1..=n_max {
        let hit = first_hit(Multisets::new(types.len(), n), |seq: &Vec<usize>| {
            monotonicity_hit(rule, types, seq).map(|(swap, why)| (seq.clone(), swap, why))
        });
        if let Some((seq, swap, why)) = hit {
            let base = types.election(&seq, "v");
            let perturbed = match &base {
                Election::Ordinal(p) => Election::Ordinal(
                    p.with_rankings_replaced(
                        swap.into_iter()
                            .map(|(i, r)| match r {
                                Raised::Ordinal(v) => (i, v),
                                Raised::Scored(_) => unreachable!(),
                            })
                            .collect(),
                    )
                    .expect("raise keeps a permutation"),
                ),
                Election::Scored(p) => Election::Scored(
                    p.with_scores_replaced(
                        swap.into_iter()
                            .map(|(i, r)| match r {
                                Raised::Scored(v) => (i, v),
                                Raised::Ordinal(_) => unreachable!(),
                            })
                            .collect(),
                    )
                    .expect("raise stays in range"),
                ),
            };
            return Some(Witness {
                criterion: Criterion::Monotonicity,
                rule,
                explanation: relabel(why, &base),
                base,
                perturbed: Some(perturbed),
            });
        }
    }
    None
}

fn merge(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Pairs of electorates ordered by total size, then the size of the first
/// part, then the parts themselves; the first part is never the larger.
fn search_consistency(rule: RuleId, types: &Types, n_max: usize) -> Option<Witness> {
    let m = types.m();
    // Multisets of each size with their winners, and per size the indices
    // electing each alternative.
    let mut sets: Vec<Vec<Vec<usize>>> = vec![vec![]];
    let mut winners: Vec<Vec<Alt>> = vec![vec![]];
    let mut by_winner: Vec<Vec<Vec<usize>>> = vec![vec![]];
    for size in 1..n_max {
        let s: Vec<Vec<usize>> = Multisets::new(types.len(), size).collect();
        let w: Vec<Alt> = s
            .par_iter()
            .map(|seq| types.pool(seq).rank(rule).winner())
            .collect();
        let mut buckets = vec![Vec::new(); m];
        for (i, &a) in w.iter().enumerate() {
            buckets[a].push(i);
        }
        sets.push(s);
        winners.push(w);
        by_winner.push(buckets);
    }

    for total in 2..=n_max {
        for small in 1..=total / 2 {
            let large = total - small;
            let hit = first_hit(0..sets[small].len(), |&i: &usize| {
                let p1 = &sets[small][i];
                let bucket = &by_winner[large][winners[small][i]];
                let start = if small == large {
                    bucket.partition_point(|&j| j < i)
                } else {
                    0
                };
                let first = types.pool(p1);
                bucket[start..].iter().find_map(|&j| {
                    let p2 = &sets[large][j];
                    let union = merge(p1, p2);
                    consistency_violation(rule, &first, &types.pool(p2), &types.pool(&union))
                        .map(|why| (i, j, why))
                })
            });
            if let Some((i, j, why)) = hit {
                let base = types.election(&sets[small][i], "v");
                let perturbed = types.election(&sets[large][j], "w");
                return Some(Witness {
                    criterion: Criterion::Consistency,
                    rule,
                    explanation: relabel(why, &base),
                    base,
                    perturbed: Some(perturbed),
                });
            }
        }
    }
    None
}
