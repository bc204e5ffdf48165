use std::cmp::Reverse;

use super::{CollectiveRanking, RuleId, Scores};
use crate::profile::{Alt, Rankings};
use crate::tally::pairwise_tally;

/// Ranked pairs (Tideman).
///
/// Majority pairs are taken strongest first (margin, then raw wins, then
/// index order of the pair) and locked unless they would close a cycle with
/// pairs already locked. The output is the lexicographically smallest
/// linear extension of the locked relation.
///
/// Tie log: a skipped pair whose strength equals another majority pair's
/// logs the better of its two final positions; a choice between several
/// unbeaten alternatives logs the position being filled.
pub fn ranked_pairs<R: Rankings + ?Sized>(profile: &R) -> CollectiveRanking {
    let t = pairwise_tally(profile);
    let m = t.m();
    let mut pairs: Vec<(Alt, Alt)> = (0..m)
        .flat_map(|a| (0..m).map(move |b| (a, b)))
        .filter(|&(a, b)| a != b && t.margin(a, b) > 0)
        .collect();
    let strength = |&(a, b): &(Alt, Alt)| (t.margin(a, b), t.wins(a, b));
    pairs.sort_by_key(|p| (Reverse(strength(p)), p.0, p.1));

    // reach[x][y]: x is above y in the transitive closure of locked pairs.
    let mut reach = vec![vec![false; m]; m];
    let mut skipped = Vec::new();
    for &(a, b) in &pairs {
        if reach[b][a] {
            skipped.push((a, b));
            continue;
        }
        let above: Vec<Alt> = (0..m).filter(|&x| x == a || reach[x][a]).collect();
        let below: Vec<Alt> = (0..m).filter(|&y| y == b || reach[b][y]).collect();
        for &x in &above {
            for &y in &below {
                reach[x][y] = true;
            }
        }
    }

    let mut placed = vec![false; m];
    let mut order = Vec::with_capacity(m);
    let mut ties = Vec::new();
    for pos in 0..m {
        let mut sources =
            (0..m).filter(|&a| !placed[a] && !(0..m).any(|x| !placed[x] && reach[x][a]));
        let pick = sources.next().expect("locked relation is acyclic");
        if sources.next().is_some() {
            ties.push(pos);
        }
        placed[pick] = true;
        order.push(pick);
    }

    let mut position = vec![0; m];
    for (i, &a) in order.iter().enumerate() {
        position[a] = i;
    }
    for s in &skipped {
        let contested = pairs.iter().any(|p| p != s && strength(p) == strength(s));
        if contested {
            ties.push(position[s.0].min(position[s.1]));
        }
    }
    CollectiveRanking::new(RuleId::RankedPairs, order, Scores::None, ties)
}
