use std::cmp::Reverse;

use super::{order_by_key, CollectiveRanking, RuleId, Scores};
use crate::profile::Rankings;

/// Bucklin voting extended to a full ranking.
///
/// Each alternative's majority round is the smallest `r` at which more than
/// half of the ballots place it in their top `r`. Alternatives are ordered by
/// that round, then by their cumulative count at it.
pub fn bucklin<R: Rankings + ?Sized>(profile: &R) -> CollectiveRanking {
    let m = profile.num_alternatives();
    let n = profile.total_weight();
    let mut cumulative = vec![0u64; m];
    let mut reached: Vec<Option<(usize, u64)>> = vec![None; m];
    for round in 1..=m {
        profile.for_each_ranking(|r, w| cumulative[r[round - 1]] += w);
        for a in 0..m {
            if reached[a].is_none() && 2 * cumulative[a] > n {
                reached[a] = Some((round, cumulative[a]));
            }
        }
    }
    // At round m every alternative holds all n ballots.
    let reached: Vec<(usize, u64)> = reached.into_iter().map(|r| r.expect("n > 0")).collect();
    let (order, ties) = order_by_key(m, |a| (reached[a].0, Reverse(reached[a].1)));
    CollectiveRanking::new(RuleId::Bucklin, order, Scores::Bucklin(reached), ties)
}
