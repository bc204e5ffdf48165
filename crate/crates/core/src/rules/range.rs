use std::cmp::Reverse;

use super::{order_by_key, CollectiveRanking, RuleId, Scores};
use crate::profile::ScoreVectors;

/// Range voting: orders alternatives by their score sums.
pub fn range_voting<S: ScoreVectors + ?Sized>(profile: &S) -> CollectiveRanking {
    let m = profile.num_alternatives();
    let mut sums = vec![0i64; m];
    profile.for_each_scores(|s, w| {
        for (a, &v) in s.iter().enumerate() {
            sums[a] += v * w as i64;
        }
    });
    let (order, ties) = order_by_key(m, |a| Reverse(sums[a]));
    CollectiveRanking::new(RuleId::RangeVoting, order, Scores::Totals(sums), ties)
}
