use std::cmp::Reverse;

use super::{order_by_key, CollectiveRanking, RuleId, Scores};
use crate::profile::Rankings;

/// Orders alternatives by first-preference count.
pub fn plurality<R: Rankings + ?Sized>(profile: &R) -> CollectiveRanking {
    let m = profile.num_alternatives();
    let mut counts = vec![0i64; m];
    profile.for_each_ranking(|r, w| counts[r[0]] += w as i64);
    let (order, ties) = order_by_key(m, |a| Reverse(counts[a]));
    CollectiveRanking::new(RuleId::Plurality, order, Scores::Totals(counts), ties)
}
