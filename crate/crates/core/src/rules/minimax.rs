use super::{order_by_key, CollectiveRanking, RuleId, Scores};
use crate::profile::Rankings;
use crate::tally::pairwise_tally;

/// Minimax: ranks by worst disfavor, the largest margin by which any
/// opponent beats an alternative (negative when it beats everyone).
pub fn minimax<R: Rankings + ?Sized>(profile: &R) -> CollectiveRanking {
    let t = pairwise_tally(profile);
    let m = t.m();
    let worst: Vec<i64> = (0..m)
        .map(|a| {
            (0..m)
                .filter(|&b| b != a)
                .map(|b| t.margin(b, a))
                .max()
                .expect("m >= 2")
        })
        .collect();
    let (order, ties) = order_by_key(m, |a| worst[a]);
    CollectiveRanking::new(RuleId::Minimax, order, Scores::Totals(worst), ties)
}
