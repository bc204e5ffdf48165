use std::cmp::Reverse;

use super::{order_by_key, CollectiveRanking, RuleId, Scores};
use crate::profile::Rankings;

/// Borda count: the alternative at 1-based rank `i` earns `m - i` points.
pub fn borda<R: Rankings + ?Sized>(profile: &R) -> CollectiveRanking {
    let m = profile.num_alternatives();
    let mut points = vec![0i64; m];
    profile.for_each_ranking(|r, w| {
        for (i, &a) in r.iter().enumerate() {
            points[a] += ((m - 1 - i) as u64 * w) as i64;
        }
    });
    let (order, ties) = order_by_key(m, |a| Reverse(points[a]));
    CollectiveRanking::new(RuleId::Borda, order, Scores::Totals(points), ties)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::test_util::profile;

    #[test]
    fn single_ballot() {
        let out = borda(&profile(&[(1, &[0, 1, 2])]));
        assert_eq!(out.scores, Scores::Totals(vec![2, 1, 0]));
        assert_eq!(out.order, vec![0, 1, 2]);
    }

    #[test]
    fn point_sums() {
        let out = borda(&profile(&[
            (1, &[0, 1, 2]),
            (1, &[1, 2, 0]),
            (1, &[1, 0, 2]),
        ]));
        assert_eq!(out.scores, Scores::Totals(vec![3, 5, 1]));
        assert_eq!(out.order, vec![1, 0, 2]);
    }

    #[test]
    fn reversed_unanimity() {
        let out = borda(&profile(&[(4, &[3, 2, 1, 0])]));
        assert_eq!(out.order, vec![3, 2, 1, 0]);
        assert!(out.ties.is_empty());
    }
}
