use super::{CollectiveRanking, RuleId, Scores};
use crate::profile::Rankings;

/// Instant-runoff voting run to completion: the collective ranking is the
/// reverse elimination order.
///
/// When several alternatives share the fewest first preferences, the one
/// with the fewest ballots placing it in the top two of the remaining
/// alternatives goes, then top three, and so on. Only if that leaves a tie
/// is the highest-indexed alternative eliminated.
pub fn irv<R: Rankings + ?Sized>(profile: &R) -> CollectiveRanking {
    let m = profile.num_alternatives();
    let mut alive = vec![true; m];
    let mut order = vec![0; m];
    let mut rounds = vec![m; m];
    let mut ties = Vec::new();
    let mut counts = vec![0u64; m];
    for round in 0..m - 1 {
        counts.fill(0);
        profile.for_each_ranking(|r, w| {
            let top = r
                .iter()
                .copied()
                .find(|&a| alive[a])
                .expect("someone alive");
            counts[top] += w;
        });
        let fewest = (0..m)
            .filter(|&a| alive[a])
            .map(|a| counts[a])
            .min()
            .expect("alive");
        let mut tied: Vec<usize> = (0..m)
            .filter(|&a| alive[a] && counts[a] == fewest)
            .collect();
        let remaining = m - round;
        let mut depth = 2;
        while tied.len() > 1 && depth < remaining {
            counts.fill(0);
            profile.for_each_ranking(|r, w| {
                for &a in r.iter().filter(|&&a| alive[a]).take(depth) {
                    counts[a] += w;
                }
            });
            let fewest = tied.iter().map(|&a| counts[a]).min().expect("non-empty");
            tied.retain(|&a| counts[a] == fewest);
            depth += 1;
        }
        let out = *tied.last().expect("non-empty");
        if tied.len() > 1 {
            ties.push(remaining - 2);
        }
        alive[out] = false;
        order[remaining - 1] = out;
        rounds[out] = round + 1;
    }
    order[0] = (0..m).find(|&a| alive[a]).expect("survivor");
    CollectiveRanking::new(RuleId::Irv, order, Scores::EliminationRound(rounds), ties)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::test_util::profile;

    #[test]
    fn transfers_decide() {
        let out = irv(&profile(&[
            (2, &[0, 1, 2]),
            (2, &[1, 0, 2]),
            (1, &[2, 1, 0]),
        ]));
        assert_eq!(out.order, vec![1, 0, 2]);
        assert_eq!(out.scores, Scores::EliminationRound(vec![2, 3, 1]));
        assert!(out.ties.is_empty());
    }

    #[test]
    fn unanimous() {
        let out = irv(&profile(&[(3, &[2, 0, 3, 1])]));
        assert_eq!(out.order, vec![2, 0, 3, 1]);
    }

    #[test]
    fn elimination_tie_drops_highest_index() {
        // A and C both have one first preference; A is in the top two of
        // four ballots and C of one, so C goes. C's ballot moves
        // to A and the final 2-2 split between A and B eliminates B.
        let out = irv(&profile(&[
            (1, &[0, 1, 2]),
            (2, &[1, 0, 2]),
            (1, &[2, 0, 1]),
        ]));
        assert_eq!(out.order, vec![0, 1, 2]);
        assert_eq!(out.ties, vec![0]);
    }

    #[test]
    fn deeper_preferences_break_elimination_ties() {
        let out = irv(&profile(&[(3, &[2, 0, 3, 1])]));
        assert_eq!(out.order, vec![2, 0, 3, 1]);
        assert!(out.ties.is_empty());
    }

    #[test]
    fn full_tie_drops_highest_index() {
        let out = irv(&profile(&[(1, &[0, 1]), (1, &[1, 0])]));
        assert_eq!(out.order, vec![0, 1]);
        assert_eq!(out.ties, vec![0]);
    }
}
