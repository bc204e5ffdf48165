use crate::profile::{Alt, Rankings};

/// Head-to-head counts: `wins(a, b)` is the number of ballots ranking `a`
/// above `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairwiseTally {
    m: usize,
    n: u64,
    wins: Vec<u64>,
}

/// Counts every ordered pair over all ballots.
pub fn pairwise_tally<R: Rankings + ?Sized>(rankings: &R) -> PairwiseTally {
    let m = rankings.num_alternatives();
    let mut wins = vec![0u64; m * m];
    let mut n = 0;
    rankings.for_each_ranking(|ranking, w| {
        n += w;
        for (i, &a) in ranking.iter().enumerate() {
            for &b in &ranking[i + 1..] {
                wins[a * m + b] += w;
            }
        }
    });
    PairwiseTally { m, n, wins }
}

impl PairwiseTally {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn wins(&self, a: Alt, b: Alt) -> u64 {
        self.wins[a * self.m + b]
    }

    /// Net support of `a` over `b`; antisymmetric.
    pub fn margin(&self, a: Alt, b: Alt) -> i64 {
        self.wins(a, b) as i64 - self.wins(b, a) as i64
    }

    /// Alternative beating every other alternative head to head, if any.
    pub fn condorcet_winner(&self) -> Option<Alt> {
        (0..self.m).find(|&a| (0..self.m).all(|b| b == a || self.margin(a, b) > 0))
    }
}
