//! Naive reference implementations of the deterministic rules.
//!
//! Deliberately written against plain vectors and with different algorithms
//! from the library (selection instead of sorting, recount-from-scratch
//! runoffs, permutation enumeration for ranked pairs) so that agreement
//! between the two is meaningful.

/// A rule outcome: ranking, tie-break positions and per-alternative numbers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub order: Vec<usize>,
    pub ties: Vec<usize>,
    pub scores: Vec<i64>,
    /// Second score column where a rule has one (Bucklin counts).
    pub aux: Vec<i64>,
}

fn pos(ballot: &[usize], a: usize) -> usize {
    let mut i = 0;
    while ballot[i] != a {
        i += 1;
    }
    i
}

fn prefers(ballot: &[usize], a: usize, b: usize) -> bool {
    pos(ballot, a) < pos(ballot, b)
}

/// Repeatedly picks the remaining alternative with the smallest key,
/// scanning upward so the lowest index wins among equals.
fn select<K: PartialOrd + PartialEq>(
    m: usize,
    key: impl Fn(usize) -> K,
) -> (Vec<usize>, Vec<usize>) {
    let mut left: Vec<usize> = (0..m).collect();
    let mut order = Vec::new();
    let mut ties = Vec::new();
    while !left.is_empty() {
        let mut best = 0;
        for i in 1..left.len() {
            if key(left[i]) < key(left[best]) {
                best = i;
            }
        }
        let picked = left.remove(best);
        if left.iter().any(|&x| key(x) == key(picked)) {
            ties.push(order.len());
        }
        order.push(picked);
    }
    (order, ties)
}

pub fn plurality(m: usize, ballots: &[Vec<usize>]) -> Outcome {
    let counts: Vec<i64> = (0..m)
        .map(|a| ballots.iter().filter(|b| b[0] == a).count() as i64)
        .collect();
    let (order, ties) = select(m, |a| -counts[a]);
    Outcome {
        order,
        ties,
        scores: counts,
        aux: vec![],
    }
}

pub fn borda(m: usize, ballots: &[Vec<usize>]) -> Outcome {
    let points: Vec<i64> = (0..m)
        .map(|a| ballots.iter().map(|b| (m - 1 - pos(b, a)) as i64).sum())
        .collect();
    let (order, ties) = select(m, |a| -points[a]);
    Outcome {
        order,
        ties,
        scores: points,
        aux: vec![],
    }
}

pub fn bucklin(m: usize, ballots: &[Vec<usize>]) -> Outcome {
    let n = ballots.len();
    let mut rounds = vec![0i64; m];
    let mut counts = vec![0i64; m];
    for a in 0..m {
        for r in 1..=m {
            let c = ballots.iter().filter(|b| pos(b, a) < r).count();
            if 2 * c > n {
                rounds[a] = r as i64;
                counts[a] = c as i64;
                break;
            }
        }
    }
    let (order, ties) = select(m, |a| (rounds[a], -counts[a]));
    Outcome {
        order,
        ties,
        scores: rounds,
        aux: counts,
    }
}

pub fn irv(m: usize, ballots: &[Vec<usize>]) -> Outcome {
    let mut remaining: Vec<usize> = (0..m).collect();
    let mut eliminated = Vec::new();
    let mut ties = Vec::new();
    let mut rounds = vec![m as i64; m];
    while remaining.len() > 1 {
        let first = |a: usize| {
            ballots
                .iter()
                .filter(|b| b.iter().find(|x| remaining.contains(x)) == Some(&a))
                .count()
        };
        let fewest = remaining.iter().map(|&a| first(a)).min().unwrap();
        let mut losers: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&a| first(a) == fewest)
            .collect();
        // Depth-k support: ballots whose k best remaining alternatives include a.
        for k in 2..remaining.len() {
            let support = |a: usize| {
                ballots
                    .iter()
                    .filter(|b| {
                        let best: Vec<&usize> =
                            b.iter().filter(|x| remaining.contains(x)).take(k).collect();
                        best.contains(&&a)
                    })
                    .count()
            };
            let low = losers.iter().map(|&a| support(a)).min().unwrap();
            losers.retain(|&a| support(a) == low);
        }
        let out = *losers.iter().max().unwrap();
        if losers.len() > 1 {
            ties.push(remaining.len() - 2);
        }
        rounds[out] = eliminated.len() as i64 + 1;
        eliminated.push(out);
        remaining.retain(|&a| a != out);
    }
    let mut order = remaining;
    order.extend(eliminated.iter().rev());
    ties.sort();
    Outcome {
        order,
        ties,
        scores: rounds,
        aux: vec![],
    }
}

fn net(ballots: &[Vec<usize>], a: usize, b: usize) -> i64 {
    ballots
        .iter()
        .map(|x| if prefers(x, a, b) { 1 } else { -1 })
        .sum()
}

pub fn minimax(m: usize, ballots: &[Vec<usize>]) -> Outcome {
    let worst: Vec<i64> = (0..m)
        .map(|a| {
            (0..m)
                .filter(|&b| b != a)
                .map(|b| net(ballots, b, a))
                .max()
                .unwrap()
        })
        .collect();
    let (order, ties) = select(m, |a| worst[a]);
    Outcome {
        order,
        ties,
        scores: worst,
        aux: vec![],
    }
}

/// All permutations of `0..m` in lexicographic order.
pub fn permutations(m: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, m: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == m {
            out.push(prefix.clone());
            return;
        }
        for a in 0..m {
            if !prefix.contains(&a) {
                prefix.push(a);
                go(prefix, m, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), m, &mut out);
    out
}

fn reaches(edges: &[(usize, usize)], from: usize, to: usize) -> bool {
    let mut stack = vec![from];
    let mut seen = vec![from];
    while let Some(x) = stack.pop() {
        if x == to {
            return true;
        }
        for &(p, q) in edges {
            if p == x && !seen.contains(&q) {
                seen.push(q);
                stack.push(q);
            }
        }
    }
    false
}

pub fn ranked_pairs(m: usize, ballots: &[Vec<usize>]) -> Outcome {
    let wins = |a: usize, b: usize| ballots.iter().filter(|x| prefers(x, a, b)).count() as i64;
    let mut pending: Vec<(usize, usize)> = Vec::new();
    for a in 0..m {
        for b in 0..m {
            if a != b && net(ballots, a, b) > 0 {
                pending.push((a, b));
            }
        }
    }
    let strength = |&(a, b): &(usize, usize)| (net(ballots, a, b), wins(a, b));
    let all = pending.clone();
    let mut locked = Vec::new();
    let mut skipped = Vec::new();
    while !pending.is_empty() {
        // Strongest pending pair; equal strength goes to the smaller pair.
        let mut best = 0;
        for i in 1..pending.len() {
            let (s, t) = (strength(&pending[i]), strength(&pending[best]));
            if s > t || (s == t && pending[i] < pending[best]) {
                best = i;
            }
        }
        let (a, b) = pending.remove(best);
        if reaches(&locked, b, a) {
            skipped.push((a, b));
        } else {
            locked.push((a, b));
        }
    }
    let consistent: Vec<Vec<usize>> = permutations(m)
        .into_iter()
        .filter(|p| locked.iter().all(|&(a, b)| prefers(p, a, b)))
        .collect();
    let order = consistent[0].clone();
    let mut ties = Vec::new();
    for i in 0..m {
        if consistent
            .iter()
            .any(|p| p[..i] == order[..i] && p[i] != order[i])
        {
            ties.push(i);
        }
    }
    for s in &skipped {
        if all.iter().any(|p| p != s && strength(p) == strength(s)) {
            ties.push(pos(&order, s.0).min(pos(&order, s.1)));
        }
    }
    ties.sort();
    ties.dedup();
    Outcome {
        order,
        ties,
        scores: vec![],
        aux: vec![],
    }
}

pub fn range_voting(m: usize, score_vectors: &[Vec<i64>]) -> Outcome {
    let sums: Vec<i64> = (0..m)
        .map(|a| score_vectors.iter().map(|s| s[a]).sum())
        .collect();
    let (order, ties) = select(m, |a| -sums[a]);
    Outcome {
        order,
        ties,
        scores: sums,
        aux: vec![],
    }
}

/// Alternative beating every other head to head.
pub fn condorcet_winner(m: usize, ballots: &[Vec<usize>]) -> Option<usize> {
    (0..m).find(|&a| (0..m).all(|b| b == a || net(ballots, a, b) > 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle() {
        let b = vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]];
        assert_eq!(ranked_pairs(3, &b).order, vec![0, 1, 2]);
        assert_eq!(ranked_pairs(3, &b).ties, vec![0]);
        assert_eq!(minimax(3, &b).ties, vec![0, 1]);
        assert_eq!(condorcet_winner(3, &b), None);
    }

    #[test]
    fn irv_transfers() {
        let b = vec![
            vec![0, 1, 2],
            vec![0, 1, 2],
            vec![1, 0, 2],
            vec![1, 0, 2],
            vec![2, 1, 0],
        ];
        assert_eq!(irv(3, &b).order, vec![1, 0, 2]);
    }

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(permutations(3)[0], vec![0, 1, 2]);
    }
}
