use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use votekit::rules::{borda, bucklin, irv, minimax, plurality, range_voting, ranked_pairs};
use votekit::{AlternativeSet, CollectiveRanking, Profile, ScoreRange, ScoredProfile, Scores};
use votekit_testkit as reference;

use crate::Verdict;

const PER_CELL: usize = 1000;

fn comparable(out: &CollectiveRanking) -> reference::Outcome {
    let (scores, aux) = match &out.scores {
        Scores::Totals(v) => (v.clone(), vec![]),
        Scores::EliminationRound(v) => (v.iter().map(|&r| r as i64).collect(), vec![]),
        Scores::Bucklin(v) => (
            v.iter().map(|&(r, _)| r as i64).collect(),
            v.iter().map(|&(_, c)| c as i64).collect(),
        ),
        _ => (vec![], vec![]),
    };
    reference::Outcome {
        order: out.order.clone(),
        ties: out.ties.clone(),
        scores,
        aux,
    }
}

type Ordinal = (
    &'static str,
    fn(&Profile) -> CollectiveRanking,
    fn(usize, &[Vec<usize>]) -> reference::Outcome,
);

const ORDINAL: [Ordinal; 6] = [
    ("plurality", |p| plurality(p), reference::plurality),
    ("bucklin", |p| bucklin(p), reference::bucklin),
    ("borda", |p| borda(p), reference::borda),
    ("irv", |p| irv(p), reference::irv),
    ("minimax", |p| minimax(p), reference::minimax),
    ("ranked_pairs", |p| ranked_pairs(p), reference::ranked_pairs),
];

/// Criterion 1.
pub fn equivalence() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0AC1E);
    let range = ScoreRange::default();
    let mut compared = 0usize;
    let mut mismatches = Vec::new();
    for m in [3, 4] {
        let alts = AlternativeSet::lettered(m).unwrap();
        for n in 1..=10 {
            for _ in 0..PER_CELL {
                let rankings: Vec<Vec<usize>> = (0..n)
                    .map(|_| {
                        let mut r: Vec<usize> = (0..m).collect();
                        r.shuffle(&mut rng);
                        r
                    })
                    .collect();
                let p = Profile::from_rankings(alts.clone(), rankings.clone()).unwrap();
                for (name, rule, oracle) in ORDINAL {
                    compared += 1;
                    if comparable(&rule(&p)) != oracle(m, &rankings) {
                        mismatches.push(format!("{name} m={m} {rankings:?}"));
                    }
                }
                let vectors: Vec<Vec<i64>> = (0..n)
                    .map(|_| {
                        (0..m)
                            .map(|_| rng.gen_range(range.min..=range.max))
                            .collect()
                    })
                    .collect();
                let sp = ScoredProfile::from_score_vectors(alts.clone(), range, vectors.clone())
                    .unwrap();
                compared += 1;
                if comparable(&range_voting(&sp)) != reference::range_voting(m, &vectors) {
                    mismatches.push(format!("range_voting m={m} {vectors:?}"));
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = mismatches.is_empty() && secs < 120.0;
    let mut detail = format!(
        "{compared} rule runs over 2x10 (m,n) cells x {PER_CELL} profiles, {} disagreements, {secs:.1}s of 120s",
        mismatches.len()
    );
    if let Some(first) = mismatches.first() {
        detail.push_str(&format!("; first: {first}"));
    }
    Verdict::new(pass, detail)
}
