use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use votekit::rules::{borda, bucklin, irv, minimax, plurality, range_voting, ranked_pairs};
use votekit::{AlternativeSet, CollectiveRanking, Profile, ScoreRange, ScoredProfile, Scores};
use votekit_testkit as oracle;

fn comparable(out: &CollectiveRanking) -> oracle::Outcome {
    let (scores, aux) = match &out.scores {
        Scores::Totals(v) => (v.clone(), vec![]),
        Scores::EliminationRound(v) => (v.iter().map(|&r| r as i64).collect(), vec![]),
        Scores::Bucklin(v) => (
            v.iter().map(|&(r, _)| r as i64).collect(),
            v.iter().map(|&(_, c)| c as i64).collect(),
        ),
        _ => (vec![], vec![]),
    };
    oracle::Outcome {
        order: out.order.clone(),
        ties: out.ties.clone(),
        scores,
        aux,
    }
}

fn check_ordinal(m: usize, rankings: Vec<Vec<usize>>) {
    let p = Profile::from_rankings(AlternativeSet::lettered(m).unwrap(), rankings.clone()).unwrap();
    let pairs = [
        (
            comparable(&plurality(&p)),
            oracle::plurality(m, &rankings),
            "plurality",
        ),
        (comparable(&borda(&p)), oracle::borda(m, &rankings), "borda"),
        (
            comparable(&bucklin(&p)),
            oracle::bucklin(m, &rankings),
            "bucklin",
        ),
        (comparable(&irv(&p)), oracle::irv(m, &rankings), "irv"),
        (
            comparable(&minimax(&p)),
            oracle::minimax(m, &rankings),
            "minimax",
        ),
        (
            comparable(&ranked_pairs(&p)),
            oracle::ranked_pairs(m, &rankings),
            "ranked_pairs",
        ),
    ];
    for (got, want, rule) in pairs {
        assert_eq!(got, want, "{rule} on {rankings:?}");
    }
}

#[test]
fn random_profiles_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for m in [3, 4, 5] {
        for n in 1..=12 {
            for _ in 0..200 {
                let rankings = (0..n)
                    .map(|_| {
                        let mut r: Vec<usize> = (0..m).collect();
                        r.shuffle(&mut rng);
                        r
                    })
                    .collect();
                check_ordinal(m, rankings);
            }
        }
    }
}

/// Every ordered ballot tuple for three alternatives and up to four voters.
#[test]
fn exhaustive_small_profiles_agree() {
    let perms = oracle::permutations(3);
    for n in 1..=4u32 {
        for code in 0..6usize.pow(n) {
            let mut c = code;
            let rankings = (0..n)
                .map(|_| {
                    let r = perms[c % 6].clone();
                    c /= 6;
                    r
                })
                .collect();
            check_ordinal(3, rankings);
        }
    }
}

#[test]
fn range_voting_agrees() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for (range, m) in [
        (ScoreRange::new(0, 2).unwrap(), 3),
        (ScoreRange::default(), 4),
    ] {
        for n in 1..=10 {
            for _ in 0..300 {
                let vectors: Vec<Vec<i64>> = (0..n)
                    .map(|_| {
                        (0..m)
                            .map(|_| rng.gen_range(range.min..=range.max))
                            .collect()
                    })
                    .collect();
                let sp = ScoredProfile::from_score_vectors(
                    AlternativeSet::lettered(m).unwrap(),
                    range,
                    vectors.clone(),
                )
                .unwrap();
                assert_eq!(
                    comparable(&range_voting(&sp)),
                    oracle::range_voting(m, &vectors)
                );
            }
        }
    }
}
