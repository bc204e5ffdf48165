use std::fs::{self, File};
use std::io::BufReader;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use votekit::criteria::{
    check_criterion, compliance_matrix, condorcet_winner, expected_compliance, Criterion, Election,
    Instance, Witness,
};
use votekit::format::{read_records, witness_from_records, witness_records};
use votekit::{pairwise_tally, run_rule, AlternativeSet, Profile, RuleConfig, RuleId, RuleInput};

use crate::{fixture, Verdict};

fn load(name: &str) -> Result<Witness, String> {
    let file = File::open(fixture(name)).map_err(|e| format!("{name}: {e}"))?;
    let set = read_records(BufReader::new(file), true).map_err(|e| format!("{name}: {e}"))?;
    witness_from_records(&set.records).map_err(|e| format!("{name}: {e}"))
}

fn replays(w: &Witness) -> bool {
    check_criterion(w.rule, w.criterion, &w.instance()).is_ok_and(|v| v.is_violation())
}

/// Criterion 2.
pub fn table_one() -> Verdict {
    let start = Instant::now();
    let matrix = match compliance_matrix(&RuleId::DETERMINISTIC, &Criterion::ALL, 3, 7) {
        Ok(m) => m,
        Err(e) => return Verdict::new(false, e.to_string()),
    };
    let secs = start.elapsed().as_secs_f64();
    let mut problems = Vec::new();
    let (mut crosses, mut checks) = (0, 0);
    for cell in &matrix.cells {
        let Some(ok) = expected_compliance(cell.rule, cell.criterion) else {
            continue;
        };
        match (&cell.witness, ok) {
            (Some(w), false) if w.size() <= 7 => crosses += 1,
            (None, true) => checks += 1,
            (found, _) => problems.push(format!(
                "{} {}: {}",
                cell.rule,
                cell.criterion,
                if found.is_some() {
                    "unexpected witness"
                } else {
                    "no witness"
                }
            )),
        }
    }
    let mut frozen = 0;
    for cell in &matrix.cells {
        let Some(fresh) = &cell.witness else { continue };
        let name = format!("witnesses/{}-{}.jsonl", cell.rule, cell.criterion);
        let stored = fs::read_to_string(fixture(&name)).unwrap_or_default();
        let fresh_lines: Vec<String> = witness_records(fresh).iter().map(|r| r.to_line()).collect();
        let stored_lines: Vec<&str> = stored.lines().skip(1).collect();
        if fresh_lines != stored_lines {
            problems.push(format!("{name} differs from the search"));
            continue;
        }
        match load(&name) {
            Ok(w) if w == *fresh && replays(&w) => frozen += 1,
            Ok(_) => problems.push(format!("{name} does not replay")),
            Err(e) => problems.push(e),
        }
    }
    let pass = problems.is_empty() && crosses == 13 && checks == 12 && secs < 600.0;
    Verdict::new(
        pass,
        format!(
            "{crosses}/13 x cells witnessed at m=3 n_max=7, {checks}/12 ok cells clean, {frozen} frozen witnesses replay, search {secs:.1}s of 600s{}",
            if problems.is_empty() { String::new() } else { format!("; {}", problems.join("; ")) }
        ),
    )
}

/// Criterion 3.
pub fn counterexample_fixtures() -> Verdict {
    let mut notes = Vec::new();
    let mut ok = 0;
    let mut check = |label: &str, result: Result<bool, String>| match result {
        Ok(true) => ok += 1,
        Ok(false) => notes.push(format!("{label} failed")),
        Err(e) => notes.push(e),
    };

    check(
        "alternative introduced",
        load("counterexamples/plurality-iia.jsonl").map(|w| {
            let added = matches!((&w.base, &w.perturbed),
                (Election::Ordinal(a), Some(Election::Ordinal(b))) if a.m() == b.m() + 1);
            (w.rule, w.criterion) == (RuleId::Plurality, Criterion::Iia) && added && replays(&w)
        }),
    );
    check(
        "plurality-condorcet",
        load("counterexamples/plurality-condorcet.jsonl").map(|w| {
            let Election::Ordinal(p) = &w.base else {
                return false;
            };
            let cw = condorcet_winner(&pairwise_tally(p));
            cw.is_some()
                && cw != Some(votekit::rules::plurality(p).winner())
                && (w.rule, w.criterion) == (RuleId::Plurality, Criterion::Condorcet)
                && replays(&w)
        }),
    );
    check(
        "IRV raise",
        load("counterexamples/irv-monotonicity.jsonl").map(|w| {
            let (Election::Ordinal(a), Some(Election::Ordinal(b))) = (&w.base, &w.perturbed) else {
                return false;
            };
            let raised = a
                .ballots()
                .iter()
                .zip(b.ballots())
                .filter(|(x, y)| x != y)
                .count();
            (w.rule, w.criterion) == (RuleId::Irv, Criterion::Monotonicity)
                && raised == 2
                && replays(&w)
        }),
    );
    check(
        "score-sums",
        load("counterexamples/range-majority.jsonl").map(|w| {
            let Election::Scored(sp) = &w.base else {
                return false;
            };
            let winner = votekit::rules::range_voting(sp).winner();
            let others_first = sp
                .ballots()
                .iter()
                .filter(|b| b.preference_order()[0] != winner)
                .count();
            let favorite_firsts = sp
                .ballots()
                .iter()
                .filter(|b| b.preference_order()[0] == sp.ballots()[0].preference_order()[0])
                .count();
            let condorcet = check_criterion(
                RuleId::RangeVoting,
                Criterion::Condorcet,
                &Instance {
                    base: w.base.clone(),
                    perturbed: None,
                },
            )
            .is_ok_and(|v| v.is_violation());
            sp.n() == 12 && others_first == 10 && favorite_firsts == 10 && condorcet && replays(&w)
        }),
    );
    Verdict::new(
        notes.is_empty(),
        format!(
            "{ok}/4 committed counterexamples verified by check_criterion (IIA on introduction, plurality vs Condorcet, IRV raise on 2 ballots, 10 of 12 first places lose on score sums){}",
            if notes.is_empty() { String::new() } else { format!("; {}", notes.join("; ")) }
        ),
    )
}

/// Criterion 4.
pub fn condorcet_consistency() -> Verdict {
    const WANT: usize = 5000;
    let alts = AlternativeSet::lettered(4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let rules = [
        RuleId::RankedPairs,
        RuleId::Minimax,
        RuleId::Bucklin,
        RuleId::Plurality,
        RuleId::Borda,
    ];
    let mut agree = [0usize; 5];
    let (mut found, mut drawn) = (0, 0);
    while found < WANT {
        drawn += 1;
        let rankings = (0..10)
            .map(|_| {
                let mut r: Vec<usize> = (0..4).collect();
                r.shuffle(&mut rng);
                r
            })
            .collect();
        let p = Profile::from_rankings(alts.clone(), rankings).unwrap();
        let Some(cw) = condorcet_winner(&pairwise_tally(&p)) else {
            continue;
        };
        found += 1;
        for (i, &rule) in rules.iter().enumerate() {
            let out = run_rule(rule, &RuleInput::ordinal("q", &p), &RuleConfig::default()).unwrap();
            agree[i] += usize::from(out.winner() == cw);
        }
    }
    let pct = |i: usize| 100.0 * agree[i] as f64 / WANT as f64;
    let pass = agree[0] == WANT && agree[1] == WANT && agree[2..].iter().all(|&a| a < WANT);
    let detail = rules
        .iter()
        .enumerate()
        .map(|(i, r)| format!("{r} {:.2}%", pct(i)))
        .collect::<Vec<_>>()
        .join(", ");
    Verdict::new(
        pass,
        format!("{WANT} profiles with a Condorcet winner (of {drawn} drawn, m=4 n=10): {detail}"),
    )
}
