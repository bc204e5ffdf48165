use rand::seq::SliceRandom;
use rand::Rng;

use super::oracle::{DictatorContext, DictatorOracle};
use super::{CollectiveRanking, RuleConfig, RuleError, RuleId, Scores};
use crate::profile::{agent_ids, validate_ballot, Alt, AlternativeSet, Ballot, Profile};
use crate::seed;

/// Adopts the ballot of one agent drawn uniformly from the canonical agent
/// order. The draw depends only on `(cfg.seed, question_id)` and `n`.
pub fn blind_dictatorial(
    profile: &Profile,
    cfg: &RuleConfig,
    question_id: &str,
) -> CollectiveRanking {
    let mut rng = seed::stream(cfg.seed, question_id, "blind-dictator", 0);
    let chosen = &profile.ballots()[rng.gen_range(0..profile.n())];
    CollectiveRanking::new(
        RuleId::BlindDictatorial,
        chosen.ranking.clone(),
        Scores::Dictator(chosen.agent.clone()),
        Vec::new(),
    )
}

/// The dictator reviews the real ensemble ballots before deciding.
pub fn informed_dictatorial(
    profile: &Profile,
    oracle: &dyn DictatorOracle,
    ctx: &DictatorContext<'_>,
) -> Result<CollectiveRanking, RuleError> {
    consult(RuleId::InformedDictatorial, profile, oracle, ctx)
}

/// The dictator is shown `n` uniformly random ballots instead of the real
/// ones.
pub fn misinformed_dictatorial(
    alternatives: &AlternativeSet,
    n: usize,
    oracle: &dyn DictatorOracle,
    ctx: &DictatorContext<'_>,
) -> Result<CollectiveRanking, RuleError> {
    let fake = fabricate_consultation(alternatives, n, ctx.seed, ctx.question_id);
    consult(RuleId::MisinformedDictatorial, &fake, oracle, ctx)
}

/// Seeded stand-in electorate for misinformed consultations.
pub fn fabricate_consultation(
    alternatives: &AlternativeSet,
    n: usize,
    seed: u64,
    question_id: &str,
) -> Profile {
    let ballots = agent_ids(n.max(1), "agent")
        .into_iter()
        .enumerate()
        .map(|(i, agent)| {
            let mut rng = seed::stream(seed, question_id, "misinformed", i as u64);
            let mut ranking: Vec<Alt> = (0..alternatives.len()).collect();
            ranking.shuffle(&mut rng);
            Ballot { agent, ranking }
        })
        .collect();
    Profile::new(alternatives.clone(), ballots).expect("distinct generated agents")
}

fn consult(
    rule: RuleId,
    consultation: &Profile,
    oracle: &dyn DictatorOracle,
    ctx: &DictatorContext<'_>,
) -> Result<CollectiveRanking, RuleError> {
    let raw = oracle.decide(ctx, consultation)?;
    let ballot = validate_ballot("dictator", &raw, ctx.alternatives)
        .map_err(RuleError::OracleBallotInvalid)?;
    Ok(CollectiveRanking::new(
        rule,
        ballot.ranking,
        Scores::Dictator(oracle.name()),
        Vec::new(),
    ))
}
