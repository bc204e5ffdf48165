//! Preferential voting rules, voting-criteria counterexample search,
//! synthetic electorates and an accuracy harness for ensembles of agents
//! answering multiple-choice questions.

pub mod criteria;
pub mod eval;
pub mod format;
pub mod profile;
pub mod rules;
pub mod seed;
pub mod synth;
pub mod tally;

pub use profile::{
    build_profile, build_scored_profile, validate_ballot, validate_scores, Alt, AlternativeSet,
    Ballot, Profile, ProfileError, ScoreRange, ScoredBallot, ScoredProfile,
};
pub use rules::{run_rule, CollectiveRanking, RuleConfig, RuleError, RuleId, RuleInput, Scores};
pub use tally::{pairwise_tally, PairwiseTally};
