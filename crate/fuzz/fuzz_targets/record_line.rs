#![no_main]

use libfuzzer_sys::fuzz_target;
use votekit::format::parse_record_line;
use votekit::{run_rule, RuleConfig, RuleId, RuleInput, ScoreRange};

fuzz_target!(|line: &str| {
    let Ok(Some(record)) = parse_record_line(line) else {
        return;
    };
    let _ = record.gold_index();
    if let Ok(p) = record.ordinal_profile(None) {
        if p.m() <= 8 {
            for rule in RuleId::DETERMINISTIC {
                let _ = run_rule(
                    rule,
                    &RuleInput::ordinal(&record.id, &p),
                    &RuleConfig::default(),
                );
            }
        }
    }
    let _ = record.scored_profile(ScoreRange::default(), None);
    let _ = record.scored_ballots(ScoreRange::default());
    assert!(parse_record_line(&record.to_line()).is_ok());
});
