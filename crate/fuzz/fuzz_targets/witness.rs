#![no_main]

use libfuzzer_sys::fuzz_target;
use votekit::criteria::check_criterion;
use votekit::format::{read_records, witness_from_records, witness_records};

fuzz_target!(|data: &[u8]| {
    let Ok(set) = read_records(data, true) else {
        return;
    };
    let Ok(w) = witness_from_records(&set.records) else {
        return;
    };
    let again = witness_from_records(&witness_records(&w)).expect("written witnesses read back");
    assert_eq!(again, w);
    if w.size() <= 64 {
        let _ = check_criterion(w.rule, w.criterion, &w.instance());
    }
});
