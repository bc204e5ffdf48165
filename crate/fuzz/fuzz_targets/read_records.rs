#![no_main]

use libfuzzer_sys::fuzz_target;
use votekit::eval::{filter_valid, Dataset, FilterOptions};
use votekit::format::read_records;

fuzz_target!(|data: &[u8]| {
    let Ok(set) = read_records(data, false) else {
        return;
    };
    let ds = Dataset::new(set.records, None, set.errors.len());
    for partial_scores in [false, true] {
        let opts = FilterOptions {
            partial_scores,
            ..Default::default()
        };
        let (valid, stats) = filter_valid(&ds, &opts);
        assert_eq!(stats.questions, ds.records.len());
        assert!(valid.items.len() <= ds.records.len());
    }
});
