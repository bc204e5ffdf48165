#![no_main]

use libfuzzer_sys::fuzz_target;
use votekit::format::{parse_replay_line, read_replay};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        for line in text.lines() {
            let _ = parse_replay_line(line);
        }
    }
    let _ = read_replay(data);
});
