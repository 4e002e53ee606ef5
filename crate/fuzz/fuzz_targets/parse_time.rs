#![no_main]

use libfuzzer_sys::fuzz_target;
use looptrace::ingest::{detect_time_format, parse_time};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Some(t) = parse_time(s, detect_time_format(s)) {
        assert!(t.is_finite());
    }
});
