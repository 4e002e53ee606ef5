#![no_main]

use libfuzzer_sys::fuzz_target;
use looptrace::io::{parse_labels, write_labels};

fuzz_target!(|data: &[u8]| {
    if let Ok(rows) = parse_labels(data) {
        let mut out = Vec::new();
        write_labels(&rows, &mut out).unwrap();
        assert_eq!(parse_labels(out.as_slice()).unwrap(), rows);
    }
});
