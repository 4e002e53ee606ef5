#![no_main]

use libfuzzer_sys::fuzz_target;
use looptrace::io::{parse_features, write_features};

fuzz_target!(|data: &[u8]| {
    if let Ok(records) = parse_features(data) {
        let mut out = Vec::new();
        write_features(&records, &mut out).unwrap();
        assert_eq!(parse_features(out.as_slice()).unwrap(), records);
    }
});
