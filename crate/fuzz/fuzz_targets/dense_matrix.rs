#![no_main]

use libfuzzer_sys::fuzz_target;
use looptrace::homology::{compute_persistence, naive_reduce, NAIVE_MAX_POINTS};
use looptrace::metric::{enclosing_radius, parse_dense_table, quasi_symmetrize};

fuzz_target!(|data: &[u8]| {
    let Ok(table) = parse_dense_table(data, b',') else { return };
    let Ok(m) = quasi_symmetrize(&table) else { return };
    if m.len() <= NAIVE_MAX_POINTS {
        let cap = enclosing_radius(&m);
        assert_eq!(compute_persistence(&m, cap).pairs, naive_reduce(&m, cap).unwrap().pairs);
    }
});
