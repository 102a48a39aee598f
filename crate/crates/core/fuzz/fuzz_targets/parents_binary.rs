#![no_main]

use growthlab::io::{parse_parents_binary, write_parents_binary};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(tree) = parse_parents_binary(data) {
        tree.check_invariants().unwrap();
        let mut out = Vec::new();
        write_parents_binary(&tree, &mut out).unwrap();
        assert_eq!(out, data);
    }
});
