#![no_main]

use growthlab::io::{parse_parents_csv, write_parents_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(tree) = parse_parents_csv(text) {
        tree.check_invariants().unwrap();
        let mut out = Vec::new();
        write_parents_csv(&tree, &mut out).unwrap();
        let again = parse_parents_csv(std::str::from_utf8(&out).unwrap()).unwrap();
        assert_eq!(tree, again);
    }
});
