#![no_main]

use growthlab::io::{parse_histogram_csv, write_histogram_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(hist) = parse_histogram_csv(text) {
        let mut out = Vec::new();
        write_histogram_csv(&hist, &mut out).unwrap();
        let again = parse_histogram_csv(std::str::from_utf8(&out).unwrap()).unwrap();
        assert_eq!(hist, again);
    }
});
