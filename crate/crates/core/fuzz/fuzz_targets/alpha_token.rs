#![no_main]

use growthlab::Alpha;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(a) = text.parse::<Alpha>() {
        let back: Alpha = a.to_string().parse().unwrap();
        assert_eq!(back, a);
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(serde_json::from_str::<Alpha>(&json).unwrap(), a);
    }
});
