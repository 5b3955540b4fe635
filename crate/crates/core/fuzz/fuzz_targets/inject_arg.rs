#![no_main]

use dimerchain::config::InjectTarget;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(target) = s.parse::<InjectTarget>() else { return };
    let json = serde_json::to_string(&target).unwrap();
    assert_eq!(serde_json::from_str::<InjectTarget>(&json).unwrap(), target);
});
