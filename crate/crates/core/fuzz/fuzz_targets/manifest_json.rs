#![no_main]

use dimerchain::output::Manifest;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(manifest) = Manifest::from_json(data) else { return };
    let text = manifest.to_json();
    assert_eq!(Manifest::from_json(text.as_bytes()).expect("own output parses"), manifest);
});
