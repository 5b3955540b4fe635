#![no_main]

use dimerchain::config::{PartialConfig, RunConfig};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(partial) = PartialConfig::from_json(data) else { return };
    let Ok(cfg) = partial.resolve() else { return };
    // a resolved config must survive its own serialization
    let again = cfg.to_partial().resolve().expect("round-tripped config resolves");
    assert_eq!(again, RunConfig { figure: None, ..cfg });
});
