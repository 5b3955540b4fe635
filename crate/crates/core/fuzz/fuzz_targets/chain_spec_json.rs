#![no_main]

use dimerchain::{build_hamiltonian, ChainSpec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(spec) = serde_json::from_slice::<ChainSpec>(data) else { return };
    // deserialization validates, so every accepted spec must build
    spec.validate().expect("deserialized spec is valid");
    if spec.n_sites <= 4097 {
        let h = build_hamiltonian(&spec, None).expect("valid spec builds");
        assert_eq!(h.dim(), spec.n_sites);
        assert!(h.is_mirror_symmetric(0.0));
    }
    let text = serde_json::to_string(&spec).unwrap();
    assert_eq!(serde_json::from_str::<ChainSpec>(&text).unwrap(), spec);
});
