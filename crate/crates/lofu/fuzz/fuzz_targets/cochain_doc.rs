#![no_main]
use libfuzzer_sys::fuzz_target;

use std::sync::LazyLock;

use lofu::base::BaseSpaces;
use lofu::cover::{Nerve, DEFAULT_TUPLE_CAP};
use lofu::group::{parse_group_spec, AbelianGroup};

static NERVE: LazyLock<(std::sync::Arc<Nerve>, AbelianGroup)> = LazyLock::new(|| {
    let complex = lofu::complex::fixture("circle").unwrap();
    let base = BaseSpaces::build(&complex, &[3], DEFAULT_TUPLE_CAP).unwrap();
    (base.nerve(1).clone(), parse_group_spec("Z+Z/6").unwrap())
});

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        // reading an untrusted cochain file against a nerve must never
        // panic, and accepted cochains carry canonical coordinates
        let (nerve, group) = &*NERVE;
        if let Ok(c) = lofu::cli::read_cochain(text, nerve, group) {
            for i in 0..c.len() as u32 {
                let v = c.value(i);
                assert!(v[1] >= 0 && v[1] < 6, "torsion coordinate not reduced");
            }
        }
    }
});
