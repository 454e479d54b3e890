#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        // parsing must never panic; on success the canonical rendering
        // must re-parse to the same group
        if let Ok(g) = lofu::parse_group_spec(text) {
            let again = lofu::parse_group_spec(&g.to_string()).expect("canonical form parses");
            assert_eq!(g, again);
        }
    }
});
