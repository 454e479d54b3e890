#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        // document validation must never panic; accepted complexes must
        // be face-closed with every vertex present
        if let Ok(c) = lofu::complex::SimplicialComplex::parse_json("fuzz", text) {
            for v in 0..c.vertex_count() as u8 {
                assert!(c.spans([v]));
            }
            for s in c.all_simplices() {
                for (i, _) in s.iter().enumerate() {
                    let mut face = s.clone();
                    face.remove(i);
                    if !face.is_empty() {
                        assert!(c.spans(face.iter().copied()));
                    }
                }
            }
        }
    }
});
