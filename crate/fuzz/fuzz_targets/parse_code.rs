#![no_main]
use libfuzzer_sys::fuzz_target;
use tmlab::seqcore::AlternationCode;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(code) = AlternationCode::parse(s) else { return };
    let m = code.len();
    assert!(m > 0);
    assert_eq!(code.n_at(m), code.total_length());
    let _ = code.prefix_counters(m);
    let _ = code.filtered_counters(m, 4);
    if let Some(i) = code.locate(code.total_length().saturating_sub(1)) {
        assert!(i < m);
    }
});
