#![no_main]
use libfuzzer_sys::fuzz_target;
use tmlab::seqcore::{alternation_decode, alternation_encode, BinaryWord};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(w) = BinaryWord::parse(s) else { return };
    assert!(w.bits().iter().all(|&b| b <= 1));
    // The plain rendering parses back to the same word.
    assert_eq!(BinaryWord::parse(&w.to_string()).unwrap(), w);
    if let Some(&first) = w.bits().first() {
        let code = alternation_encode(&w).unwrap();
        assert_eq!(code.total_length(), w.len() as u128);
        assert_eq!(alternation_decode(&code, first).unwrap(), w);
    }
});
