#![no_main]
use libfuzzer_sys::fuzz_target;
use tmlab::seqcore::{alternation_decode, alternation_encode, AlternationCode, BinaryWord};

// Keeps decoded words small enough for the fuzzer's memory limit.
const MAX_TOTAL: u128 = 1 << 16;

fuzz_target!(|data: &[u8]| {
    if data.is_empty() {
        return;
    }
    let first = data[0] & 1;
    let blocks: Vec<u64> = data[1..].iter().map(|&b| b as u64).collect();
    let Ok(code) = AlternationCode::from_blocks(blocks) else { return };
    if code.is_empty() || code.total_length() > MAX_TOTAL {
        return;
    }
    let w = alternation_decode(&code, first).unwrap();
    assert_eq!(w.len() as u128, code.total_length());
    assert_eq!(alternation_encode(&w).unwrap(), code);
    let bits: Vec<u8> = data.iter().map(|b| b & 1).collect();
    let w = BinaryWord::new(bits).unwrap();
    let back = alternation_decode(&alternation_encode(&w).unwrap(), w.bits()[0]).unwrap();
    assert_eq!(back, w);
});
