#![no_main]
use libfuzzer_sys::fuzz_target;
use tmlab::descriptor::Descriptor;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(d) = Descriptor::from_json(s) else { return };
    let again = Descriptor::from_json(&d.to_json()).expect("serialized descriptors parse");
    assert_eq!(again.point, d.point);
});
