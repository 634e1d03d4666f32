#![no_main]
use cottonlab::io::{field_to_string, parse_field};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(f) = parse_field(s) {
            assert_eq!(parse_field(&field_to_string(&f)).unwrap(), f);
        }
    }
});
