#![no_main]
use cottonlab::exact::{coords, parse_poly};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let v = coords(&["t", "x1", "x2", "x3"]);
        if let Ok(p) = parse_poly(s, &v) {
            assert_eq!(parse_poly(&p.to_string(), &v).unwrap(), p);
        }
    }
});
