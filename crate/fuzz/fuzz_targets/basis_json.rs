#![no_main]
use cottonlab::io::{basis_to_string, parse_basis};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok((shape, coords, basis)) = parse_basis(s) {
            let again = parse_basis(&basis_to_string(&shape, &coords, &basis)).unwrap();
            assert_eq!(again, (shape, coords, basis));
        }
    }
});
