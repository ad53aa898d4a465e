#![no_main]

use conewit::text::parse_cone;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(src) = std::str::from_utf8(data) {
        if let Ok(cone) = parse_cone(src) {
            // Whatever parses must print back to the same cone.
            assert_eq!(parse_cone(&cone.to_string()).unwrap(), cone);
        }
    }
});
