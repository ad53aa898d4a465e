#![no_main]

use conewit::text::{parse_cone, parse_map};
use libfuzzer_sys::fuzz_target;

// Input is a cone on the first line followed by the text under test.
fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let (head, body) = src.split_once('\n').unwrap_or((src, ""));
    if let Ok(cone) = parse_cone(head) {
        let _ = parse_map(body, &cone);
    }
});
