#![no_main]

use libfuzzer_sys::fuzz_target;
use waring_core::poly::{parse_form, parse_forms};

fuzz_target!(|data: &str| {
    if let Ok(f) = parse_form(data, 128) {
        // emitted text must read back to the same form
        assert_eq!(parse_form(&f.to_string(), 128).unwrap(), f);
    }
    let _ = parse_forms(data, 128);
});
