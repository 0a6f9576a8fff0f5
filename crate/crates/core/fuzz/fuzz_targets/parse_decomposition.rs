#![no_main]

use libfuzzer_sys::fuzz_target;
use waring_core::apolarity::parse_decomposition;

fuzz_target!(|data: &str| {
    if let Ok(d) = parse_decomposition(data, 5, 128) {
        assert_eq!(parse_decomposition(&d.to_string(), 5, 128).unwrap(), d);
    }
});
