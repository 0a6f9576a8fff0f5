#![no_main]

use libfuzzer_sys::fuzz_target;
use waring_core::Scalar;

fuzz_target!(|data: &str| {
    if data.len() > 256 {
        return;
    }
    if let Ok(x) = Scalar::parse(data, 128) {
        assert_eq!(Scalar::parse(&x.to_string(), 128).unwrap(), x);
    }
});
