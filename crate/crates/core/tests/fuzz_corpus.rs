//! Replays the checked-in fuzz seeds through the same round-trip checks as
//! the fuzz targets, so they run on stable.

use std::fs;
use std::path::PathBuf;

use waring_core::apolarity::parse_decomposition;
use waring_core::poly::{parse_form, parse_forms};
use waring_core::Scalar;

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds in {}", dir.display());
    out
}

#[test]
fn form_seeds() {
    let mut parsed = 0;
    for (name, text) in seeds("parse_form") {
        if let Ok(f) = parse_form(&text, 128) {
            assert_eq!(parse_form(&f.to_string(), 128).unwrap(), f, "{name}");
            parsed += 1;
        }
        let _ = parse_forms(&text, 128);
    }
    assert!(parsed >= 3);
    assert!(parse_form(&fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus/parse_form/bad_sum")).unwrap(), 128).is_err());
}

#[test]
fn decomposition_seeds() {
    let mut parsed = 0;
    for (name, text) in seeds("parse_decomposition") {
        if let Ok(d) = parse_decomposition(&text, 5, 128) {
            assert_eq!(parse_decomposition(&d.to_string(), 5, 128).unwrap(), d, "{name}");
            parsed += 1;
        }
    }
    assert!(parsed >= 3);
}

#[test]
fn scalar_seeds() {
    let mut parsed = 0;
    for (name, text) in seeds("parse_scalar") {
        if let Ok(x) = Scalar::parse(&text, 128) {
            assert_eq!(Scalar::parse(&x.to_string(), 128).unwrap(), x, "{name}");
            parsed += 1;
        }
    }
    assert!(parsed >= 5);
}
