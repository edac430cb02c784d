use losim_core::verify::{gen_closed_term, GenConfig};

const GOLDEN: &str = "tests/golden/gen_seeds_42_to_51.txt";

/// Terms for seeds 42..52 at the default size bound. `LOSIM_BLESS=1`
/// rewrites the file.
#[test]
fn generator_seeds_42_to_51() {
    let got: String = (42..52).map(|s| format!("{}\n", gen_closed_term(&GenConfig::new(s)))).collect();
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join(GOLDEN);
    if std::env::var_os("LOSIM_BLESS").is_some() {
        std::fs::write(&path, &got).unwrap();
    }
    assert_eq!(got, std::fs::read_to_string(&path).unwrap());
}
