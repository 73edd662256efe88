#![no_main]

use libfuzzer_sys::fuzz_target;

// The config parser must reject arbitrary input with an `Err`, never a
// panic, and anything it does accept must satisfy the invariants the rest
// of the code relies on (a non-empty, strictly increasing compression grid).
fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    match ote_otto::cli::parse_config(&text) {
        Ok(cfg) => {
            assert!(!cfg.cycle.ks.is_empty());
            assert!(cfg.cycle.ks.windows(2).all(|w| w[0] < w[1]));
        }
        Err(e) => {
            // error rendering must not panic either
            let _ = e.to_string();
        }
    }
});
