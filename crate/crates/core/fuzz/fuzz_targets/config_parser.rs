#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = sgfluid::io::parse_config(text) {
            // a validated config must also yield its grid
            cfg.grid().expect("validated grid");
        }
    }
});
