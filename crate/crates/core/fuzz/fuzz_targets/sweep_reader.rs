#![no_main]

use libfuzzer_sys::fuzz_target;
use sgfluid::io::{read_sweep, write_sweep};

fuzz_target!(|data: &[u8]| {
    if let Ok(rows) = read_sweep(data) {
        let mut out = Vec::new();
        write_sweep(&rows, &mut out).unwrap();
        assert_eq!(read_sweep(&out[..]).unwrap().len(), rows.len());
    }
});
