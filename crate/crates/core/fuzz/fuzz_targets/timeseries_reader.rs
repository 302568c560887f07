#![no_main]

use libfuzzer_sys::fuzz_target;
use sgfluid::io::{read_timeseries, write_timeseries};

fuzz_target!(|data: &[u8]| {
    if let Ok(rows) = read_timeseries(data) {
        let mut out = Vec::new();
        write_timeseries(&rows, &mut out).unwrap();
        assert_eq!(read_timeseries(&out[..]).unwrap().len(), rows.len());
    }
});
