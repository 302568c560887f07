//! Configuration, CSV tables and state snapshots.

mod config;
mod snapshot;
mod table;

pub use config::{
    parse_config, FlowConfig, FlowKind, RunConfig, StripChoice, SweepConfig, TimeConfig, TimeStep,
    OUT_DIR_ENV,
};
pub use snapshot::{
    decode_snapshot, encode_snapshot, load_snapshot, save_snapshot, Snapshot, SNAPSHOT_MAGIC,
    SNAPSHOT_VERSION,
};
pub use table::{
    read_sweep, read_timeseries, write_sweep, write_timeseries, SWEEP_HEADER, SWEEP_VERSION,
    TIMESERIES_HEADER, TIMESERIES_VERSION,
};
