//! Versioned CSV tables. Floats are written in shortest round-trip form, so
//! re-serializing a parsed table reproduces it byte for byte.

use std::io::{Read, Write};

use csv::{ReaderBuilder, Terminator, WriterBuilder};

use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::experiments::{InitialDataTerms, RegimeRegion, SweepRow};

pub const TIMESERIES_VERSION: &str = "# sgfluid timeseries v1";
pub const TIMESERIES_HEADER: [&str; 7] = [
    "t",
    "energy_alpha",
    "grad_sq",
    "q_norm_sq",
    "cum_dissipation",
    "strip_dissipation",
    "err_vs_ref_l2",
];

pub const SWEEP_VERSION: &str = "# sgfluid sweep v1";
pub const SWEEP_HEADER: [&str; 12] = [
    "alpha",
    "nu",
    "region",
    "delta_used",
    "sup_err",
    "kato_value",
    "ic_l2_gap",
    "ic_grad_term",
    "ic_h3_term",
    "final_energy_gap",
    "sup_alpha_grad",
    "status",
];

const OK: &str = "ok";

fn num(v: f64) -> String {
    format!("{v:?}")
}

fn csv_err(e: csv::Error) -> Error {
    match e.kind() {
        csv::ErrorKind::Io(_) => Error::Io(e.to_string()),
        _ => Error::Format(e.to_string()),
    }
}

fn write_table<W: Write>(sink: W, version: &str, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut sink = sink;
    writeln!(sink, "{version}")?;
    let mut w = WriterBuilder::new().terminator(Terminator::Any(b'\n')).from_writer(sink);
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(&r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn read_table<R: Read>(mut source: R, version: &str, header: &[&str]) -> Result<Vec<csv::StringRecord>> {
    let mut text = String::new();
    source
        .read_to_string(&mut text)
        .map_err(|e| Error::Format(format!("not UTF-8 text: {e}")))?;
    let (first, rest) = text.split_once('\n').unwrap_or((&text, ""));
    if first != version {
        return Err(Error::Format(format!("expected {version:?}, found {first:?}")));
    }
    let mut r = ReaderBuilder::new().has_headers(true).from_reader(rest.as_bytes());
    let found = r.headers().map_err(csv_err)?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::Format(format!("unexpected columns {:?}", found.iter().collect::<Vec<_>>())));
    }
    r.records().map(|x| x.map_err(csv_err)).collect()
}

fn parse_f64(rec: &csv::StringRecord, i: usize, name: &str) -> Result<f64> {
    let s = rec.get(i).unwrap_or("");
    s.parse::<f64>()
        .map_err(|_| Error::Format(format!("{name}: {s:?} is not a number")))
}

pub fn write_timeseries<W: Write>(records: &[DiagnosticsRecord], sink: W) -> Result<()> {
    let rows = records.iter().map(|r| {
        vec![
            num(r.t),
            num(r.energy_alpha),
            num(r.grad_sq),
            num(r.q_norm_sq),
            num(r.cum_dissipation),
            num(r.strip_dissipation),
            r.err_vs_ref_l2.map(num).unwrap_or_default(),
        ]
    });
    write_table(sink, TIMESERIES_VERSION, &TIMESERIES_HEADER, rows)
}

pub fn read_timeseries<R: Read>(source: R) -> Result<Vec<DiagnosticsRecord>> {
    read_table(source, TIMESERIES_VERSION, &TIMESERIES_HEADER)?
        .iter()
        .map(|rec| {
            let f = |i| parse_f64(rec, i, TIMESERIES_HEADER[i]);
            let err = match rec.get(6).unwrap_or("") {
                "" => None,
                _ => Some(f(6)?),
            };
            Ok(DiagnosticsRecord {
                t: f(0)?,
                energy_alpha: f(1)?,
                grad_sq: f(2)?,
                q_norm_sq: f(3)?,
                cum_dissipation: f(4)?,
                strip_dissipation: f(5)?,
                err_vs_ref_l2: err,
            })
        })
        .collect()
}

pub fn write_sweep<W: Write>(rows: &[SweepRow], sink: W) -> Result<()> {
    let rows = rows.iter().map(|r| {
        vec![
            num(r.alpha),
            num(r.nu),
            r.region.map(|g| g.label().to_string()).unwrap_or_default(),
            num(r.delta_used),
            num(r.sup_err),
            num(r.kato_value),
            num(r.ic.l2_gap),
            num(r.ic.grad_term),
            num(r.ic.h3_term),
            num(r.final_energy_gap),
            num(r.sup_alpha_grad),
            r.failure.clone().unwrap_or_else(|| OK.to_string()),
        ]
    });
    write_table(sink, SWEEP_VERSION, &SWEEP_HEADER, rows)
}

pub fn read_sweep<R: Read>(source: R) -> Result<Vec<SweepRow>> {
    read_table(source, SWEEP_VERSION, &SWEEP_HEADER)?
        .iter()
        .map(|rec| {
            let f = |i| parse_f64(rec, i, SWEEP_HEADER[i]);
            let region = match rec.get(2).unwrap_or("") {
                "" => None,
                s => Some(RegimeRegion::from_label(s).ok_or_else(|| Error::Format(format!("unknown region {s:?}")))?),
            };
            let failure = match rec.get(11).unwrap_or("") {
                OK => None,
                s => Some(s.to_string()),
            };
            Ok(SweepRow {
                alpha: f(0)?,
                nu: f(1)?,
                region,
                delta_used: f(3)?,
                sup_err: f(4)?,
                kato_value: f(5)?,
                ic: InitialDataTerms {
                    l2_gap: f(6)?,
                    grad_term: f(7)?,
                    h3_term: f(8)?,
                },
                final_energy_gap: f(9)?,
                sup_alpha_grad: f(10)?,
                failure,
            })
        })
        .collect()
}
