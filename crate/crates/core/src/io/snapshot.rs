//! Binary state snapshots.
//!
//! Layout, all little-endian:
//! `b"SGFSNAP\n"`, version `u32`, `nx u32`, `ny u32`, `lx f64`, branch `u8`, `alpha f64`,
//! `nu f64`, `t f64`, `m f64`, then the `(nx/2 + 1) x (ny + 1)` coefficients of `q` row by row as
//! `(re, im)` pairs, and finally a 64-bit FNV-1a checksum of everything before it.

use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;

use crate::dynamics::{BranchKind, FlowState, ModelBranch, Recovery};
use crate::error::{Error, Result};
use crate::spectral::{ChannelGrid, SpectralScalarField};

pub const SNAPSHOT_MAGIC: &[u8; 8] = b"SGFSNAP\n";
pub const SNAPSHOT_VERSION: u32 = 1;
const HEADER_LEN: usize = 8 + 4 + 4 + 4 + 8 + 1 + 8 * 4;

/// Decoded snapshot contents.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub branch: ModelBranch,
    pub t: f64,
    pub m: f64,
    pub q: Array2<Complex64>,
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf29ce484222325u64, |h, &b| (h ^ b as u64).wrapping_mul(0x100000001b3))
}

fn kind_code(k: BranchKind) -> u8 {
    match k {
        BranchKind::SecondGrade => 0,
        BranchKind::EulerAlpha => 1,
        BranchKind::NavierStokes => 2,
        BranchKind::Euler => 3,
    }
}

fn kind_of(c: u8) -> Option<BranchKind> {
    Some(match c {
        0 => BranchKind::SecondGrade,
        1 => BranchKind::EulerAlpha,
        2 => BranchKind::NavierStokes,
        3 => BranchKind::Euler,
        _ => return None,
    })
}

pub fn encode_snapshot(state: &FlowState) -> Vec<u8> {
    let g = state.grid();
    let c = state.q.coeffs();
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * c.len() + 8);
    out.extend_from_slice(SNAPSHOT_MAGIC);
    out.extend_from_slice(&SNAPSHOT_VERSION.to_le_bytes());
    out.extend_from_slice(&(g.nx() as u32).to_le_bytes());
    out.extend_from_slice(&(g.ny() as u32).to_le_bytes());
    out.extend_from_slice(&g.lx().to_le_bytes());
    out.push(kind_code(state.branch.kind()));
    for v in [state.branch.alpha(), state.branch.nu(), state.t, state.m] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for z in c.iter() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    let sum = fnv1a(&out);
    out.extend_from_slice(&sum.to_le_bytes());
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl Cursor<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let s = self
            .bytes
            .get(self.at..self.at + N)
            .ok_or_else(|| Error::Format("snapshot truncated".into()))?;
        self.at += N;
        Ok(s.try_into().expect("length checked"))
    }
    fn u32(&mut self) -> Result<u32> {
        self.take::<4>().map(u32::from_le_bytes)
    }
    fn f64(&mut self) -> Result<f64> {
        self.take::<8>().map(f64::from_le_bytes)
    }
}

pub fn decode_snapshot(bytes: &[u8]) -> Result<Snapshot> {
    if bytes.len() < HEADER_LEN + 8 || &bytes[..8] != SNAPSHOT_MAGIC {
        return Err(Error::Format("not a snapshot".into()));
    }
    let mut c = Cursor { bytes, at: 8 };
    let version = c.u32()?;
    if version != SNAPSHOT_VERSION {
        return Err(Error::Format(format!(
            "snapshot version {version}, this build reads {SNAPSHOT_VERSION}"
        )));
    }
    let nx = c.u32()? as usize;
    let ny = c.u32()? as usize;
    let lx = c.f64()?;
    let kind = kind_of(c.take::<1>()?[0]).ok_or_else(|| Error::Format("unknown branch code".into()))?;
    let alpha = c.f64()?;
    let nu = c.f64()?;
    let t = c.f64()?;
    let m = c.f64()?;
    let nk = nx / 2 + 1;
    let payload = nk
        .checked_mul(ny + 1)
        .and_then(|n| n.checked_mul(16))
        .ok_or_else(|| Error::Format("snapshot dimensions overflow".into()))?;
    if bytes.len() != HEADER_LEN + payload + 8 {
        return Err(Error::Format(format!(
            "snapshot holds {} bytes, a {nx} x {ny} grid needs {}",
            bytes.len(),
            HEADER_LEN + payload + 8
        )));
    }
    let body = &bytes[..bytes.len() - 8];
    let stored = u64::from_le_bytes(bytes[bytes.len() - 8..].try_into().expect("8 bytes"));
    if fnv1a(body) != stored {
        return Err(Error::Format("snapshot checksum mismatch".into()));
    }
    ChannelGrid::new(nx, ny, lx).map_err(|e| Error::Format(format!("snapshot grid: {e}")))?;
    let branch = ModelBranch::new(kind, alpha, nu).map_err(|e| Error::Format(format!("snapshot branch: {e}")))?;
    if !t.is_finite() || !m.is_finite() {
        return Err(Error::Format("snapshot time or momentum is not finite".into()));
    }
    let mut q = Array2::zeros((nk, ny + 1));
    for v in q.iter_mut() {
        *v = Complex64::new(c.f64()?, c.f64()?);
    }
    Ok(Snapshot {
        nx,
        ny,
        lx,
        branch,
        t,
        m,
        q,
    })
}

impl Snapshot {
    /// Rebuilds the state on a recovery of the same grid and branch.
    pub fn state(&self, recovery: &Recovery) -> Result<FlowState> {
        let g = recovery.grid();
        if (g.nx(), g.ny(), g.lx()) != (self.nx, self.ny, self.lx) {
            return Err(Error::GridMismatch(format!(
                "snapshot is {} x {} (lx {}), run is {} x {} (lx {})",
                self.nx,
                self.ny,
                self.lx,
                g.nx(),
                g.ny(),
                g.lx()
            )));
        }
        if recovery.branch() != self.branch {
            return Err(Error::WrongBranch(format!(
                "snapshot is {}, run is {}",
                self.branch.kind(),
                recovery.branch().kind()
            )));
        }
        let q = SpectralScalarField::from_coeffs(g, self.q.clone())?;
        recovery.state(q, self.m, self.t)
    }
}

pub fn save_snapshot(state: &FlowState, path: &Path) -> Result<()> {
    std::fs::write(path, encode_snapshot(state))?;
    Ok(())
}

pub fn load_snapshot(path: &Path) -> Result<Snapshot> {
    decode_snapshot(&std::fs::read(path)?)
}
