//! TOML run configuration: parsed strictly, validated before any solver state exists.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::diagnostics::{strip_width, StripRule, MIN_STRIP_NODES};
use crate::dynamics::{cfl_number, BranchKind, ModelBranch, StepControl};
use crate::error::{Error, Result};
use crate::experiments::{classify_regime, nodes_within, suitable_family, BaseFlow, RegimeRegion, SweepPlan};
use crate::fields::{random_wall_stream, velocity_from_stream, StripSpec, VelocityField};
use crate::spectral::ChannelGrid;

/// Environment variable that overrides `[output] dir`.
pub const OUT_DIR_ENV: &str = "SGFLUID_OUT_DIR";

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    #[serde(default)]
    model: RawModel,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    time: RawTime,
    #[serde(default)]
    flow: RawFlow,
    strip: Option<RawStrip>,
    #[serde(default)]
    output: RawOutput,
    sweep: Option<RawSweep>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    branch: Option<String>,
    alpha: Option<f64>,
    nu: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    nx: Option<usize>,
    ny: Option<usize>,
    lx: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTime {
    dt: Option<f64>,
    cfl: Option<f64>,
    t_end: Option<f64>,
    record_every: Option<usize>,
    cfl_target: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFlow {
    name: Option<String>,
    amplitude: Option<f64>,
    collar: Option<f64>,
    kmax: Option<usize>,
    degree: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStrip {
    rule: String,
    coeff: Option<f64>,
    width: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
    snapshot: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    beta: f64,
    coeff: Option<f64>,
    alphas: Option<Vec<f64>>,
    nus: Option<Vec<f64>>,
    nx: Option<usize>,
    min_ny: Option<usize>,
    reference_nx: Option<usize>,
    reference_ny: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TimeStep {
    Fixed(f64),
    /// step chosen from the initial velocity to hit this Courant number
    Cfl(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeConfig {
    pub step: TimeStep,
    pub t_end: f64,
    pub record_every: usize,
    pub cfl_target: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FlowKind {
    Base(BaseFlow),
    /// seeded smooth no-slip flow with peak speed `amplitude`
    Random { amplitude: f64, kmax: usize, degree: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowConfig {
    pub kind: FlowKind,
    /// width of the wall collar that makes a base flow no-slip
    pub collar: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StripChoice {
    Rule { rule: StripRule, coeff: f64 },
    Fixed(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub beta: f64,
    pub coeff: f64,
    pub alphas: Vec<f64>,
    pub nx: usize,
    pub min_ny: usize,
    pub reference_grid: (usize, usize),
}

/// A validated configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub branch: ModelBranch,
    /// `None` outside the unit square of the regime map
    pub regime: Option<RegimeRegion>,
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub time: TimeConfig,
    pub flow: FlowConfig,
    pub strip: Option<StripChoice>,
    pub out_dir: PathBuf,
    pub snapshot: bool,
    pub sweep: Option<SweepConfig>,
    pub seed: u64,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(offset, |p| offset - p - 1) + 1;
    (line, col)
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::ConfigInvalid(msg.into())
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(format!("{name} must be > 0, got {v}")))
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
        Error::ConfigParse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    validate(raw)
}

fn validate(raw: RawConfig) -> Result<RunConfig> {
    let alpha = raw.model.alpha.unwrap_or(0.0);
    let nu = raw.model.nu.unwrap_or(0.0);
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(invalid(format!("alpha must be >= 0, got {alpha}")));
    }
    if !(nu >= 0.0 && nu.is_finite()) {
        return Err(invalid(format!("nu must be >= 0, got {nu}")));
    }
    let branch = match &raw.model.branch {
        None => ModelBranch::classify(alpha, nu),
        Some(name) => {
            let kind = BranchKind::from_name(name).ok_or_else(|| invalid(format!("unknown branch {name:?}")))?;
            ModelBranch::new(kind, alpha, nu)
        }
    }
    .map_err(|e| invalid(e.to_string()))?;
    let regime = classify_regime(alpha, nu).ok();

    let nx = raw.grid.nx.unwrap_or(32);
    let ny = raw.grid.ny.unwrap_or(32);
    let lx = positive("lx", raw.grid.lx.unwrap_or(2.0 * PI))?;
    ChannelGrid::new(nx, ny, lx).map_err(|e| invalid(e.to_string()))?;

    let step = match (raw.time.dt, raw.time.cfl) {
        (Some(_), Some(_)) => return Err(invalid("give either dt or cfl, not both")),
        (Some(dt), None) => TimeStep::Fixed(positive("dt", dt)?),
        (None, Some(c)) => TimeStep::Cfl(positive("cfl", c)?),
        (None, None) => TimeStep::Fixed(1e-3),
    };
    let time = TimeConfig {
        step,
        t_end: raw.time.t_end.unwrap_or(1.0),
        record_every: raw.time.record_every.unwrap_or(10),
        cfl_target: raw.time.cfl_target.unwrap_or(0.5),
    };
    StepControl::new(1.0, time.t_end, time.cfl_target, time.record_every).map_err(|e| invalid(e.to_string()))?;
    if let TimeStep::Cfl(c) = step {
        if c > time.cfl_target {
            return Err(invalid(format!("cfl {c} exceeds cfl_target {}", time.cfl_target)));
        }
    }

    let name = raw.flow.name.as_deref().unwrap_or("shear");
    let kind = if name == "random" {
        let kmax = raw.flow.kmax.unwrap_or(2);
        let degree = raw.flow.degree.unwrap_or(4);
        if kmax >= nx / 2 || degree + 4 > ny {
            return Err(invalid(format!("random flow (kmax {kmax}, degree {degree}) does not fit the grid")));
        }
        FlowKind::Random {
            amplitude: positive("amplitude", raw.flow.amplitude.unwrap_or(0.5))?,
            kmax,
            degree,
        }
    } else {
        if raw.flow.kmax.is_some() || raw.flow.degree.is_some() {
            return Err(invalid("kmax and degree only apply to the random flow"));
        }
        let b = BaseFlow::from_name(name, raw.flow.amplitude).ok_or_else(|| invalid(format!("unknown flow {name:?}")))?;
        FlowKind::Base(b)
    };
    let needs_collar = branch.no_slip() && matches!(kind, FlowKind::Base(b) if b != BaseFlow::Rest);
    let collar = match raw.flow.collar {
        Some(c) if !(c > 0.0 && c < 1.0) => return Err(invalid(format!("collar must lie in (0, 1), got {c}"))),
        Some(c) => Some(c),
        None if needs_collar && alpha > 0.0 => Some(alpha),
        None if needs_collar => {
            return Err(invalid("a no-slip run from a base flow needs [flow] collar when alpha = 0"))
        }
        None => None,
    };
    if let (true, Some(c)) = (needs_collar, collar) {
        if nodes_within(ny, c) < MIN_STRIP_NODES {
            return Err(invalid(format!("collar {c} is unresolved on ny = {ny}")));
        }
    }
    let flow = FlowConfig {
        kind,
        collar: if needs_collar { collar } else { None },
    };

    let strip = match raw.strip {
        None => None,
        Some(s) => Some(match s.rule.as_str() {
            "fixed" => {
                if s.coeff.is_some() {
                    return Err(invalid("fixed strips take a width, not a coeff"));
                }
                let w = s.width.ok_or_else(|| invalid("fixed strip needs width"))?;
                StripSpec::new(w).map_err(|e| invalid(e.to_string()))?;
                StripChoice::Fixed(w)
            }
            r => {
                let rule = StripRule::from_name(r).ok_or_else(|| invalid(format!("unknown strip rule {r:?}")))?;
                if s.width.is_some() {
                    return Err(invalid("width only applies to fixed strips"));
                }
                StripChoice::Rule {
                    rule,
                    coeff: positive("strip coeff", s.coeff.unwrap_or(1.0))?,
                }
            }
        }),
    };

    let sweep = raw.sweep.map(|s| validate_sweep(s, nx)).transpose()?;
    if sweep.is_none() {
        if let Some(StripChoice::Rule { rule, coeff }) = strip {
            strip_width(rule, alpha, nu, coeff).map_err(|e| invalid(e.to_string()))?;
        }
    }

    Ok(RunConfig {
        branch,
        regime,
        nx,
        ny,
        lx,
        time,
        flow,
        strip,
        out_dir: raw.output.dir.unwrap_or_else(|| PathBuf::from("out")),
        snapshot: raw.output.snapshot.unwrap_or(false),
        sweep,
        seed: raw.seed.unwrap_or(0),
    })
}

fn validate_sweep(s: RawSweep, nx: usize) -> Result<SweepConfig> {
    let beta = positive("sweep beta", s.beta)?;
    let coeff = positive("sweep coeff", s.coeff.unwrap_or(1.0))?;
    let alphas = match (s.alphas, s.nus) {
        (Some(a), None) => a,
        (None, Some(n)) => n.iter().map(|nu| (nu / coeff).powf(1.0 / beta)).collect(),
        _ => return Err(invalid("sweep needs exactly one of alphas and nus")),
    };
    Ok(SweepConfig {
        beta,
        coeff,
        alphas,
        nx: s.nx.unwrap_or(nx.min(8)),
        min_ny: s.min_ny.unwrap_or(32),
        reference_grid: (s.reference_nx.unwrap_or(16), s.reference_ny.unwrap_or(32)),
    })
}

impl RunConfig {
    pub fn grid(&self) -> Result<Arc<ChannelGrid>> {
        ChannelGrid::new(self.nx, self.ny, self.lx)
    }

    /// Output directory, with the environment override applied.
    pub fn resolved_out_dir(&self) -> PathBuf {
        match std::env::var_os(OUT_DIR_ENV) {
            Some(d) if !d.is_empty() => PathBuf::from(d),
            _ => self.out_dir.clone(),
        }
    }

    /// Initial velocity; all randomness comes from `seed`.
    pub fn initial_velocity(&self) -> Result<VelocityField> {
        let grid = self.grid()?;
        match self.flow.kind {
            FlowKind::Random { amplitude, kmax, degree } => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let psi = random_wall_stream(&grid, &mut rng, kmax, degree, 2)?;
                let u = velocity_from_stream(&psi);
                let peak = u
                    .u1
                    .to_nodal()
                    .iter()
                    .chain(u.u2.to_nodal().iter())
                    .fold(0.0f64, |m, v| m.max(v.abs()));
                if peak == 0.0 {
                    return Ok(u);
                }
                Ok(velocity_from_stream(&psi.scale(amplitude / peak)))
            }
            FlowKind::Base(b) => match self.flow.collar {
                Some(c) => suitable_family(&b.stream(&grid), c),
                None => Ok(b.velocity(&grid)),
            },
        }
    }

    /// Time controls for a given initial velocity (which fixes the step under a CFL request).
    pub fn step_control(&self, u0: &VelocityField) -> Result<StepControl> {
        let dt = match self.time.step {
            TimeStep::Fixed(dt) => dt,
            TimeStep::Cfl(c) => {
                let rate = cfl_number(u0, 1.0);
                let cap = if self.time.t_end > 0.0 { self.time.t_end } else { 1.0 };
                if rate > 0.0 {
                    (c / rate).min(cap)
                } else {
                    cap
                }
            }
        };
        StepControl::new(dt, self.time.t_end, self.time.cfl_target, self.time.record_every)
    }

    /// Strip for a single run, if one is configured.
    pub fn strip_spec(&self) -> Result<Option<StripSpec>> {
        match self.strip {
            None => Ok(None),
            Some(StripChoice::Fixed(w)) => StripSpec::new(w).map(Some),
            Some(StripChoice::Rule { rule, coeff }) => {
                let d = strip_width(rule, self.branch.alpha(), self.branch.nu(), coeff)?;
                StripSpec::new(d).map(Some)
            }
        }
    }

    /// The sweep described by the `[sweep]` section.
    pub fn sweep_plan(&self) -> Result<SweepPlan> {
        let s = self.sweep.as_ref().ok_or_else(|| invalid("no [sweep] section"))?;
        let base = match self.flow.kind {
            FlowKind::Base(b) => b,
            FlowKind::Random { .. } => return Err(invalid("sweeps need a named base flow")),
        };
        let (rule, coeff) = match self.strip {
            Some(StripChoice::Rule { rule, coeff }) => (rule, coeff),
            _ => return Err(invalid("sweeps need a [strip] rule")),
        };
        let dt = match self.time.step {
            TimeStep::Fixed(dt) => dt,
            TimeStep::Cfl(_) => return Err(invalid("sweeps need a fixed dt")),
        };
        let ctrl = StepControl::new(dt, self.time.t_end, self.time.cfl_target, self.time.record_every)?;
        let mut plan = SweepPlan::new(s.beta, s.coeff, s.alphas.clone(), base, ctrl).with_strip(rule, coeff);
        plan.nx = s.nx;
        plan.min_ny = s.min_ny;
        plan.lx = self.lx;
        plan.reference_grid = s.reference_grid;
        plan.validate().map_err(|e| invalid(e.to_string()))?;
        Ok(plan)
    }
}
