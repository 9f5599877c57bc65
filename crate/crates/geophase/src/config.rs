//! Run configuration: a TOML file with one table per concern.
//!
//! ```toml
//! [pulse]
//! shape = "circular"      # circular | piecewise | sampled | zero
//! g0 = 0.1
//! nu = 0.2
//! loops = 1               # or: period = "10pi"
//!
//! [space]
//! dim = 32
//!
//! [numerics]
//! method = "numeric_rwa"  # analytic | numeric_rwa | numeric_rotating
//! dt = "10pi/4000"
//! ```
//!
//! Every number may also be a string with `pi` arithmetic (see [`crate::expr`]).
//! Complex values are two-element arrays `[re, im]`.

use std::f64::consts::TAU;
use std::fmt;
use std::path::{Path, PathBuf};

use geophase_core::{
    effective_couplings, GateMethod, PulseShape, PulseSpec, RamanParams, Segment, C64,
};
use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;

use crate::error::CliError;
use crate::expr;

/// A real number written as a TOML number or a `pi` expression string.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct NumVisitor;

        impl Visitor<'_> for NumVisitor {
            type Value = Num;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a string such as \"pi/2\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Num, E> {
                if v.is_finite() {
                    Ok(Num(v))
                } else {
                    Err(E::custom(format!("{v} is not finite")))
                }
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Num, E> {
                Ok(Num(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Num, E> {
                Ok(Num(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Num, E> {
                expr::eval(v).map(Num).map_err(E::custom)
            }
        }

        d.deserialize_any(NumVisitor)
    }
}

type Complex = [Num; 2];

fn complex(c: Complex) -> C64 {
    C64::new(c[0].0, c[1].0)
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub pulse: Option<RawPulse>,
    pub raman: Option<RawRaman>,
    #[serde(default)]
    pub space: RawSpace,
    #[serde(default)]
    pub numerics: RawNumerics,
    #[serde(default)]
    pub output: RawOutput,
    pub validate: Option<RawValidate>,
    pub sweep: Option<RawSweep>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPulse {
    pub shape: String,
    pub g0: Option<Num>,
    pub nu: Option<Num>,
    pub phase0: Option<Num>,
    pub r0: Option<Num>,
    pub period: Option<Num>,
    pub loops: Option<u32>,
    pub segments: Option<Vec<RawSegment>>,
    pub dt: Option<Num>,
    pub values: Option<Vec<Complex>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSegment {
    pub duration: Num,
    pub g: Complex,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRaman {
    pub omega_p: Num,
    pub omega_s: Num,
    pub omega_g: Num,
    pub omega_c: Num,
    pub omega_0: Num,
    pub rabi_p: Complex,
    pub rabi_s: Complex,
    pub rabi_g: Complex,
    pub kappa_e: Complex,
    pub delta_1: Num,
    pub delta_2: Num,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSpace {
    pub dim: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawNumerics {
    pub method: Option<String>,
    pub dt: Option<Num>,
    pub n_steps: Option<usize>,
    pub closure_tol: Option<Num>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawOutput {
    pub format: Option<String>,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawValidate {
    pub r0_values: Option<Vec<Num>>,
    pub dims: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSweep {
    pub max_points: Option<usize>,
    #[serde(default)]
    pub axis: Vec<RawAxis>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAxis {
    pub field: String,
    pub values: Vec<Num>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeKind {
    Circular,
    Piecewise,
    Sampled,
    Zero,
}

impl ShapeKind {
    fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "circular" => Ok(Self::Circular),
            "piecewise" => Ok(Self::Piecewise),
            "sampled" => Ok(Self::Sampled),
            "zero" => Ok(Self::Zero),
            other => Err(CliError::config(
                "pulse.shape",
                format!("unknown shape `{other}` (expected circular, piecewise, sampled or zero)"),
            )),
        }
    }
}

/// Pulse parameters after number evaluation, before validation. Sweeps edit
/// the scalar fields by name and rebuild.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseParams {
    pub shape: ShapeKind,
    pub g0: Option<f64>,
    pub nu: Option<f64>,
    pub phase0: Option<f64>,
    pub r0: Option<f64>,
    pub period: Option<f64>,
    pub loops: Option<u32>,
    pub segments: Vec<Segment>,
    pub dt: Option<f64>,
    pub values: Vec<C64>,
}

/// Scalar pulse fields a sweep axis may vary.
pub const SWEEPABLE: [&str; 6] = ["g0", "nu", "phase0", "r0", "period", "loops"];

impl PulseParams {
    fn from_raw(raw: &RawPulse) -> Result<Self, CliError> {
        let shape = ShapeKind::parse(&raw.shape)?;
        let segments = raw
            .segments
            .iter()
            .flatten()
            .map(|s| Segment {
                duration: s.duration.0,
                g: complex(s.g),
            })
            .collect();
        let values = raw.values.iter().flatten().map(|&c| complex(c)).collect();
        Ok(Self {
            shape,
            g0: raw.g0.map(|n| n.0),
            nu: raw.nu.map(|n| n.0),
            phase0: raw.phase0.map(|n| n.0),
            r0: raw.r0.map(|n| n.0),
            period: raw.period.map(|n| n.0),
            loops: raw.loops,
            segments,
            dt: raw.dt.map(|n| n.0),
            values,
        })
    }

    /// Sets a sweepable field.
    pub fn set(&mut self, field: &str, value: f64) -> Result<(), CliError> {
        let path = format!("sweep.axis.{field}");
        match field {
            "g0" => self.g0 = Some(value),
            "nu" => self.nu = Some(value),
            "phase0" => self.phase0 = Some(value),
            "r0" => self.r0 = Some(value),
            "period" => self.period = Some(value),
            "loops" => {
                if !(value >= 1.0 && value.fract() == 0.0 && value <= u32::MAX as f64) {
                    return Err(CliError::config(
                        path,
                        format!("loops must be a positive integer, got {value}"),
                    ));
                }
                self.loops = Some(value as u32);
            }
            other => {
                return Err(CliError::config(
                    path,
                    format!(
                        "`{other}` is not sweepable (expected one of {})",
                        SWEEPABLE.join(", ")
                    ),
                ))
            }
        }
        Ok(())
    }

    pub fn build(&self) -> Result<PulseSpec, CliError> {
        let core = |field: &str| {
            let field = field.to_string();
            move |e: geophase_core::Error| CliError::config(format!("pulse.{field}"), e.to_string())
        };
        let require = |v: Option<f64>, field: &str| {
            v.ok_or_else(|| {
                CliError::config(
                    format!("pulse.{field}"),
                    format!("required for shape `{}`", self.shape_name()),
                )
            })
        };
        let pulse = match self.shape {
            ShapeKind::Circular => {
                let g0 = require(self.g0, "g0")?;
                let nu = require(self.nu, "nu")?;
                let period = match (self.period, self.loops) {
                    (Some(_), Some(_)) => {
                        return Err(CliError::config(
                            "pulse.period",
                            "give either period or loops, not both",
                        ))
                    }
                    (Some(t), None) => t,
                    (None, loops) => {
                        if nu == 0.0 {
                            return Err(CliError::config("pulse.nu", "must be nonzero"));
                        }
                        loops.unwrap_or(1) as f64 * TAU / nu.abs()
                    }
                };
                let shape = PulseShape::Circular {
                    g0,
                    nu,
                    phase0: self.phase0.unwrap_or(0.0),
                };
                PulseSpec::new(shape, 0.0, period).map_err(core("g0"))?
            }
            ShapeKind::Piecewise => {
                if self.segments.is_empty() {
                    return Err(CliError::config(
                        "pulse.segments",
                        "at least one segment is required",
                    ));
                }
                let total: f64 = self.segments.iter().map(|s| s.duration).sum();
                let shape = PulseShape::PiecewiseConstant {
                    segments: self.segments.clone(),
                };
                PulseSpec::new(shape, 0.0, self.period.unwrap_or(total))
                    .map_err(core("segments"))?
            }
            ShapeKind::Sampled => {
                let dt = require(self.dt, "dt")?;
                if self.values.len() < 2 {
                    return Err(CliError::config(
                        "pulse.values",
                        "at least two samples are required",
                    ));
                }
                let span = (self.values.len() - 1) as f64 * dt;
                let shape = PulseShape::Sampled {
                    dt,
                    values: self.values.clone(),
                };
                PulseSpec::new(shape, 0.0, self.period.unwrap_or(span)).map_err(core("values"))?
            }
            ShapeKind::Zero => {
                let period = require(self.period, "period")?;
                PulseSpec::zero(period).map_err(core("period"))?
            }
        };
        pulse.with_r0(self.r0.unwrap_or(0.0)).map_err(core("r0"))
    }

    fn shape_name(&self) -> &'static str {
        match self.shape {
            ShapeKind::Circular => "circular",
            ShapeKind::Piecewise => "piecewise",
            ShapeKind::Sampled => "sampled",
            ShapeKind::Zero => "zero",
        }
    }

    /// Folds Raman couplings into the pulse: the classical coupling becomes
    /// `r0`, and the quantum coupling fills in `g0` and `phase0` of a circular
    /// pulse when they are not given.
    fn apply_raman(&mut self, raw: &RawRaman) -> Result<(), CliError> {
        let params = RamanParams {
            omega_p: raw.omega_p.0,
            omega_s: raw.omega_s.0,
            omega_g: raw.omega_g.0,
            omega_c: raw.omega_c.0,
            omega_0: raw.omega_0.0,
            rabi_p: complex(raw.rabi_p),
            rabi_s: complex(raw.rabi_s),
            rabi_g: complex(raw.rabi_g),
            kappa_e: complex(raw.kappa_e),
            delta_1: raw.delta_1.0,
            delta_2: raw.delta_2.0,
        };
        let (r, g) =
            effective_couplings(&params).map_err(|e| CliError::config("raman", e.to_string()))?;
        if self.r0.is_some() {
            return Err(CliError::config(
                "pulse.r0",
                "r0 is derived from [raman]; remove one of them",
            ));
        }
        if r.im.abs() > 1e-12 * r.norm() || r.re < 0.0 {
            return Err(CliError::config(
                "raman",
                format!("classical coupling r = {r} must be real and non-negative; adjust the Rabi phases"),
            ));
        }
        self.r0 = Some(r.re);
        if self.shape == ShapeKind::Circular && self.g0.is_none() {
            self.g0 = Some(g.norm());
            if self.phase0.is_none() {
                self.phase0 = Some(g.arg());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(CliError::config(
                "output.format",
                format!("unknown format `{other}` (expected csv or json)"),
            )),
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

pub fn parse_method(s: &str) -> Result<GateMethod, CliError> {
    match s {
        "analytic" => Ok(GateMethod::Analytic),
        "numeric_rwa" => Ok(GateMethod::NumericRwa),
        "numeric_rotating" => Ok(GateMethod::NumericRotating),
        other => Err(CliError::config(
            "numerics.method",
            format!(
                "unknown method `{other}` (expected analytic, numeric_rwa or numeric_rotating)"
            ),
        )),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub field: String,
    pub values: Vec<f64>,
}

/// Fully evaluated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub pulse_params: PulseParams,
    pub pulse: PulseSpec,
    pub dim: usize,
    pub method: GateMethod,
    pub dt: Option<f64>,
    pub n_steps: usize,
    pub closure_tol: Option<f64>,
    pub format: Option<Format>,
    pub out_path: Option<PathBuf>,
    pub r0_values: Option<Vec<f64>>,
    pub dims: Option<Vec<usize>>,
    pub sweep_axes: Vec<SweepAxis>,
    pub max_points: usize,
}

pub const DEFAULT_DIM: usize = 32;
pub const DEFAULT_N_STEPS: usize = 100_000;
pub const DEFAULT_MAX_POINTS: usize = 10_000;
/// Default numeric step is the period divided by this.
pub const DEFAULT_STEPS_PER_PERIOD: f64 = 4000.0;

impl RunConfig {
    pub fn from_raw(raw: RawConfig) -> Result<Self, CliError> {
        let raw_pulse = raw
            .pulse
            .as_ref()
            .ok_or_else(|| CliError::config("pulse", "missing [pulse] table"))?;
        let mut pulse_params = PulseParams::from_raw(raw_pulse)?;
        if let Some(raman) = &raw.raman {
            pulse_params.apply_raman(raman)?;
        }
        let pulse = pulse_params.build()?;
        let dim = raw.space.dim.unwrap_or(DEFAULT_DIM);
        if dim < 2 {
            return Err(CliError::config(
                "space.dim",
                format!("need >= 2, got {dim}"),
            ));
        }
        let method = parse_method(raw.numerics.method.as_deref().unwrap_or("analytic"))?;
        let dt = raw.numerics.dt.map(|n| n.0);
        if let Some(dt) = dt {
            if !(dt > 0.0) {
                return Err(CliError::config(
                    "numerics.dt",
                    format!("must be > 0, got {dt}"),
                ));
            }
        }
        let n_steps = raw.numerics.n_steps.unwrap_or(DEFAULT_N_STEPS);
        if n_steps < 2 {
            return Err(CliError::config(
                "numerics.n_steps",
                format!("need >= 2, got {n_steps}"),
            ));
        }
        let closure_tol = raw.numerics.closure_tol.map(|n| n.0);
        if let Some(tol) = closure_tol {
            if !(tol > 0.0) {
                return Err(CliError::config(
                    "numerics.closure_tol",
                    format!("must be > 0, got {tol}"),
                ));
            }
        }
        let format = raw
            .output
            .format
            .as_deref()
            .map(Format::parse)
            .transpose()?;
        let validate = raw.validate.unwrap_or_default();
        let sweep = raw.sweep.unwrap_or_default();
        let sweep_axes = sweep
            .axis
            .into_iter()
            .map(|a| SweepAxis {
                field: a.field,
                values: a.values.into_iter().map(|n| n.0).collect(),
            })
            .collect();
        Ok(Self {
            pulse_params,
            pulse,
            dim,
            method,
            dt,
            n_steps,
            closure_tol,
            format,
            out_path: raw.output.path,
            r0_values: validate
                .r0_values
                .map(|v| v.into_iter().map(|n| n.0).collect()),
            dims: validate.dims,
            sweep_axes,
            max_points: sweep.max_points.unwrap_or(DEFAULT_MAX_POINTS),
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| CliError::config("config", e.to_string()))?;
        Self::from_raw(raw)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::config("config", format!("cannot read {}: {e}", path.display()))
        })?;
        Self::parse(&text).map_err(|e| e.in_file(path))
    }

    /// Numeric step: the configured `dt` or the period over
    /// [`DEFAULT_STEPS_PER_PERIOD`].
    pub fn step(&self) -> f64 {
        self.dt
            .unwrap_or(self.pulse.period() / DEFAULT_STEPS_PER_PERIOD)
    }
}

/// Writes a circular pulse in config syntax. Floats use round-trip formatting
/// so the text parses back to identical values.
pub fn circular_pulse_text(pulse: &PulseSpec) -> Option<String> {
    let PulseShape::Circular { g0, nu, phase0 } = *pulse.shape() else {
        return None;
    };
    Some(format!(
        "[pulse]\nshape = \"circular\"\ng0 = {g0:?}\nnu = {nu:?}\nphase0 = {phase0:?}\nperiod = {:?}\nr0 = {:?}\n",
        pulse.period(),
        pulse.r0()
    ))
}
