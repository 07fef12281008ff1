//! Run configuration.
//!
//! ```json
//! {
//!   "command": "zb",
//!   "model": "maxwell",
//!   "params": {"t_h": 1.0, "M": 1.0},
//!   "dynamics": {"k": [0, 0], "spinor": [1, 1, 0], "packet": {"width": 20}},
//!   "seed": 7
//! }
//! ```
//!
//! Unknown keys are rejected at every level. `ZB_SEED` overrides `seed`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use zb_core::dynamics::{PacketGrid, DEFAULT_SAMPLES_PER_PERIOD, SPECTRAL_PERIODS};
use zb_core::model::{chiral_ti_3d, kane_mele, kane_mele_sector, maxwell_lattice, spin_j_continuum_with_cutoff, DEFAULT_CUTOFF};
use zb_core::{BlochModel, KaneMeleParams, Spin, SpinSector, Spinor, C64};

use crate::error::{CliError, CliResult};

pub const SEED_ENV: &str = "ZB_SEED";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandTag {
    Bands,
    Zb,
    Invariants,
    PhaseDiagram,
    Verify,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<CommandTag>,
    pub model: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub dynamics: Option<DynamicsSpec>,
    #[serde(default)]
    pub topology: TopologySpec,
    #[serde(default)]
    pub bands: BandsSpec,
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub verify: VerifySpec,
    #[serde(default)]
    pub output: OutputSpec,
    pub seed: Option<u64>,
}

/// A real amplitude or a `[re, im]` pair.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged)]
pub enum Amplitude {
    Real(f64),
    Complex([f64; 2]),
}

impl Amplitude {
    fn to_c64(self) -> C64 {
        match self {
            Amplitude::Real(x) => C64::new(x, 0.0),
            Amplitude::Complex([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketSpec {
    pub width: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_extent")]
    pub extent: f64,
}

fn default_points() -> usize {
    PacketGrid::default().points
}

fn default_extent() -> f64 {
    PacketGrid::default().extent
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSpec {
    /// Momentum, or packet centre when `packet` is set.
    pub k: Vec<f64>,
    pub packet: Option<PacketSpec>,
    /// Amplitudes in the model's spinor basis; normalized on load.
    pub spinor: Option<Vec<Amplitude>>,
    /// Start in this band (0 = lowest) instead of a spinor.
    pub band: Option<usize>,
    #[serde(default)]
    pub include_drift: bool,
    #[serde(default = "default_spp")]
    pub samples_per_period: usize,
    #[serde(default = "default_periods")]
    pub periods: usize,
    #[serde(default = "default_plane")]
    pub plane: [usize; 2],
}

fn default_spp() -> usize {
    DEFAULT_SAMPLES_PER_PERIOD
}

fn default_periods() -> usize {
    SPECTRAL_PERIODS
}

fn default_plane() -> [usize; 2] {
    [0, 1]
}

/// Initial internal state.
#[derive(Clone, Debug)]
pub enum InitialState {
    Spinor(Spinor),
    Band(usize),
}

impl DynamicsSpec {
    pub fn initial_state(&self, model: &BlochModel) -> CliResult<InitialState> {
        match (&self.spinor, self.band) {
            (Some(_), Some(_)) => Err(CliError::Config("give either dynamics.spinor or dynamics.band, not both".into())),
            (None, None) => Err(CliError::Config("dynamics needs a spinor or a band".into())),
            (None, Some(b)) if b >= model.band_count() => Err(CliError::Config(format!(
                "dynamics.band = {b} but the model has {} bands",
                model.band_count()
            ))),
            (None, Some(b)) => Ok(InitialState::Band(b)),
            (Some(amps), None) => {
                if amps.len() != model.band_count() {
                    return Err(CliError::Config(format!(
                        "spinor has {} amplitudes, model has {} bands",
                        amps.len(),
                        model.band_count()
                    )));
                }
                Spinor::normalized(amps.iter().map(|a| a.to_c64()).collect())
                    .map(InitialState::Spinor)
                    .map_err(|e| CliError::Config(format!("spinor: {e}")))
            }
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologySpec {
    #[serde(default = "yes")]
    pub plaquette: bool,
}

fn yes() -> bool {
    true
}

impl Default for TopologySpec {
    fn default() -> Self {
        Self { plaquette: true }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandsSpec {
    #[serde(default = "default_density")]
    pub points_per_segment: usize,
}

fn default_density() -> usize {
    64
}

impl Default for BandsSpec {
    fn default() -> Self {
        Self {
            points_per_segment: default_density(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub param: String,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepSpec {
    /// `start + i step` up to `stop` inclusive.
    pub fn values(&self) -> CliResult<Vec<f64>> {
        let finite = self.start.is_finite() && self.stop.is_finite() && self.step.is_finite();
        if !finite || self.step <= 0.0 || self.stop < self.start {
            return Err(CliError::Config(format!(
                "empty sweep range: start {}, stop {}, step {}",
                self.start, self.stop, self.step
            )));
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| self.start + i as f64 * self.step).collect())
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_z2_samples")]
    pub z2_samples: usize,
}

fn default_trials() -> usize {
    100
}

fn default_z2_samples() -> usize {
    50
}

impl Default for VerifySpec {
    fn default() -> Self {
        Self {
            trials: default_trials(),
            z2_samples: default_z2_samples(),
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        cfg.apply_env()?;
        Ok(cfg)
    }

    fn apply_env(&mut self) -> CliResult<()> {
        if let Ok(s) = std::env::var(SEED_ENV) {
            let seed = s
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("{SEED_ENV}={s:?} is not an unsigned integer")))?;
            self.seed = Some(seed);
        }
        Ok(())
    }

    pub fn check_command(&self, tag: CommandTag) -> CliResult<()> {
        match self.command {
            Some(c) if c != tag => Err(CliError::Config(format!(
                "config is for {c:?} but {tag:?} was requested"
            ))),
            _ => Ok(()),
        }
    }

    pub fn require_seed(&self) -> CliResult<u64> {
        self.seed
            .ok_or_else(|| CliError::Config(format!("a seed is required (config \"seed\" or {SEED_ENV})")))
    }

    pub fn dynamics(&self) -> CliResult<&DynamicsSpec> {
        self.dynamics
            .as_ref()
            .ok_or_else(|| CliError::Config("missing \"dynamics\" section".into()))
    }

    pub fn build_model(&self) -> CliResult<BlochModel> {
        let name = self
            .model
            .as_deref()
            .ok_or_else(|| CliError::Config("missing \"model\"".into()))?;
        build_model(name, &self.params)
    }
}

struct ParamReader<'a> {
    model: &'a str,
    params: &'a BTreeMap<String, f64>,
    allowed: &'static [&'static str],
}

impl ParamReader<'_> {
    fn check(&self) -> CliResult<()> {
        for (k, v) in self.params {
            if !self.allowed.contains(&k.as_str()) {
                return Err(CliError::Config(format!(
                    "unknown parameter {k:?} for {}; expected one of {:?}",
                    self.model, self.allowed
                )));
            }
            if !v.is_finite() {
                return Err(CliError::Config(format!("parameter {k} is not finite")));
            }
        }
        Ok(())
    }

    fn required(&self, key: &str) -> CliResult<f64> {
        self.params
            .get(key)
            .copied()
            .ok_or_else(|| CliError::Config(format!("{} needs parameter {key:?}", self.model)))
    }

    fn or(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }
}

/// Models by name: `maxwell`, `chiral_ti`, `kane_mele`, `kane_mele_sector`, `spin_j`.
pub fn build_model(name: &str, params: &BTreeMap<String, f64>) -> CliResult<BlochModel> {
    let allowed: &'static [&'static str] = match name {
        "maxwell" => &["t_h", "M"],
        "chiral_ti" => &["M"],
        "kane_mele" => &["t", "lambda_so", "lambda_r", "lambda_v"],
        "kane_mele_sector" => &["t", "lambda_so", "lambda_v", "sz"],
        "spin_j" => &["J", "v_x", "v_y", "m", "cutoff"],
        other => return Err(CliError::Config(format!("unknown model {other:?}"))),
    };
    let p = ParamReader {
        model: name,
        params,
        allowed,
    };
    p.check()?;
    let bad = |e: zb_core::ZbError| CliError::Config(e.to_string());
    let km = || -> CliResult<KaneMeleParams> {
        Ok(KaneMeleParams {
            t: p.or("t", 1.0),
            lambda_so: p.required("lambda_so")?,
            lambda_r: p.or("lambda_r", 0.0),
            lambda_v: p.or("lambda_v", 0.0),
        })
    };
    match name {
        "maxwell" => maxwell_lattice(p.or("t_h", 1.0), p.required("M")?).map_err(bad),
        "chiral_ti" => Ok(chiral_ti_3d(p.required("M")?)),
        "kane_mele" => Ok(kane_mele(km()?)),
        "kane_mele_sector" => {
            let sz = p.or("sz", 1.0);
            let sector = if sz == 1.0 {
                SpinSector::Up
            } else if sz == -1.0 {
                SpinSector::Down
            } else {
                return Err(CliError::Config(format!("sz must be +1 or -1, got {sz}")));
            };
            kane_mele_sector(km()?, sector).map_err(bad)
        }
        _ => {
            let spin = Spin::from_f64(p.required("J")?).map_err(bad)?;
            let cutoff = p.or("cutoff", DEFAULT_CUTOFF);
            if cutoff <= 0.0 {
                return Err(CliError::Config("cutoff must be positive".into()));
            }
            Ok(spin_j_continuum_with_cutoff(
                spin,
                p.or("v_x", 1.0),
                p.or("v_y", 1.0),
                p.required("m")?,
                cutoff,
            ))
        }
    }
}
