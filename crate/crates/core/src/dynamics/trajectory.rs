use std::f64::consts::TAU;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ZbError};
use crate::io::{parse_csv, write_row};
use crate::linalg::C64;

pub const TRAJECTORY_HEADER: &str = "t,x,y,z";

/// Samples per shortest ZB period in the default time grid.
pub const DEFAULT_SAMPLES_PER_PERIOD: usize = 64;
/// Periods spanned by the default time grid.
pub const DEFAULT_PERIODS: usize = 8;
/// Periods spanned by grids meant for spectral analysis (bin width `omega / 40`).
pub const SPECTRAL_PERIODS: usize = 40;

/// What the trajectory was started from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectorySource {
    Momentum(Vec<f64>),
    Packet { width: f64, center: Vec<f64> },
    ClosedForm(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub model: String,
    pub source: TrajectorySource,
    pub spinor: Vec<C64>,
    pub include_drift: bool,
    /// Non-zero ZB frequencies carried by the trajectory, ascending.
    pub frequencies: Vec<f64>,
    /// Characteristic oscillation length (`|v| / |m|`), used to decide when motion is negligible.
    pub amplitude_scale: f64,
}

impl TrajectoryMeta {
    pub fn bare() -> Self {
        Self {
            model: String::new(),
            source: TrajectorySource::ClosedForm(String::new()),
            spinor: Vec::new(),
            include_drift: false,
            frequencies: Vec::new(),
            amplitude_scale: 1.0,
        }
    }
}

/// A uniformly sampled center-of-mass series `(t, <x>, <y>, <z>)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    pcm: Vec<[f64; 3]>,
    meta: TrajectoryMeta,
}

impl Trajectory {
    /// Checks that the grid is uniform and, for every frequency in `meta`,
    /// has at least 4 samples per shortest period and spans at least 4 of the
    /// longest periods.
    pub fn new(times: Vec<f64>, pcm: Vec<[f64; 3]>, meta: TrajectoryMeta) -> Result<Self> {
        let dt = check_uniform(&times)?;
        if pcm.len() != times.len() {
            return Err(ZbError::DimensionMismatch {
                expected: times.len(),
                got: pcm.len(),
            });
        }
        check_sampling(&times, dt, &meta.frequencies)?;
        Ok(Self { times, pcm, meta })
    }

    /// Wraps arbitrary samples; only uniformity is checked.
    pub fn from_samples(times: Vec<f64>, pcm: Vec<[f64; 3]>) -> Result<Self> {
        check_uniform(&times)?;
        if pcm.len() != times.len() {
            return Err(ZbError::DimensionMismatch {
                expected: times.len(),
                got: pcm.len(),
            });
        }
        Ok(Self {
            times,
            pcm,
            meta: TrajectoryMeta::bare(),
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn pcm(&self) -> &[[f64; 3]] {
        &self.pcm
    }

    pub fn meta(&self) -> &TrajectoryMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    /// `times.last - times.first`
    pub fn span(&self) -> f64 {
        self.times[self.len() - 1] - self.times[0]
    }

    pub fn component(&self, axis: usize) -> Vec<f64> {
        self.pcm.iter().map(|r| r[axis]).collect()
    }

    /// `max_t |r(t)|`
    pub fn max_radius(&self) -> f64 {
        self.pcm
            .iter()
            .map(|r| (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt())
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "{TRAJECTORY_HEADER}")?;
        for (t, r) in self.times.iter().zip(&self.pcm) {
            write_row(w, &[*t, r[0], r[1], r[2]])?;
        }
        Ok(())
    }

    /// Reads back a CSV written by [`Trajectory::write_csv`]; metadata is not stored in the file.
    pub fn read_csv(text: &str) -> Result<Self> {
        let rows = parse_csv(text, TRAJECTORY_HEADER).map_err(ZbError::InvalidTimeGrid)?;
        let times = rows.iter().map(|r| r[0]).collect();
        let pcm = rows.iter().map(|r| [r[1], r[2], r[3]]).collect();
        Self::from_samples(times, pcm)
    }
}

/// Returns the step of a uniform grid with at least two points.
pub fn check_uniform(times: &[f64]) -> Result<f64> {
    if times.len() < 2 {
        return Err(ZbError::InvalidTimeGrid("need at least two samples".into()));
    }
    let dt = times[1] - times[0];
    if dt <= 0.0 || !dt.is_finite() {
        return Err(ZbError::InvalidTimeGrid("time step must be positive".into()));
    }
    let tol = 1e-9 * dt.max(times[0].abs() * f64::EPSILON);
    for (i, w) in times.windows(2).enumerate() {
        if ((w[1] - w[0]) - dt).abs() > tol.max(1e-12 * dt) {
            return Err(ZbError::InvalidTimeGrid(format!(
                "non-uniform step at sample {}: {} vs {dt}",
                i + 1,
                w[1] - w[0]
            )));
        }
    }
    Ok(dt)
}

fn check_sampling(times: &[f64], dt: f64, frequencies: &[f64]) -> Result<()> {
    let nonzero: Vec<f64> = frequencies.iter().copied().filter(|&w| w > 0.0).collect();
    if nonzero.is_empty() {
        return Ok(());
    }
    let w_max = nonzero.iter().copied().fold(0.0, f64::max);
    let w_min = nonzero.iter().copied().fold(f64::INFINITY, f64::min);
    let slack = 1.0 + 1e-9;
    if dt > TAU / w_max / 4.0 * slack {
        return Err(ZbError::InvalidTimeGrid(format!(
            "step {dt} gives fewer than 4 samples per period at omega = {w_max}"
        )));
    }
    let span = times[times.len() - 1] - times[0];
    if span * slack < 4.0 * TAU / w_min {
        return Err(ZbError::InvalidTimeGrid(format!(
            "span {span} covers fewer than 4 periods at omega = {w_min}"
        )));
    }
    Ok(())
}

/// `t_i = i * dt` for `i < samples_per_period * periods`, with `dt = 2 pi / (omega * samples_per_period)`.
///
/// The endpoint is excluded so that `periods` whole periods fill the DFT window exactly.
pub fn time_grid(omega: f64, samples_per_period: usize, periods: usize) -> Vec<f64> {
    let dt = TAU / (omega.abs() * samples_per_period as f64);
    (0..samples_per_period * periods).map(|i| i as f64 * dt).collect()
}

/// 64 samples per period, 8 periods.
pub fn default_time_grid(omega: f64) -> Vec<f64> {
    time_grid(omega, DEFAULT_SAMPLES_PER_PERIOD, DEFAULT_PERIODS)
}

/// 64 samples per period, 40 periods.
pub fn spectral_time_grid(omega: f64) -> Vec<f64> {
    time_grid(omega, DEFAULT_SAMPLES_PER_PERIOD, SPECTRAL_PERIODS)
}
