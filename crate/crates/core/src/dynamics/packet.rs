//! Gaussian wave packets, averaged over a momentum grid.
//!
//! The packet `g(k) ~ exp(-d^2 |k - k0|^2 / 2)` is sampled on a uniform grid and
//! the position expectation is the `|g(k)|^2`-weighted mean of the per-momentum
//! trajectories (drift included).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ZbError};
use crate::linalg::C64;
use crate::model::{BlochModel, Spinor};
use crate::spectral::hermitian_eig;

use super::pcm::PcmEvaluator;
use super::trajectory::{Trajectory, TrajectoryMeta, TrajectorySource};

/// Minimum grid points per axis inside two standard deviations of `|g|^2`.
pub const MIN_POINTS_IN_TWO_SIGMA: usize = 8;
/// The grid must reach at least this many `1/d` from the center.
pub const MIN_EXTENT: f64 = 5.0;

/// Internal state carried by every momentum component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PacketState {
    /// The same spinor (in the model's spinor basis) at every `k`.
    Spinor(Spinor),
    /// The eigenvector of the given band (ascending order) at each `k`.
    Band(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WavePacket {
    width: f64,
    center: Vec<f64>,
    state: PacketState,
}

impl WavePacket {
    /// Requires `width > 0`.
    pub fn new(width: f64, center: Vec<f64>, state: PacketState) -> Result<Self> {
        if width <= 0.0 || !width.is_finite() {
            return Err(ZbError::InvalidParameter(format!(
                "packet width must be positive, got {width}"
            )));
        }
        Ok(Self {
            width,
            center,
            state,
        })
    }

    pub fn with_spinor(width: f64, center: Vec<f64>, spinor: Spinor) -> Result<Self> {
        Self::new(width, center, PacketState::Spinor(spinor))
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn state(&self) -> &PacketState {
        &self.state
    }

    /// Standard deviation of the momentum weight `|g|^2`, `1 / (d sqrt 2)`.
    pub fn sigma(&self) -> f64 {
        1.0 / (self.width * std::f64::consts::SQRT_2)
    }
}

/// Uniform grid of `points` per axis over `|k_i - k0_i| <= extent / d`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PacketGrid {
    pub points: usize,
    pub extent: f64,
}

impl Default for PacketGrid {
    fn default() -> Self {
        Self {
            points: 41,
            extent: MIN_EXTENT,
        }
    }
}

impl PacketGrid {
    fn axis(&self, center: f64, width: f64) -> Vec<f64> {
        let half = self.extent / width;
        let n = self.points;
        (0..n)
            .map(|i| center - half + 2.0 * half * i as f64 / (n - 1) as f64)
            .collect()
    }

    fn check(&self, packet: &WavePacket) -> Result<()> {
        if self.extent < MIN_EXTENT * (1.0 - 1e-12) {
            return Err(ZbError::GridTooCoarse(format!(
                "grid reaches {} / d, needs {MIN_EXTENT} / d",
                self.extent
            )));
        }
        if self.points < 2 {
            return Err(ZbError::GridTooCoarse("need at least two points per axis".into()));
        }
        let step = 2.0 * self.extent / packet.width / (self.points - 1) as f64;
        let two_sigma = 2.0 * packet.sigma();
        let inside = self
            .axis(0.0, packet.width)
            .iter()
            .filter(|x| x.abs() <= two_sigma + 1e-12 * step)
            .count();
        if inside < MIN_POINTS_IN_TWO_SIGMA {
            return Err(ZbError::GridTooCoarse(format!(
                "{inside} points per axis within two standard deviations, need {MIN_POINTS_IN_TWO_SIGMA}"
            )));
        }
        Ok(())
    }
}

/// Momentum points and normalized weights, in row-major order.
fn weighted_points(packet: &WavePacket, grid: &PacketGrid) -> (Vec<Vec<f64>>, Vec<f64>) {
    let axes: Vec<Vec<f64>> = packet
        .center
        .iter()
        .map(|&c| grid.axis(c, packet.width))
        .collect();
    let dim = axes.len();
    let total = grid.points.pow(dim as u32);
    let d2 = packet.width * packet.width;
    let mut points = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rem = flat;
        let mut k = vec![0.0; dim];
        for a in (0..dim).rev() {
            k[a] = axes[a][rem % grid.points];
            rem /= grid.points;
        }
        let r2: f64 = k.iter().zip(&packet.center).map(|(x, c)| (x - c) * (x - c)).sum();
        weights.push((-d2 * r2).exp());
        points.push(k);
    }
    let sum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= sum;
    }
    (points, weights)
}

/// Evaluators for every grid point, in grid order.
fn evaluators(
    model: &BlochModel,
    packet: &WavePacket,
    points: &[Vec<f64>],
) -> Result<Vec<PcmEvaluator>> {
    let fixed = match &packet.state {
        PacketState::Spinor(s) => Some(s.to_state(model)?),
        PacketState::Band(b) if *b >= model.band_count() => {
            return Err(ZbError::BandLabelOutOfRange {
                label: *b as u32,
                max: model.band_count() as u32 - 1,
            })
        }
        PacketState::Band(_) => None,
    };
    points
        .par_iter()
        .map(|k| match (&fixed, &packet.state) {
            (Some(psi), _) => PcmEvaluator::new(model, k, psi),
            (None, PacketState::Band(b)) => {
                let dec = hermitian_eig(&model.evaluate(k)?);
                let psi: Vec<C64> = dec.eigenvectors()[*b].clone();
                Ok(PcmEvaluator::from_parts(&dec, &model.gradient(k)?, &psi))
            }
            (None, PacketState::Spinor(_)) => unreachable!(),
        })
        .collect()
}

/// Packet-averaged `<r(t)>` including drift.
pub fn wavepacket_trajectory(
    model: &BlochModel,
    packet: &WavePacket,
    grid: &PacketGrid,
    times: &[f64],
) -> Result<Trajectory> {
    if packet.center.len() != model.momentum_dim() {
        return Err(ZbError::DimensionMismatch {
            expected: model.momentum_dim(),
            got: packet.center.len(),
        });
    }
    grid.check(packet)?;
    if let Some(cut) = model.cutoff() {
        let reach = packet.center.iter().map(|c| c.abs()).fold(0.0, f64::max) + grid.extent / packet.width;
        if reach > cut {
            return Err(ZbError::InvalidParameter(format!(
                "packet grid reaches |k| = {reach}, beyond the model cutoff {cut}"
            )));
        }
    }
    let (points, weights) = weighted_points(packet, grid);
    let evals = evaluators(model, packet, &points)?;

    let pcm: Vec<[f64; 3]> = times
        .par_iter()
        .map(|&t| {
            let mut r = [0.0; 3];
            for (e, w) in evals.iter().zip(&weights) {
                let p = e.position(t);
                for i in 0..3 {
                    r[i] += w * p[i];
                }
            }
            r
        })
        .collect();

    let centre = PcmEvaluator::new_at_center(model, packet)?;
    let meta = TrajectoryMeta {
        model: model.name().to_string(),
        source: TrajectorySource::Packet {
            width: packet.width,
            center: packet.center.clone(),
        },
        spinor: match &packet.state {
            PacketState::Spinor(s) => s.coefficients().to_vec(),
            PacketState::Band(_) => Vec::new(),
        },
        include_drift: true,
        frequencies: centre.frequencies(),
        amplitude_scale: centre.amplitude_scale(),
    };
    Trajectory::new(times.to_vec(), pcm, meta)
}

/// Largest `sum 2|c|` and drift speed over the grid, for bounding packet motion.
pub fn packet_bounds(model: &BlochModel, packet: &WavePacket, grid: &PacketGrid) -> Result<(f64, f64)> {
    grid.check(packet)?;
    let (points, _) = weighted_points(packet, grid);
    let evals = evaluators(model, packet, &points)?;
    let mut osc: f64 = 0.0;
    let mut drift: f64 = 0.0;
    for e in &evals {
        let b = e.oscillation_bound();
        osc = osc.max((b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt());
        let d = e.drift();
        drift = drift.max((d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt());
    }
    Ok((osc, drift))
}

impl PcmEvaluator {
    fn new_at_center(model: &BlochModel, packet: &WavePacket) -> Result<Self> {
        let k = &packet.center;
        match &packet.state {
            PacketState::Spinor(s) => Self::new(model, k, &s.to_state(model)?),
            PacketState::Band(b) => {
                let dec = hermitian_eig(&model.evaluate(k)?);
                let psi = dec.eigenvectors()[*b].clone();
                Ok(Self::from_parts(&dec, &model.gradient(k)?, &psi))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::trajectory::default_time_grid;
    use crate::model::maxwell_lattice;

    #[test]
    fn zero_width_is_rejected() {
        let s = Spinor::from_real(&[1.0, 0.0, 0.0]).unwrap();
        assert!(WavePacket::with_spinor(0.0, vec![0.0, 0.0], s).is_err());
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let model = maxwell_lattice(1.0, 1.0).unwrap();
        let s = Spinor::from_real(&[1.0, 1.0, 0.0]).unwrap();
        let p = WavePacket::with_spinor(10.0, vec![0.0, 0.0], s).unwrap();
        let grid = PacketGrid {
            points: 11,
            extent: 5.0,
        };
        assert!(matches!(
            wavepacket_trajectory(&model, &p, &grid, &default_time_grid(2.0)),
            Err(ZbError::GridTooCoarse(_))
        ));
        let short = PacketGrid {
            points: 41,
            extent: 3.0,
        };
        assert!(matches!(
            wavepacket_trajectory(&model, &p, &short, &default_time_grid(2.0)),
            Err(ZbError::GridTooCoarse(_))
        ));
    }

    #[test]
    fn band_packet_only_drifts() {
        let model = maxwell_lattice(1.0, 1.0).unwrap();
        let p = WavePacket::new(5.0, vec![0.4, 0.1], PacketState::Band(0)).unwrap();
        let times = default_time_grid(2.0);
        let traj = wavepacket_trajectory(&model, &p, &PacketGrid::default(), &times).unwrap();
        // Pure drift is linear in t.
        let (t, r) = (traj.times(), traj.pcm());
        let n = t.len() - 1;
        for (ti, ri) in t.iter().zip(r) {
            for a in 0..2 {
                let lin = r[n][a] * ti / t[n];
                assert!((ri[a] - lin).abs() < 1e-12, "{} vs {lin}", ri[a]);
            }
        }
        assert!(r[n][0].abs() > 1e-3);
    }
}
