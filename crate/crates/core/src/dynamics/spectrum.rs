//! Frequency content of trajectories.

use std::f64::consts::TAU;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ZbError};
use crate::io::write_row;
use crate::linalg::C64;
use crate::model::{spin_j_continuum, Spinor};
use crate::spin::Spin;

use super::pcm::pcm_trajectory_exact;
use super::trajectory::{check_uniform, spectral_time_grid, Trajectory};

pub const SPECTRUM_HEADER: &str = "omega,px,py,pz";
/// Peaks weaker than this fraction of the strongest bin are not reported.
pub const PEAK_THRESHOLD: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralPeak {
    /// Parabolically interpolated angular frequency.
    pub omega: f64,
    /// Summed power at the peak bin over the strongest bin.
    pub relative_power: f64,
}

/// One-sided power spectrum `|X_i(omega)|^2` of each component.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    omega: Vec<f64>,
    power: Vec<[f64; 3]>,
    resolution: f64,
    peaks: Vec<SpectralPeak>,
}

impl Spectrum {
    /// Bin frequencies `2 pi k / (n dt)`, `k = 0..=n/2`.
    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    /// Per-component power, normalized so the strongest summed bin is 1.
    pub fn power(&self) -> &[[f64; 3]] {
        &self.power
    }

    /// Bin width.
    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    /// Local maxima above [`PEAK_THRESHOLD`], strongest first.
    pub fn peaks(&self) -> &[SpectralPeak] {
        &self.peaks
    }

    pub fn dominant(&self) -> Option<SpectralPeak> {
        self.peaks.first().copied()
    }

    fn total(&self, i: usize) -> f64 {
        self.power[i].iter().sum()
    }

    /// Largest summed relative power among bins within `tol` of `omega`.
    pub fn power_near(&self, omega: f64, tol: f64) -> f64 {
        (0..self.omega.len())
            .filter(|&i| (self.omega[i] - omega).abs() <= tol)
            .map(|i| self.total(i))
            .fold(0.0, f64::max)
    }

    /// Largest summed relative power over non-zero bins farther than one bin from every `allowed` frequency.
    pub fn power_outside(&self, allowed: &[f64]) -> f64 {
        (1..self.omega.len())
            .filter(|&i| {
                allowed
                    .iter()
                    .all(|w| (self.omega[i] - w).abs() > self.resolution * (1.0 + 1e-9))
            })
            .map(|i| self.total(i))
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "{SPECTRUM_HEADER}")?;
        for (om, p) in self.omega.iter().zip(&self.power) {
            write_row(w, &[*om, p[0], p[1], p[2]])?;
        }
        Ok(())
    }
}

/// Removes the mean, or the least-squares line when `linear`.
pub(crate) fn centered(values: &[f64], times: &[f64], linear: bool) -> Vec<f64> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if !linear {
        return values.iter().map(|v| v - mean).collect();
    }
    let tm = times.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, v) in times.iter().zip(values) {
        sxy += (t - tm) * (v - mean);
        sxx += (t - tm) * (t - tm);
    }
    let slope = sxy / sxx;
    times
        .iter()
        .zip(values)
        .map(|(t, v)| v - mean - slope * (t - tm))
        .collect()
}

/// `|DFT|^2` of each series for bins `0..=n/2`.
pub(crate) fn power_bins(series: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = series[0].len();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    series
        .iter()
        .map(|s| {
            let mut buf: Vec<C64> = s.iter().map(|&x| C64::new(x, 0.0)).collect();
            fft.process(&mut buf);
            buf[..=n / 2].iter().map(|z| z.norm_sqr()).collect()
        })
        .collect()
}

/// Offset in `(-1/2, 1/2)` of the vertex of the parabola through three bins.
pub(crate) fn parabolic(a: f64, b: f64, c: f64) -> f64 {
    let den = a - 2.0 * b + c;
    if den.abs() <= f64::MIN_POSITIVE {
        return 0.0;
    }
    (0.5 * (a - c) / den).clamp(-0.5, 0.5)
}

/// Power spectrum of each component of `traj`.
///
/// The mean is removed first, and the linear drift too when the trajectory includes it.
pub fn zb_spectrum(traj: &Trajectory) -> Result<Spectrum> {
    let dt = check_uniform(traj.times())?;
    let n = traj.len();
    if n < 8 {
        return Err(ZbError::InvalidTimeGrid("need at least 8 samples".into()));
    }
    let window = n as f64 * dt;
    if let Some(w_min) = traj.meta().frequencies.iter().copied().filter(|&w| w > 0.0).reduce(f64::min) {
        if window * (1.0 + 1e-9) < 4.0 * TAU / w_min {
            return Err(ZbError::InvalidTimeGrid(format!(
                "window {window} holds fewer than 4 periods at omega = {w_min}"
            )));
        }
    }
    let linear = traj.meta().include_drift;
    let series: Vec<Vec<f64>> = (0..3)
        .map(|a| centered(&traj.component(a), traj.times(), linear))
        .collect();
    let bins = power_bins(&series);
    let nb = n / 2 + 1;
    let resolution = TAU / window;
    let omega: Vec<f64> = (0..nb).map(|k| k as f64 * resolution).collect();
    let mut power: Vec<[f64; 3]> = (0..nb).map(|k| [bins[0][k], bins[1][k], bins[2][k]]).collect();
    let peak_total = power.iter().map(|p| p.iter().sum::<f64>()).fold(0.0, f64::max);
    if peak_total > 0.0 {
        for p in &mut power {
            for x in p.iter_mut() {
                *x /= peak_total;
            }
        }
    }
    let total: Vec<f64> = power.iter().map(|p| p.iter().sum()).collect();
    let mut peaks = Vec::new();
    if peak_total > 0.0 {
        for k in 1..nb {
            let left = total[k - 1];
            let right = if k + 1 < nb { total[k + 1] } else { 0.0 };
            if total[k] > PEAK_THRESHOLD && total[k] >= left && total[k] > right {
                let shift = if k + 1 < nb { parabolic(left, total[k], right) } else { 0.0 };
                peaks.push(SpectralPeak {
                    omega: (k as f64 + shift) * resolution,
                    relative_power: total[k],
                });
            }
        }
    }
    peaks.sort_by(|a, b| b.relative_power.total_cmp(&a.relative_power));
    Ok(Spectrum {
        omega,
        power,
        resolution,
        peaks,
    })
}

/// Outcome of [`selection_rule_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionRuleReport {
    pub spin: String,
    pub mass: f64,
    pub trials: usize,
    pub seed: u64,
    /// Largest relative power away from `|m|` over all trials.
    pub max_spurious: f64,
    /// Largest relative power near `2|m|, 3|m|, ..., 2J|m|` over all trials.
    pub max_harmonic: f64,
    /// Every trial had its dominant peak within one bin of `|m|`.
    pub dominant_matches: bool,
    pub passed: bool,
}

/// Random spinors at `p = 0` of `H = p.J + m J_z` oscillate only at the adjacent-level gap `|m|`.
pub fn selection_rule_check(spin: Spin, m: f64, trials: usize, seed: u64) -> Result<SelectionRuleReport> {
    super::pcm::nonzero(m, "mass")?;
    let model = spin_j_continuum(spin, 1.0, 1.0, m);
    let w = m.abs();
    let times = spectral_time_grid(w);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_spurious: f64 = 0.0;
    let mut max_harmonic: f64 = 0.0;
    let mut dominant_matches = true;
    for _ in 0..trials {
        let spinor = Spinor::random(spin.multiplicity(), &mut rng);
        let traj = pcm_trajectory_exact(&model, &[0.0, 0.0], &spinor, &times, false)?;
        let spec = zb_spectrum(&traj)?;
        max_spurious = max_spurious.max(spec.power_outside(&[w]));
        for h in 2..=spin.twice() {
            max_harmonic = max_harmonic.max(spec.power_near(h as f64 * w, 0.5 * spec.resolution()));
        }
        if let Some(p) = spec.dominant() {
            dominant_matches &= (p.omega - w).abs() <= spec.resolution();
        }
    }
    Ok(SelectionRuleReport {
        spin: spin.to_string(),
        mass: m,
        trials,
        seed,
        max_spurious,
        max_harmonic,
        dominant_matches,
        passed: dominant_matches && max_spurious < PEAK_THRESHOLD,
    })
}
