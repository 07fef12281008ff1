//! Sense of rotation of a trajectory projected on a plane.

use std::f64::consts::TAU;

use crate::error::{Result, ZbError};

use super::spectrum::{centered, parabolic, power_bins};
use super::trajectory::{check_uniform, Trajectory};

/// Motion smaller than this fraction of the trajectory's amplitude scale counts as none.
pub const STILL_TOL: f64 = 1e-9;
/// Absolute floor under the amplitude scale.
pub const SCALE_FLOOR: f64 = 1e-12;

/// `+1` for counterclockwise motion in the `(a, b)` plane, `-1` for clockwise, `0` for none.
///
/// The signed area `sum (x dy - y dx) / 2` is accumulated over the largest whole
/// number of periods of the dominant frequency. A linear drift is removed first
/// when the trajectory carries one.
pub fn rotation_index(traj: &Trajectory, plane: (usize, usize)) -> Result<i8> {
    let (a, b) = plane;
    if a > 2 || b > 2 || a == b {
        return Err(ZbError::InvalidParameter(format!("bad plane {plane:?}")));
    }
    let dt = check_uniform(traj.times())?;
    let linear = traj.meta().include_drift;
    let x = centered(&traj.component(a), traj.times(), linear);
    let y = centered(&traj.component(b), traj.times(), linear);

    let peak = x.iter().chain(&y).fold(0.0f64, |m, v| m.max(v.abs()));
    if peak < STILL_TOL * traj.meta().amplitude_scale.max(SCALE_FLOOR) {
        return Ok(0);
    }

    let n = x.len();
    let bins = power_bins(&[x.clone(), y.clone()]);
    let total: Vec<f64> = (0..bins[0].len()).map(|k| bins[0][k] + bins[1][k]).collect();
    let k = (1..total.len())
        .max_by(|&i, &j| total[i].total_cmp(&total[j]))
        .ok_or_else(|| ZbError::InvalidTimeGrid("too few samples".into()))?;
    let shift = if k + 1 < total.len() {
        parabolic(total[k - 1], total[k], total[k + 1])
    } else {
        0.0
    };
    let omega = (k as f64 + shift) * TAU / (n as f64 * dt);
    let period = TAU / omega;
    let span = traj.span();
    let periods = (span * (1.0 + 1e-9) / period).floor();
    if periods < 1.0 {
        return Err(ZbError::InvalidTimeGrid(format!(
            "span {span} is shorter than one period {period}"
        )));
    }
    let steps = ((periods * period / dt).round() as usize).min(n - 1);
    let area: f64 = (0..steps)
        .map(|i| 0.5 * (x[i] * y[i + 1] - x[i + 1] * y[i]))
        .sum();
    if area.abs() <= STILL_TOL * peak * peak * periods {
        return Ok(0);
    }
    Ok(if area > 0.0 { 1 } else { -1 })
}
