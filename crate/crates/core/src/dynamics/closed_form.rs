//! Analytic ZB trajectories at a gapped high-symmetry point.
//!
//! Spin-1 (`H = m J_z + v_x p_x J_x + v_y p_y J_y` near `p = 0`), spinor
//! `a |-1> + b |0> + c |+1>`:
//!
//! ```text
//! x = (v_x / |m|) rho sin(|m| t + sgn(m) theta)
//! y = -sgn(m) (v_y / |m|) rho cos(|m| t + sgn(m) theta)
//! rho e^{i theta} = R + i I,  R = sqrt2 Re[(a - c) b*],  I = sqrt2 Im[(a + c) b*]
//! ```
//!
//! Chiral spin-1 (`H = m l7 + v . (l4, l5, l6) p`), spinor in the `l7` eigenbasis:
//! for `c = 0`, `x = -sqrt2 (v_x / m) R2 cos(m t + theta2)`,
//! `y = -sqrt2 (v_y / m) R2 sin(m t + theta2)` with `R2 e^{i theta2} = a b*`;
//! for `b = 0`, `z = -(v_z / m) R3 cos(2 m t + theta3)` with `R3 e^{i theta3} = a c*`.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Result, ZbError};
use crate::linalg::C64;
use crate::model::Spinor;

use super::pcm::nonzero;
use super::trajectory::{Trajectory, TrajectoryMeta, TrajectorySource};

/// `r_i(t) = amplitude_i cos(frequency t + phase_i)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZbClosedForm {
    pub amplitude: [f64; 3],
    pub phase: [f64; 3],
    pub frequency: f64,
}

impl ZbClosedForm {
    fn from_signed(signed: [f64; 3], phase: [f64; 3], frequency: f64) -> Self {
        let mut amplitude = [0.0; 3];
        let mut ph = [0.0; 3];
        for i in 0..3 {
            amplitude[i] = signed[i].abs();
            ph[i] = wrap(if signed[i] < 0.0 { phase[i] + PI } else { phase[i] });
        }
        Self {
            amplitude,
            phase: ph,
            frequency,
        }
    }

    pub fn at(&self, t: f64) -> [f64; 3] {
        let mut r = [0.0; 3];
        for (i, x) in r.iter_mut().enumerate() {
            if self.amplitude[i] != 0.0 {
                *x = self.amplitude[i] * (self.frequency * t + self.phase[i]).cos();
            }
        }
        r
    }

    fn trajectory(&self, label: &str, spinor: &Spinor, scale: f64, times: &[f64]) -> Result<Trajectory> {
        let pcm = times.iter().map(|&t| self.at(t)).collect();
        let present = self.amplitude.iter().any(|&a| a > 1e-12 * scale);
        let meta = TrajectoryMeta {
            model: label.to_string(),
            source: TrajectorySource::ClosedForm(label.to_string()),
            spinor: spinor.coefficients().to_vec(),
            include_drift: false,
            frequencies: if present { vec![self.frequency] } else { vec![] },
            amplitude_scale: scale,
        };
        Trajectory::new(times.to_vec(), pcm, meta)
    }
}

fn wrap(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

fn three(spinor: &Spinor) -> Result<(C64, C64, C64)> {
    match spinor.coefficients() {
        [a, b, c] => Ok((*a, *b, *c)),
        other => Err(ZbError::DimensionMismatch {
            expected: 3,
            got: other.len(),
        }),
    }
}

/// Spin-1 closed form; see the module documentation.
pub fn closed_form_spin1(
    vx: f64,
    vy: f64,
    m: f64,
    spinor: &Spinor,
    times: &[f64],
) -> Result<(Trajectory, ZbClosedForm)> {
    nonzero(m, "mass")?;
    let (a, b, c) = three(spinor)?;
    let r = SQRT_2 * ((a - c) * b.conj()).re;
    let i = SQRT_2 * ((a + c) * b.conj()).im;
    let rho = r.hypot(i);
    let theta = if rho > 0.0 { i.atan2(r) } else { 0.0 };
    let s = m.signum();
    let w = m.abs();
    // sin(u) = cos(u - pi/2)
    let form = ZbClosedForm::from_signed(
        [vx * rho / w, -s * vy * rho / w, 0.0],
        [s * theta - FRAC_PI_2, s * theta, 0.0],
        w,
    );
    let scale = vx.abs().max(vy.abs()) / w;
    let traj = form.trajectory("closed_form_spin1", spinor, scale, times)?;
    Ok((traj, form))
}

/// Which single-frequency branch of the chiral closed form applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChiralBranch {
    /// `c = 0`: in-plane motion at `|m|`.
    InPlane,
    /// `b = 0`: motion along `z` at `2 |m|`.
    Axial,
}

/// Chiral-TI closed form; exactly one of `b`, `c` must vanish.
///
/// When both vanish the state is an eigenstate and the trajectory is zero.
pub fn closed_form_chiral(
    v: [f64; 3],
    m: f64,
    spinor: &Spinor,
    times: &[f64],
) -> Result<(Trajectory, ZbClosedForm, ChiralBranch)> {
    nonzero(m, "mass")?;
    let (a, b, c) = three(spinor)?;
    let s = m.signum();
    let w = m.abs();
    let scale = v.iter().fold(0.0f64, |x, y| x.max(y.abs())) / w;
    let (form, branch) = if c == C64::new(0.0, 0.0) {
        let z = a * b.conj();
        let (r2, t2) = (z.norm(), z.arg());
        let form = ZbClosedForm::from_signed(
            [
                -SQRT_2 * v[0] * r2 / m,
                -SQRT_2 * v[1] * r2 / w,
                0.0,
            ],
            [s * t2, s * t2 - FRAC_PI_2, 0.0],
            w,
        );
        (form, ChiralBranch::InPlane)
    } else if b == C64::new(0.0, 0.0) {
        let z = a * c.conj();
        let (r3, t3) = (z.norm(), z.arg());
        let form = ZbClosedForm::from_signed([0.0, 0.0, -v[2] * r3 / m], [0.0, 0.0, s * t3], 2.0 * w);
        (form, ChiralBranch::Axial)
    } else {
        return Err(ZbError::UnsupportedBranch(
            "closed form needs b = 0 or c = 0; use pcm_trajectory_exact for general spinors".into(),
        ));
    };
    let traj = form.trajectory("closed_form_chiral", spinor, scale, times)?;
    Ok((traj, form, branch))
}
