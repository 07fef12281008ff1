//! Center-of-mass motion from the spectral projectors of `H(k)`.
//!
//! With `H = sum_m E_m Q_m` and velocity operators `V_i = dH/dk_i`,
//!
//! ```text
//! r_i(t) = t sum_m <Q_m V_i Q_m> + i sum_{m != n} e^{i (E_m - E_n) t} <Q_m V_i Q_n> / (E_n - E_m)
//! ```
//!
//! Pairs `(m, n)` and `(n, m)` are complex conjugates, so only `m < n` is stored.

use crate::error::{Result, ZbError};
use crate::linalg::{inner, C64, I};
use crate::model::{BlochModel, Spinor};
use crate::spectral::{check_state, hermitian_eig, SpectralDecomposition};

use super::trajectory::{Trajectory, TrajectoryMeta, TrajectorySource};

/// Coefficients below `PRESENT_TOL * amplitude_scale` do not count as present frequencies.
const PRESENT_TOL: f64 = 1e-12;

/// One oscillating pair: contributes `2 Re(c_i e^{i omega t})` to component `i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairTerm {
    /// `E_m - E_n` for the lower level `m` and upper level `n`, so negative.
    pub omega: f64,
    pub coeff: [C64; 3],
}

/// Precomputed equation-of-motion coefficients for one momentum and one initial state.
#[derive(Clone, Debug)]
pub struct PcmEvaluator {
    terms: Vec<PairTerm>,
    drift: [f64; 3],
    scale: f64,
}

impl PcmEvaluator {
    /// `state` is a normalized vector in the matrix basis of `model`.
    pub fn new(model: &BlochModel, k: &[f64], state: &[C64]) -> Result<Self> {
        let h = model.evaluate(k)?;
        check_state(state, h.dim())?;
        let grads = model.gradient(k)?;
        let dec = hermitian_eig(&h);
        Ok(Self::from_parts(&dec, &grads, state))
    }

    /// Builds the evaluator from a decomposition and velocity operators (at most three).
    pub fn from_parts(
        dec: &SpectralDecomposition,
        grads: &[impl std::ops::Deref<Target = crate::linalg::CMatrix>],
        state: &[C64],
    ) -> Self {
        let groups = dec.groups();
        let parts: Vec<Vec<C64>> = groups.iter().map(|g| g.projector.mul_vec(state)).collect();
        // vq[g][i] = V_i Q_g psi
        let vq: Vec<Vec<Vec<C64>>> = parts
            .iter()
            .map(|p| grads.iter().map(|v| v.mul_vec(p)).collect())
            .collect();

        let mut drift = [0.0; 3];
        for (g, p) in parts.iter().enumerate() {
            for (i, d) in drift.iter_mut().enumerate().take(grads.len()) {
                *d += inner(p, &vq[g][i]).re;
            }
        }

        let mut terms = Vec::new();
        for m in 0..groups.len() {
            for n in m + 1..groups.len() {
                let gap = groups[n].energy - groups[m].energy;
                let mut coeff = [C64::new(0.0, 0.0); 3];
                for (i, c) in coeff.iter_mut().enumerate().take(grads.len()) {
                    *c = I * inner(&parts[m], &vq[n][i]) / gap;
                }
                terms.push(PairTerm {
                    omega: groups[m].energy - groups[n].energy,
                    coeff,
                });
            }
        }

        let vmax = grads.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let gap = dec.min_gap();
        let scale = if gap.is_finite() && gap > 0.0 {
            vmax / gap
        } else {
            vmax
        };
        Self {
            terms,
            drift,
            scale: scale.max(1e-12),
        }
    }

    /// Oscillatory part `<r_o(t)>`.
    pub fn oscillation(&self, t: f64) -> [f64; 3] {
        let mut r = [0.0; 3];
        for term in &self.terms {
            let e = C64::from_polar(1.0, term.omega * t);
            for (x, c) in r.iter_mut().zip(&term.coeff) {
                *x += 2.0 * (c * e).re;
            }
        }
        r
    }

    /// Oscillation plus `t` times the drift velocity.
    pub fn position(&self, t: f64) -> [f64; 3] {
        let mut r = self.oscillation(t);
        for (x, v) in r.iter_mut().zip(&self.drift) {
            *x += v * t;
        }
        r
    }

    pub fn at(&self, t: f64, include_drift: bool) -> [f64; 3] {
        if include_drift {
            self.position(t)
        } else {
            self.oscillation(t)
        }
    }

    pub fn terms(&self) -> &[PairTerm] {
        &self.terms
    }

    /// `sum_m <Q_m V Q_m>`
    pub fn drift(&self) -> [f64; 3] {
        self.drift
    }

    /// `max |V| / min gap`, a characteristic ZB length.
    pub fn amplitude_scale(&self) -> f64 {
        self.scale
    }

    /// Upper bound `sum 2 |c_i|` on `|r_o,i(t)|` per component.
    pub fn oscillation_bound(&self) -> [f64; 3] {
        let mut b = [0.0; 3];
        for term in &self.terms {
            for (x, c) in b.iter_mut().zip(&term.coeff) {
                *x += 2.0 * c.norm();
            }
        }
        b
    }

    /// Distinct `|E_m - E_n|` with non-negligible weight, ascending.
    pub fn frequencies(&self) -> Vec<f64> {
        let cut = PRESENT_TOL * self.scale;
        let mut w: Vec<f64> = self
            .terms
            .iter()
            .filter(|t| t.coeff.iter().any(|c| c.norm() > cut))
            .map(|t| t.omega.abs())
            .collect();
        w.sort_by(f64::total_cmp);
        w.dedup_by(|a, b| (*a - *b).abs() <= 1e-8);
        w
    }
}

/// Exact trajectory of a plane-wave state at momentum `k` with internal state `spinor`.
pub fn pcm_trajectory_exact(
    model: &BlochModel,
    k: &[f64],
    spinor: &Spinor,
    times: &[f64],
    include_drift: bool,
) -> Result<Trajectory> {
    let state = spinor.to_state(model)?;
    let eval = PcmEvaluator::new(model, k, &state)?;
    let pcm = times.iter().map(|&t| eval.at(t, include_drift)).collect();
    let meta = TrajectoryMeta {
        model: model.name().to_string(),
        source: TrajectorySource::Momentum(k.to_vec()),
        spinor: spinor.coefficients().to_vec(),
        include_drift,
        frequencies: eval.frequencies(),
        amplitude_scale: eval.amplitude_scale(),
    };
    Trajectory::new(times.to_vec(), pcm, meta)
}

pub(crate) fn nonzero(x: f64, what: &str) -> Result<()> {
    if x == 0.0 || !x.is_finite() {
        return Err(ZbError::Gapless(format!("{what} must be non-zero and finite")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::trajectory::default_time_grid;
    use crate::model::{maxwell_lattice, spin_j_continuum};
    use crate::spin::Spin;

    #[test]
    fn eigenstate_has_no_oscillation() {
        let model = maxwell_lattice(1.0, 1.0).unwrap();
        let k = [0.3, -0.2];
        let dec = hermitian_eig(&model.evaluate(&k).unwrap());
        let psi = &dec.eigenvectors()[0];
        let eval = PcmEvaluator::new(&model, &k, psi).unwrap();
        for t in [0.0, 0.7, 3.1] {
            assert!(eval.oscillation(t).iter().all(|x| x.abs() < 1e-14));
        }
        assert!(eval.frequencies().is_empty());
    }

    #[test]
    fn spin_half_amplitude_is_velocity_over_gap() {
        // H = m sigma_z / 2 + v p.sigma / 2 at p = 0, state (1,1)/sqrt 2.
        let (v, m) = (1.0, 1.0);
        let model = spin_j_continuum(Spin::HALF, v, v, m);
        let spinor = Spinor::from_real(&[1.0, 1.0]).unwrap();
        let times = default_time_grid(m);
        let traj = pcm_trajectory_exact(&model, &[0.0, 0.0], &spinor, &times, false).unwrap();
        assert_eq!(traj.meta().frequencies, vec![1.0]);
        let x = traj.component(0);
        let amp = x.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        // |<down| v sigma_x / 2 |up>| = v / 2 and A = |<Q v Q>| / 2 for the equal superposition.
        assert!((amp - v / (2.0 * m)).abs() < 1e-12, "{amp}");
    }

    #[test]
    fn unnormalized_state_is_rejected() {
        let model = maxwell_lattice(1.0, 1.0).unwrap();
        let psi = vec![C64::new(1.0, 0.0); 3];
        assert!(matches!(
            PcmEvaluator::new(&model, &[0.0, 0.0], &psi),
            Err(ZbError::NotNormalized { .. })
        ));
    }
}
