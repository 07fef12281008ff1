//! Z2 invariant of the Kane-Mele model.
//!
//! The production rule reads the spin-up masses at `K` and `K'` from the
//! Hilbert-Schmidt projection of `H(K)` onto `sigma_z s_0` and `sigma_z s_z`:
//! `Z2 = 1` iff they have opposite signs. For `lambda_R != 0` the bulk gap is
//! tracked along the ramp `lambda_R' in [0, lambda_R]` and a closing is an error.
//!
//! Independent checks: the Wannier-charge-centre flow of the occupied Wilson
//! loop, the parity of the spin-sector Chern number (`lambda_R = 0`) and the
//! inversion-eigenvalue product (`lambda_v = lambda_R = 0`).

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ZbError};
use crate::linalg::{inner, kron, CMatrix, C64};
use crate::model::{kane_mele, kane_mele_sector, BlochModel, KaneMeleParams, ModelKind, SpinSector};
use crate::spectral::hermitian_eig;

use super::plaquette::chern_plaquette;

/// Grid per axis for direct-gap scans (a multiple of 3 so `K` and `K'` lie on it).
pub const GAP_GRID: usize = 48;
/// Grid minima refined locally in [`min_direct_gap`].
const REFINE_CANDIDATES: usize = 8;
/// Upper bound on the operator norm of `dH/d lambda_R` over the zone.
const RASHBA_NORM_BOUND: f64 = 3.0 + 2.0 * 1.732_050_807_568_877_2;
/// Ramp steps after which a still-shrinking gap is reported as closed.
pub const MAX_SWEEP_STEPS: usize = 10_000;
/// Smallest direct gap between the occupied and empty pairs accepted as open.
pub const GAP_TOL: f64 = 1e-6;
pub const WILSON_GRID: usize = 96;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Z2Report {
    pub z2: u8,
    /// Spin-up masses at `K` and `K'`.
    pub masses: [f64; 2],
    /// Smallest direct gap seen along the `lambda_R` ramp.
    pub min_gap: f64,
    /// Number of `lambda_R` increments taken.
    pub sweep_steps: usize,
}

fn km_params(model: &BlochModel) -> Result<KaneMeleParams> {
    match model.kind() {
        ModelKind::KaneMele(p) => Ok(*p),
        _ => Err(ZbError::UnsupportedModel(format!(
            "Z2 is implemented for the Kane-Mele model, not {}",
            model.name()
        ))),
    }
}

fn k_points() -> [[f64; 2]; 2] {
    let k = 2.0 * PI / 3.0;
    [[k, -k], [-k, k]]
}

fn direct_gap(model: &BlochModel, k: &[f64]) -> Result<f64> {
    let e = hermitian_eig(&model.evaluate(k)?).eigenvalues().to_vec();
    Ok(e[2] - e[1])
}

/// Pattern search for a local minimum of the direct gap starting at `k`.
fn refine(model: &BlochModel, mut k: [f64; 2], mut gap: f64, mut step: f64) -> Result<(f64, [f64; 2])> {
    while step > 1e-7 && gap > 0.0 {
        let mut moved = false;
        for (da, db) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)] {
            let trial = [k[0] + da * step, k[1] + db * step];
            let g = direct_gap(model, &trial)?;
            if g < gap {
                (gap, k, moved) = (g, trial, true);
                break;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    Ok((gap, k))
}

/// Smallest `E_2 - E_1` over the zone: a `GAP_GRID^2` scan plus `K`, `K'`,
/// then local refinement around the lowest candidates.
pub fn min_direct_gap(params: KaneMeleParams) -> Result<(f64, Vec<f64>)> {
    let model = kane_mele(params);
    let n = GAP_GRID;
    let h = TAU / n as f64;
    let mut cands: Vec<(f64, [f64; 2])> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let k = [h * (idx / n) as f64, h * (idx % n) as f64];
            Ok((direct_gap(&model, &k)?, k))
        })
        .collect::<Result<_>>()?;
    for k in k_points() {
        cands.push((direct_gap(&model, &k)?, k));
    }
    cands.sort_by(|a, b| a.0.total_cmp(&b.0));
    let refined: Vec<(f64, [f64; 2])> = cands
        .iter()
        .take(REFINE_CANDIDATES)
        .map(|&(g, k)| refine(&model, k, g, 0.5 * h))
        .collect::<Result<_>>()?;
    let best = refined
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("non-empty grid");
    Ok((best.0, best.1.to_vec()))
}

/// Spin-up mass `c(sigma_z s_0) + c(sigma_z s_z)` of `H(k)`.
pub fn spin_up_mass(model: &BlochModel, k: &[f64]) -> Result<f64> {
    let gens = model.generators();
    let (Some(v), Some(so)) = (gens.index_of("sz.s0"), gens.index_of("sz.sz")) else {
        return Err(ZbError::UnsupportedModel(format!("{} has no sublattice-mass generators", model.name())));
    };
    let h = model.evaluate(k)?;
    Ok(gens.project(&h, v) + gens.project(&h, so))
}

/// Production Z2 with the gap-tracked `lambda_R` ramp.
///
/// Each eigenvalue moves by at most `B |d lambda_R|` (`B` bounds `||dH/d lambda_R||`),
/// so steps of `g / (4B)` from a point with direct gap `g` keep the gap above `g / 2`.
pub fn z2_kane_mele_report(model: &BlochModel) -> Result<Z2Report> {
    let params = km_params(model)?;
    let target = params.lambda_r;
    let mut lambda = 0.0f64;
    let mut min_gap = f64::INFINITY;
    let mut steps = 0;
    loop {
        let p = KaneMeleParams {
            lambda_r: lambda,
            ..params
        };
        let (gap, k) = min_direct_gap(p)?;
        if gap <= GAP_TOL {
            return Err(ZbError::Gapless(format!(
                "bulk gap {gap:.3e} at k = {k:?} for lambda_R = {lambda}"
            )));
        }
        min_gap = min_gap.min(gap);
        if lambda == target {
            break;
        }
        steps += 1;
        if steps > MAX_SWEEP_STEPS {
            return Err(ZbError::Gapless(format!(
                "bulk gap shrinks to {gap:.3e} near lambda_R = {lambda}"
            )));
        }
        let step = 0.25 * gap / RASHBA_NORM_BOUND;
        lambda = if (target - lambda).abs() <= step {
            target
        } else {
            lambda + step * target.signum()
        };
    }
    let [k, kp] = k_points();
    let masses = [spin_up_mass(model, &k)?, spin_up_mass(model, &kp)?];
    if masses.iter().any(|m| m.abs() < super::hsp::MASS_TOL) {
        return Err(ZbError::Gapless(format!("spin-up masses {masses:?}")));
    }
    let z2 = u8::from((masses[0] > 0.0) != (masses[1] > 0.0));
    Ok(Z2Report {
        z2,
        masses,
        min_gap,
        sweep_steps: steps,
    })
}

/// `Z2 = 1` iff the spin-up masses at `K` and `K'` differ in sign.
pub fn z2_kane_mele(model: &BlochModel) -> Result<u8> {
    z2_kane_mele_report(model).map(|r| r.z2)
}

fn occupied(model: &BlochModel, k: &[f64]) -> Result<[Vec<C64>; 2]> {
    let dec = hermitian_eig(&model.evaluate(k)?);
    let e = dec.eigenvalues();
    if e[2] - e[1] <= GAP_TOL {
        return Err(ZbError::BandTouching {
            k: k.to_vec(),
            gap: e[2] - e[1],
        });
    }
    Ok([dec.eigenvectors()[0].clone(), dec.eigenvectors()[1].clone()])
}

fn wrap(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(TAU) - PI;
    if y <= -PI {
        y + TAU
    } else {
        y
    }
}

/// Eigenphases of the occupied-band Wilson loop along `k_1` at fixed `k_2`.
fn wilson_phases(model: &BlochModel, k2: f64, n: usize) -> Result<[f64; 2]> {
    let states: Vec<[Vec<C64>; 2]> = (0..n)
        .map(|i| occupied(model, &[TAU * i as f64 / n as f64, k2]))
        .collect::<Result<_>>()?;
    let mut w = CMatrix::identity(2);
    for i in 0..n {
        let (a, b) = (&states[i], &states[(i + 1) % n]);
        let m = CMatrix::from_row_major(
            2,
            vec![inner(&a[0], &b[0]), inner(&a[0], &b[1]), inner(&a[1], &b[0]), inner(&a[1], &b[1])],
        );
        w = &w * &m;
    }
    let tr = w.trace();
    let disc = (tr * tr - w.det() * 4.0).sqrt();
    let (l1, l2) = ((tr + disc) / 2.0, (tr - disc) / 2.0);
    let mut ph = [l1.arg(), l2.arg()];
    ph.sort_by(f64::total_cmp);
    Ok(ph)
}

/// Midpoint of the largest gap between the (sorted) phases on the circle.
fn gap_midpoint(ph: &[f64; 2]) -> f64 {
    let inner_gap = ph[1] - ph[0];
    let outer_gap = TAU - inner_gap;
    if inner_gap >= outer_gap {
        0.5 * (ph[0] + ph[1])
    } else {
        wrap(ph[1] + 0.5 * outer_gap)
    }
}

/// Z2 from the parity of crossings between Wannier centres and the largest-gap
/// midpoint as `k_2` runs from `0` to `pi`.
pub fn z2_wilson_loop(params: KaneMeleParams, n: usize) -> Result<u8> {
    let model = kane_mele(params);
    let phases: Vec<[f64; 2]> = (0..=n)
        .into_par_iter()
        .map(|j| wilson_phases(&model, PI * j as f64 / n as f64, n))
        .collect::<Result<_>>()?;
    let mids: Vec<f64> = phases.iter().map(gap_midpoint).collect();
    let mut crossings = 0usize;
    for j in 0..n {
        let d = wrap(mids[j + 1] - mids[j]);
        for &x in &phases[j + 1] {
            let r = wrap(x - mids[j]);
            if (d > 0.0 && r > 0.0 && r < d) || (d < 0.0 && r < 0.0 && r > d) {
                crossings += 1;
            }
        }
    }
    Ok((crossings % 2) as u8)
}

/// `|Ch_up| mod 2` of the spin-up sector; requires `lambda_R = 0`.
pub fn z2_spin_chern(params: KaneMeleParams) -> Result<u8> {
    let sector = kane_mele_sector(params, SpinSector::Up)?;
    Ok((chern_plaquette(&sector, 0)?.rem_euclid(2)) as u8)
}

/// Product of inversion eigenvalues of the occupied Kramers pair at the four
/// time-reversal-invariant momenta, with inversion `P = sigma_x s_0`.
///
/// Requires `P H(k) P = H(-k)`, which holds for `lambda_v = lambda_R = 0`.
pub fn z2_inversion_parity(params: KaneMeleParams) -> Result<u8> {
    let model = kane_mele(params);
    let sx = CMatrix::from_rows(&[&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)], &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]]);
    let p = kron(&sx, &CMatrix::identity(2));
    for k in [[0.3, -1.1], [2.0, 0.7], [-0.4, 2.9]] {
        let h = model.evaluate(&k)?;
        let hm = model.evaluate(&[-k[0], -k[1]])?;
        let defect = (&(&p * h.as_matrix()) * &p - hm.as_matrix().clone()).max_abs();
        if defect > 1e-12 {
            return Err(ZbError::InvalidParameter(format!(
                "model is not inversion symmetric (defect {defect:.3e})"
            )));
        }
    }
    let (gap, k) = min_direct_gap(params)?;
    if gap <= GAP_TOL {
        return Err(ZbError::Gapless(format!("bulk gap {gap:.3e} at k = {k:?}")));
    }
    let mut product = 1.0;
    for k in [[0.0, 0.0], [PI, 0.0], [0.0, PI], [PI, PI]] {
        let occ = occupied(&model, &k)?;
        let xi: f64 = occ.iter().map(|u| crate::linalg::expectation(u, &p, u).re).sum::<f64>() / 2.0;
        product *= xi.signum();
    }
    Ok(u8::from(product < 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(so: f64, r: f64, v: f64) -> KaneMeleParams {
        KaneMeleParams {
            t: 1.0,
            lambda_so: so,
            lambda_r: r,
            lambda_v: v,
        }
    }

    #[test]
    fn reference_phases() {
        assert_eq!(z2_kane_mele(&kane_mele(p(0.06, 0.0, 0.0))).unwrap(), 1);
        assert_eq!(z2_kane_mele(&kane_mele(p(0.01, 0.0, 1.0))).unwrap(), 0);
        assert_eq!(z2_kane_mele(&kane_mele(p(0.06, 0.05, 0.1))).unwrap(), 1);
    }

    #[test]
    fn inversion_parity_oracle() {
        assert_eq!(z2_inversion_parity(p(0.06, 0.0, 0.0)).unwrap(), 1);
        assert!(z2_inversion_parity(p(0.06, 0.0, 0.1)).is_err());
    }

    #[test]
    fn gap_closing_is_an_error() {
        let crit = p(0.1, 0.0, 3.0 * 3f64.sqrt() * 0.1);
        assert!(matches!(z2_kane_mele(&kane_mele(crit)), Err(ZbError::Gapless(_))));
    }

    #[test]
    fn other_models_are_refused() {
        let m = crate::model::maxwell_lattice(1.0, 1.0).unwrap();
        assert!(matches!(z2_kane_mele(&m), Err(ZbError::UnsupportedModel(_))));
    }
}
