//! 3D winding number of a chiral-symmetric Hamiltonian by direct integration.
//!
//! In the eigenbasis of the chiral operator `S`, `H = [[0, q], [q^dagger, 0]]`.
//! For a `2 x 1` block the flattened `q / |q|` is a unit vector `(alpha, beta)` of
//! `C^2`, i.e. the SU(2) matrix `U = [[alpha, -beta^*], [beta, alpha^*]]`, and
//!
//! ```text
//! w = -(1 / 24 pi^2) int d^3k eps^{abc} tr[(U^dagger d_a U)(U^dagger d_b U)(U^dagger d_c U)]
//! ```
//!
//! evaluated with the midpoint rule on an `N^3` grid and analytic derivatives.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ZbError};
use crate::linalg::{CMatrix, C64};
use crate::model::BlochModel;
use crate::spectral::hermitian_eig;

pub const DEFAULT_WINDING_GRID: usize = 40;
/// Smallest `|E|` of the chiral partner bands accepted on the grid.
pub const GAP_FLOOR: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindingNumerical {
    pub value: i64,
    pub raw: f64,
    /// `|raw - value|`
    pub residual: f64,
    pub grid: usize,
}

/// Indices of the `+1` and `-1` eigenspaces of a diagonal chiral operator.
fn chiral_split(model: &BlochModel) -> Result<(Vec<usize>, Vec<usize>)> {
    let s = model.chiral_operator().ok_or_else(|| {
        ZbError::UnsupportedModel(format!("{} has no chiral symmetry", model.name()))
    })?;
    let n = s.dim();
    let plus: Vec<usize> = (0..n).filter(|&i| s[(i, i)].re > 0.0).collect();
    let minus: Vec<usize> = (0..n).filter(|&i| s[(i, i)].re < 0.0).collect();
    if plus.len() != 2 || minus.len() != 1 {
        return Err(ZbError::UnsupportedModel(format!(
            "winding integral implemented for a 2 x 1 chiral block, got {} x {}",
            plus.len(),
            minus.len()
        )));
    }
    Ok((plus, minus))
}

fn block(m: &CMatrix, plus: &[usize], minus: usize) -> [C64; 2] {
    [m[(plus[0], minus)], m[(plus[1], minus)]]
}

fn su2(a: C64, b: C64) -> CMatrix {
    CMatrix::from_rows(&[&[a, -b.conj()], &[b, a.conj()]])
}

/// Integrand `eps tr(A_a A_b A_c)` at one momentum, with `A_a = U^dagger d_a U`.
fn density(model: &BlochModel, k: &[f64], plus: &[usize], minus: usize) -> Result<f64> {
    let h = model.evaluate(k)?;
    let dec = hermitian_eig(&h);
    let e = dec.eigenvalues();
    let top = e[e.len() - 1];
    if top.min(-e[0]) < GAP_FLOOR {
        return Err(ZbError::Gapless(format!(
            "chiral gap {:.3e} below {GAP_FLOOR:e} at k = {k:?}",
            top.min(-e[0])
        )));
    }
    // Flattened Hamiltonian: +1 on positive levels, -1 on negative ones.
    let mut flat = CMatrix::zeros(h.dim());
    for g in dec.groups() {
        if g.energy.abs() > GAP_FLOOR {
            flat.add_scaled(&g.projector, g.energy.signum());
        }
    }
    let qhat = block(&flat, plus, minus);
    let norm = top;
    let grads = model.gradient(k)?;
    let a: Vec<CMatrix> = grads
        .iter()
        .map(|d| {
            let dq = block(d, plus, minus);
            let proj = (qhat[0].conj() * dq[0] + qhat[1].conj() * dq[1]).re;
            let dh = [(dq[0] - qhat[0] * proj) / norm, (dq[1] - qhat[1] * proj) / norm];
            let u = su2(qhat[0], qhat[1]);
            let du = su2(dh[0], dh[1]);
            &u.adjoint() * &du
        })
        .collect();
    let comm = a[1].commutator(&a[2]);
    Ok(3.0 * (&a[0] * &comm).trace().re)
}

/// Midpoint-rule winding number on an `n^3` grid.
pub fn winding_numerical(model: &BlochModel, n: usize) -> Result<WindingNumerical> {
    if model.momentum_dim() != 3 || !model.periodic() {
        return Err(ZbError::UnsupportedModel(format!("{} is not a 3D lattice model", model.name())));
    }
    if n < 2 {
        return Err(ZbError::GridTooCoarse("winding grid needs n >= 2".into()));
    }
    let (plus, minus) = chiral_split(model)?;
    let h = TAU / n as f64;
    let mid = |i: usize| (i as f64 + 0.5) * h;
    let slabs: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut s = 0.0;
            for j in 0..n {
                for l in 0..n {
                    s += density(model, &[mid(i), mid(j), mid(l)], &plus, minus[0])?;
                }
            }
            Ok(s)
        })
        .collect::<Result<_>>()?;
    let total: f64 = slabs.iter().sum();
    let raw = -total * h * h * h / (24.0 * PI * PI);
    let value = raw.round() as i64;
    Ok(WindingNumerical {
        value,
        raw,
        residual: (raw - value as f64).abs(),
        grid: n,
    })
}
