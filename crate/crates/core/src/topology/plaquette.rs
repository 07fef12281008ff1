//! Chern numbers from gauge-invariant plaquette products on a discretized zone.
//!
//! With link variables `U_mu(k) = det <u_k | u_{k + mu}>` over the chosen
//! bands, `C = -(1/2 pi) sum_k arg[U_1(k) U_2(k + 1) U_1(k + 2)^* U_2(k)^*]`,
//! i.e. Berry connection `A = i <u | grad u>`.

use std::f64::consts::TAU;
use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ZbError};
use crate::linalg::{inner, CMatrix, C64};
use crate::model::BlochModel;
use crate::spectral::hermitian_eig;

pub const DEFAULT_GRID: usize = 64;
pub const MAX_GRID: usize = 512;
/// Smallest allowed gap between the chosen bands and their neighbours.
pub const TOUCH_TOL: f64 = 1e-6;
/// Largest allowed distance of the raw sum from an integer.
pub const INTEGER_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaquetteChern {
    pub value: i64,
    pub raw: f64,
    pub grid: usize,
}

fn check_model(model: &BlochModel, bands: &Range<usize>) -> Result<()> {
    if !model.periodic() || model.momentum_dim() != 2 {
        return Err(ZbError::UnsupportedModel(format!(
            "plaquette Chern numbers need a periodic 2D model, not {}",
            model.name()
        )));
    }
    if bands.is_empty() || bands.end > model.band_count() {
        return Err(ZbError::BandLabelOutOfRange {
            label: bands.end.saturating_sub(1) as u32,
            max: model.band_count() as u32 - 1,
        });
    }
    Ok(())
}

/// Eigenvectors of `bands` at `k`, or the band-touching error.
fn band_vectors(model: &BlochModel, k: [f64; 2], bands: &Range<usize>) -> Result<Vec<Vec<C64>>> {
    let dec = hermitian_eig(&model.evaluate(&k)?);
    let e = dec.eigenvalues();
    let mut gap = f64::INFINITY;
    if bands.start > 0 {
        gap = gap.min(e[bands.start] - e[bands.start - 1]);
    }
    if bands.end < e.len() {
        gap = gap.min(e[bands.end] - e[bands.end - 1]);
    }
    if gap <= TOUCH_TOL {
        return Err(ZbError::BandTouching { k: k.to_vec(), gap });
    }
    Ok(dec.eigenvectors()[bands.clone()].to_vec())
}

fn link(a: &[Vec<C64>], b: &[Vec<C64>]) -> C64 {
    let g = a.len();
    if g == 1 {
        return inner(&a[0], &b[0]);
    }
    let mut m = Vec::with_capacity(g * g);
    for u in a {
        for v in b {
            m.push(inner(u, v));
        }
    }
    CMatrix::from_row_major(g, m).det()
}

/// Plaquette sum on an `n x n` grid for the composite of `bands`.
pub fn chern_plaquette_fixed(model: &BlochModel, bands: Range<usize>, n: usize) -> Result<PlaquetteChern> {
    check_model(model, &bands)?;
    if n < 2 {
        return Err(ZbError::GridTooCoarse("plaquette grid needs n >= 2".into()));
    }
    let vecs: Vec<Vec<Vec<C64>>> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            band_vectors(model, [TAU * i as f64 / n as f64, TAU * j as f64 / n as f64], &bands)
        })
        .collect::<Result<_>>()?;
    let at = |i: usize, j: usize| &vecs[(i % n) * n + (j % n)];
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    let (u1, u2, u3, u4) = (at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1));
                    (link(u1, u2) * link(u2, u3) * link(u3, u4) * link(u4, u1)).arg()
                })
                .sum()
        })
        .collect();
    let raw = -rows.iter().sum::<f64>() / TAU;
    Ok(PlaquetteChern {
        value: raw.round() as i64,
        raw,
        grid: n,
    })
}

/// Doubles the grid from [`DEFAULT_GRID`] up to [`MAX_GRID`] until two
/// successive grids give the same integer, each within [`INTEGER_TOL`].
pub fn chern_plaquette_bands(model: &BlochModel, bands: Range<usize>) -> Result<PlaquetteChern> {
    let mut n = DEFAULT_GRID;
    let mut prev: Option<PlaquetteChern> = None;
    while n <= MAX_GRID {
        let cur = chern_plaquette_fixed(model, bands.clone(), n)?;
        let quantized = (cur.raw - cur.value as f64).abs() <= INTEGER_TOL;
        if let Some(p) = prev {
            if quantized && p.value == cur.value {
                return Ok(cur);
            }
        }
        prev = quantized.then_some(cur);
        n *= 2;
    }
    Err(ZbError::NotConverged(format!(
        "plaquette Chern number did not settle up to a {MAX_GRID} x {MAX_GRID} grid"
    )))
}

/// Chern number of a single band (ascending order).
pub fn chern_plaquette(model: &BlochModel, band: usize) -> Result<i64> {
    chern_plaquette_bands(model, band..band + 1).map(|c| c.value)
}
