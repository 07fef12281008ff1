//! Generator sets: spin-J matrices (ladder and Cartesian bases), Pauli and
//! Gell-Mann matrices.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ZbError};
use crate::linalg::{CMatrix, C64, I, ONE, ZERO};
use crate::spectral::HermitianMatrix;

/// A spin quantum number stored as the integer `2J`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Spin {
    two_j: u32,
}

impl Spin {
    pub const HALF: Spin = Spin { two_j: 1 };
    pub const ONE: Spin = Spin { two_j: 2 };

    /// Spin `two_j / 2`; `two_j` must be at least 1 and the multiplicity at most 8.
    pub fn from_twice(two_j: u32) -> Result<Self> {
        if two_j == 0 || two_j > 7 {
            return Err(ZbError::InvalidParameter(format!(
                "2J = {two_j} outside the supported range 1..=7"
            )));
        }
        Ok(Self { two_j })
    }

    /// Parses a real value such as `1.5`; it must be a positive half-integer.
    pub fn from_f64(j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        if (twice - twice.round()).abs() > 1e-9 || twice.round() < 1.0 {
            return Err(ZbError::InvalidParameter(format!(
                "J = {j} is not a positive half-integer"
            )));
        }
        Self::from_twice(twice.round() as u32)
    }

    pub fn twice(self) -> u32 {
        self.two_j
    }

    pub fn value(self) -> f64 {
        self.two_j as f64 / 2.0
    }

    /// Number of states `2J + 1`.
    pub fn multiplicity(self) -> usize {
        self.two_j as usize + 1
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.two_j.is_multiple_of(2) {
            write!(f, "{}", self.two_j / 2)
        } else {
            write!(f, "{}/2", self.two_j)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinBasis {
    /// `J_z = diag(J, J-1, ..., -J)`, off-diagonals from `J_+`.
    Ladder,
    /// `(J_k)_{ij} = -i eps_{kij}`; only defined for J = 1.
    Cartesian,
}

/// An ordered, labelled list of Hermitian generators of equal dimension.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    dim: usize,
    labels: Vec<String>,
    matrices: Vec<HermitianMatrix>,
}

impl GeneratorSet {
    pub fn new(labels: Vec<String>, matrices: Vec<HermitianMatrix>) -> Result<Self> {
        if labels.len() != matrices.len() || matrices.is_empty() {
            return Err(ZbError::InvalidParameter(
                "generator labels and matrices must be non-empty and paired".into(),
            ));
        }
        let dim = matrices[0].dim();
        if let Some(m) = matrices.iter().find(|m| m.dim() != dim) {
            return Err(ZbError::DimensionMismatch {
                expected: dim,
                got: m.dim(),
            });
        }
        Ok(Self {
            dim,
            labels,
            matrices,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrices(&self) -> &[HermitianMatrix] {
        &self.matrices
    }

    pub fn get(&self, label: &str) -> Option<&HermitianMatrix> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| &self.matrices[i])
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `sum_G c_G G`
    pub fn combine(&self, coeffs: &[f64]) -> CMatrix {
        assert_eq!(coeffs.len(), self.len());
        let mut out = CMatrix::zeros(self.dim);
        for (m, &c) in self.matrices.iter().zip(coeffs) {
            if c != 0.0 {
                out.add_scaled(m, c);
            }
        }
        out
    }

    /// Hilbert-Schmidt coefficient `tr(G A) / tr(G G)` of `a` along generator `index`.
    pub fn project(&self, a: &CMatrix, index: usize) -> f64 {
        let g = &self.matrices[index];
        g.hs_inner(a).re / g.hs_inner(g).re
    }

    /// Projection coefficients onto every generator.
    pub fn project_all(&self, a: &CMatrix) -> Vec<f64> {
        (0..self.len()).map(|i| self.project(a, i)).collect()
    }
}

fn herm(m: CMatrix) -> HermitianMatrix {
    HermitianMatrix::new(m).expect("generator constructed Hermitian")
}

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Spin-J matrices `(J_x, J_y, J_z)`.
pub fn spin_matrices(spin: Spin, basis: SpinBasis) -> Result<GeneratorSet> {
    match basis {
        SpinBasis::Ladder => Ok(ladder_spin_matrices(spin)),
        SpinBasis::Cartesian if spin == Spin::ONE => Ok(cartesian_spin_one()),
        SpinBasis::Cartesian => Err(ZbError::UnsupportedBasis {
            two_j: spin.twice(),
            basis: "cartesian",
        }),
    }
}

fn ladder_spin_matrices(spin: Spin) -> GeneratorSet {
    let j = spin.value();
    let n = spin.multiplicity();
    // Row i carries m_i = J - i.
    let m_of = |i: usize| j - i as f64;
    let mut jx = CMatrix::zeros(n);
    let mut jy = CMatrix::zeros(n);
    let mut jz = CMatrix::zeros(n);
    for i in 0..n {
        jz[(i, i)] = C64::new(m_of(i), 0.0);
    }
    for i in 1..n {
        // <m+1| J_+ |m> with m = m_i
        let m = m_of(i);
        let raise = (j * (j + 1.0) - m * (m + 1.0)).sqrt();
        jx[(i - 1, i)] = C64::new(raise / 2.0, 0.0);
        jx[(i, i - 1)] = C64::new(raise / 2.0, 0.0);
        jy[(i - 1, i)] = C64::new(0.0, -raise / 2.0);
        jy[(i, i - 1)] = C64::new(0.0, raise / 2.0);
    }
    GeneratorSet::new(labels(&["Jx", "Jy", "Jz"]), vec![herm(jx), herm(jy), herm(jz)])
        .expect("consistent dimensions")
}

fn cartesian_spin_one() -> GeneratorSet {
    let jx = CMatrix::from_rows(&[&[ZERO, ZERO, ZERO], &[ZERO, ZERO, -I], &[ZERO, I, ZERO]]);
    let jy = CMatrix::from_rows(&[&[ZERO, ZERO, I], &[ZERO, ZERO, ZERO], &[-I, ZERO, ZERO]]);
    let jz = CMatrix::from_rows(&[&[ZERO, -I, ZERO], &[I, ZERO, ZERO], &[ZERO, ZERO, ZERO]]);
    GeneratorSet::new(labels(&["Jx", "Jy", "Jz"]), vec![herm(jx), herm(jy), herm(jz)])
        .expect("consistent dimensions")
}

/// Pauli matrices `(sigma_x, sigma_y, sigma_z)`.
pub fn pauli() -> GeneratorSet {
    let sx = CMatrix::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]]);
    let sy = CMatrix::from_rows(&[&[ZERO, -I], &[I, ZERO]]);
    let sz = CMatrix::from_rows(&[&[ONE, ZERO], &[ZERO, -ONE]]);
    GeneratorSet::new(labels(&["sx", "sy", "sz"]), vec![herm(sx), herm(sy), herm(sz)])
        .expect("consistent dimensions")
}

/// The eight Gell-Mann matrices in the standard normalization `tr(l_a l_b) = 2 delta_ab`.
pub fn gell_mann() -> GeneratorSet {
    let r3 = 1.0 / 3f64.sqrt();
    let mut mats = Vec::with_capacity(8);
    let offdiag = |i: usize, j: usize, imaginary: bool| {
        let mut m = CMatrix::zeros(3);
        if imaginary {
            m[(i, j)] = -I;
            m[(j, i)] = I;
        } else {
            m[(i, j)] = ONE;
            m[(j, i)] = ONE;
        }
        m
    };
    mats.push(offdiag(0, 1, false));
    mats.push(offdiag(0, 1, true));
    mats.push(CMatrix::from_real_diagonal(&[1.0, -1.0, 0.0]));
    mats.push(offdiag(0, 2, false));
    mats.push(offdiag(0, 2, true));
    mats.push(offdiag(1, 2, false));
    mats.push(offdiag(1, 2, true));
    mats.push(CMatrix::from_real_diagonal(&[r3, r3, -2.0 * r3]));
    GeneratorSet::new(
        labels(&["l1", "l2", "l3", "l4", "l5", "l6", "l7", "l8"]),
        mats.into_iter().map(herm).collect(),
    )
    .expect("consistent dimensions")
}

/// ZB amplitude factor `sqrt((J+1)(a+b-1) - ab)` for adjacent bands `|a - b| = 1`, else 0.
///
/// Band labels run `1..=2J+1` from the lowest band. The value is exactly twice
/// `|<a|J_x|a+1>|` in the ladder basis.
pub fn adjacent_amplitude(spin: Spin, a: u32, b: u32) -> Result<f64> {
    let max = spin.twice() + 1;
    for label in [a, b] {
        if label == 0 || label > max {
            return Err(ZbError::BandLabelOutOfRange { label, max });
        }
    }
    if a.abs_diff(b) != 1 {
        return Ok(0.0);
    }
    let j = spin.value();
    let (a, b) = (a as f64, b as f64);
    Ok(((j + 1.0) * (a + b - 1.0) - a * b).sqrt())
}

/// Antisymmetric structure constants `f_abc` of a generator set, from
/// `[G_a, G_b] = 2 i f_abc G_c` (Gell-Mann normalization).
pub fn structure_constants(set: &GeneratorSet) -> Vec<Vec<Vec<f64>>> {
    let n = set.len();
    let mats = set.matrices();
    let mut f = vec![vec![vec![0.0; n]; n]; n];
    for a in 0..n {
        for b in 0..n {
            let comm = mats[a].commutator(&mats[b]);
            for c in 0..n {
                // tr([G_a, G_b] G_c) = 2i f_abc tr(G_c G_c)
                let num = mats[c].hs_inner(&comm);
                let den = mats[c].hs_inner(&mats[c]).re;
                f[a][b][c] = (num / (I * 2.0)).re / den;
            }
        }
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::hermitian_eig;

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        (a - b).max_abs() < tol
    }

    #[test]
    fn half_spin_is_half_pauli() {
        let s = spin_matrices(Spin::HALF, SpinBasis::Ladder).unwrap();
        let p = pauli();
        for (j, sigma) in s.matrices().iter().zip(p.matrices()) {
            assert!(close(j, &sigma.scale_real(0.5), 1e-15));
        }
    }

    #[test]
    fn cartesian_spin_one_matches_printed_matrices() {
        let s = spin_matrices(Spin::ONE, SpinBasis::Cartesian).unwrap();
        let jz = s.get("Jz").unwrap();
        assert_eq!(jz[(0, 1)], -I);
        assert_eq!(jz[(1, 0)], I);
        let jx = s.get("Jx").unwrap();
        assert_eq!(jx[(1, 2)], -I);
        assert_eq!(jx[(2, 1)], I);
        let jy = s.get("Jy").unwrap();
        assert_eq!(jy[(0, 2)], I);
        assert_eq!(jy[(2, 0)], -I);
    }

    #[test]
    fn cartesian_requires_spin_one() {
        let three_halves = Spin::from_twice(3).unwrap();
        assert!(matches!(
            spin_matrices(three_halves, SpinBasis::Cartesian),
            Err(ZbError::UnsupportedBasis { two_j: 3, .. })
        ));
    }

    #[test]
    fn three_halves_top_element() {
        let s = spin_matrices(Spin::from_twice(3).unwrap(), SpinBasis::Ladder).unwrap();
        let jx = s.get("Jx").unwrap();
        assert!((jx[(0, 1)].re - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn ladder_jz_is_descending_diagonal() {
        let s = spin_matrices(Spin::from_twice(4).unwrap(), SpinBasis::Ladder).unwrap();
        let jz = s.get("Jz").unwrap();
        let diag: Vec<f64> = (0..5).map(|i| jz[(i, i)].re).collect();
        assert_eq!(diag, vec![2.0, 1.0, 0.0, -1.0, -2.0]);
    }

    #[test]
    fn spin_one_bases_share_spectrum() {
        for basis in [SpinBasis::Ladder, SpinBasis::Cartesian] {
            let s = spin_matrices(Spin::ONE, basis).unwrap();
            for m in s.matrices() {
                let ev = hermitian_eig(m).eigenvalues().to_vec();
                for (e, want) in ev.iter().zip([-1.0, 0.0, 1.0]) {
                    assert!((e - want).abs() < 1e-13, "{basis:?}: {ev:?}");
                }
            }
        }
    }

    #[test]
    fn gell_mann_normalization_and_l7() {
        let g = gell_mann();
        for (a, la) in g.matrices().iter().enumerate() {
            for (b, lb) in g.matrices().iter().enumerate() {
                let tr = (&**la * &**lb).trace();
                let want = if a == b { 2.0 } else { 0.0 };
                assert!((tr.re - want).abs() < 1e-14 && tr.im.abs() < 1e-14);
            }
        }
        let l7 = g.get("l7").unwrap();
        assert_eq!(l7[(1, 2)], -I);
        assert_eq!(l7[(2, 1)], I);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi_plus = [ZERO, C64::new(s, 0.0), C64::new(0.0, s)];
        let image = l7.mul_vec(&phi_plus);
        for (x, y) in image.iter().zip(&phi_plus) {
            assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn l4_to_l7_have_spectrum_minus_one_zero_one() {
        let g = gell_mann();
        for name in ["l4", "l5", "l6", "l7"] {
            let ev = hermitian_eig(g.get(name).unwrap()).eigenvalues().to_vec();
            for (e, want) in ev.iter().zip([-1.0, 0.0, 1.0]) {
                assert!((e - want).abs() < 1e-14);
            }
            assert!(g.get(name).unwrap().trace().norm() < 1e-15);
        }
    }

    #[test]
    fn gell_mann_structure_constants_are_antisymmetric() {
        let f = structure_constants(&gell_mann());
        for a in 0..8 {
            for b in 0..8 {
                for c in 0..8 {
                    assert!((f[a][b][c] + f[b][a][c]).abs() < 1e-14);
                    assert!((f[a][b][c] + f[a][c][b]).abs() < 1e-14);
                }
            }
        }
        // f_123 = 1
        assert!((f[0][1][2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn adjacent_amplitude_values() {
        let amp = |two_j, a, b| adjacent_amplitude(Spin::from_twice(two_j).unwrap(), a, b).unwrap();
        assert!((amp(1, 1, 2) - 1.0).abs() < 1e-15);
        assert_eq!(amp(2, 1, 3), 0.0);
        assert!((amp(2, 1, 2) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(amp(3, 2, 3), amp(3, 3, 2));
    }

    #[test]
    fn adjacent_amplitude_rejects_bad_labels() {
        assert!(matches!(
            adjacent_amplitude(Spin::ONE, 0, 1),
            Err(ZbError::BandLabelOutOfRange { label: 0, max: 3 })
        ));
        assert!(adjacent_amplitude(Spin::ONE, 3, 4).is_err());
    }

    #[test]
    fn spin_parsing() {
        assert_eq!(Spin::from_f64(2.5).unwrap().twice(), 5);
        assert!(Spin::from_f64(0.75).is_err());
        assert!(Spin::from_f64(0.0).is_err());
        assert_eq!(Spin::from_twice(3).unwrap().to_string(), "3/2");
    }
}
