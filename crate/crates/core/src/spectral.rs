//! Dense Hermitian eigendecomposition, band projectors and unitary evolution.
//!
//! The eigensolver is a cyclic complex Jacobi iteration. For the matrix sizes
//! used here (n <= 8) it converges in a handful of sweeps to full double
//! precision and, unlike Householder-based routines, produces bit-identical
//! output for identical input on every platform we care about.
//!
//! Eigenvalues closer than [`DEGENERACY_TOL`] are grouped and share one
//! rank-g projector; individual eigenvectors inside such a group are an
//! arbitrary (but deterministic) orthonormal basis of the eigenspace.

use std::ops::{Deref, Range};

use crate::error::{Result, ZbError};
use crate::linalg::{vec_norm, CMatrix, C64, ZERO};

/// Eigenvalues closer than this are treated as one degenerate level.
pub const DEGENERACY_TOL: f64 = 1e-8;
/// Inputs with a larger Hermiticity defect are rejected.
pub const HERMITICITY_TOL: f64 = 1e-9;
/// Tolerance on `||psi|| = 1` for states handed to the dynamics routines.
pub const NORM_TOL: f64 = 1e-10;

const MAX_DIM: usize = 8;
const MAX_SWEEPS: usize = 100;

/// A Hermitian matrix of dimension 2..=8.
///
/// Construction symmetrizes the input, `(A + A^dagger) / 2`, so the stored
/// entries are Hermitian to rounding.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        let dim = m.dim();
        if !(2..=MAX_DIM).contains(&dim) {
            return Err(ZbError::UnsupportedDimension(dim));
        }
        let deviation = m.hermiticity_defect();
        if deviation > HERMITICITY_TOL || !deviation.is_finite() {
            return Err(ZbError::NotHermitian { deviation });
        }
        let sym = (&m + &m.adjoint()).scale_real(0.5);
        Ok(Self(sym))
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(CMatrix::zeros(dim))
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }
}

impl Deref for HermitianMatrix {
    type Target = CMatrix;
    fn deref(&self) -> &CMatrix {
        &self.0
    }
}

/// One (possibly degenerate) energy level.
#[derive(Clone, Debug)]
pub struct EigenGroup {
    /// Mean of the grouped eigenvalues.
    pub energy: f64,
    /// Indices into [`SpectralDecomposition::eigenvalues`].
    pub members: Range<usize>,
    /// Orthogonal projector onto the eigenspace.
    pub projector: CMatrix,
    /// Band velocity `tr(Q dH/dk_i) / g`, filled by [`SpectralDecomposition::fill_group_velocities`].
    pub velocity: Option<Vec<f64>>,
}

impl EigenGroup {
    pub fn degeneracy(&self) -> usize {
        self.members.len()
    }
}

#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<Vec<C64>>,
    groups: Vec<EigenGroup>,
}

impl SpectralDecomposition {
    /// Ascending eigenvalues, each repeated according to multiplicity.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Orthonormal eigenvectors; `eigenvectors()[i]` belongs to `eigenvalues()[i]`.
    pub fn eigenvectors(&self) -> &[Vec<C64>] {
        &self.eigenvectors
    }

    pub fn groups(&self) -> &[EigenGroup] {
        &self.groups
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Projector onto the span of eigenvectors `range` (ascending order).
    pub fn band_projector(&self, range: Range<usize>) -> CMatrix {
        let mut q = CMatrix::zeros(self.dim());
        for i in range {
            q += &CMatrix::outer(&self.eigenvectors[i], &self.eigenvectors[i]);
        }
        q
    }

    /// `sum_g E_g Q_g`
    pub fn reconstruct(&self) -> CMatrix {
        let mut h = CMatrix::zeros(self.dim());
        for g in &self.groups {
            h.add_scaled(&g.projector, g.energy);
        }
        h
    }

    /// Sets each group's velocity from the momentum derivatives `dH/dk_i`.
    pub fn fill_group_velocities(&mut self, gradients: &[HermitianMatrix]) {
        for g in &mut self.groups {
            let deg = g.degeneracy() as f64;
            let v = gradients
                .iter()
                .map(|d| g.projector.hs_inner(d).re / deg)
                .collect();
            g.velocity = Some(v);
        }
    }

    /// Smallest positive difference between distinct levels (infinite for a single level).
    pub fn min_gap(&self) -> f64 {
        self.groups
            .windows(2)
            .map(|w| w[1].energy - w[0].energy)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Diagonalizes `h` as `sum_m E_m Q_m`.
pub fn hermitian_eig(h: &HermitianMatrix) -> SpectralDecomposition {
    let n = h.dim();
    let mut a = h.as_matrix().clone();
    let mut v = CMatrix::identity(n);
    let scale = a.norm().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors: Vec<Vec<C64>> = order
        .iter()
        .map(|&i| fix_phase(v.column(i)))
        .collect();

    let groups = group_levels(&eigenvalues, &eigenvectors);
    SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        groups,
    }
}

/// One complex Jacobi rotation annihilating `a[(p, q)]`.
fn jacobi_rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let b = a[(p, q)];
    let babs = b.norm();
    if babs == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Rotation angle of the real symmetric block [[app, |b|], [|b|, aqq]].
    let tau = (aqq - app) / (2.0 * babs);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let phase = (b / babs).conj();
    // U = diag(1, e^{-i phi}) . [[c, s], [-s, c]] restricted to (p, q).
    let upp = C64::new(c, 0.0);
    let upq = C64::new(s, 0.0);
    let uqp = phase * (-s);
    let uqq = phase * c;

    let n = a.dim();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * upp + akq * uqp;
        a[(k, q)] = akp * upq + akq * uqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = upp.conj() * apk + uqp.conj() * aqk;
        a[(q, k)] = upq.conj() * apk + uqq.conj() * aqk;
    }
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * upp + vkq * uqp;
        v[(k, q)] = vkp * upq + vkq * uqq;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

/// Rotates `v` so its largest-modulus component (first one on ties) is real and positive.
pub fn fix_phase(mut v: Vec<C64>) -> Vec<C64> {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return v;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max - 1e-12)
        .expect("max exists");
    let phase = (v[pivot] / v[pivot].norm()).conj();
    for z in &mut v {
        *z *= phase;
    }
    v[pivot] = C64::new(v[pivot].re, 0.0);
    v
}

fn group_levels(eigenvalues: &[f64], eigenvectors: &[Vec<C64>]) -> Vec<EigenGroup> {
    let n = eigenvalues.len();
    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..=n {
        if i == n || eigenvalues[i] - eigenvalues[i - 1] > DEGENERACY_TOL {
            let members = start..i;
            let energy = eigenvalues[members.clone()].iter().sum::<f64>() / members.len() as f64;
            let mut projector = CMatrix::zeros(n);
            for m in members.clone() {
                projector += &CMatrix::outer(&eigenvectors[m], &eigenvectors[m]);
            }
            groups.push(EigenGroup {
                energy,
                members,
                projector,
                velocity: None,
            });
            start = i;
        }
    }
    groups
}

/// `psi(t) = sum_m e^{-i E_m t} Q_m psi0`
pub fn evolve(h: &HermitianMatrix, psi0: &[C64], t: f64) -> Result<Vec<C64>> {
    evolve_decomposed(&hermitian_eig(h), psi0, t)
}

/// Same as [`evolve`] with a precomputed decomposition.
pub fn evolve_decomposed(dec: &SpectralDecomposition, psi0: &[C64], t: f64) -> Result<Vec<C64>> {
    check_state(psi0, dec.dim())?;
    let mut out = vec![ZERO; psi0.len()];
    for g in dec.groups() {
        let phase = C64::from_polar(1.0, -g.energy * t);
        for (o, x) in out.iter_mut().zip(g.projector.mul_vec(psi0)) {
            *o += phase * x;
        }
    }
    Ok(out)
}

/// Checks the dimension and unit norm of a state vector.
pub fn check_state(psi: &[C64], dim: usize) -> Result<()> {
    if psi.len() != dim {
        return Err(ZbError::DimensionMismatch {
            expected: dim,
            got: psi.len(),
        });
    }
    let norm = vec_norm(psi);
    if (norm - 1.0).abs() > NORM_TOL || !norm.is_finite() {
        return Err(ZbError::NotNormalized { norm });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{inner, I, ONE};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn pauli_z_is_already_diagonal() {
        let h = HermitianMatrix::new(CMatrix::from_real_diagonal(&[1.0, -1.0])).unwrap();
        let dec = hermitian_eig(&h);
        assert_eq!(dec.eigenvalues(), &[-1.0, 1.0]);
        assert_eq!(dec.groups()[0].projector, CMatrix::from_real_diagonal(&[0.0, 1.0]));
        assert_eq!(dec.groups()[1].projector, CMatrix::from_real_diagonal(&[1.0, 0.0]));
    }

    #[test]
    fn rejects_non_hermitian_input_with_its_defect() {
        let m = CMatrix::from_rows(&[&[ONE, c(1.0)], &[c(0.0), ONE]]);
        match HermitianMatrix::new(m) {
            Err(ZbError::NotHermitian { deviation }) => assert!((deviation - 1.0).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_oversized_matrices() {
        assert!(matches!(
            HermitianMatrix::zeros(9),
            Err(ZbError::UnsupportedDimension(9))
        ));
    }

    #[test]
    fn degenerate_levels_share_a_projector() {
        let h = HermitianMatrix::new(CMatrix::from_real_diagonal(&[2.0, -1.0, 2.0 + 1e-10]))
            .unwrap();
        let dec = hermitian_eig(&h);
        assert_eq!(dec.groups().len(), 2);
        assert_eq!(dec.groups()[1].degeneracy(), 2);
        let q = &dec.groups()[1].projector;
        assert!((&(q * q) - q).max_abs() < 1e-14);
        assert!((q.trace().re - 2.0).abs() < 1e-14);
    }

    #[test]
    fn phase_convention_makes_largest_component_real_positive() {
        let v = fix_phase(vec![c(0.1), I * 0.9, c(0.2)]);
        assert!(v[1].im == 0.0 && v[1].re > 0.0);
    }

    #[test]
    fn evolution_at_zero_time_is_identity() {
        let h = HermitianMatrix::new(CMatrix::from_rows(&[&[c(0.3), I], &[-I, c(-0.2)]])).unwrap();
        let psi = vec![c(0.6), C64::new(0.0, 0.8)];
        let out = evolve(&h, &psi, 0.0).unwrap();
        for (a, b) in out.iter().zip(&psi) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn evolution_rejects_unnormalized_state() {
        let h = HermitianMatrix::new(CMatrix::identity(2)).unwrap();
        assert!(matches!(
            evolve(&h, &[c(1.0), c(1.0)], 1.0),
            Err(ZbError::NotNormalized { .. })
        ));
    }

    #[test]
    fn half_spin_precession_flips_spin_after_half_period() {
        // H = m sigma_z / 2 at p = 0; after t = pi/m the +x spinor becomes -x.
        let m = 1.7;
        let h = HermitianMatrix::new(CMatrix::from_real_diagonal(&[m / 2.0, -m / 2.0])).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = evolve(&h, &[c(s), c(s)], std::f64::consts::PI / m).unwrap();
        let minus_x = [c(s), c(-s)];
        assert!((inner(&minus_x, &psi).norm() - 1.0).abs() < 1e-12);
    }
}
