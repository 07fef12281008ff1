//! Local indices from the linearized Hamiltonian at high-symmetry points.

use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Result, ZbError};
use crate::model::{BlochModel, Hsp, ModelKind};
use crate::spectral::hermitian_eig;

/// Masses smaller than this are treated as a gap closing.
pub const MASS_TOL: f64 = 1e-9;
/// Relative size of `H(K) - m G_mass` that still counts as proportional.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// A multiple of one half, stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Deserialize)]
#[serde(from = "f64")]
pub struct HalfInt(i64);

impl HalfInt {
    pub const fn from_twice(twice: i64) -> Self {
        Self(twice)
    }

    pub const fn from_int(n: i64) -> Self {
        Self(2 * n)
    }

    pub const fn twice(self) -> i64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn as_integer(self) -> Option<i64> {
        (self.0 % 2 == 0).then_some(self.0 / 2)
    }
}

impl From<f64> for HalfInt {
    fn from(x: f64) -> Self {
        Self((2.0 * x).round() as i64)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_integer() {
            Some(n) => write!(f, "{n}"),
            None => write!(f, "{}/2", self.0),
        }
    }
}

/// Integers serialize as JSON integers, odd halves as decimals.
impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.as_integer() {
            Some(n) => s.serialize_i64(n),
            None => s.serialize_f64(self.value()),
        }
    }
}

/// `H(K + q) ~ m G_mass + sum_{a,i} J[a][i] q_i G_a` at a high-symmetry point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HspLinearization {
    pub label: String,
    pub k: Vec<f64>,
    /// `d c_a / d k_a` for each velocity generator `a`.
    pub velocities: Vec<f64>,
    /// `jacobian[a][i] = d c_a / d k_i`.
    pub jacobian: Vec<Vec<f64>>,
    pub mass: f64,
    pub mass_generator: String,
    pub velocity_generators: Vec<String>,
    /// Smallest level spacing of `H(K)`.
    pub gap: f64,
}

impl HspLinearization {
    /// Sign of the velocity Jacobian determinant (`sgn(v_x v_y [v_z])` when diagonal).
    pub fn velocity_sign(&self) -> i8 {
        let d = det(&self.jacobian);
        if d > 0.0 {
            1
        } else if d < 0.0 {
            -1
        } else {
            0
        }
    }

    pub fn mass_sign(&self) -> i8 {
        if self.mass > 0.0 {
            1
        } else {
            -1
        }
    }

    /// `sgn(v_x v_y m)`, the 2D index.
    pub fn nu(&self) -> i8 {
        self.velocity_sign() * self.mass_sign()
    }
}

fn det(j: &[Vec<f64>]) -> f64 {
    match j.len() {
        1 => j[0][0],
        2 => j[0][0] * j[1][1] - j[0][1] * j[1][0],
        3 => {
            j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1])
                - j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0])
                + j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0])
        }
        _ => f64::NAN,
    }
}

/// Projects `H(K)` and `dH/dk_i(K)` onto the model's mass and velocity generators.
pub fn linearize_at_hsp(model: &BlochModel, k: &[f64]) -> Result<HspLinearization> {
    let (Some(mass_idx), Some(vel_idx)) = (model.mass_generator(), model.velocity_generators()) else {
        return Err(ZbError::UnsupportedModel(format!(
            "{} has no mass and velocity generators",
            model.name()
        )));
    };
    let gens = model.generators();
    let h = model.evaluate(k)?;
    let mass = gens.project(&h, mass_idx);
    let mut rest = h.as_matrix().clone();
    rest.add_scaled(&gens.matrices()[mass_idx], -mass);
    let residual = rest.norm();
    if residual > RESIDUAL_TOL * h.norm().max(1.0) {
        return Err(ZbError::NotAnHsp {
            k: k.to_vec(),
            residual,
        });
    }
    if mass.abs() < MASS_TOL {
        return Err(ZbError::Gapless(format!("mass {mass:.3e} at k = {k:?}")));
    }
    let grads = model.gradient(k)?;
    let jacobian: Vec<Vec<f64>> = vel_idx
        .iter()
        .map(|&a| grads.iter().map(|d| gens.project(d, a)).collect())
        .collect();
    let velocities = (0..vel_idx.len()).map(|a| jacobian[a][a]).collect();
    let label = model
        .hsps()
        .iter()
        .find(|p| p.k.iter().zip(k).all(|(a, b)| (a - b).abs() < 1e-12))
        .map(|p| p.label.clone())
        .unwrap_or_default();
    Ok(HspLinearization {
        label,
        k: k.to_vec(),
        velocities,
        jacobian,
        mass,
        mass_generator: gens.labels()[mass_idx].clone(),
        velocity_generators: vel_idx.iter().map(|&a| gens.labels()[a].clone()).collect(),
        gap: hermitian_eig(&h).min_gap(),
    })
}

/// Points entering the HSP sum for a 2D Chern number.
///
/// For a Kane-Mele spin sector these are the Dirac points `K` and `K'`; the
/// other zone-boundary points are not proportional to the mass generator.
pub fn index_points(model: &BlochModel) -> Result<Vec<Hsp>> {
    match model.kind() {
        ModelKind::KaneMele(_) => Err(ZbError::UnsupportedModel(
            "the four-band Kane-Mele model has no single mass generator; use a spin sector".into(),
        )),
        ModelKind::KaneMeleSector { .. } => Ok(model
            .hsps()
            .iter()
            .filter(|p| p.label == "K" || p.label == "K'")
            .cloned()
            .collect()),
        _ => Ok(model.hsps().to_vec()),
    }
}

/// Spin `J` of a model whose bands are labelled `j = -J, ..., J` from the bottom.
fn spin_of(model: &BlochModel) -> Result<HalfInt> {
    if model.momentum_dim() != 2 {
        return Err(ZbError::UnsupportedModel(format!(
            "Chern numbers need a 2D model, {} is {}D",
            model.name(),
            model.momentum_dim()
        )));
    }
    Ok(HalfInt::from_twice(model.band_count() as i64 - 1))
}

/// Band spin index of band `band` (ascending energy).
pub fn band_j(model: &BlochModel, band: usize) -> Result<HalfInt> {
    let big_j = spin_of(model)?;
    if band >= model.band_count() {
        return Err(ZbError::BandLabelOutOfRange {
            label: band as u32,
            max: model.band_count() as u32 - 1,
        });
    }
    Ok(HalfInt::from_twice(2 * band as i64 - big_j.twice()))
}

/// `Ch_j = -j sum_K nu_K` over [`index_points`].
pub fn chern_from_hsp(model: &BlochModel, j: HalfInt) -> Result<HalfInt> {
    let big_j = spin_of(model)?;
    if j.twice().abs() > big_j.twice() || (big_j.twice() - j.twice()) % 2 != 0 {
        return Err(ZbError::InvalidParameter(format!("j = {j} is not a level of spin {big_j}")));
    }
    let sum: i64 = index_points(model)?
        .iter()
        .map(|p| linearize_at_hsp(model, &p.k).map(|l| l.nu() as i64))
        .sum::<Result<i64>>()?;
    Ok(HalfInt::from_twice(-j.twice() * sum))
}

/// [`chern_from_hsp`] for every band, lowest first.
pub fn chern_hsp_by_band(model: &BlochModel) -> Result<Vec<HalfInt>> {
    (0..model.band_count())
        .map(|b| chern_from_hsp(model, band_j(model, b)?))
        .collect()
}

/// `w = (1/2) sum_K sgn(v_x v_y v_z) sgn(m)` over the eight 3D high-symmetry points.
pub fn winding_from_hsp(model: &BlochModel) -> Result<i64> {
    if model.momentum_dim() != 3 {
        return Err(ZbError::UnsupportedModel(format!("{} is not a 3D model", model.name())));
    }
    let sum: i64 = model
        .hsps()
        .iter()
        .map(|p| {
            linearize_at_hsp(model, &p.k)
                .map(|l| l.velocity_sign() as i64 * l.mass_sign() as i64)
        })
        .sum::<Result<i64>>()?;
    debug_assert!(sum % 2 == 0);
    Ok(sum / 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{chiral_ti_3d, maxwell_lattice};
    use std::f64::consts::PI;

    #[test]
    fn maxwell_linearizations() {
        let m = maxwell_lattice(1.0, 1.0).unwrap();
        let g = linearize_at_hsp(&m, &[0.0, 0.0]).unwrap();
        assert_eq!(g.velocities, vec![2.0, 2.0]);
        assert!((g.mass + 2.0).abs() < 1e-15);
        assert_eq!(g.nu(), -1);
        assert_eq!(g.label, "(0,0)");
        let p = linearize_at_hsp(&m, &[PI, PI]).unwrap();
        assert_eq!(p.velocities, vec![-2.0, -2.0]);
        assert!((p.mass - 6.0).abs() < 1e-14);
        assert_eq!(p.nu(), 1);
    }

    #[test]
    fn chiral_linearization() {
        let m = chiral_ti_3d(2.0);
        let l = linearize_at_hsp(&m, &[PI, 0.0, 0.0]).unwrap();
        assert_eq!(l.velocity_sign(), -1);
        assert_eq!(l.mass_sign(), 1);
        assert!((l.mass - 1.0).abs() < 1e-15);
    }

    #[test]
    fn off_hsp_and_gapless_are_errors() {
        let m = maxwell_lattice(1.0, 1.0).unwrap();
        assert!(matches!(linearize_at_hsp(&m, &[0.3, 0.0]), Err(ZbError::NotAnHsp { .. })));
        let crit = maxwell_lattice(1.0, 2.0).unwrap();
        assert!(matches!(linearize_at_hsp(&crit, &[0.0, 0.0]), Err(ZbError::Gapless(_))));
        assert!(chern_from_hsp(&crit, HalfInt::from_int(-1)).is_err());
    }

    #[test]
    fn table_values() {
        let j = HalfInt::from_int(-1);
        let ch = |big_m: f64| chern_from_hsp(&maxwell_lattice(1.0, big_m).unwrap(), j).unwrap();
        assert_eq!(ch(1.0), HalfInt::from_int(-2));
        assert_eq!(ch(-1.0), HalfInt::from_int(2));
        assert_eq!(ch(3.0), HalfInt::from_int(0));
        assert_eq!(ch(-3.0), HalfInt::from_int(0));
    }

    #[test]
    fn winding_values() {
        for (big_m, w) in [(4.0, 0), (2.0, -1), (0.0, 2), (-2.0, -1), (-4.0, 0)] {
            assert_eq!(winding_from_hsp(&chiral_ti_3d(big_m)).unwrap(), w, "M = {big_m}");
        }
    }

    #[test]
    fn half_int_display_and_json() {
        assert_eq!(HalfInt::from_twice(-3).to_string(), "-3/2");
        assert_eq!(HalfInt::from_int(2).to_string(), "2");
        assert_eq!(serde_json::to_string(&HalfInt::from_int(-2)).unwrap(), "-2");
        assert_eq!(serde_json::to_string(&HalfInt::from_twice(1)).unwrap(), "0.5");
    }
}
