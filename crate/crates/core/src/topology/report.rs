//! JSON summary of the invariants of one model.

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::Result;
use crate::model::{BlochModel, ModelKind};

use super::hsp::{chern_hsp_by_band, index_points, linearize_at_hsp, winding_from_hsp, HalfInt};
use super::plaquette::chern_plaquette;
use super::z2::{spin_up_mass, z2_kane_mele};

/// Named parameters, serialized as an object in their original order.
#[derive(Clone, Debug, PartialEq)]
pub struct Params(pub Vec<(String, f64)>);

impl Serialize for Params {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

/// `sgn(v_x v_y m)` in 2D, `(sgn(v_x v_y v_z), sgn(m))` in 3D.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Nu {
    Planar(i8),
    Spatial([i8; 2]),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HspEntry {
    pub k: Vec<f64>,
    pub v: Vec<f64>,
    pub m: f64,
    pub nu: Nu,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantReport {
    pub model: String,
    pub params: Params,
    pub hsp: Vec<HspEntry>,
    /// Per band, lowest first.
    pub chern_hsp: Option<Vec<HalfInt>>,
    /// Per band, lowest first.
    pub chern_plaquette: Option<Vec<i64>>,
    pub winding: Option<i64>,
    pub z2: Option<u8>,
}

/// Which global calculations to include.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReportOptions {
    pub plaquette: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self { plaquette: true }
    }
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Spin-up linearization of the four-band Kane-Mele model at `K` and `K'`.
fn kane_mele_entries(model: &BlochModel) -> Result<Vec<HspEntry>> {
    let gens = model.generators();
    let (ix, iy) = (gens.index_of("sx.s0").unwrap(), gens.index_of("sy.s0").unwrap());
    model
        .hsps()
        .iter()
        .filter(|p| p.label == "K" || p.label == "K'")
        .map(|p| {
            let m = spin_up_mass(model, &p.k)?;
            let g = model.gradient(&p.k)?;
            let jac = [
                [gens.project(&g[0], ix), gens.project(&g[1], ix)],
                [gens.project(&g[0], iy), gens.project(&g[1], iy)],
            ];
            let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
            Ok(HspEntry {
                k: p.k.clone(),
                v: vec![jac[0][0], jac[1][1]],
                m,
                nu: Nu::Planar(sign(det) * sign(m)),
            })
        })
        .collect()
}

pub fn invariant_report(model: &BlochModel, options: ReportOptions) -> Result<InvariantReport> {
    let params = Params(model.params().into_iter().map(|(k, v)| (k.to_string(), v)).collect());
    let mut report = InvariantReport {
        model: model.name().to_string(),
        params,
        hsp: Vec::new(),
        chern_hsp: None,
        chern_plaquette: None,
        winding: None,
        z2: None,
    };
    match model.kind() {
        ModelKind::KaneMele(_) => {
            report.hsp = kane_mele_entries(model)?;
            report.z2 = Some(z2_kane_mele(model)?);
        }
        ModelKind::ChiralTi { .. } => {
            for p in model.hsps() {
                let l = linearize_at_hsp(model, &p.k)?;
                report.hsp.push(HspEntry {
                    k: l.k.clone(),
                    v: l.velocities.clone(),
                    m: l.mass,
                    nu: Nu::Spatial([l.velocity_sign(), l.mass_sign()]),
                });
            }
            report.winding = Some(winding_from_hsp(model)?);
        }
        _ => {
            for p in index_points(model)? {
                let l = linearize_at_hsp(model, &p.k)?;
                report.hsp.push(HspEntry {
                    k: l.k.clone(),
                    v: l.velocities.clone(),
                    m: l.mass,
                    nu: Nu::Planar(l.nu()),
                });
            }
            report.chern_hsp = Some(chern_hsp_by_band(model)?);
            if options.plaquette && model.periodic() {
                report.chern_plaquette = Some(
                    (0..model.band_count())
                        .map(|b| chern_plaquette(model, b))
                        .collect::<Result<_>>()?,
                );
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{chiral_ti_3d, maxwell_lattice};

    #[test]
    fn maxwell_report_json_shape() {
        let r = invariant_report(&maxwell_lattice(1.0, 1.0).unwrap(), ReportOptions::default()).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["model"], "maxwell");
        assert_eq!(v["params"]["M"], 1.0);
        assert_eq!(v["hsp"].as_array().unwrap().len(), 4);
        assert_eq!(v["hsp"][0]["nu"], -1);
        assert_eq!(v["chern_hsp"], serde_json::json!([-2, 0, 2]));
        assert_eq!(v["chern_plaquette"], serde_json::json!([-2, 0, 2]));
        assert!(v["winding"].is_null() && v["z2"].is_null());
    }

    #[test]
    fn chiral_report_has_pairs_and_winding() {
        let r = invariant_report(&chiral_ti_3d(2.0), ReportOptions::default()).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["winding"], -1);
        assert_eq!(v["hsp"][0]["nu"], serde_json::json!([1, -1]));
    }
}
