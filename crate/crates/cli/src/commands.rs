//! `bands`, `zb`, `invariants` and `phase-diagram`.

use std::f64::consts::TAU;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;
use zb_core::dynamics::{
    pcm_trajectory_exact, rotation_index, wavepacket_trajectory, zb_spectrum, PacketGrid, PacketState, PcmEvaluator,
    Spectrum, Trajectory, WavePacket,
};
use zb_core::io::{fmt_f64, write_row};
use zb_core::linalg::inner;
use zb_core::model::ModelKind;
use zb_core::topology::{invariant_report, InvariantReport, Nu, ReportOptions};
use zb_core::{hermitian_eig, BlochModel, Spinor};

use crate::config::{build_model, DynamicsSpec, InitialState, RunConfig};
use crate::error::{CliError, CliResult};

/// Distance from a transition below which sweeps skip a point.
pub const CRITICAL_TOL: f64 = 1e-6;

/// Transition values of `M` for the models that have them.
pub fn critical_points(model: &BlochModel) -> Option<(f64, &'static [f64])> {
    match *model.kind() {
        ModelKind::Maxwell { m, .. } => Some((m, &[-2.0, 0.0, 2.0])),
        ModelKind::ChiralTi { m } => Some((m, &[-3.0, -1.0, 1.0, 3.0])),
        _ => None,
    }
}

pub fn is_critical(model: &BlochModel) -> bool {
    critical_points(model).is_some_and(|(m, pts)| pts.iter().any(|c| (m - c).abs() < CRITICAL_TOL))
}

pub const BANDS_FILE: &str = "bands.csv";

pub fn bands_header(model: &BlochModel) -> String {
    let mut cols = vec!["s".to_string()];
    cols.extend((1..=model.momentum_dim()).map(|i| format!("k{i}")));
    cols.extend((1..=model.band_count()).map(|i| format!("E{i}")));
    cols.join(",")
}

/// Energies along the model's default path, `points_per_segment` samples per leg plus the final corner.
pub fn bands_csv(model: &BlochModel, points_per_segment: usize) -> CliResult<String> {
    if points_per_segment == 0 {
        return Err(CliError::Config("bands.points_per_segment must be positive".into()));
    }
    let corners = model.default_path();
    let mut ks: Vec<Vec<f64>> = Vec::new();
    for w in corners.windows(2) {
        for i in 0..points_per_segment {
            let f = i as f64 / points_per_segment as f64;
            ks.push(w[0].k.iter().zip(&w[1].k).map(|(a, b)| a + f * (b - a)).collect());
        }
    }
    ks.push(corners[corners.len() - 1].k.clone());
    let energies: Vec<Vec<f64>> = ks
        .par_iter()
        .map(|k| Ok(hermitian_eig(&model.evaluate(k)?).eigenvalues().to_vec()))
        .collect::<zb_core::Result<_>>()?;
    let mut out = Vec::new();
    writeln!(out, "{}", bands_header(model))?;
    let mut s = 0.0;
    for (i, (k, e)) in ks.iter().zip(&energies).enumerate() {
        if i > 0 {
            s += k.iter().zip(&ks[i - 1]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        }
        let mut row = vec![s];
        row.extend(k);
        row.extend(e);
        write_row(&mut out, &row)?;
    }
    Ok(String::from_utf8(out).expect("ascii"))
}

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const SPECTRUM_FILE: &str = "spectrum.csv";

pub struct ZbRun {
    pub trajectory: Trajectory,
    pub spectrum: Spectrum,
    pub rotation_index: i8,
}

/// Band eigenvector at `k` written in the model's spinor basis.
fn band_spinor(model: &BlochModel, k: &[f64], band: usize) -> CliResult<Spinor> {
    let dec = hermitian_eig(&model.evaluate(k)?);
    let v = &dec.eigenvectors()[band];
    let coeffs = model.spinor_basis().iter().map(|b| inner(b, v)).collect();
    Ok(Spinor::normalized(coeffs)?)
}

/// Step from the fastest frequency, span from the slowest.
fn time_axis(model: &BlochModel, k: &[f64], state: &[zb_core::C64], spec: &DynamicsSpec) -> CliResult<Vec<f64>> {
    let mut freqs = PcmEvaluator::new(model, k, state)?.frequencies();
    if freqs.is_empty() {
        let gap = hermitian_eig(&model.evaluate(k)?).min_gap();
        if gap < 1e-9 {
            return Err(CliError::Runtime(format!("degenerate spectrum at k = {k:?}; no time scale")));
        }
        freqs.push(gap);
    }
    let w_max = freqs.iter().copied().fold(0.0, f64::max);
    let w_min = freqs.iter().copied().fold(f64::INFINITY, f64::min);
    let dt = TAU / (w_max * spec.samples_per_period as f64);
    let n = (spec.periods as f64 * TAU / w_min / dt - 1e-9).ceil() as usize;
    Ok((0..n).map(|i| i as f64 * dt).collect())
}

pub fn run_zb(model: &BlochModel, spec: &DynamicsSpec) -> CliResult<ZbRun> {
    if spec.samples_per_period < 4 || spec.periods < 4 {
        return Err(CliError::Config("dynamics needs samples_per_period >= 4 and periods >= 4".into()));
    }
    if spec.k.len() != model.momentum_dim() {
        return Err(CliError::Config(format!(
            "dynamics.k has {} components, model needs {}",
            spec.k.len(),
            model.momentum_dim()
        )));
    }
    let [a, b] = spec.plane;
    if a > 2 || b > 2 || a == b {
        return Err(CliError::Config(format!("bad rotation plane {:?}", spec.plane)));
    }
    let state = spec.initial_state(model)?;
    let spinor = match &state {
        InitialState::Spinor(s) => s.clone(),
        InitialState::Band(b) => band_spinor(model, &spec.k, *b)?,
    };
    let psi = spinor.to_state(model)?;
    let times = time_axis(model, &spec.k, &psi, spec)?;
    let trajectory = match &spec.packet {
        None => pcm_trajectory_exact(model, &spec.k, &spinor, &times, spec.include_drift)?,
        Some(p) => {
            let st = match state {
                InitialState::Spinor(s) => PacketState::Spinor(s),
                InitialState::Band(b) => PacketState::Band(b),
            };
            let packet = WavePacket::new(p.width, spec.k.clone(), st)?;
            let grid = PacketGrid {
                points: p.points,
                extent: p.extent,
            };
            wavepacket_trajectory(model, &packet, &grid, &times)?
        }
    };
    let spectrum = zb_spectrum(&trajectory)?;
    let rotation_index = rotation_index(&trajectory, (a, b))?;
    Ok(ZbRun {
        trajectory,
        spectrum,
        rotation_index,
    })
}

pub const INVARIANTS_FILE: &str = "invariants.json";

pub fn run_invariants(model: &BlochModel, cfg: &RunConfig) -> CliResult<InvariantReport> {
    Ok(invariant_report(
        model,
        ReportOptions {
            plaquette: cfg.topology.plaquette,
        },
    )?)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub const PHASE_FILE: &str = "phase_diagram.csv";

/// One sweep row: the model's headline invariant and `nu` at each index point.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseRow {
    pub value: f64,
    pub invariant: f64,
    pub nu: Vec<i8>,
}

fn invariant_name(model: &BlochModel) -> &'static str {
    match model.kind() {
        ModelKind::KaneMele(_) => "z2",
        ModelKind::ChiralTi { .. } => "winding",
        _ => "chern",
    }
}

fn column_label(label: &str) -> String {
    let cleaned: String = label
        .chars()
        .filter_map(|c| match c {
            '(' | ')' => None,
            ',' => Some('_'),
            '\'' => Some('p'),
            c => Some(c),
        })
        .collect();
    format!("nu_{cleaned}")
}

fn phase_row(model: &BlochModel, value: f64) -> CliResult<(PhaseRow, Vec<String>)> {
    let r = invariant_report(model, ReportOptions { plaquette: false })?;
    let invariant = match model.kind() {
        ModelKind::KaneMele(_) => r.z2.map(f64::from),
        ModelKind::ChiralTi { .. } => r.winding.map(|w| w as f64),
        _ => r.chern_hsp.as_ref().map(|c| c[0].value()),
    }
    .expect("report carries the model's invariant");
    let nu = r
        .hsp
        .iter()
        .map(|h| match h.nu {
            Nu::Planar(n) => n,
            Nu::Spatial([v, m]) => v * m,
        })
        .collect();
    let labels = hsp_labels(model, &r);
    Ok((PhaseRow { value, invariant, nu }, labels))
}

fn hsp_labels(model: &BlochModel, r: &InvariantReport) -> Vec<String> {
    r.hsp
        .iter()
        .map(|h| {
            model
                .hsps()
                .iter()
                .find(|p| p.k == h.k)
                .map(|p| column_label(&p.label))
                .unwrap_or_else(|| column_label(&format!("{:?}", h.k)))
        })
        .collect()
}

pub struct PhaseDiagram {
    pub param: String,
    pub invariant: &'static str,
    pub labels: Vec<String>,
    pub rows: Vec<PhaseRow>,
    pub skipped: Vec<f64>,
}

impl PhaseDiagram {
    pub fn to_csv(&self) -> String {
        let mut out = Vec::new();
        let mut header = vec![self.param.clone(), self.invariant.to_string()];
        header.extend(self.labels.iter().cloned());
        writeln!(out, "{}", header.join(",")).unwrap();
        for r in &self.rows {
            let invariant = if r.invariant.fract() == 0.0 {
                format!("{}", r.invariant as i64)
            } else {
                fmt_f64(r.invariant)
            };
            let mut row = vec![fmt_f64(r.value), invariant];
            row.extend(r.nu.iter().map(|n| n.to_string()));
            writeln!(out, "{}", row.join(",")).unwrap();
        }
        String::from_utf8(out).expect("ascii")
    }
}

/// Evaluates every sweep point in parallel; rows come back in sweep order.
pub fn run_phase_diagram(cfg: &RunConfig, allow_critical: bool) -> CliResult<PhaseDiagram> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("missing \"sweep\" section".into()))?;
    let name = cfg
        .model
        .as_deref()
        .ok_or_else(|| CliError::Config("missing \"model\"".into()))?;
    let values = sweep.values()?;
    let mut models = Vec::with_capacity(values.len());
    let mut skipped = Vec::new();
    for &v in &values {
        let mut params = cfg.params.clone();
        params.insert(sweep.param.clone(), v);
        let model = build_model(name, &params)?;
        if !allow_critical && is_critical(&model) {
            skipped.push(v);
        } else {
            models.push((v, model));
        }
    }
    if models.is_empty() {
        return Err(CliError::Config("every sweep point was refused as critical".into()));
    }
    let results: Vec<(PhaseRow, Vec<String>)> = models
        .par_iter()
        .map(|(v, m)| phase_row(m, *v))
        .collect::<CliResult<_>>()?;
    let labels = results[0].1.clone();
    Ok(PhaseDiagram {
        param: sweep.param.clone(),
        invariant: invariant_name(&models[0].1),
        labels,
        rows: results.into_iter().map(|(r, _)| r).collect(),
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use zb_core::model::{chiral_ti_3d, maxwell_lattice};

    #[test]
    fn critical_guard() {
        assert!(is_critical(&maxwell_lattice(1.0, 2.0 + 1e-7).unwrap()));
        assert!(!is_critical(&maxwell_lattice(1.0, 2.1).unwrap()));
        assert!(is_critical(&chiral_ti_3d(-3.0)));
        assert!(!is_critical(&chiral_ti_3d(0.0)));
    }

    #[test]
    fn labels_are_csv_safe() {
        assert_eq!(column_label("(0,pi)"), "nu_0_pi");
        assert_eq!(column_label("K'"), "nu_Kp");
    }

    #[test]
    fn maxwell_gap_at_gamma() {
        let model = maxwell_lattice(1.0, 3.0).unwrap();
        let csv = bands_csv(&model, 8).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("s,k1,k2,E1,E2,E3"));
        let first: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
        assert!((first[4] - first[3] - 2.0).abs() < 1e-12);
        assert!((first[5] - first[4] - 2.0).abs() < 1e-12);
        assert_eq!(csv.lines().count(), 1 + 3 * 8 + 1);
    }
}
