//! Bloch and continuum Hamiltonians written as `H(k) = sum_G c_G(k) G`.
//!
//! Every model is a [`GeneratorSet`] plus real coefficient functions and their
//! analytic momentum gradients. Units: hbar = 1, lattice constant = 1.
//!
//! # Kane-Mele convention
//!
//! Basis order is sublattice (x) spin: `(A up, A down, B up, B down)`.
//! Momenta are reduced coordinates `k_i = k . a_i` along the primitive vectors
//! `a_1 = (3/2, sqrt(3)/2)`, `a_2 = (3/2, -sqrt(3)/2)` (nearest-neighbour
//! distance 1), so `H(k + 2 pi e_i) = H(k)`. With the nearest-neighbour vectors
//! `delta_1 = (1, 0)`, `delta_2 = (-1/2, -sqrt(3)/2)`, `delta_3 = (-1/2, sqrt(3)/2)`
//! and Bloch phases `phi = (0, k_1, k_2)`:
//!
//! ```text
//! H(k) = t (1 + cos k1 + cos k2)        sigma_x s_0
//!      + t (sin k1 + sin k2)            sigma_y s_0
//!      + lambda_v                       sigma_z s_0
//!      + lambda_SO g(k)                 sigma_z s_z,   g = 2 [sin k1 - sin k2 + sin(k2 - k1)]
//!      + lambda_R sum_j sin(phi_j) delta_jy   sigma_x s_x
//!      - lambda_R sum_j sin(phi_j) delta_jx   sigma_x s_y
//!      - lambda_R sum_j cos(phi_j) delta_jy   sigma_y s_x
//!      + lambda_R sum_j cos(phi_j) delta_jx   sigma_y s_y
//! ```
//!
//! The Rashba rows come from `i lambda_R sum_<ij> c_i^dagger (s x delta_ij)_z c_j`.
//! `K = (2 pi/3, -2 pi/3)` and `K' = -K`; there `g = +-3 sqrt(3)`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ZbError};
use crate::linalg::{kron, vec_norm, CMatrix, C64, ONE, ZERO};
use crate::spectral::{HermitianMatrix, NORM_TOL};
use crate::spin::{gell_mann, pauli, spin_matrices, GeneratorSet, Spin, SpinBasis};

/// Default `|p|` cutoff for continuum models; only packet integration uses it.
pub const DEFAULT_CUTOFF: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KaneMeleParams {
    pub t: f64,
    pub lambda_so: f64,
    pub lambda_r: f64,
    pub lambda_v: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpinSector {
    Up,
    Down,
}

impl SpinSector {
    pub fn sign(self) -> f64 {
        match self {
            SpinSector::Up => 1.0,
            SpinSector::Down => -1.0,
        }
    }
}

/// Which Hamiltonian a [`BlochModel`] evaluates, with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelKind {
    SpinJ {
        spin: Spin,
        vx: f64,
        vy: f64,
        mass: f64,
        cutoff: f64,
    },
    Maxwell {
        t_h: f64,
        m: f64,
    },
    KaneMele(KaneMeleParams),
    /// One `S_z` sector of the Rashba-free Kane-Mele model (a Haldane model).
    KaneMeleSector {
        params: KaneMeleParams,
        sector: SpinSector,
    },
    ChiralTi {
        m: f64,
    },
}

/// A labelled high-symmetry momentum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hsp {
    pub label: String,
    pub k: Vec<f64>,
}

impl Hsp {
    fn new(label: &str, k: &[f64]) -> Self {
        Self {
            label: label.to_string(),
            k: k.to_vec(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BlochModel {
    kind: ModelKind,
    generators: GeneratorSet,
    hsps: Vec<Hsp>,
    spinor_basis: Vec<Vec<C64>>,
    mass_generator: Option<usize>,
    velocity_generators: Option<Vec<usize>>,
}

/// `H = v_x p_x J_x + v_y p_y J_y + m J_z` in the ladder basis, cutoff `|p| <= 10`.
pub fn spin_j_continuum(spin: Spin, vx: f64, vy: f64, mass: f64) -> BlochModel {
    spin_j_continuum_with_cutoff(spin, vx, vy, mass, DEFAULT_CUTOFF)
}

pub fn spin_j_continuum_with_cutoff(
    spin: Spin,
    vx: f64,
    vy: f64,
    mass: f64,
    cutoff: f64,
) -> BlochModel {
    let generators = spin_matrices(spin, SpinBasis::Ladder).expect("ladder basis exists for all J");
    let n = spin.multiplicity();
    // Ladder row i has m = J - i; the spinor basis runs from the lowest m up.
    let spinor_basis = (0..n).map(|k| unit(n, n - 1 - k)).collect();
    BlochModel {
        kind: ModelKind::SpinJ {
            spin,
            vx,
            vy,
            mass,
            cutoff,
        },
        generators,
        hsps: vec![Hsp::new("G", &[0.0, 0.0])],
        spinor_basis,
        mass_generator: Some(2),
        velocity_generators: Some(vec![0, 1]),
    }
}

/// Spin-1 Maxwell lattice model `h(k) = J . d(k)` with
/// `d = 2 t_h (sin kx, sin ky, M - cos kx - cos ky)` in the Cartesian spin-1 basis.
pub fn maxwell_lattice(t_h: f64, m: f64) -> Result<BlochModel> {
    if t_h == 0.0 || !t_h.is_finite() {
        return Err(ZbError::InvalidParameter("t_h must be non-zero".into()));
    }
    let generators = spin_matrices(Spin::ONE, SpinBasis::Cartesian)?;
    let s = FRAC_1_SQRT_2;
    let spinor_basis = vec![
        vec![C64::new(s, 0.0), C64::new(0.0, -s), ZERO],
        vec![ZERO, ZERO, ONE],
        vec![C64::new(s, 0.0), C64::new(0.0, s), ZERO],
    ];
    Ok(BlochModel {
        kind: ModelKind::Maxwell { t_h, m },
        generators,
        hsps: vec![
            Hsp::new("(0,0)", &[0.0, 0.0]),
            Hsp::new("(0,pi)", &[0.0, PI]),
            Hsp::new("(pi,0)", &[PI, 0.0]),
            Hsp::new("(pi,pi)", &[PI, PI]),
        ],
        spinor_basis,
        mass_generator: Some(2),
        velocity_generators: Some(vec![0, 1]),
    })
}

fn kane_mele_generators() -> GeneratorSet {
    let p = pauli();
    let s0 = CMatrix::identity(2);
    let [sx, sy, sz] = [&p.matrices()[0], &p.matrices()[1], &p.matrices()[2]];
    let pairs: [(&str, &CMatrix, &CMatrix); 8] = [
        ("sx.s0", sx, &s0),
        ("sy.s0", sy, &s0),
        ("sz.s0", sz, &s0),
        ("sz.sz", sz, sz),
        ("sx.sx", sx, sx),
        ("sx.sy", sx, sy),
        ("sy.sx", sy, sx),
        ("sy.sy", sy, sy),
    ];
    let labels = pairs.iter().map(|(l, _, _)| l.to_string()).collect();
    let mats = pairs
        .iter()
        .map(|(_, a, b)| HermitianMatrix::new(kron(a, b)).expect("Pauli products are Hermitian"))
        .collect();
    GeneratorSet::new(labels, mats).expect("consistent dimensions")
}

fn hexagonal_hsps() -> Vec<Hsp> {
    let k = 2.0 * PI / 3.0;
    vec![
        Hsp::new("G", &[0.0, 0.0]),
        Hsp::new("K", &[k, -k]),
        Hsp::new("K'", &[-k, k]),
        Hsp::new("M1", &[PI, 0.0]),
        Hsp::new("M2", &[0.0, PI]),
        Hsp::new("M3", &[PI, PI]),
    ]
}

/// Four-band Kane-Mele model; see the module documentation for the explicit matrix.
pub fn kane_mele(params: KaneMeleParams) -> BlochModel {
    BlochModel {
        kind: ModelKind::KaneMele(params),
        generators: kane_mele_generators(),
        hsps: hexagonal_hsps(),
        spinor_basis: (0..4).map(|i| unit(4, i)).collect(),
        mass_generator: None,
        velocity_generators: None,
    }
}

/// One `S_z` sector of the Kane-Mele model; requires `lambda_R = 0`.
pub fn kane_mele_sector(params: KaneMeleParams, sector: SpinSector) -> Result<BlochModel> {
    if params.lambda_r != 0.0 {
        return Err(ZbError::InvalidParameter(
            "spin sectors decouple only at lambda_R = 0".into(),
        ));
    }
    Ok(BlochModel {
        kind: ModelKind::KaneMeleSector { params, sector },
        generators: pauli(),
        hsps: hexagonal_hsps(),
        spinor_basis: (0..2).map(|i| unit(2, i)).collect(),
        mass_generator: Some(2),
        velocity_generators: Some(vec![0, 1]),
    })
}

/// 3D chiral topological insulator
/// `sin kx l4 + sin ky l5 + sin kz l6 + (M - cos kx - cos ky - cos kz) l7`.
pub fn chiral_ti_3d(m: f64) -> BlochModel {
    let gm = gell_mann();
    let labels = ["l4", "l5", "l6", "l7"];
    let generators = GeneratorSet::new(
        labels.iter().map(|l| l.to_string()).collect(),
        labels.iter().map(|l| gm.get(l).unwrap().clone()).collect(),
    )
    .expect("consistent dimensions");
    let mut hsps = Vec::with_capacity(8);
    for n in 0..8u32 {
        let k: Vec<f64> = (0..3).map(|a| if n >> (2 - a) & 1 == 1 { PI } else { 0.0 }).collect();
        let label = format!(
            "({})",
            k.iter()
                .map(|&x| if x == 0.0 { "0" } else { "pi" })
                .collect::<Vec<_>>()
                .join(",")
        );
        hsps.push(Hsp { label, k });
    }
    let s = FRAC_1_SQRT_2;
    let spinor_basis = vec![
        vec![ZERO, C64::new(s, 0.0), C64::new(0.0, -s)],
        vec![ONE, ZERO, ZERO],
        vec![ZERO, C64::new(s, 0.0), C64::new(0.0, s)],
    ];
    BlochModel {
        kind: ModelKind::ChiralTi { m },
        generators,
        hsps,
        spinor_basis,
        mass_generator: Some(3),
        velocity_generators: Some(vec![0, 1, 2]),
    }
}

fn unit(n: usize, i: usize) -> Vec<C64> {
    let mut v = vec![ZERO; n];
    v[i] = ONE;
    v
}

fn honeycomb_g(k1: f64, k2: f64) -> (f64, [f64; 2]) {
    let g = 2.0 * (k1.sin() - k2.sin() + (k2 - k1).sin());
    let d1 = 2.0 * (k1.cos() - (k2 - k1).cos());
    let d2 = 2.0 * (-k2.cos() + (k2 - k1).cos());
    (g, [d1, d2])
}

impl BlochModel {
    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ModelKind::SpinJ { .. } => "spin_j",
            ModelKind::Maxwell { .. } => "maxwell",
            ModelKind::KaneMele(_) => "kane_mele",
            ModelKind::KaneMeleSector { .. } => "kane_mele_sector",
            ModelKind::ChiralTi { .. } => "chiral_ti",
        }
    }

    /// Named parameters in a fixed order.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match &self.kind {
            ModelKind::SpinJ {
                spin,
                vx,
                vy,
                mass,
                cutoff,
            } => vec![
                ("J", spin.value()),
                ("v_x", *vx),
                ("v_y", *vy),
                ("m", *mass),
                ("cutoff", *cutoff),
            ],
            ModelKind::Maxwell { t_h, m } => vec![("t_h", *t_h), ("M", *m)],
            ModelKind::KaneMele(p) | ModelKind::KaneMeleSector { params: p, .. } => vec![
                ("t", p.t),
                ("lambda_so", p.lambda_so),
                ("lambda_r", p.lambda_r),
                ("lambda_v", p.lambda_v),
            ],
            ModelKind::ChiralTi { m } => vec![("M", *m)],
        }
    }

    pub fn momentum_dim(&self) -> usize {
        match self.kind {
            ModelKind::ChiralTi { .. } => 3,
            _ => 2,
        }
    }

    pub fn band_count(&self) -> usize {
        self.generators.dim()
    }

    /// Lattice models are `2 pi`-periodic in every momentum component.
    pub fn periodic(&self) -> bool {
        !matches!(self.kind, ModelKind::SpinJ { .. })
    }

    /// Momentum cutoff for continuum models.
    pub fn cutoff(&self) -> Option<f64> {
        match self.kind {
            ModelKind::SpinJ { cutoff, .. } => Some(cutoff),
            _ => None,
        }
    }

    pub fn generators(&self) -> &GeneratorSet {
        &self.generators
    }

    pub fn hsps(&self) -> &[Hsp] {
        &self.hsps
    }

    /// Index of the generator whose eigenbasis defines spinor coefficients
    /// and which carries the mass at high-symmetry points.
    pub fn mass_generator(&self) -> Option<usize> {
        self.mass_generator
    }

    /// Per momentum axis, the generator whose coefficient is the velocity along that axis.
    pub fn velocity_generators(&self) -> Option<&[usize]> {
        self.velocity_generators.as_deref()
    }

    /// Basis states for [`Spinor`] coefficients, ordered by ascending eigenvalue
    /// of the mass generator.
    pub fn spinor_basis(&self) -> &[Vec<C64>] {
        &self.spinor_basis
    }

    fn check_k(&self, k: &[f64]) -> Result<()> {
        if k.len() != self.momentum_dim() {
            return Err(ZbError::DimensionMismatch {
                expected: self.momentum_dim(),
                got: k.len(),
            });
        }
        Ok(())
    }

    /// Real coefficient of each generator at momentum `k`.
    pub fn coefficients(&self, k: &[f64]) -> Result<Vec<f64>> {
        self.check_k(k)?;
        Ok(match &self.kind {
            ModelKind::SpinJ { vx, vy, mass, .. } => vec![vx * k[0], vy * k[1], *mass],
            ModelKind::Maxwell { t_h, m } => {
                let t2 = 2.0 * t_h;
                vec![
                    t2 * k[0].sin(),
                    t2 * k[1].sin(),
                    t2 * (m - k[0].cos() - k[1].cos()),
                ]
            }
            ModelKind::ChiralTi { m } => vec![
                k[0].sin(),
                k[1].sin(),
                k[2].sin(),
                m - k[0].cos() - k[1].cos() - k[2].cos(),
            ],
            ModelKind::KaneMele(p) => {
                let (k1, k2) = (k[0], k[1]);
                let (g, _) = honeycomb_g(k1, k2);
                let h = 3f64.sqrt() / 2.0;
                let lr = p.lambda_r;
                vec![
                    p.t * (1.0 + k1.cos() + k2.cos()),
                    p.t * (k1.sin() + k2.sin()),
                    p.lambda_v,
                    p.lambda_so * g,
                    lr * h * (k2.sin() - k1.sin()),
                    0.5 * lr * (k1.sin() + k2.sin()),
                    lr * h * (k1.cos() - k2.cos()),
                    lr * (1.0 - 0.5 * k1.cos() - 0.5 * k2.cos()),
                ]
            }
            ModelKind::KaneMeleSector { params: p, sector } => {
                let (k1, k2) = (k[0], k[1]);
                let (g, _) = honeycomb_g(k1, k2);
                vec![
                    p.t * (1.0 + k1.cos() + k2.cos()),
                    p.t * (k1.sin() + k2.sin()),
                    p.lambda_v + sector.sign() * p.lambda_so * g,
                ]
            }
        })
    }

    /// `grad[G][i] = d c_G / d k_i`.
    pub fn coefficient_gradients(&self, k: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.check_k(k)?;
        Ok(match &self.kind {
            ModelKind::SpinJ { vx, vy, .. } => {
                vec![vec![*vx, 0.0], vec![0.0, *vy], vec![0.0, 0.0]]
            }
            ModelKind::Maxwell { t_h, .. } => {
                let t2 = 2.0 * t_h;
                vec![
                    vec![t2 * k[0].cos(), 0.0],
                    vec![0.0, t2 * k[1].cos()],
                    vec![t2 * k[0].sin(), t2 * k[1].sin()],
                ]
            }
            ModelKind::ChiralTi { .. } => vec![
                vec![k[0].cos(), 0.0, 0.0],
                vec![0.0, k[1].cos(), 0.0],
                vec![0.0, 0.0, k[2].cos()],
                vec![k[0].sin(), k[1].sin(), k[2].sin()],
            ],
            ModelKind::KaneMele(p) => {
                let (k1, k2) = (k[0], k[1]);
                let (_, dg) = honeycomb_g(k1, k2);
                let h = 3f64.sqrt() / 2.0;
                let lr = p.lambda_r;
                vec![
                    vec![-p.t * k1.sin(), -p.t * k2.sin()],
                    vec![p.t * k1.cos(), p.t * k2.cos()],
                    vec![0.0, 0.0],
                    vec![p.lambda_so * dg[0], p.lambda_so * dg[1]],
                    vec![-lr * h * k1.cos(), lr * h * k2.cos()],
                    vec![0.5 * lr * k1.cos(), 0.5 * lr * k2.cos()],
                    vec![-lr * h * k1.sin(), lr * h * k2.sin()],
                    vec![0.5 * lr * k1.sin(), 0.5 * lr * k2.sin()],
                ]
            }
            ModelKind::KaneMeleSector { params: p, sector } => {
                let (k1, k2) = (k[0], k[1]);
                let (_, dg) = honeycomb_g(k1, k2);
                let s = sector.sign() * p.lambda_so;
                vec![
                    vec![-p.t * k1.sin(), -p.t * k2.sin()],
                    vec![p.t * k1.cos(), p.t * k2.cos()],
                    vec![s * dg[0], s * dg[1]],
                ]
            }
        })
    }

    /// `H(k)`.
    pub fn evaluate(&self, k: &[f64]) -> Result<HermitianMatrix> {
        let c = self.coefficients(k)?;
        HermitianMatrix::new(self.generators.combine(&c))
    }

    /// `dH/dk_i` for each momentum axis.
    pub fn gradient(&self, k: &[f64]) -> Result<Vec<HermitianMatrix>> {
        let grads = self.coefficient_gradients(k)?;
        (0..self.momentum_dim())
            .map(|axis| {
                let c: Vec<f64> = grads.iter().map(|g| g[axis]).collect();
                HermitianMatrix::new(self.generators.combine(&c))
            })
            .collect()
    }

    /// A diagonal `+-1` operator anticommuting with every generator, if one exists.
    ///
    /// Solves `S G + G S = 0` over diagonal sign patterns with `S_00 = +1`.
    pub fn chiral_operator(&self) -> Option<CMatrix> {
        let n = self.band_count();
        (0..(1u32 << (n - 1))).find_map(|bits| {
            let signs: Vec<f64> = (0..n)
                .map(|i| if i > 0 && bits >> (i - 1) & 1 == 1 { -1.0 } else { 1.0 })
                .collect();
            let s = CMatrix::from_real_diagonal(&signs);
            self.generators
                .matrices()
                .iter()
                .all(|g| s.anticommutator(g).max_abs() < 1e-14)
                .then_some(s)
        })
    }

    /// Corner points of the default band-structure path.
    pub fn default_path(&self) -> Vec<Hsp> {
        match self.kind {
            ModelKind::ChiralTi { .. } => vec![
                Hsp::new("G", &[0.0, 0.0, 0.0]),
                Hsp::new("X", &[PI, 0.0, 0.0]),
                Hsp::new("M", &[PI, PI, 0.0]),
                Hsp::new("G", &[0.0, 0.0, 0.0]),
                Hsp::new("R", &[PI, PI, PI]),
                Hsp::new("X", &[PI, 0.0, 0.0]),
            ],
            ModelKind::KaneMele(_) | ModelKind::KaneMeleSector { .. } => {
                let k = 2.0 * PI / 3.0;
                vec![
                    Hsp::new("G", &[0.0, 0.0]),
                    Hsp::new("K", &[k, -k]),
                    Hsp::new("M", &[PI, 0.0]),
                    Hsp::new("G", &[0.0, 0.0]),
                ]
            }
            _ => vec![
                Hsp::new("G", &[0.0, 0.0]),
                Hsp::new("X", &[PI, 0.0]),
                Hsp::new("M", &[PI, PI]),
                Hsp::new("G", &[0.0, 0.0]),
            ],
        }
    }
}

/// Internal-state amplitudes in a model's [`BlochModel::spinor_basis`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spinor {
    coefficients: Vec<C64>,
}

impl Spinor {
    /// Requires `sum |c|^2 = 1` within `1e-10`.
    pub fn new(coefficients: Vec<C64>) -> Result<Self> {
        let norm = vec_norm(&coefficients);
        if (norm - 1.0).abs() > NORM_TOL || !norm.is_finite() {
            return Err(ZbError::NotNormalized { norm });
        }
        Ok(Self { coefficients })
    }

    /// Rescales to unit norm; fails only for the zero vector.
    pub fn normalized(mut coefficients: Vec<C64>) -> Result<Self> {
        let norm = vec_norm(&coefficients);
        if norm == 0.0 || !norm.is_finite() {
            return Err(ZbError::NotNormalized { norm });
        }
        for c in &mut coefficients {
            *c /= norm;
        }
        Ok(Self { coefficients })
    }

    /// Uniformly distributed on the unit sphere of `C^n` (normalized complex Gaussian).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        loop {
            let c: Vec<C64> = (0..n)
                .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            if let Ok(s) = Self::normalized(c) {
                return s;
            }
        }
    }

    pub fn from_real(coefficients: &[f64]) -> Result<Self> {
        Self::normalized(coefficients.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// State vector `sum_i c_i |phi_i>` in the model's matrix basis.
    pub fn to_state(&self, model: &BlochModel) -> Result<Vec<C64>> {
        let basis = model.spinor_basis();
        if basis.len() != self.coefficients.len() {
            return Err(ZbError::DimensionMismatch {
                expected: basis.len(),
                got: self.coefficients.len(),
            });
        }
        let mut out = vec![ZERO; basis.len()];
        for (c, phi) in self.coefficients.iter().zip(basis) {
            for (o, p) in out.iter_mut().zip(phi) {
                *o += c * p;
            }
        }
        Ok(out)
    }
}
