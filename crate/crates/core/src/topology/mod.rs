//! Topological indices from high-symmetry points and their global oracles.

mod hsp;
mod plaquette;
mod report;
mod winding;
mod z2;

pub use hsp::{
    band_j, chern_from_hsp, chern_hsp_by_band, index_points, linearize_at_hsp, winding_from_hsp,
    HalfInt, HspLinearization, MASS_TOL, RESIDUAL_TOL,
};
pub use plaquette::{
    chern_plaquette, chern_plaquette_bands, chern_plaquette_fixed, PlaquetteChern, DEFAULT_GRID,
    INTEGER_TOL, MAX_GRID, TOUCH_TOL,
};
pub use report::{invariant_report, HspEntry, InvariantReport, Nu, Params, ReportOptions};
pub use winding::{winding_numerical, WindingNumerical, DEFAULT_WINDING_GRID, GAP_FLOOR};
pub use z2::{
    min_direct_gap, spin_up_mass, z2_inversion_parity, z2_kane_mele, z2_kane_mele_report,
    z2_spin_chern, z2_wilson_loop, Z2Report, GAP_GRID, MAX_SWEEP_STEPS, WILSON_GRID,
};
