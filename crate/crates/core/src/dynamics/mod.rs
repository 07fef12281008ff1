//! Zitterbewegung trajectories and their analysis.

mod closed_form;
mod packet;
mod pcm;
mod rotation;
mod spectrum;
mod trajectory;

pub use closed_form::{closed_form_chiral, closed_form_spin1, ChiralBranch, ZbClosedForm};
pub use packet::{
    packet_bounds, wavepacket_trajectory, PacketGrid, PacketState, WavePacket, MIN_EXTENT,
    MIN_POINTS_IN_TWO_SIGMA,
};
pub use pcm::{pcm_trajectory_exact, PairTerm, PcmEvaluator};
pub use rotation::{rotation_index, SCALE_FLOOR, STILL_TOL};
pub use spectrum::{
    selection_rule_check, zb_spectrum, SelectionRuleReport, SpectralPeak, Spectrum,
    PEAK_THRESHOLD, SPECTRUM_HEADER,
};
pub use trajectory::{
    check_uniform, default_time_grid, spectral_time_grid, time_grid, Trajectory, TrajectoryMeta,
    TrajectorySource, DEFAULT_PERIODS, DEFAULT_SAMPLES_PER_PERIOD, SPECTRAL_PERIODS,
    TRAJECTORY_HEADER,
};
