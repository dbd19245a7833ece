//! Exact two-photon polarization algebra: interferometer transform, time-bin
//! post-selection, analyzer projections, CHSH correlations and noise channels.

mod density;
mod measurement;
mod mzi;
mod noise;
mod state;

pub use density::{Matrix4, TwoPhotonDensity};
pub use measurement::{
    chsh_combination, chsh_s, correlation, fringe_probability, fringe_rate, normalize_angle,
    project, state_with_visibility, AnalyzerSetting, ChshSettings, PolarizationState, Port,
};
pub use mzi::{
    check_timescale_ordering, mzi_transform, mzi_transform_state, postselect_zero_delay,
    TimescaleFailure, TimescaleReport,
};
pub use noise::{
    admix_accidentals, admixture_for_fidelity_drop, dephase_by_phase_jitter, dephase_density,
    fidelity, jitter_fidelity,
};
pub use state::{
    Bin, Pol, SinglePhotonPol, TimeBinnedTwoPhotonState, TwoPhotonState, NORM_TOLERANCE,
};
