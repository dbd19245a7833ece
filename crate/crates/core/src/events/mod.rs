//! Seeded Monte Carlo of pair emission, interferometer routing and detection.

mod detect;
mod histogram;
mod model;
mod run;
mod scan;
mod source;

pub use detect::{apply_dead_time, detect, Arrival};
pub use histogram::{
    central_to_side_ratio, count_coincidences, histogram_coincidences, peak_reports,
    CoincidenceHistogram, PeakReport,
};
pub use model::{derive_seed, Channel, DetectionRecord, DetectorModel, SourceRunConfig, TruthTag};
pub use run::{
    delay_sampler, simulate_run, simulate_run_with_sampler, PolarizationAnalysis, RunOutput,
};
pub use scan::{
    chsh_mc, correlation_from_counts, fringe_scan_mc, phase_scan_mc, ChshCounts, FringeScan,
};
pub use source::{generate_pair_times, route_through_mzi, DelaySampler, TaggedPhoton};
