//! Frequency-domain models: emission spectrum, filters, filtered biphoton envelope.

mod correlation;
pub mod fft;
mod filter;
mod fwhm;
mod spdc;

pub use correlation::{
    biphoton_temporal_correlation, biphoton_temporal_correlation_with_grid, coherence_time,
    expected_envelope_fwhm, joint_amplitude, pair_vs_single_filter_loss, pump_coherence_time,
    CorrelationGrid, PumpCoherence, TemporalCorrelation,
};
pub use filter::{filter_transmission, FilterShape, FilterSpec, DEGENERATE_FREQUENCY};
pub use fwhm::{fwhm, half_max_crossings};
pub use spdc::{
    frequency_to_wavelength, sinc2, spdc_spectral_density, wavelength_to_frequency, SpdcConfig,
    SINC2_HALF_WIDTH,
};
