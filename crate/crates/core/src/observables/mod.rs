//! Derived quantities: spectra, SNR, count statistics and the MOT dip.

mod mot;
mod snr;
mod spectrum;
mod stats;

pub use mot::{dip_hwhm_mhz, mot_dip_profile, DipPoint, MotParams};
pub use snr::{
    dark_count_correct, predicted_snr, predicted_snr_vs_power, predicted_snr_vs_waist, snr_from_counts,
    snr_from_totals, CorrectedCounts, Snr, SnrPoint,
};
pub use spectrum::{fluorescence_spectrum, peak_detuning, spectrum_skewness, SpectrumPoint};
pub use stats::{mean_and_sem, pearson_correlation, skewness};
