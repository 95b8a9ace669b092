use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use yb_readout::config::ShiftProfile;
use yb_readout::observables::{
    dark_count_correct, fluorescence_spectrum, mean_and_sem, peak_detuning, predicted_snr, snr_from_totals,
};
use yb_readout::transit::{simulate_window, DiscQuadrature, Simulation};
use yb_readout::{SimConfig, Spin};

fn coarse() -> DiscQuadrature {
    DiscQuadrature { rings: 8, spokes: 8 }
}

#[test]
fn uniform_shift_spectrum_peaks_on_stretched_resonance() {
    let mut cfg = SimConfig::default();
    cfg.light_shift.profile = ShiftProfile::Uniform;
    let sim = Simulation::new(&cfg).unwrap();
    let d32 = sim.model.peak_shift().delta_32_mhz();
    let grid: Vec<f64> = (0..=60).map(|i| 0.2 * i as f64).collect();
    let spec = fluorescence_spectrum(&grid, &sim, true, &coarse()).unwrap();
    let peak = peak_detuning(&spec).unwrap();
    assert!((peak - d32).abs() <= 0.5, "peak {peak} vs δ32 {d32}");
}

#[test]
fn spectrum_rejects_mismatched_shift_state() {
    let sim = Simulation::new(&SimConfig::default().with_light_shift(false)).unwrap();
    assert!(fluorescence_spectrum(&[0.0], &sim, true, &coarse()).is_err());
}

#[test]
fn dark_count_correction_example() {
    // Raw totals are signal + dark × exposure, split in the raw SNR. The
    // exposures per spin are those that bring each raw pair to the stated
    // corrected SNR with 1.0 and 0.5 counts/ms.
    let dark = [1000.0, 500.0];
    let cases = [
        (Spin::Up, 4.2, 5.1, 0.738e-3, 5.5),
        (Spin::Down, 2.2, 3.5, 1.122e-3, 6.6),
    ];
    for (spin, raw_snr, corrected_snr, exposure, signal) in cases {
        let total = signal + 1.5e3 * exposure;
        let desired = total * raw_snr / (1.0 + raw_snr);
        let undesired = total - desired;
        let raw = match spin {
            Spin::Up => [desired, undesired],
            Spin::Down => [undesired, desired],
        };
        let c = dark_count_correct(raw, dark, exposure);
        assert_eq!(c.clamped, [false, false]);
        let snr = match spin {
            Spin::Up => snr_from_totals(c.counts[0], c.counts[1]),
            Spin::Down => snr_from_totals(c.counts[1], c.counts[0]),
        };
        let v = snr.value().unwrap();
        assert!((v - corrected_snr).abs() <= 0.3, "{spin:?}: {v}");
        assert!(v > raw_snr);
    }
}

#[test]
fn correction_clamps_at_zero() {
    let c = dark_count_correct([0.5, 3.0], [1000.0, 500.0], 1e-3);
    assert_eq!(c.counts[0], 0.0);
    assert!(c.clamped[0] && !c.clamped[1]);
}

#[test]
fn predicted_snr_ignores_detection_efficiency() {
    let q = coarse();
    let base = predicted_snr(&Simulation::new(&SimConfig::default()).unwrap(), Spin::Up, &q)
        .value()
        .unwrap();
    for eta in [0.05, 0.5, 1.0] {
        let mut cfg = SimConfig::default();
        cfg.cavity.detection_efficiency = eta;
        let v = predicted_snr(&Simulation::new(&cfg).unwrap(), Spin::Up, &q).value().unwrap();
        assert!((v / base - 1.0).abs() < 1e-12);
    }
}

#[test]
fn dark_counts_scale_with_window() {
    let sim = Simulation::new(&SimConfig::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for window_ms in [0.5, 2.0, 8.0] {
        let recs: Vec<_> = (0..4000)
            .map(|_| simulate_window(&mut rng, Spin::Up, 0.0, window_ms * 1e-3, &sim))
            .collect();
        for (mode, rate) in [(0, 1.0), (1, 0.5)] {
            let xs: Vec<f64> = recs
                .iter()
                .map(|r| if mode == 0 { r.counts_sigma_plus } else { r.counts_sigma_minus } as f64)
                .collect();
            let (m, sem) = mean_and_sem(&xs);
            let expect = rate * window_ms;
            assert!((m - expect).abs() < 4.0 * sem.max(1e-9), "{window_ms} ms mode {mode}: {m}");
        }
    }
}
