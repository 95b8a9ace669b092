use proptest::prelude::*;

use yb_readout::atomic::{build_level_scheme, decay_branching, transition_weight, LevelConfig, LevelScheme};
use yb_readout::dynamics::{adiabatic_rates, CavityParams, EmissionRates, LocalConditions};
use yb_readout::lightshift::{
    shift_components, sublevel_splitting, BeamParams, DetuningReference, ShiftResult,
};
use yb_readout::observables::{
    mot_dip_profile, pearson_correlation, snr_from_totals, MotParams, Snr,
};
use yb_readout::units::mhz_to_angular;
use yb_readout::{Half, Polarization, Spin};

fn scheme() -> LevelScheme {
    build_level_scheme(&LevelConfig::default()).unwrap()
}

fn p1_projection() -> impl Strategy<Value = Half> {
    prop::sample::select(vec![-3, -1, 1, 3]).prop_map(Half::from_twice)
}

fn rel_eq(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn rates_eq(a: &EmissionRates, b: &EmissionRates, tol: f64) -> bool {
    rel_eq(a.rate_sigma_plus, b.rate_sigma_plus, tol)
        && rel_eq(a.rate_sigma_minus, b.rate_sigma_minus, tol)
        && rel_eq(a.spin_flip_rate, b.spin_flip_rate, tol)
        && rel_eq(a.free_space_rate, b.free_space_rate, tol)
}

fn conditions(g_mhz: f64, drive: [f64; 3], det_mhz: f64, cav_mhz: f64, d32_mhz: f64, d12_mhz: f64) -> LocalConditions {
    LocalConditions {
        coupling: mhz_to_angular(g_mhz),
        drive_rabi_squared: drive.map(|o| mhz_to_angular(o).powi(2)),
        excitation_detuning: mhz_to_angular(det_mhz),
        cavity_detuning: mhz_to_angular(cav_mhz),
        shifts: ShiftResult::new(mhz_to_angular(d32_mhz), mhz_to_angular(d12_mhz)),
    }
}

proptest! {
    #[test]
    fn ground_weight_totals_match(twice in prop::sample::select(vec![-1, 1])) {
        // cyclic transition normalized to one, so each ground state sums to 2
        let total = |t: i32| -> f64 {
            Polarization::ALL.iter().map(|&p| transition_weight(Half::from_twice(t), p).unwrap()).sum()
        };
        prop_assert!((total(twice) - total(-twice)).abs() < 1e-14);
        prop_assert!((total(twice) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn decay_branching_sums_to_one(m in p1_projection()) {
        let s: f64 = decay_branching(m).unwrap().iter().map(|b| b.fraction).sum();
        prop_assert!((s - 1.0).abs() < 1e-14);
    }

    #[test]
    fn weights_are_mirror_symmetric(twice in prop::sample::select(vec![-1, 1]), pi in 0usize..3) {
        let pol = Polarization::ALL[pi];
        let a = transition_weight(Half::from_twice(twice), pol).unwrap();
        let b = transition_weight(Half::from_twice(-twice), pol.mirror()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn shift_is_linear_in_power(m in p1_projection(), p_mw in 0.1f64..50.0, k in 0.1f64..10.0) {
        let sc = scheme();
        let mut beam = BeamParams::light_shift_default();
        beam.power_w = p_mw * 1e-3;
        let a: f64 = shift_components(m, &beam, &sc, beam.peak_intensity()).unwrap().iter().sum();
        beam.power_w *= k;
        let b: f64 = shift_components(m, &beam, &sc, beam.peak_intensity()).unwrap().iter().sum();
        prop_assert!(rel_eq(b, k * a, 1e-12));
    }

    #[test]
    fn each_component_flips_with_its_detuning(m in p1_projection(), det in 5.0f64..5e4, upper in 0usize..2) {
        let sc = scheme();
        let mut beam = BeamParams::light_shift_default();
        beam.reference = if upper == 0 { DetuningReference::D1F12 } else { DetuningReference::D1F32 };
        beam.detuning_mhz = det;
        let i = beam.peak_intensity();
        let a = shift_components(m, &beam, &sc, i).unwrap()[upper];
        beam.detuning_mhz = -det;
        let b = shift_components(m, &beam, &sc, i).unwrap()[upper];
        prop_assert!(rel_eq(a, -b, 1e-12));
    }

    #[test]
    fn splitting_is_difference_of_shifts(d32 in -20.0f64..20.0) {
        let r = sublevel_splitting(mhz_to_angular(d32), &scheme(), &BeamParams::light_shift_default()).unwrap();
        prop_assert!(rel_eq(r.splitting_mhz(), r.delta_32_mhz() - r.delta_12_mhz(), 1e-12));
        prop_assert!(rel_eq(r.splitting, r.delta_32 - r.delta_12, 1e-12));
    }

    #[test]
    fn rates_mirror_under_spin_and_polarization_swap(
        g in 0.0f64..3.0, wp in 0.0f64..1.0, wz in 0.0f64..1.0, wm in 0.0f64..1.0,
        det in -20.0f64..20.0, cav in -5.0f64..5.0, d32 in -10.0f64..10.0, d12 in -20.0f64..20.0,
    ) {
        let cav_p = CavityParams::default();
        let c = conditions(g, [wp, wz, wm], det, cav, d32, d12);
        let up = adiabatic_rates(Spin::Up, &c, &cav_p);
        let down = adiabatic_rates(Spin::Down, &c.mirrored(), &cav_p);
        prop_assert!(rel_eq(up.rate_sigma_plus, down.rate_sigma_minus, 1e-12));
        prop_assert!(rel_eq(up.rate_sigma_minus, down.rate_sigma_plus, 1e-12));
        prop_assert!(rel_eq(up.spin_flip_rate, down.spin_flip_rate, 1e-12));
        prop_assert!(rel_eq(up.free_space_rate, down.free_space_rate, 1e-12));
    }

    #[test]
    fn unshifted_rates_are_even_in_detuning(
        g in 0.0f64..3.0, wp in 0.0f64..1.0, wz in 0.0f64..1.0, wm in 0.0f64..1.0,
        det in 0.0f64..20.0, up in any::<bool>(),
    ) {
        let cav_p = CavityParams::default();
        let spin = if up { Spin::Up } else { Spin::Down };
        let a = adiabatic_rates(spin, &conditions(g, [wp, wz, wm], det, 0.0, 0.0, 0.0), &cav_p);
        let b = adiabatic_rates(spin, &conditions(g, [wp, wz, wm], -det, 0.0, 0.0, 0.0), &cav_p);
        prop_assert!(rates_eq(&a, &b, 1e-12));
    }

    #[test]
    fn larger_splitting_means_purer_cycling(s1 in 3.0f64..30.0, ds in 0.1f64..30.0, g in 0.5f64..2.8) {
        // drive locked on the shifted stretched resonance, δ12/δ32 at the default ratio
        let ratio = -16.0 / 8.5;
        let cav_p = CavityParams::default();
        let flip = |s: f64| {
            let c = conditions(g, [0.3, 0.0, 0.3], s, 0.0, s, ratio * s);
            let r = adiabatic_rates(Spin::Up, &c, &cav_p);
            r.spin_flip_rate / r.total_scattering()
        };
        prop_assert!(flip(s1 + ds) <= flip(s1) * (1.0 + 1e-12));
    }

    #[test]
    fn pearson_is_bounded_and_affine_invariant(
        pts in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 3..40),
        a in 0.1f64..10.0, b in -100.0f64..100.0, c in 0.1f64..10.0, d in -100.0f64..100.0,
    ) {
        if let Some(r) = pearson_correlation(&pts) {
            prop_assert!((-1.0..=1.0).contains(&r));
            let t: Vec<_> = pts.iter().map(|&(x, y)| (a * x + b, c * y + d)).collect();
            let r2 = pearson_correlation(&t).unwrap();
            prop_assert!((r - r2).abs() < 1e-9);
        }
    }

    #[test]
    fn mot_dip_is_in_unit_interval_and_deepens_with_power(
        det in -500.0f64..500.0, i1 in 0.1f64..100.0, k in 1.0f64..10.0,
    ) {
        let mut mot = MotParams { probe_intensity: i1, ..MotParams::default() };
        let a = mot_dip_profile(&[det], &mot)[0].normalized_n;
        mot.probe_intensity = i1 * k;
        let b = mot_dip_profile(&[det], &mot)[0].normalized_n;
        prop_assert!(a > 0.0 && a <= 1.0);
        prop_assert!(b > 0.0 && b <= 1.0);
        prop_assert!(b <= a);
    }

    #[test]
    fn snr_is_invariant_under_common_scaling(a in 0.0f64..1e4, b in 0.0f64..1e4, eta in 1e-3f64..1.0) {
        match (snr_from_totals(a, b), snr_from_totals(eta * a, eta * b)) {
            (Snr::Finite(x), Snr::Finite(y)) => prop_assert!(rel_eq(x, y, 1e-12)),
            (x, y) => prop_assert_eq!(x, y),
        }
    }
}
