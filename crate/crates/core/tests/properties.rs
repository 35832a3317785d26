use std::f64::consts::PI;

use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use risfda::beamforming::{ribes_beamformer, ris_phases_closed_form, ris_phases_ribes, MaskSampler};
use risfda::channel::{cascaded_channel, cascaded_channel_factored, synthesize_channels};
use risfda::geometry::{from_polar, to_polar};
use risfda::optimize::{argmax, m_s_objective, optimal_m_s, sweep_m_s};
use risfda::oracle::{
    bob_signal_snr, draw_exclusions, enumerate_u_moments, enumerate_v_moments, monte_carlo_eve_snr,
    RibesSimulator,
};
use risfda::secrecy::{eve_bound_angle, eve_bound_range};
use risfda::stats::{dirichlet, kernels_at, moments_u, scaling_stats};
use risfda::{
    FdaPlan, LinkBudget, PathLossModel, Placement, Point, PolarLocation, RisGeometry, Scenario,
    SelectionSizes,
};

fn small_scenario(m: usize, n_h: usize, n_v: usize) -> Scenario {
    let base = Scenario::baseline();
    let n = n_h * n_v;
    Scenario {
        plan: FdaPlan::new(60e9, 1e6, m).unwrap(),
        geom: RisGeometry::half_wavelength(n_h, n_v, 60e9).unwrap(),
        sizes: SelectionSizes::full(m, n),
        ..base
    }
}

fn user_location() -> impl Strategy<Value = PolarLocation> {
    (1.0..250.0f64, -PI..PI).prop_map(|(r, t)| PolarLocation::new(r, t).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polar_round_trip(x in -200.0..200.0f64, y in -200.0..200.0f64) {
        let ris = Point::new(30.0, 30.0);
        prop_assume!(ris.distance(&Point::new(x, y)) > 1e-3);
        let p = from_polar(ris, to_polar(ris, Point::new(x, y)).unwrap());
        prop_assert!((p.x - x).abs() < 1e-9 && (p.y - y).abs() < 1e-9);
    }

    #[test]
    fn path_loss_is_log_linear(l0 in 0.0..100.0f64, alpha in 1.5..4.0f64, r in 1.0..500.0f64) {
        let pl = PathLossModel::new(l0, alpha).unwrap();
        let a = pl.loss_db(r).unwrap();
        let b = pl.loss_db(10.0 * r).unwrap();
        prop_assert!((b - a - 10.0 * alpha).abs() < 1e-9);
    }

    #[test]
    fn channel_entries_have_common_modulus(loc in user_location()) {
        let scn = small_scenario(5, 3, 4);
        let (g, h) = synthesize_channels(&scn.plan, &scn.geom, &scn.placement, &scn.path_loss, &loc).unwrap();
        for z in g.entries.iter() {
            prop_assert!((z.norm() / g.amplitude - 1.0).abs() < 1e-12);
        }
        for z in h.entries.iter() {
            prop_assert!((z.norm() / h.amplitude - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn factored_channel_matches_matrix(loc in user_location(), seed in any::<u64>()) {
        let scn = small_scenario(7, 5, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phases: Vec<f64> = (0..scn.n()).map(|_| rand::Rng::random_range(&mut rng, -PI..PI)).collect();
        let (g, h) = synthesize_channels(&scn.plan, &scn.geom, &scn.placement, &scn.path_loss, &loc).unwrap();
        let direct = cascaded_channel(&g, &h, &phases).unwrap();
        let factored = cascaded_channel_factored(&scn.plan, &scn.geom, &scn.placement, &scn.path_loss, &loc, &phases).unwrap();
        let scale = direct.norm().max(f64::MIN_POSITIVE);
        for (a, b) in direct.entries.iter().zip(&factored.entries) {
            prop_assert!((a - b).norm() / scale < 1e-9);
        }
    }

    #[test]
    fn ribes_weights_are_unit_norm(seed in any::<u64>()) {
        let scn = Scenario::baseline();
        let bob = scn.bob();
        let link = scn.placement.transmit_link();
        let (g, h) = synthesize_channels(&scn.plan, &scn.geom, &scn.placement, &scn.path_loss, &bob).unwrap();
        let base = ris_phases_closed_form(scn.plan.f0_hz, &scn.geom, link.theta_tx_rad, &bob);
        let mask = MaskSampler::new(scn.sizes, scn.m(), scn.n(), seed).unwrap().draw();
        let hb = cascaded_channel(&g, &h, &ris_phases_ribes(&base, &mask)).unwrap();
        let w = ribes_beamformer(&hb, &mask).unwrap();
        prop_assert!((w.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dirichlet_is_continuous(x in -10.0..10.0f64, k in 1usize..40) {
        let h = 1e-7;
        let d = (dirichlet(x + h, k) - dirichlet(x, k)).abs();
        // the derivative is bounded by K³/3 in magnitude
        prop_assert!(d <= h * (k * k * k) as f64);
    }

    #[test]
    fn dirichlet_bounded_by_count(x in -10.0..10.0f64, k in 1usize..40) {
        prop_assert!(dirichlet(x, k).abs() <= k as f64 * (1.0 + 1e-12));
    }

    #[test]
    fn enumeration_matches_closed_form(m in 2usize..=8, r_b in 20.0..150.0f64, r_e in 1.0..200.0f64, pick in 0usize..8) {
        let plan = FdaPlan::new(60e9, FdaPlan::max_delta_f(60e9, m), m).unwrap();
        let m_s = SelectionSizes::min_size(m) + pick % (m - SelectionSizes::min_size(m) + 1);
        let r = enumerate_u_moments(&plan, &PolarLocation::new(r_b, 0.6).unwrap(), &PolarLocation::new(r_e, 0.6).unwrap(), m_s).unwrap();
        prop_assert!(r.max_rel_error < 1e-12);
        prop_assert_eq!(r.inclusion_total, m_s as u128 * r.subset_count);
    }

    #[test]
    fn element_enumeration_matches_closed_form(t_b in -PI..PI, t_e in -PI..PI, pick in 0usize..4) {
        let plan = FdaPlan::new(60e9, 1e6, 3).unwrap();
        let geom = RisGeometry::half_wavelength(2, 3, 60e9).unwrap();
        let n_s = 4 + pick % 3;
        let bob = PolarLocation::new(80.0, t_b).unwrap();
        let eve = PolarLocation::new(80.0, t_e).unwrap();
        let r = enumerate_v_moments(&plan, &geom, PI / 4.0, &bob, &eve, n_s).unwrap();
        prop_assert!(r.max_rel_error < 1e-12);
    }

    #[test]
    fn variance_is_nonnegative(eve in user_location(), m_s in 11usize..=21, n_s in 221usize..=441) {
        let scn = Scenario::baseline().with_sizes(m_s, n_s).unwrap();
        let k = kernels_at(&scn.plan, &scn.geom, &scn.bob(), &eve);
        let st = scaling_stats(1e-6, 1e-6, &scn.plan, &scn.geom, &scn.sizes, &k).unwrap();
        prop_assert!(st.var_beta >= 0.0 && st.v_u >= 0.0 && st.v_v >= 0.0);
        let (_, v) = moments_u(&scn.plan, &scn.sizes, k.mu1).unwrap();
        prop_assert!(v >= 0.0);
    }

    #[test]
    fn moments_scale_bilinearly(eve in user_location(), a in 1e-9..1e-3f64, b in 1e-9..1e-3f64, s in 0.1..10.0f64) {
        let scn = Scenario::baseline();
        let k = kernels_at(&scn.plan, &scn.geom, &scn.bob(), &eve);
        let base = scaling_stats(a, b, &scn.plan, &scn.geom, &scn.sizes, &k).unwrap();
        let scaled = scaling_stats(a * s, b, &scn.plan, &scn.geom, &scn.sizes, &k).unwrap();
        prop_assert!((scaled.var_beta - s * base.var_beta).abs() <= 1e-12 * scaled.var_beta.abs().max(1e-300));
        prop_assert!((scaled.mean_power() - s * base.mean_power()).abs() <= 1e-12 * scaled.mean_power().max(1e-300));
    }

    #[test]
    fn bounds_decrease_toward_half(m in 5usize..64, lambda in 1.0..20.0f64) {
        for s in SelectionSizes::min_size(m)..m - 1 {
            prop_assert!(eve_bound_range(m, s) <= eve_bound_range(m, s + 1));
        }
        let n = 441;
        for s in (221..440).step_by(7) {
            prop_assert!(eve_bound_angle(n, s, lambda) <= eve_bound_angle(n, s + 1, lambda));
        }
    }

    #[test]
    fn argmax_returns_first_maximum(values in prop::collection::vec(-5.0..5.0f64, 1..30)) {
        let indexed: Vec<(usize, f64)> = values.iter().copied().enumerate().collect();
        let best = argmax(&indexed);
        let max = values.iter().copied().fold(f64::MIN, f64::max);
        prop_assert_eq!(values[best], max);
        prop_assert!(values[..best].iter().all(|&v| v < max));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn closed_form_size_tracks_sweep(
        bx in 60.0..160.0f64,
        by in -80.0..10.0f64,
        power_dbm in 20.0..50.0f64,
        m in 9usize..40,
    ) {
        let base = Scenario::baseline();
        let placement = Placement::new(Point::new(30.0, 30.0), Point::new(bx, by)).unwrap();
        let scn = Scenario {
            placement,
            plan: FdaPlan::new(60e9, 1e6, m).unwrap(),
            budget: LinkBudget::from_dbm(power_dbm, -120.0, -120.0).unwrap(),
            sizes: SelectionSizes::full(m, 441),
            ..base
        };
        let choice = optimal_m_s(&scn).unwrap();
        let sweep = argmax(&sweep_m_s(&scn).unwrap());
        let gap = m_s_objective(&scn, sweep).unwrap() - m_s_objective(&scn, choice.size).unwrap();
        prop_assert!(choice.size.abs_diff(sweep) <= 1 || gap < 0.05, "{choice:?} vs {sweep}");
        prop_assert!(gap < 0.05);
    }
}

#[test]
fn bob_amplitude_ignores_mask() {
    let scn = Scenario::baseline();
    let sim = RibesSimulator::new(&scn, &scn.bob()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let snrs: Vec<f64> = (0..1000)
        .map(|_| {
            let (a, e) = draw_exclusions(&mut rng, &scn.sizes, scn.m(), scn.n());
            bob_signal_snr(&scn, &sim, &a, &e)
        })
        .collect();
    let closed = scn.snr_bob_ribes();
    for s in snrs {
        assert!((10.0 * (s / closed).log10()).abs() < 0.1);
    }
}

#[test]
fn monte_carlo_is_thread_count_invariant() {
    let scn = Scenario::baseline().with_sizes(14, 441).unwrap();
    let eve = PolarLocation::new(60.0, scn.bob().aoa_rad).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| monte_carlo_eve_snr(&scn, &eve, 20_000, 99).unwrap())
    };
    let a = run(1);
    let b = run(4);
    assert_eq!(a.empirical_snr.to_bits(), b.empirical_snr.to_bits());
    assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
}

#[test]
fn monte_carlo_error_shrinks_with_samples() {
    let scn = Scenario::baseline().with_sizes(14, 441).unwrap();
    let eve = PolarLocation::new(60.0, scn.bob().aoa_rad).unwrap();
    let small = monte_carlo_eve_snr(&scn, &eve, 20_000, 1).unwrap();
    let large = monte_carlo_eve_snr(&scn, &eve, 80_000, 1).unwrap();
    let ratio = large.std_error / small.std_error;
    assert!((0.35..0.7).contains(&ratio), "{ratio}");
    assert_relative_eq!(small.closed_form_snr, large.closed_form_snr);
}
