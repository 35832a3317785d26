use std::f64::consts::PI;

use risfda::geometry::{from_polar, to_polar};
use risfda::optimize::{optimal_delta_f, optimize};
use risfda::oracle::{grid_max_eve_snr, lambda_exact, Cut};
use risfda::secrecy::{capacity, eve_bound_range, lambda_approx};
use risfda::sweep::{heatmap, sweep, EveSpec, GridSpec, McSettings};
use risfda::units::linear_to_db;
use risfda::{Error, FdaPlan, Point, PolarLocation, Scenario, SelectionSizes, Technique, SPEED_OF_LIGHT};

fn baseline() -> Scenario {
    Scenario::baseline()
}

#[test]
fn bob_link_budget() {
    let scn = baseline();
    let db = linear_to_db(scn.snr_bob_full());
    assert!((db - 24.866).abs() < 0.01, "{db}");
    let ribes = scn.snr_bob_ribes();
    assert!(ribes < scn.snr_bob_full());
    assert!(ribes > 0.0);
}

#[test]
fn polar_placement_round_trip() {
    let scn = baseline();
    let ris = scn.placement.ris();
    let p = from_polar(ris, scn.bob());
    assert!((p.x - 100.0).abs() < 1e-9 && (p.y + 20.0).abs() < 1e-9);
    assert!(matches!(to_polar(ris, ris), Err(Error::CoincidentWithRis)));
}

#[test]
fn fda_eve_at_bob_matches_bob() {
    let scn = baseline();
    let fda = scn.snr_eve_fda(&scn.bob()).unwrap();
    assert!((fda / scn.snr_bob_full() - 1.0).abs() < 1e-12);
    let report = scn.evaluate(&scn.bob(), Technique::FdaRibes).unwrap();
    assert_eq!(report.rate_bits, 0.0);
}

#[test]
fn fda_range_null() {
    let scn = baseline();
    let bob = scn.bob();
    let null = bob.range_m + SPEED_OF_LIGHT / (21.0 * scn.plan.delta_f_hz);
    let eve = PolarLocation::new(null, bob.aoa_rad).unwrap();
    assert!(scn.snr_eve_fda(&eve).unwrap() < 1e-20 * scn.snr_bob_full());
}

#[test]
fn full_selection_reduces_to_fda() {
    let scn = baseline().with_sizes(21, 441).unwrap();
    for (r, t) in [(40.0, 0.62), (86.0, 0.5), (130.0, -0.3)] {
        let eve = PolarLocation::new(r, t).unwrap();
        let a = scn.snr_eve_ribes(&eve).unwrap();
        let b = scn.snr_eve_fda(&eve).unwrap();
        assert!((a / b - 1.0).abs() < 1e-9, "{a} vs {b}");
    }
}

#[test]
fn range_bound_grid_behaviour() {
    let scn = baseline().with_sizes(18, 441).unwrap();
    let max = grid_max_eve_snr(
        &scn,
        &Cut::Range {
            r_min: 1.0,
            r_max: 200.0,
        },
        2000,
    )
    .unwrap();
    assert!(max.max_snr <= eve_bound_range(21, 18));
    assert!(max.evaluated > 1000 && max.evaluated < 2000);
}

#[test]
fn lambda_front_half_plane() {
    let scn = baseline();
    let approx = lambda_approx(&scn.geom, scn.bob().aoa_rad);
    let (exact, at) = lambda_exact(&scn, -PI / 2.0, PI / 2.0, 4000).unwrap();
    assert!((approx - 18.88).abs() < 0.01, "{approx}");
    assert!((exact - 22.21).abs() < 0.05, "{exact}");
    assert!(at.abs() < PI / 2.0);
}

#[test]
fn baseline_optimum() {
    let res = optimize(&baseline()).unwrap();
    assert_eq!(res.m_s_star, 18);
    assert!((379..=381).contains(&res.n_s_star), "{}", res.n_s_star);
    assert!(res.objective_bits > 0.0);
}

#[test]
fn optimal_increment_example() {
    let scn = baseline();
    let bob = scn.bob();
    let eve = PolarLocation::new(50.0, bob.aoa_rad).unwrap();
    let df = optimal_delta_f(&scn.plan, &bob, &eve).unwrap();
    assert!((df - SPEED_OF_LIGHT / (21.0 * (bob.range_m - 50.0))).abs() < 1e-6);
    assert!(matches!(
        optimal_delta_f(&scn.plan, &bob, &bob),
        Err(Error::EquidistantEve)
    ));
    let far = PolarLocation::new(bob.range_m + 1e-3, bob.aoa_rad).unwrap();
    assert!(matches!(
        optimal_delta_f(&scn.plan, &bob, &far),
        Err(Error::InfeasibleIncrement { .. })
    ));
}

#[test]
fn optimal_increment_report_hits_ceiling() {
    let scn = baseline();
    let eve = PolarLocation::new(50.0, scn.bob().aoa_rad).unwrap();
    let r = scn.evaluate(&eve, Technique::OptimalDeltaF).unwrap();
    assert_eq!(r.rate_bits, capacity(r.gamma_bob));
    assert!(r.rate_bits <= r.rate_ceiling_bits);
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(matches!(
        SelectionSizes::new(10, 300, 21, 441),
        Err(Error::InvalidSizes(_))
    ));
    assert!(FdaPlan::new(60e9, 10e6, 21).is_err());
    assert!(matches!(
        PolarLocation::new(0.0, 0.0),
        Err(Error::NonPositiveRange(_))
    ));
    assert!(baseline().with_sizes(21, 200).is_err());
}

#[test]
fn heatmap_layout() {
    let grid = GridSpec {
        x_min: 0.0,
        x_max: 100.0,
        y_min: -50.0,
        y_max: 0.0,
        nx: 5,
        ny: 3,
    };
    let rows = heatmap(&baseline(), &grid).unwrap();
    assert_eq!(rows.len(), 15);
    assert_eq!((rows[0].x_m, rows[0].y_m), (0.0, -50.0));
    assert_eq!((rows[4].x_m, rows[4].y_m), (100.0, -50.0));
    assert_eq!((rows[14].x_m, rows[14].y_m), (100.0, 0.0));
    for r in &rows {
        assert!(r.rate_ribes <= r.rate_ub + 1e-12);
        assert!(r.rate_fda <= r.rate_ub + 1e-12);
    }
}

#[test]
fn eve_spec_sweep_with_monte_carlo() {
    let scn = baseline();
    let spec: EveSpec =
        serde_json::from_str(r#"{"kind":"range_sweep","r_min":20.0,"r_max":160.0,"points":4}"#).unwrap();
    let points = spec.locations(&scn).unwrap();
    let rows = sweep(
        &scn,
        &points,
        Some(McSettings {
            samples: 2000,
            seed: 5,
        }),
    )
    .unwrap();
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert!((r.aoa_rad - scn.bob().aoa_rad).abs() < 1e-12);
        assert!(r.mc_snr_eve_ribes.is_some());
    }
    let json = serde_json::to_string(&spec).unwrap();
    assert_eq!(serde_json::from_str::<EveSpec>(&json).unwrap(), spec);
}

#[test]
fn evaluate_point_matches_polar() {
    let scn = baseline();
    let p = Point::new(60.0, 10.0);
    let loc = scn.placement.to_polar(p).unwrap();
    for t in Technique::ALL {
        let a = scn.evaluate_point(p, t).unwrap();
        let b = scn.evaluate(&loc, t).unwrap();
        assert_eq!(a.rate_bits, b.rate_bits);
    }
}
