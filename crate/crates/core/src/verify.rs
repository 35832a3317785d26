//! Verification suites that pit closed forms against the oracles.
//!
//! Each check yields one [`VerificationRecord`], serialized as one JSON line.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::beamforming::SelectionSizes;
use crate::channel::{FdaPlan, RisGeometry};
use crate::error::Result;
use crate::geometry::PolarLocation;
use crate::oracle::{
    bob_signal_snr, draw_exclusions, enumerate_u_moments, enumerate_v_moments, grid_max_eve_snr,
    lambda_exact, monte_carlo_eve_snr, Cut, RibesSimulator,
};
use crate::scenario::Scenario;
use crate::secrecy::{eve_bound_angle, eve_bound_range, lambda_approx};
use crate::units::linear_to_db;

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub name: String,
    pub closed_form: f64,
    pub oracle: f64,
    pub error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl VerificationRecord {
    fn new(name: impl Into<String>, closed_form: f64, oracle: f64, error: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            closed_form,
            oracle,
            error,
            tolerance,
            pass: error <= tolerance,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

/// Which group of checks to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Moments,
    Snr,
    Bounds,
    All,
}

impl Suite {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "moments" => Some(Suite::Moments),
            "snr" => Some(Suite::Snr),
            "bounds" => Some(Suite::Bounds),
            "all" => Some(Suite::All),
            _ => None,
        }
    }
}

/// Relative tolerance of the enumeration checks.
pub const MOMENT_TOL: f64 = 1e-12;
/// Allowed distance between Monte Carlo and closed form, in standard errors.
pub const MC_SIGMAS: f64 = 3.0;
/// Allowed gap between Bob's synthesized SNR and the closed form.
pub const BOB_SNR_TOL_DB: f64 = 0.1;

/// Enumeration checks of `u` and `v` for every small array and subset size.
pub fn moments_suite(offsets_per_case: usize, seed: u64) -> Result<Vec<VerificationRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for m in 1..=8usize {
        let plan = FdaPlan::new(60e9, FdaPlan::max_delta_f(60e9, m).min(1e8), m)?;
        for m_s in SelectionSizes::min_size(m)..=m {
            let mut worst = (0.0, 0.0, 0.0);
            for _ in 0..offsets_per_case {
                let bob = PolarLocation::new(rng.random_range(20.0..150.0), 0.6)?;
                let eve = PolarLocation::new(rng.random_range(1.0..200.0), 0.6)?;
                let r = enumerate_u_moments(&plan, &bob, &eve, m_s)?;
                if r.max_rel_error >= worst.2 {
                    worst = (r.closed_form_variance, r.exact_variance, r.max_rel_error);
                }
            }
            out.push(VerificationRecord::new(
                format!("moments/u/M={m}/Ms={m_s}"),
                worst.0,
                worst.1,
                worst.2,
                MOMENT_TOL,
            ));
        }
    }
    for (n_h, n_v) in [
        (1, 1),
        (2, 1),
        (1, 3),
        (2, 2),
        (5, 1),
        (3, 2),
        (1, 7),
        (4, 2),
        (2, 4),
        (8, 1),
    ] {
        let geom = RisGeometry::half_wavelength(n_h, n_v, 60e9)?;
        let plan = FdaPlan::new(60e9, 1e6, 3)?;
        let n = geom.n();
        for n_s in SelectionSizes::min_size(n)..=n {
            let mut worst = (0.0, 0.0, 0.0);
            for _ in 0..offsets_per_case {
                let bob = PolarLocation::new(80.0, rng.random_range(-PI..PI))?;
                let eve = PolarLocation::new(80.0, rng.random_range(-PI..PI))?;
                let theta_tx = rng.random_range(0.0..PI / 2.0);
                let r = enumerate_v_moments(&plan, &geom, theta_tx, &bob, &eve, n_s)?;
                if r.max_rel_error >= worst.2 {
                    worst = (r.closed_form_variance, r.exact_variance, r.max_rel_error);
                }
            }
            out.push(VerificationRecord::new(
                format!("moments/v/NH={n_h}/NV={n_v}/Ns={n_s}"),
                worst.0,
                worst.1,
                worst.2,
                MOMENT_TOL,
            ));
        }
    }
    Ok(out)
}

/// Monte-Carlo Eve SNR along Bob's bearing and Bob's SNR under random masks.
pub fn snr_suite(scn: &Scenario, samples: usize, seed: u64) -> Result<Vec<VerificationRecord>> {
    let bob = scn.bob();
    let mut out = Vec::new();
    for (i, r) in [10.0, 30.0, 50.0, 120.0, 180.0].into_iter().enumerate() {
        let eve = PolarLocation::new(r, bob.aoa_rad)?;
        let mc = monte_carlo_eve_snr(scn, &eve, samples, seed.wrapping_add(i as u64))?;
        out.push(VerificationRecord::new(
            format!("snr/eve/R={r}"),
            mc.closed_form_snr,
            mc.empirical_snr,
            mc.z_score(),
            MC_SIGMAS,
        ));
    }
    let sim = RibesSimulator::new(scn, &bob)?;
    let closed = scn.snr_bob_ribes();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = (0.0f64, closed);
    for _ in 0..20 {
        let (a, e) = draw_exclusions(&mut rng, &scn.sizes, scn.m(), scn.n());
        let g = bob_signal_snr(scn, &sim, &a, &e);
        let gap = linear_to_db(g / closed).abs();
        if gap >= worst.0 {
            worst = (gap, g);
        }
    }
    out.push(VerificationRecord::new(
        "snr/bob/masks",
        closed,
        worst.1,
        worst.0,
        BOB_SNR_TOL_DB,
    ));
    Ok(out)
}

/// Grid maxima of Eve's SNR on both wiretap cuts against the bounds.
pub fn bounds_suite(scn: &Scenario, points: usize) -> Result<Vec<VerificationRecord>> {
    let bob = scn.bob();
    let mut out = Vec::new();
    if scn.sizes.m_s < scn.m() && scn.plan.delta_f_hz > 0.0 {
        let g = grid_max_eve_snr(
            scn,
            &Cut::Range {
                r_min: 1.0,
                r_max: 200.0,
            },
            points,
        )?;
        let ub = eve_bound_range(scn.m(), scn.sizes.m_s);
        out.push(VerificationRecord::new(
            "bounds/range",
            ub,
            g.max_snr,
            (g.max_snr - ub).max(0.0) / ub,
            0.0,
        ));
    }
    let lambda = lambda_approx(&scn.geom, bob.aoa_rad);
    if scn.sizes.n_s < scn.n() {
        let cut = Cut::Angle {
            theta_min: -PI / 2.0,
            theta_max: PI / 2.0,
        };
        let g = grid_max_eve_snr(scn, &cut, points)?;
        let ub = eve_bound_angle(scn.n(), scn.sizes.n_s, lambda);
        out.push(VerificationRecord::new(
            "bounds/angle",
            ub,
            g.max_snr,
            (g.max_snr - ub).max(0.0) / ub,
            0.0,
        ));
    }
    let (exact, _) = lambda_exact(scn, -PI / 2.0, PI / 2.0, 20_001)?;
    out.push(VerificationRecord::new(
        "bounds/lambda",
        lambda,
        exact,
        (lambda - exact).abs() / exact,
        0.25,
    ));
    Ok(out)
}

/// Runs `suite` on `scn`.
pub fn run_suite(scn: &Scenario, suite: Suite, samples: usize, seed: u64) -> Result<Vec<VerificationRecord>> {
    let mut out = Vec::new();
    if matches!(suite, Suite::Moments | Suite::All) {
        out.extend(moments_suite(20, seed)?);
    }
    if matches!(suite, Suite::Snr | Suite::All) {
        out.extend(snr_suite(scn, samples, seed)?);
    }
    if matches!(suite, Suite::Bounds | Suite::All) {
        out.extend(bounds_suite(scn, 2000)?);
    }
    Ok(out)
}
