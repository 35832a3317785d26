//! Optimal subset sizes and the optimal frequency increment.
//!
//! Both size problems share one shape. With `t = (2K_s − K)²` for a
//! population `K`, Bob's SNR is `a·t` and the eavesdropper bound is
//! `e·t/(K² − t)`, so the objective `log2(1 + a t) − log2(1 + e t/(K² − t))`
//! is stationary where
//!
//! `a(1−e)·t² − 2aK²·t + aK⁴ − eK² = 0`.
//!
//! The smaller root is the maximizer. Integer sweeps over the same objective
//! serve as the fallback and as a cross-check.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beamforming::SelectionSizes;
use crate::channel::{FdaPlan, MAX_SHIFT_FRACTION, SPEED_OF_LIGHT};
use crate::error::{invalid, Error, Result};
use crate::geometry::PolarLocation;
use crate::scenario::Scenario;
use crate::secrecy::{capacity, eve_bound_angle, eve_bound_range, first_sidelobe_peak, lambda_approx};

pub use crate::secrecy::secrecy_upper_bound;

/// Coefficients of the two size problems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuxiliaryCoefficients {
    /// Bob's SNR per unit `(2M_s − M)²`.
    pub eta_b: f64,
    /// Range-cut bound coefficient, `(M−1)/(M² sin²(3π/2M) − 1)`.
    pub eta_e: f64,
    /// Bob's SNR per unit `(2N_s − N)²`.
    pub zeta_b: f64,
    /// Angle-cut bound coefficient, `(N−1)λ²/(N² − λ²)`.
    pub zeta_e: f64,
}

/// Coefficients for the scenario's current sizes and a given `λ`.
pub fn auxiliary_coefficients(scn: &Scenario, lambda: f64) -> AuxiliaryCoefficients {
    let (m, n) = (scn.m() as f64, scn.n() as f64);
    let base = scn.budget.power_w / (m * scn.budget.noise_bob_w) * scn.gains_bob().product();
    let ms = 2.0 * scn.sizes.m_s as f64 - m;
    let ns = 2.0 * scn.sizes.n_s as f64 - n;
    let peak = first_sidelobe_peak(scn.m());
    AuxiliaryCoefficients {
        eta_b: base * ns * ns,
        eta_e: (m - 1.0) / (m * m / (peak * peak) - 1.0),
        zeta_b: base * ms * ms,
        zeta_e: (n - 1.0) * lambda * lambda / (n * n - lambda * lambda),
    }
}

/// How a size was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Simplified,
    Sweep,
}

/// One optimized subset size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeChoice {
    pub size: usize,
    pub method: Method,
    /// Unrounded optimum `(K + √t)/2`, when a closed form applied.
    pub continuous: Option<f64>,
}

/// Jointly reported optimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub m_s_star: usize,
    pub n_s_star: usize,
    pub method: Method,
    /// Worst-case secrecy rate at the returned sizes.
    pub objective_bits: f64,
}

/// Smaller root `t` of the stationarity quadratic, if it is admissible.
pub fn stationary_point(k: usize, a: f64, e: f64) -> Option<f64> {
    let k2 = (k * k) as f64;
    if !(a > 0.0) || !(e > 0.0) || !a.is_finite() || !e.is_finite() {
        return None;
    }
    let one_minus_e = 1.0 - e;
    let t = if one_minus_e.abs() < 1e-12 {
        (k2 - e / a) / 2.0
    } else {
        let disc = e + e * one_minus_e / (a * k2);
        if disc < 0.0 {
            return None;
        }
        k2 * (1.0 - disc.sqrt()) / one_minus_e
    };
    (t > 0.0 && t <= k2 && t.is_finite()).then_some(t)
}

/// Rounds the continuous optimum into `[⌊K/2⌋+1, K−1]`; the bounds, and so
/// the objective, are undefined at `K`.
fn size_from_t(k: usize, t: f64) -> (usize, f64) {
    let cont = (k as f64 + t.sqrt()) / 2.0;
    let lo = SelectionSizes::min_size(k);
    ((cont.round() as usize).clamp(lo, (k - 1).max(lo)), cont)
}

/// First size with the largest objective.
pub fn argmax(values: &[(usize, f64)]) -> usize {
    values
        .iter()
        .skip(1)
        .fold(values[0], |best, &(s, v)| if v > best.1 { (s, v) } else { best })
        .0
}

/// Range-cut objective for `m_s` with the scenario's `N_s`: Bob's rate
/// minus the rate at the range-cut bound. The bound does not exist at
/// `m_s = M`, where the objective is `−∞`.
pub fn m_s_objective(scn: &Scenario, m_s: usize) -> Result<f64> {
    let s = scn.with_sizes(m_s, scn.sizes.n_s)?;
    Ok(capacity(s.snr_bob_ribes()) - capacity(eve_bound_range(s.m(), m_s)))
}

/// Angle-cut objective for `n_s` with the scenario's `M_s` and a given `λ`;
/// `−∞` at `n_s = N`.
pub fn n_s_objective(scn: &Scenario, n_s: usize, lambda: f64) -> Result<f64> {
    let s = scn.with_sizes(scn.sizes.m_s, n_s)?;
    Ok(capacity(s.snr_bob_ribes()) - capacity(eve_bound_angle(s.n(), n_s, lambda)))
}

/// Objective for every admissible `M_s`.
pub fn sweep_m_s(scn: &Scenario) -> Result<Vec<(usize, f64)>> {
    (SelectionSizes::min_size(scn.m())..=scn.m())
        .into_par_iter()
        .map(|ms| Ok((ms, m_s_objective(scn, ms)?)))
        .collect()
}

/// Objective for every admissible `N_s`.
pub fn sweep_n_s(scn: &Scenario, lambda: f64) -> Result<Vec<(usize, f64)>> {
    (SelectionSizes::min_size(scn.n())..=scn.n())
        .into_par_iter()
        .map(|ns| Ok((ns, n_s_objective(scn, ns, lambda)?)))
        .collect()
}

/// Optimal `M_s` from the stationary point, or by sweep when it is not admissible.
pub fn optimal_m_s(scn: &Scenario) -> Result<SizeChoice> {
    let c = auxiliary_coefficients(scn, 0.0);
    match (scn.m() > 2)
        .then(|| stationary_point(scn.m(), c.eta_b, c.eta_e))
        .flatten()
    {
        Some(t) => {
            let (size, cont) = size_from_t(scn.m(), t);
            Ok(SizeChoice {
                size,
                method: Method::ClosedForm,
                continuous: Some(cont),
            })
        }
        None => Ok(SizeChoice {
            size: argmax(&sweep_m_s(scn)?),
            method: Method::Sweep,
            continuous: None,
        }),
    }
}

/// High-SNR optimum, `M_s = M/2 · (1 + 1/√(1 + √η_E))`; depends on `M` only.
pub fn optimal_m_s_simplified(m: usize) -> usize {
    if m <= 2 {
        return m.max(1);
    }
    let peak = first_sidelobe_peak(m);
    let mf = m as f64;
    let eta_e = (mf - 1.0) / (mf * mf / (peak * peak) - 1.0);
    size_from_t(m, mf * mf / (1.0 + eta_e.sqrt())).0
}

/// Optimal `N_s` with the approximate `λ`.
pub fn optimal_n_s(scn: &Scenario) -> Result<SizeChoice> {
    optimal_n_s_with_lambda(scn, lambda_approx(&scn.geom, scn.bob().aoa_rad))
}

/// Optimal `N_s` for an explicit `λ`.
pub fn optimal_n_s_with_lambda(scn: &Scenario, lambda: f64) -> Result<SizeChoice> {
    let c = auxiliary_coefficients(scn, lambda);
    match (scn.n() > 2)
        .then(|| stationary_point(scn.n(), c.zeta_b, c.zeta_e))
        .flatten()
    {
        Some(t) => {
            let (size, cont) = size_from_t(scn.n(), t);
            Ok(SizeChoice {
                size,
                method: Method::ClosedForm,
                continuous: Some(cont),
            })
        }
        None => Ok(SizeChoice {
            size: argmax(&sweep_n_s(scn, lambda)?),
            method: Method::Sweep,
            continuous: None,
        }),
    }
}

/// High-SNR optimum for `N_s`, `N/2 · (1 + 1/√(1 + √ζ_E))`.
pub fn optimal_n_s_simplified(n: usize, lambda: f64) -> usize {
    if n <= 2 {
        return n.max(1);
    }
    let nf = n as f64;
    let zeta_e = (nf - 1.0) * lambda * lambda / (nf * nf - lambda * lambda);
    size_from_t(n, nf * nf / (1.0 + zeta_e.sqrt())).0
}

/// Optimal `M_s` first, then `N_s` given that `M_s`.
pub fn optimize(scn: &Scenario) -> Result<OptimizationResult> {
    let ms = optimal_m_s(scn)?;
    let with_ms = scn.with_sizes(ms.size, scn.sizes.n_s)?;
    let ns = optimal_n_s(&with_ms)?;
    let best = with_ms.with_sizes(ms.size, ns.size)?;
    let method = if ms.method == Method::ClosedForm && ns.method == Method::ClosedForm {
        Method::ClosedForm
    } else {
        Method::Sweep
    };
    Ok(OptimizationResult {
        m_s_star: ms.size,
        n_s_star: ns.size,
        method,
        objective_bits: best.worst_case()?.rate_bits,
    })
}

/// Smallest increment that places a range null on Eve: `c/(M |R_E − R_B|)`.
///
/// Larger multiples also null Eve but only push the carriers further apart,
/// so the first one is the only candidate that can satisfy the shift limit.
pub fn optimal_delta_f(plan: &FdaPlan, bob: &PolarLocation, eve: &PolarLocation) -> Result<f64> {
    if plan.m_antennas < 2 {
        return Err(invalid("m_antennas", "a range null needs at least two antennas"));
    }
    let dr = (eve.range_m - bob.range_m).abs();
    if dr <= 1e-12 * bob.range_m {
        return Err(Error::EquidistantEve);
    }
    let m = plan.m_antennas as f64;
    let df = SPEED_OF_LIGHT / (m * dr);
    let limit = MAX_SHIFT_FRACTION * plan.f0_hz;
    let required = (m - 1.0) / 2.0 * df;
    if required > limit {
        return Err(Error::InfeasibleIncrement {
            required_hz: required,
            limit_hz: limit,
        });
    }
    Ok(df)
}
