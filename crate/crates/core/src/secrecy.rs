//! SNRs, secrecy rates, the wiretap region and the RIBES eavesdropper bounds.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::beamforming::SelectionSizes;
use crate::channel::{FdaPlan, RisGeometry, SPEED_OF_LIGHT};
use crate::error::{invalid, Result};
use crate::geometry::PathLossModel;
use crate::geometry::{wrap_angle, PolarLocation};
use crate::stats::{dirichlet, kernels_at, scaling_stats, DirichletKernels, ScalingStats};
use crate::units::dbm_to_watts;

/// Transmit power and receiver noise powers, in watts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub power_w: f64,
    pub noise_bob_w: f64,
    /// May be zero to study the noiseless eavesdropper limit.
    pub noise_eve_w: f64,
}

impl LinkBudget {
    pub fn new(power_w: f64, noise_bob_w: f64, noise_eve_w: f64) -> Result<Self> {
        if !(power_w > 0.0) || !power_w.is_finite() {
            return Err(invalid("power", format!("must be positive, got {power_w}")));
        }
        if !(noise_bob_w > 0.0) || !noise_bob_w.is_finite() {
            return Err(invalid(
                "noise_bob",
                format!("must be positive, got {noise_bob_w}"),
            ));
        }
        if !(noise_eve_w >= 0.0) || !noise_eve_w.is_finite() {
            return Err(invalid("noise_eve", format!("must be >= 0, got {noise_eve_w}")));
        }
        Ok(Self {
            power_w,
            noise_bob_w,
            noise_eve_w,
        })
    }

    pub fn from_dbm(power_dbm: f64, noise_bob_dbm: f64, noise_eve_dbm: f64) -> Result<Self> {
        Self::new(
            dbm_to_watts(power_dbm),
            dbm_to_watts(noise_bob_dbm),
            dbm_to_watts(noise_eve_dbm),
        )
    }
}

/// Linear power gains of the BS→RIS hop (`L_G`) and of one RIS→user hop (`L_H`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkGains {
    pub g: f64,
    pub h: f64,
}

impl LinkGains {
    pub fn product(&self) -> f64 {
        self.g * self.h
    }
}

/// Transmission scheme being evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Technique {
    /// Phased array: every antenna on `f0`, no subset selection.
    #[serde(rename = "conventional")]
    Conventional,
    /// Frequency diverse array with MRT, no subset selection.
    #[serde(rename = "fda")]
    Fda,
    /// Frequency diverse array with random inverted beamforming and element selection.
    #[serde(rename = "fda+ribes")]
    FdaRibes,
    /// RIBES with the increment retuned to put a range null on Eve.
    #[serde(rename = "optimal-delta-f")]
    OptimalDeltaF,
}

impl Technique {
    pub const ALL: [Technique; 4] = [
        Technique::Conventional,
        Technique::Fda,
        Technique::FdaRibes,
        Technique::OptimalDeltaF,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Technique::Conventional => "conventional",
            Technique::Fda => "fda",
            Technique::FdaRibes => "fda+ribes",
            Technique::OptimalDeltaF => "optimal-delta-f",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name() == s)
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Bob's SNR with MRT and co-phased RIS: `(P/σ_B²) L_G L_H M N²`.
pub fn snr_bob_fda(budget: &LinkBudget, gains: &LinkGains, m: usize, n: usize) -> f64 {
    let (m, n) = (m as f64, n as f64);
    budget.power_w / budget.noise_bob_w * gains.product() * m * n * n
}

/// Bob's SNR under RIBES: `(P/σ_B²) L_G L_H (2M_s−M)²/M · (2N_s−N)²`.
pub fn snr_bob_ribes(
    budget: &LinkBudget,
    gains: &LinkGains,
    m: usize,
    n: usize,
    sizes: &SelectionSizes,
) -> Result<f64> {
    SelectionSizes::new(sizes.m_s, sizes.n_s, m, n)?;
    let a = 2.0 * sizes.m_s as f64 - m as f64;
    let b = 2.0 * sizes.n_s as f64 - n as f64;
    Ok(budget.power_w / budget.noise_bob_w * gains.product() * a * a / m as f64 * b * b)
}

/// Eve's deterministic SNR without subset selection.
pub fn snr_eve_fda(budget: &LinkBudget, gains: &LinkGains, kernels: &DirichletKernels, m: usize) -> f64 {
    let k = kernels.mu1 * kernels.mu1 / m as f64 * (kernels.mu2 * kernels.mu3).powi(2);
    ratio(budget.power_w * gains.product() * k, budget.noise_eve_w)
}

/// Eve's SNR under RIBES, `P|E[β]|² / (P V[β] + σ_E²)`.
pub fn snr_eve_ribes(stats: &ScalingStats, budget: &LinkBudget) -> f64 {
    ratio(
        budget.power_w * stats.mean_power(),
        budget.power_w * stats.var_beta + budget.noise_eve_w,
    )
}

/// `log2(1+γ)` evaluated without loss of precision for small `γ`.
pub fn capacity(gamma: f64) -> f64 {
    gamma.ln_1p() / LN_2
}

/// `[log2(1+γ_B) − log2(1+γ_E)]^+`.
pub fn secrecy_rate(gamma_bob: f64, gamma_eve: f64) -> f64 {
    if gamma_eve.is_infinite() {
        return 0.0;
    }
    (capacity(gamma_bob) - capacity(gamma_eve)).max(0.0)
}

/// How the range and angle exceedance conditions combine into the wiretap set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Combine {
    /// Eve must be outside both the range lobe and the angle lobe.
    #[default]
    Conjunction,
    /// Eve outside either lobe is in the wiretap area.
    Union,
}

/// Distances from Bob to the first nulls in range and angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WiretapRegion {
    /// `c/(MΔF)`; infinite for a phased array.
    pub delta_r_m: f64,
    /// First null of the horizontal angle kernel; infinite if none exists.
    pub delta_theta1_rad: f64,
    /// First null of the vertical angle kernel; infinite if none exists.
    pub delta_theta2_rad: f64,
    pub combine: Combine,
}

impl WiretapRegion {
    /// Smallest angular distance to a null.
    pub fn delta_theta_rad(&self) -> f64 {
        self.delta_theta1_rad.min(self.delta_theta2_rad)
    }

    /// Excluded range strip `[R_B − ΔR, R_B + ΔR]` on Bob's bearing.
    pub fn range_strip(&self, bob: &PolarLocation) -> (f64, f64) {
        (bob.range_m - self.delta_r_m, bob.range_m + self.delta_r_m)
    }

    pub fn outside_range_lobe(&self, bob: &PolarLocation, eve: &PolarLocation) -> bool {
        (eve.range_m - bob.range_m).abs() >= self.delta_r_m
    }

    pub fn outside_angle_lobe(&self, bob: &PolarLocation, eve: &PolarLocation) -> bool {
        wrap_angle(eve.aoa_rad - bob.aoa_rad).abs() >= self.delta_theta_rad()
    }
}

/// Angles `θ` with `cos θ = target`, `sin θ = target` respectively.
fn acos_solutions(target: f64) -> Option<[f64; 2]> {
    (target.abs() <= 1.0).then(|| {
        let a = target.acos();
        [a, -a]
    })
}

fn asin_solutions(target: f64) -> Option<[f64; 2]> {
    (target.abs() <= 1.0).then(|| {
        let a = target.asin();
        [a, PI - a]
    })
}

fn nearest_offset(theta_b: f64, candidates: impl Iterator<Item = f64>) -> f64 {
    candidates
        .map(|t| wrap_angle(t - theta_b).abs())
        .fold(f64::INFINITY, f64::min)
}

/// First-null boundaries around Bob.
///
/// Each `±` branch of the angle conditions is solved on the full circle and
/// the solution closest to Bob is kept; branches whose argument leaves
/// `[−1, 1]` have no null and are skipped.
pub fn wiretap_region(
    plan: &FdaPlan,
    geom: &RisGeometry,
    bob: &PolarLocation,
    combine: Combine,
) -> WiretapRegion {
    let delta_r_m = if plan.delta_f_hz > 0.0 {
        SPEED_OF_LIGHT / (plan.m_antennas as f64 * plan.delta_f_hz)
    } else {
        f64::INFINITY
    };
    let (s, c) = bob.aoa_rad.sin_cos();
    let dh = 2.0 / geom.n_h as f64;
    let dv = 2.0 / geom.n_v as f64;
    let theta1 = nearest_offset(
        bob.aoa_rad,
        [c + dh, c - dh].into_iter().filter_map(acos_solutions).flatten(),
    );
    let theta2 = nearest_offset(
        bob.aoa_rad,
        [s + dv, s - dv].into_iter().filter_map(asin_solutions).flatten(),
    );
    WiretapRegion {
        delta_r_m,
        delta_theta1_rad: theta1,
        delta_theta2_rad: theta2,
        combine,
    }
}

/// Wiretap-area membership under the region's combine rule.
pub fn in_wiretap(region: &WiretapRegion, bob: &PolarLocation, eve: &PolarLocation) -> bool {
    let r = region.outside_range_lobe(bob, eve);
    let a = region.outside_angle_lobe(bob, eve);
    match region.combine {
        Combine::Conjunction => r && a,
        Combine::Union => r || a,
    }
}

/// Peak of the range kernel outside its main lobe, `1/sin(3π/2M)`.
pub fn first_sidelobe_peak(count: usize) -> f64 {
    1.0 / (1.5 * PI / count as f64).sin()
}

/// One evaluated branch of the `λ` approximation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaBranch {
    /// Eve angle at the first sidelobe of one kernel.
    pub theta_rad: f64,
    /// `|µ2 µ3|` there, with the sidelobe kernel at its peak value.
    pub value: f64,
}

/// Sidelobe-peak angles used by the `λ` approximation, with their branch values.
pub fn lambda_branches(geom: &RisGeometry, theta_b: f64) -> Vec<LambdaBranch> {
    let (s, c) = theta_b.sin_cos();
    let mut out = Vec::with_capacity(4);
    let peak_h = first_sidelobe_peak(geom.n_h);
    for sign in [1.0, -1.0] {
        let arg = c + sign * 3.0 / geom.n_h as f64;
        if arg.abs() <= 1.0 {
            let big = 0.5 * PI * ((1.0 - arg * arg).sqrt() - s);
            out.push(LambdaBranch {
                theta_rad: arg.acos(),
                value: (peak_h * dirichlet(big, geom.n_v)).abs(),
            });
        }
    }
    let peak_v = first_sidelobe_peak(geom.n_v);
    for sign in [1.0, -1.0] {
        let arg = s + sign * 3.0 / geom.n_v as f64;
        if arg.abs() <= 1.0 {
            let big = 0.5 * PI * (c - (1.0 - arg * arg).sqrt());
            out.push(LambdaBranch {
                theta_rad: arg.asin(),
                value: (peak_v * dirichlet(big, geom.n_h)).abs(),
            });
        }
    }
    out
}

/// Closed-form approximation of `λ = max |µ2 µ3|` over the wiretap angles.
pub fn lambda_approx(geom: &RisGeometry, theta_b: f64) -> f64 {
    lambda_branches(geom, theta_b)
        .iter()
        .map(|b| b.value)
        .fold(0.0, f64::max)
}

/// Bound on Eve's SNR along Bob's bearing (`θ_E = θ_B`). Infinite when
/// `M_s = M`, where the bound does not exist.
pub fn eve_bound_range(m: usize, m_s: usize) -> f64 {
    if m_s >= m {
        return f64::INFINITY;
    }
    let (m, s) = (m as f64, m_s as f64);
    let sl = (1.5 * PI / m).sin();
    (2.0 * s - m).powi(2) * (m - 1.0) / (4.0 * s * (m - s) * (m * m * sl * sl - 1.0))
}

/// Bound on Eve's SNR at Bob's range (`R_E = R_B`) for a given `λ`.
pub fn eve_bound_angle(n: usize, n_s: usize, lambda: f64) -> f64 {
    if n_s >= n {
        return f64::INFINITY;
    }
    let (n, s) = (n as f64, n_s as f64);
    let l2 = lambda * lambda;
    (2.0 * s - n).powi(2) * (n - 1.0) * l2 / (4.0 * s * (n - s) * (n * n - l2))
}

/// Eavesdropper SNR bounds on the two cuts of the wiretap area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EveBounds {
    /// Range cut bound; `+∞` when `M_s = M`.
    pub ub_range: f64,
    /// Angle cut bound; `+∞` when `N_s = N`.
    pub ub_angle: f64,
    pub lambda: f64,
}

/// Both bounds with the approximate `λ`.
pub fn eve_upper_bounds(sizes: &SelectionSizes, m: usize, geom: &RisGeometry, theta_b: f64) -> EveBounds {
    let lambda = lambda_approx(geom, theta_b);
    EveBounds {
        ub_range: eve_bound_range(m, sizes.m_s),
        ub_angle: eve_bound_angle(geom.n(), sizes.n_s, lambda),
        lambda,
    }
}

/// Worst-case secrecy rates over the wiretap area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorstCase {
    pub gamma_bob: f64,
    /// Worst Eve SNR on Bob's bearing; `None` without a range null (`ΔF = 0`).
    pub gamma_eve_range: Option<f64>,
    /// Worst Eve SNR at Bob's range.
    pub gamma_eve_angle: f64,
    /// Rate against the range cut; `None` without a range null.
    pub rate_range_bits: Option<f64>,
    pub rate_angle_bits: f64,
    /// Rate against the larger of the two Eve SNRs.
    pub rate_bits: f64,
}

/// Largest bits/s/Hz the scenario can reach, `log2(1 + γ_B)` with full MRT.
pub fn secrecy_upper_bound(budget: &LinkBudget, gains: &LinkGains, m: usize, n: usize) -> f64 {
    capacity(snr_bob_fda(budget, gains, m, n))
}

/// Eve's RIBES SNR from the closed-form moments at `eve`.
#[allow(clippy::too_many_arguments)]
pub fn snr_eve_ribes_at(
    budget: &LinkBudget,
    path_loss: &PathLossModel,
    gain_g: f64,
    plan: &FdaPlan,
    geom: &RisGeometry,
    sizes: &SelectionSizes,
    bob: &PolarLocation,
    eve: &PolarLocation,
) -> Result<f64> {
    let kernels = kernels_at(plan, geom, bob, eve);
    let stats = scaling_stats(gain_g, path_loss.gain(eve.range_m)?, plan, geom, sizes, &kernels)?;
    Ok(snr_eve_ribes(&stats, budget))
}

/// Worst-case secrecy rate over the wiretap area.
///
/// The range cut uses the bearing bound and the angle cut the `λ` bound.
/// When a cut has no randomization left (`M_s = M` or `N_s = N`) its bound
/// does not exist, and the deterministic Eve SNR at that cut's first
/// sidelobe peaks is used instead.
#[allow(clippy::too_many_arguments)]
pub fn worst_case_secrecy(
    budget: &LinkBudget,
    path_loss: &PathLossModel,
    gain_g: f64,
    plan: &FdaPlan,
    geom: &RisGeometry,
    sizes: &SelectionSizes,
    bob: &PolarLocation,
) -> Result<WorstCase> {
    let m = plan.m_antennas;
    let gains = LinkGains {
        g: gain_g,
        h: path_loss.gain(bob.range_m)?,
    };
    let gamma_bob = snr_bob_ribes(budget, &gains, m, geom.n(), sizes)?;
    let region = wiretap_region(plan, geom, bob, Combine::Conjunction);
    let bounds = eve_upper_bounds(sizes, m, geom, bob.aoa_rad);
    let eve_at =
        |loc: PolarLocation| snr_eve_ribes_at(budget, path_loss, gain_g, plan, geom, sizes, bob, &loc);

    let gamma_eve_range = if region.delta_r_m.is_infinite() {
        None
    } else if sizes.m_s < m {
        Some(bounds.ub_range)
    } else {
        let mut worst: f64 = 0.0;
        for r in [
            bob.range_m - 1.5 * region.delta_r_m,
            bob.range_m + 1.5 * region.delta_r_m,
        ] {
            if r > 0.0 {
                worst = worst.max(eve_at(PolarLocation::new(r, bob.aoa_rad)?)?);
            }
        }
        Some(worst)
    };

    let gamma_eve_angle = if sizes.n_s < geom.n() {
        bounds.ub_angle
    } else {
        let mut worst: f64 = 0.0;
        for b in lambda_branches(geom, bob.aoa_rad) {
            worst = worst.max(eve_at(PolarLocation::new(bob.range_m, b.theta_rad)?)?);
        }
        worst
    };

    let rate = |ge: f64| capacity(gamma_bob) - capacity(ge);
    let worst_eve = gamma_eve_range.unwrap_or(0.0).max(gamma_eve_angle);
    Ok(WorstCase {
        gamma_bob,
        gamma_eve_range,
        gamma_eve_angle,
        rate_range_bits: gamma_eve_range.map(rate),
        rate_angle_bits: rate(gamma_eve_angle),
        rate_bits: rate(worst_eve),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan() -> FdaPlan {
        FdaPlan::new(60e9, 1e6, 21).unwrap()
    }

    fn geom() -> RisGeometry {
        RisGeometry::half_wavelength(21, 21, 60e9).unwrap()
    }

    fn bob() -> PolarLocation {
        PolarLocation::new(86.02325267042627, 0.6202494859828215).unwrap()
    }

    #[test]
    fn rate_clamp_and_identities() {
        assert_eq!(secrecy_rate(7.0, 7.0), 0.0);
        assert_eq!(secrecy_rate(7.0, 0.0), 3.0);
        assert_eq!(secrecy_rate(10f64.powf(1.5), 100.0), 0.0);
        assert_eq!(secrecy_rate(1.0, f64::INFINITY), 0.0);
    }

    #[test]
    fn bob_snr_laws() {
        let b = LinkBudget::new(1.0, 1.0, 1.0).unwrap();
        let g = LinkGains { g: 0.5, h: 0.25 };
        assert_eq!(snr_bob_fda(&b, &g, 1, 1), 0.125);
        assert_eq!(snr_bob_fda(&b, &g, 3, 8) * 4.0, snr_bob_fda(&b, &g, 3, 16));
        let full = SelectionSizes::full(21, 441);
        assert!(
            (snr_bob_ribes(&b, &g, 21, 441, &full).unwrap() / snr_bob_fda(&b, &g, 21, 441) - 1.0).abs()
                < 1e-14
        );
        let s = SelectionSizes::new(12, 441, 21, 441).unwrap();
        let r = snr_bob_ribes(&b, &g, 21, 441, &s).unwrap() / snr_bob_fda(&b, &g, 21, 441);
        assert!((r - 9.0 / 441.0).abs() < 1e-15);
    }

    #[test]
    fn budget_validation() {
        assert!(LinkBudget::new(0.0, 1.0, 1.0).is_err());
        assert!(LinkBudget::new(1.0, 0.0, 1.0).is_err());
        assert!(LinkBudget::new(1.0, 1.0, 0.0).is_ok());
        let b = LinkBudget::from_dbm(30.0, -120.0, -120.0).unwrap();
        assert_eq!(b.power_w, 1.0);
    }

    #[test]
    fn eve_at_bob_matches_bob() {
        let b = LinkBudget::new(1.0, 1e-3, 1e-3).unwrap();
        let g = LinkGains { g: 1e-2, h: 1e-2 };
        let k = kernels_at(&plan(), &geom(), &bob(), &bob());
        let e = snr_eve_fda(&b, &g, &k, 21);
        assert!((e / snr_bob_fda(&b, &g, 21, 441) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn baseline_strip() {
        let r = wiretap_region(&plan(), &geom(), &bob(), Combine::Conjunction);
        assert!((r.delta_r_m - 14.2758).abs() < 1e-3);
        let (lo, hi) = r.range_strip(&bob());
        assert!((lo - 71.7474).abs() < 1e-3 && (hi - 100.2991).abs() < 1e-3);
        let flat = wiretap_region(
            &plan().with_delta_f(0.0).unwrap(),
            &geom(),
            &bob(),
            Combine::Union,
        );
        assert!(flat.delta_r_m.is_infinite());
    }

    #[test]
    fn combine_rules_differ_on_bearing() {
        let eve = PolarLocation::new(50.0, bob().aoa_rad).unwrap();
        let mut r = wiretap_region(&plan(), &geom(), &bob(), Combine::Conjunction);
        assert!(!in_wiretap(&r, &bob(), &eve));
        assert!(!in_wiretap(&r, &bob(), &bob()));
        r.combine = Combine::Union;
        assert!(in_wiretap(&r, &bob(), &eve));
        assert!(!in_wiretap(&r, &bob(), &bob()));
        let far = PolarLocation::new(
            bob().range_m + 2.0 * r.delta_r_m,
            bob().aoa_rad + 2.0 * r.delta_theta_rad(),
        )
        .unwrap();
        r.combine = Combine::Conjunction;
        assert!(in_wiretap(&r, &bob(), &far));
    }

    #[test]
    fn range_bound_plug_in() {
        let ub = eve_bound_range(21, 12);
        let kern = 441.0 * (3.0 * PI / 42.0).sin().powi(2) - 1.0;
        assert!((kern - 20.836).abs() < 1e-3);
        assert!((ub - 9.0 * 20.0 / (4.0 * 12.0 * 9.0 * kern)).abs() < 1e-15);
        assert!(eve_bound_range(21, 21).is_infinite());
        assert!(eve_bound_range(2001, 1001) < eve_bound_range(2001, 1100));
    }

    #[test]
    fn lambda_branches_for_baseline() {
        let branches = lambda_branches(&geom(), bob().aoa_rad);
        assert_eq!(branches.len(), 4);
        let l = lambda_approx(&geom(), bob().aoa_rad);
        assert!((l - 18.8796).abs() < 1e-3, "λ = {l}");
        assert!(l < 441.0);
    }

    #[test]
    fn technique_names_round_trip() {
        for t in Technique::ALL {
            assert_eq!(Technique::parse(t.name()), Some(t));
        }
        assert_eq!(Technique::parse("mrt"), None);
    }
}
