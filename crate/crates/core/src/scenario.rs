//! A complete experiment description and per-location evaluation.

use serde::{Deserialize, Serialize};

use crate::beamforming::SelectionSizes;
use crate::channel::{FdaPlan, RisGeometry};
use crate::error::Result;
use crate::geometry::{PathLossModel, Placement, Point, PolarLocation};
use crate::optimize::optimal_delta_f;
use crate::secrecy::{
    eve_upper_bounds, in_wiretap, secrecy_rate, secrecy_upper_bound, snr_bob_fda, snr_bob_ribes, snr_eve_fda,
    snr_eve_ribes, wiretap_region, worst_case_secrecy, Combine, EveBounds, LinkBudget, LinkGains, Technique,
    WiretapRegion, WorstCase,
};
use crate::stats::{kernels_at, scaling_stats};

/// Geometry, arrays, powers, path loss and subset sizes of one experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub placement: Placement,
    pub plan: FdaPlan,
    pub geom: RisGeometry,
    pub budget: LinkBudget,
    pub path_loss: PathLossModel,
    pub sizes: SelectionSizes,
    pub combine: Combine,
}

/// Result of evaluating one technique at one eavesdropper location.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecrecyReport {
    pub technique: Technique,
    pub eve: PolarLocation,
    pub gamma_bob: f64,
    pub gamma_eve: f64,
    pub rate_bits: f64,
    pub in_wiretap: bool,
    /// Frequency increment the technique actually used.
    pub delta_f_hz: f64,
    /// RIBES bounds; present for the subset-selection techniques.
    pub bounds: Option<EveBounds>,
    /// Full-MRT capacity `log2(1 + γ_B)`, the ceiling for every technique.
    pub rate_ceiling_bits: f64,
}

impl Scenario {
    /// 60 GHz, 21 antennas, 21×21 RIS, 30 dBm, −120 dBm noise, BS at the origin,
    /// RIS at (30, 30), Bob at (100, −20), `M_s = 14`, `N_s = 294`.
    pub fn baseline() -> Self {
        let f0 = 60e9;
        Self {
            placement: Placement::new(Point::new(30.0, 30.0), Point::new(100.0, -20.0))
                .expect("valid placement"),
            plan: FdaPlan::new(f0, 1e6, 21).expect("valid plan"),
            geom: RisGeometry::half_wavelength(21, 21, f0).expect("valid RIS"),
            budget: LinkBudget::from_dbm(30.0, -120.0, -120.0).expect("valid budget"),
            path_loss: PathLossModel::new(60.0, 2.0).expect("valid path loss"),
            sizes: SelectionSizes { m_s: 14, n_s: 294 },
            combine: Combine::Conjunction,
        }
    }

    /// Checks the cross-field invariants.
    pub fn validate(&self) -> Result<()> {
        SelectionSizes::new(self.sizes.m_s, self.sizes.n_s, self.m(), self.n())?;
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.plan.m_antennas
    }

    pub fn n(&self) -> usize {
        self.geom.n()
    }

    pub fn bob(&self) -> PolarLocation {
        self.placement.bob_polar()
    }

    /// `L_G(R_1)`.
    pub fn gain_g(&self) -> f64 {
        self.path_loss
            .gain(self.placement.transmit_link().range_m)
            .expect("placement invariant: R_1 > 0")
    }

    /// Gains of the BS→RIS→`loc` path.
    pub fn gains_to(&self, loc: &PolarLocation) -> Result<LinkGains> {
        Ok(LinkGains {
            g: self.gain_g(),
            h: self.path_loss.gain(loc.range_m)?,
        })
    }

    pub fn gains_bob(&self) -> LinkGains {
        self.gains_to(&self.bob()).expect("bob range is positive")
    }

    pub fn with_sizes(&self, m_s: usize, n_s: usize) -> Result<Self> {
        let sizes = SelectionSizes::new(m_s, n_s, self.m(), self.n())?;
        Ok(Self { sizes, ..*self })
    }

    pub fn with_delta_f(&self, delta_f_hz: f64) -> Result<Self> {
        Ok(Self {
            plan: self.plan.with_delta_f(delta_f_hz)?,
            ..*self
        })
    }

    pub fn with_budget(&self, budget: LinkBudget) -> Self {
        Self { budget, ..*self }
    }

    pub fn region(&self) -> WiretapRegion {
        wiretap_region(&self.plan, &self.geom, &self.bob(), self.combine)
    }

    /// `γ_B` with full MRT.
    pub fn snr_bob_full(&self) -> f64 {
        snr_bob_fda(&self.budget, &self.gains_bob(), self.m(), self.n())
    }

    /// `γ_B★` for the configured subset sizes.
    pub fn snr_bob_ribes(&self) -> f64 {
        snr_bob_ribes(&self.budget, &self.gains_bob(), self.m(), self.n(), &self.sizes)
            .expect("scenario sizes are validated")
    }

    /// Eve's deterministic SNR without subset selection.
    pub fn snr_eve_fda(&self, eve: &PolarLocation) -> Result<f64> {
        let k = kernels_at(&self.plan, &self.geom, &self.bob(), eve);
        Ok(snr_eve_fda(&self.budget, &self.gains_to(eve)?, &k, self.m()))
    }

    /// Eve's RIBES SNR from the closed-form moments.
    pub fn snr_eve_ribes(&self, eve: &PolarLocation) -> Result<f64> {
        let k = kernels_at(&self.plan, &self.geom, &self.bob(), eve);
        let gains = self.gains_to(eve)?;
        let stats = scaling_stats(gains.g, gains.h, &self.plan, &self.geom, &self.sizes, &k)?;
        Ok(snr_eve_ribes(&stats, &self.budget))
    }

    /// Worst-case secrecy over the wiretap area for the configured sizes.
    pub fn worst_case(&self) -> Result<WorstCase> {
        worst_case_secrecy(
            &self.budget,
            &self.path_loss,
            self.gain_g(),
            &self.plan,
            &self.geom,
            &self.sizes,
            &self.bob(),
        )
    }

    /// Evaluates one technique at a Cartesian eavesdropper position.
    pub fn evaluate_point(&self, eve: Point, technique: Technique) -> Result<SecrecyReport> {
        self.evaluate(&self.placement.to_polar(eve)?, technique)
    }

    /// Evaluates one technique at a polar eavesdropper position.
    pub fn evaluate(&self, eve: &PolarLocation, technique: Technique) -> Result<SecrecyReport> {
        let bob = self.bob();
        let ceiling = secrecy_upper_bound(&self.budget, &self.gains_bob(), self.m(), self.n());
        let bounds = || eve_upper_bounds(&self.sizes, self.m(), &self.geom, bob.aoa_rad);
        let (scn, gamma_bob, gamma_eve, bounds) = match technique {
            Technique::Conventional => {
                let flat = self.with_delta_f(0.0)?;
                (flat, flat.snr_bob_full(), flat.snr_eve_fda(eve)?, None)
            }
            Technique::Fda => (*self, self.snr_bob_full(), self.snr_eve_fda(eve)?, None),
            Technique::FdaRibes => (
                *self,
                self.snr_bob_ribes(),
                self.snr_eve_ribes(eve)?,
                Some(bounds()),
            ),
            Technique::OptimalDeltaF => {
                let df = optimal_delta_f(&self.plan, &bob, eve)?;
                let tuned = self.with_delta_f(df)?;
                (
                    tuned,
                    tuned.snr_bob_ribes(),
                    tuned.snr_eve_ribes(eve)?,
                    Some(bounds()),
                )
            }
        };
        Ok(SecrecyReport {
            technique,
            eve: *eve,
            gamma_bob,
            gamma_eve,
            rate_bits: secrecy_rate(gamma_bob, gamma_eve),
            in_wiretap: in_wiretap(&scn.region(), &bob, eve),
            delta_f_hz: scn.plan.delta_f_hz,
            bounds,
            rate_ceiling_bits: ceiling,
        })
    }
}

impl Default for Scenario {
    fn default() -> Self {
        Self::baseline()
    }
}
