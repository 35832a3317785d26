//! Batch evaluation over eavesdropper grids and trajectories.
//!
//! Points are evaluated in parallel and returned in input order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{circle_trajectory, Point, PolarLocation};
use crate::oracle::monte_carlo_eve_snr;
use crate::scenario::Scenario;
use crate::secrecy::Technique;

/// Rectangular grid of eavesdropper positions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    /// 101×101 grid with 1.2 m spacing that contains Bob's position.
    pub fn baseline_heatmap() -> Self {
        Self {
            x_min: -8.0,
            x_max: 112.0,
            y_min: -80.0,
            y_max: 40.0,
            nx: 101,
            ny: 101,
        }
    }

    fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![lo];
        }
        let step = (hi - lo) / (n - 1) as f64;
        (0..n).map(|i| lo + step * i as f64).collect()
    }

    /// Points in row-major order (`y` outer, `x` inner).
    pub fn points(&self) -> Result<Vec<Point>> {
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::EmptyGrid);
        }
        if !(self.x_max >= self.x_min) || !(self.y_max >= self.y_min) {
            return Err(invalid("grid", "max must not be below min"));
        }
        let xs = Self::axis(self.x_min, self.x_max, self.nx);
        let ys = Self::axis(self.y_min, self.y_max, self.ny);
        Ok(ys
            .iter()
            .flat_map(|&y| xs.iter().map(move |&x| Point::new(x, y)))
            .collect())
    }
}

/// One heatmap cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatmapRow {
    pub x_m: f64,
    pub y_m: f64,
    pub rate_conv: f64,
    pub rate_fda: f64,
    pub rate_ribes: f64,
    pub rate_ub: f64,
}

/// Secrecy rates of the phased array, FDA and FDA+RIBES at every grid point,
/// plus the full-MRT ceiling.
pub fn heatmap(scn: &Scenario, grid: &GridSpec) -> Result<Vec<HeatmapRow>> {
    scn.validate()?;
    grid.points()?
        .par_iter()
        .map(|&p| {
            let eve = scn.placement.to_polar(p)?;
            let conv = scn.evaluate(&eve, Technique::Conventional)?;
            Ok(HeatmapRow {
                x_m: p.x,
                y_m: p.y,
                rate_conv: conv.rate_bits,
                rate_fda: scn.evaluate(&eve, Technique::Fda)?.rate_bits,
                rate_ribes: scn.evaluate(&eve, Technique::FdaRibes)?.rate_bits,
                rate_ub: conv.rate_ceiling_bits,
            })
        })
        .collect()
}

/// Where the eavesdropper is placed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EveSpec {
    /// A single position.
    Point { x: f64, y: f64 },
    /// A single position relative to the RIS; on Bob's bearing when
    /// `aoa_rad` is absent.
    Polar {
        range_m: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        aoa_rad: Option<f64>,
    },
    /// Ranges on Bob's bearing.
    RangeSweep { r_min: f64, r_max: f64, points: usize },
    /// Angles at Bob's range.
    AngleSweep {
        theta_min: f64,
        theta_max: f64,
        points: usize,
    },
    /// A circle of radius `radius_m` around Bob.
    Circle {
        radius_m: f64,
        phi_min: f64,
        phi_max: f64,
        points: usize,
    },
    /// A rectangular grid.
    Grid(GridSpec),
}

/// A sweep location with its sweep parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    /// Range, angle or circle phase, depending on the sweep; 0 otherwise.
    pub param: f64,
    pub xy: Point,
    pub loc: PolarLocation,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::EmptyGrid);
    }
    if !(hi >= lo) {
        return Err(invalid("sweep", format!("upper end {hi} below lower end {lo}")));
    }
    Ok(if n == 1 {
        vec![lo]
    } else {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    })
}

impl EveSpec {
    /// Expands the description into concrete locations.
    pub fn locations(&self, scn: &Scenario) -> Result<Vec<SweepPoint>> {
        let bob = scn.bob();
        let from_xy = |param: f64, xy: Point| -> Result<SweepPoint> {
            Ok(SweepPoint {
                param,
                xy,
                loc: scn.placement.to_polar(xy)?,
            })
        };
        let from_polar = |param: f64, loc: PolarLocation| SweepPoint {
            param,
            xy: scn.placement.from_polar(loc),
            loc,
        };
        match *self {
            EveSpec::Point { x, y } => Ok(vec![from_xy(0.0, Point::new(x, y))?]),
            EveSpec::Polar { range_m, aoa_rad } => {
                let loc = PolarLocation::new(range_m, aoa_rad.unwrap_or(bob.aoa_rad))?;
                Ok(vec![from_polar(range_m, loc)])
            }
            EveSpec::RangeSweep { r_min, r_max, points } => linspace(r_min, r_max, points)?
                .into_iter()
                .map(|r| Ok(from_polar(r, PolarLocation::new(r, bob.aoa_rad)?)))
                .collect(),
            EveSpec::AngleSweep {
                theta_min,
                theta_max,
                points,
            } => linspace(theta_min, theta_max, points)?
                .into_iter()
                .map(|t| {
                    let loc = PolarLocation::new(bob.range_m, t)?;
                    Ok(from_polar(t, loc))
                })
                .collect(),
            EveSpec::Circle {
                radius_m,
                phi_min,
                phi_max,
                points,
            } => {
                if !(radius_m > 0.0) {
                    return Err(invalid("radius_m", "circle radius must be positive"));
                }
                linspace(phi_min, phi_max, points)?
                    .into_iter()
                    .map(|phi| from_xy(phi, circle_trajectory(scn.placement.bob(), radius_m, phi)))
                    .collect()
            }
            EveSpec::Grid(grid) => grid.points()?.into_iter().map(|p| from_xy(0.0, p)).collect(),
        }
    }
}

/// Monte-Carlo settings for sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McSettings {
    pub samples: usize,
    pub seed: u64,
}

/// Closed-form quantities at one sweep point, with optional Monte-Carlo columns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: f64,
    pub x_m: f64,
    pub y_m: f64,
    pub range_m: f64,
    pub aoa_rad: f64,
    pub in_wiretap: bool,
    pub snr_bob_fda: f64,
    pub snr_bob_ribes: f64,
    pub snr_eve_conv: f64,
    pub snr_eve_fda: f64,
    pub snr_eve_ribes: f64,
    pub rate_conv: f64,
    pub rate_fda: f64,
    pub rate_ribes: f64,
    /// Empty where no feasible null increment exists.
    pub rate_opt: Option<f64>,
    pub ub_range: f64,
    pub ub_angle: f64,
    pub mc_snr_eve_ribes: Option<f64>,
    pub mc_std_error: Option<f64>,
}

/// Evaluates every sweep point; Monte Carlo runs use `seed + index`.
pub fn sweep(scn: &Scenario, points: &[SweepPoint], mc: Option<McSettings>) -> Result<Vec<SweepRow>> {
    scn.validate()?;
    if points.is_empty() {
        return Err(Error::EmptyGrid);
    }
    points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let conv = scn.evaluate(&p.loc, Technique::Conventional)?;
            let fda = scn.evaluate(&p.loc, Technique::Fda)?;
            let ribes = scn.evaluate(&p.loc, Technique::FdaRibes)?;
            let opt = match scn.evaluate(&p.loc, Technique::OptimalDeltaF) {
                Ok(r) => Some(r.rate_bits),
                Err(Error::EquidistantEve | Error::InfeasibleIncrement { .. }) => None,
                Err(e) => return Err(e),
            };
            let bounds = ribes.bounds.expect("RIBES reports carry bounds");
            let mc = mc
                .map(|s| monte_carlo_eve_snr(scn, &p.loc, s.samples, s.seed.wrapping_add(i as u64)))
                .transpose()?;
            Ok(SweepRow {
                param: p.param,
                x_m: p.xy.x,
                y_m: p.xy.y,
                range_m: p.loc.range_m,
                aoa_rad: p.loc.aoa_rad,
                in_wiretap: ribes.in_wiretap,
                snr_bob_fda: fda.gamma_bob,
                snr_bob_ribes: ribes.gamma_bob,
                snr_eve_conv: conv.gamma_eve,
                snr_eve_fda: fda.gamma_eve,
                snr_eve_ribes: ribes.gamma_eve,
                rate_conv: conv.rate_bits,
                rate_fda: fda.rate_bits,
                rate_ribes: ribes.rate_bits,
                rate_opt: opt,
                ub_range: bounds.ub_range,
                ub_angle: bounds.ub_angle,
                mc_snr_eve_ribes: mc.map(|r| r.empirical_snr),
                mc_std_error: mc.map(|r| r.std_error),
            })
        })
        .collect()
}
