//! FDA frequency plan, RIS layout and the BS→RIS→user channels.
//!
//! Antenna and element indices are zero-based. Element `n` sits in column
//! `n % N_H` and row `n / N_H`; all offsets are measured from the array
//! center, so the center antenna and center element carry no offset when the
//! counts are odd.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{PathLossModel, Placement, PolarLocation, TransmitLink};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Largest allowed frequency offset of any antenna, as a fraction of `f0`.
pub const MAX_SHIFT_FRACTION: f64 = 1e-3;

/// Carrier layout of the frequency diverse array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdaPlan {
    pub f0_hz: f64,
    pub delta_f_hz: f64,
    pub m_antennas: usize,
}

impl FdaPlan {
    pub fn new(f0_hz: f64, delta_f_hz: f64, m_antennas: usize) -> Result<Self> {
        if !(f0_hz > 0.0) || !f0_hz.is_finite() {
            return Err(invalid("f0_hz", format!("must be positive, got {f0_hz}")));
        }
        if !(delta_f_hz >= 0.0) || !delta_f_hz.is_finite() {
            return Err(invalid("delta_f_hz", format!("must be >= 0, got {delta_f_hz}")));
        }
        if m_antennas == 0 {
            return Err(invalid("m_antennas", "need at least one antenna"));
        }
        let plan = Self {
            f0_hz,
            delta_f_hz,
            m_antennas,
        };
        let limit = MAX_SHIFT_FRACTION * f0_hz;
        if plan.max_shift_hz() > limit * (1.0 + 1e-12) {
            return Err(invalid(
                "delta_f_hz",
                format!(
                    "largest antenna offset {} Hz exceeds the limit {} Hz",
                    plan.max_shift_hz(),
                    limit
                ),
            ));
        }
        Ok(plan)
    }

    /// Same plan with a different increment.
    pub fn with_delta_f(&self, delta_f_hz: f64) -> Result<Self> {
        Self::new(self.f0_hz, delta_f_hz, self.m_antennas)
    }

    /// `(M−1)/2 · ΔF`.
    pub fn max_shift_hz(&self) -> f64 {
        (self.m_antennas as f64 - 1.0) / 2.0 * self.delta_f_hz
    }

    /// Largest increment allowed for `m_antennas` at `f0_hz`.
    pub fn max_delta_f(f0_hz: f64, m_antennas: usize) -> f64 {
        if m_antennas <= 1 {
            f64::INFINITY
        } else {
            2.0 * MAX_SHIFT_FRACTION * f0_hz / (m_antennas as f64 - 1.0)
        }
    }

    /// Centered index `m − (M−1)/2`.
    pub fn centered_index(&self, m: usize) -> f64 {
        m as f64 - (self.m_antennas as f64 - 1.0) / 2.0
    }

    /// Offset `Δf_m` of antenna `m` from `f0`.
    pub fn offset_hz(&self, m: usize) -> f64 {
        self.centered_index(m) * self.delta_f_hz
    }

    /// Carrier of antenna `m`.
    pub fn antenna_frequency(&self, m: usize) -> Result<f64> {
        check_index("antenna", m, self.m_antennas)?;
        Ok(self.f0_hz + self.offset_hz(m))
    }

    /// Free-space wavelength at `f0`.
    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT / self.f0_hz
    }
}

/// Free function form of [`FdaPlan::antenna_frequency`].
pub fn antenna_frequency(plan: &FdaPlan, m: usize) -> Result<f64> {
    plan.antenna_frequency(m)
}

/// Uniform planar RIS and the BS array spacing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RisGeometry {
    pub n_h: usize,
    pub n_v: usize,
    pub d_h_m: f64,
    pub d_v_m: f64,
    pub d_bs_m: f64,
}

impl RisGeometry {
    pub fn new(n_h: usize, n_v: usize, d_h_m: f64, d_v_m: f64, d_bs_m: f64) -> Result<Self> {
        if n_h == 0 || n_v == 0 {
            return Err(invalid("ris", "N_H and N_V must be at least 1"));
        }
        for (name, d) in [("d_h_m", d_h_m), ("d_v_m", d_v_m), ("d_bs_m", d_bs_m)] {
            if !(d > 0.0) || !d.is_finite() {
                return Err(invalid(name, format!("spacing must be positive, got {d}")));
            }
        }
        Ok(Self {
            n_h,
            n_v,
            d_h_m,
            d_v_m,
            d_bs_m,
        })
    }

    /// All spacings set to half a wavelength at `f0_hz`.
    pub fn half_wavelength(n_h: usize, n_v: usize, f0_hz: f64) -> Result<Self> {
        let d = SPEED_OF_LIGHT / (2.0 * f0_hz);
        Self::new(n_h, n_v, d, d, d)
    }

    /// Total element count `N`.
    pub fn n(&self) -> usize {
        self.n_h * self.n_v
    }

    /// Centered (horizontal, vertical) offsets of element `n`.
    pub fn element_offsets(&self, n: usize) -> (f64, f64) {
        let col = (n % self.n_h) as f64;
        let row = (n / self.n_h) as f64;
        (
            col - (self.n_h as f64 - 1.0) / 2.0,
            row - (self.n_v as f64 - 1.0) / 2.0,
        )
    }
}

fn check_index(what: &'static str, index: usize, len: usize) -> Result<()> {
    if index >= len {
        Err(Error::IndexOutOfRange { what, index, len })
    } else {
        Ok(())
    }
}

/// Reduces `2π·cycles` to `(−π, π]` before anything else touches it.
pub fn phase_from_cycles(cycles: f64) -> f64 {
    2.0 * PI * (cycles - cycles.round())
}

/// Delay from antenna `m` to element `n`.
pub fn delay_bs_ris(
    geom: &RisGeometry,
    m_antennas: usize,
    link: &TransmitLink,
    m: usize,
    n: usize,
) -> Result<f64> {
    check_index("antenna", m, m_antennas)?;
    check_index("element", n, geom.n())?;
    if !(link.range_m > 0.0) {
        return Err(Error::NonPositiveRange(link.range_m));
    }
    let m_off = m as f64 - (m_antennas as f64 - 1.0) / 2.0;
    let (h_off, v_off) = geom.element_offsets(n);
    let (s, c) = link.theta_tx_rad.sin_cos();
    Ok(
        (link.range_m - m_off * geom.d_bs_m * s + v_off * geom.d_v_m * s + h_off * geom.d_h_m * c)
            / SPEED_OF_LIGHT,
    )
}

/// Delay from element `n` to a user at `loc`.
pub fn delay_ris_user(geom: &RisGeometry, loc: &PolarLocation, n: usize) -> Result<f64> {
    check_index("element", n, geom.n())?;
    let (h_off, v_off) = geom.element_offsets(n);
    let (s, c) = loc.aoa_rad.sin_cos();
    Ok((loc.range_m + v_off * geom.d_v_m * s - h_off * geom.d_h_m * c) / SPEED_OF_LIGHT)
}

/// Antenna part `τ̃_m` of the BS→RIS delay.
///
/// The full delay equals `(R_1 + R_UE)/c − τ̃_m + τ̃_n` for every `(m, n)`.
pub fn aux_antenna_delay(geom: &RisGeometry, m_antennas: usize, theta_tx: f64, m: usize) -> f64 {
    let m_off = m as f64 - (m_antennas as f64 - 1.0) / 2.0;
    m_off * geom.d_bs_m * theta_tx.sin() / SPEED_OF_LIGHT
}

/// Element part `τ̃_n^UE` of the two-hop delay.
pub fn aux_element_delay(geom: &RisGeometry, theta_tx: f64, loc: &PolarLocation, n: usize) -> f64 {
    let (h_off, v_off) = geom.element_offsets(n);
    (v_off * geom.d_v_m * (theta_tx.sin() + loc.aoa_rad.sin())
        + h_off * geom.d_h_m * (theta_tx.cos() - loc.aoa_rad.cos()))
        / SPEED_OF_LIGHT
}

/// Which hop a [`ChannelMatrix`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Segment {
    BsRis,
    RisUser,
}

/// `M × N` channel; row `m` is evaluated at carrier `f_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    pub entries: Array2<Complex64>,
    pub segment: Segment,
    /// Common entry magnitude `√L`.
    pub amplitude: f64,
}

/// Per-antenna cascaded channel `h_UE`.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadedChannel {
    pub entries: Vec<Complex64>,
}

impl CascadedChannel {
    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|h| h.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `G` and `H_UE` for one user location.
pub fn synthesize_channels(
    plan: &FdaPlan,
    geom: &RisGeometry,
    placement: &Placement,
    path_loss: &PathLossModel,
    user: &PolarLocation,
) -> Result<(ChannelMatrix, ChannelMatrix)> {
    let link = placement.transmit_link();
    let (m_count, n_count) = (plan.m_antennas, geom.n());
    let amp_g = path_loss.gain(link.range_m)?.sqrt();
    let amp_h = path_loss.gain(user.range_m)?.sqrt();

    let tau_g: Vec<f64> = (0..m_count * n_count)
        .map(|i| delay_bs_ris(geom, m_count, &link, i / n_count, i % n_count))
        .collect::<Result<_>>()?;
    let tau_h: Vec<f64> = (0..n_count)
        .map(|n| delay_ris_user(geom, user, n))
        .collect::<Result<_>>()?;

    let mut g = Array2::zeros((m_count, n_count));
    let mut h = Array2::zeros((m_count, n_count));
    for m in 0..m_count {
        let f = plan.f0_hz + plan.offset_hz(m);
        for n in 0..n_count {
            g[[m, n]] = Complex64::from_polar(amp_g, -phase_from_cycles(f * tau_g[m * n_count + n]));
            h[[m, n]] = Complex64::from_polar(amp_h, -phase_from_cycles(f * tau_h[n]));
        }
    }
    Ok((
        ChannelMatrix {
            entries: g,
            segment: Segment::BsRis,
            amplitude: amp_g,
        },
        ChannelMatrix {
            entries: h,
            segment: Segment::RisUser,
            amplitude: amp_h,
        },
    ))
}

/// Element-wise `G ∘ H_UE` with each column rotated by `e^{jφ_n}`.
pub fn reflection_products(
    g: &ChannelMatrix,
    h: &ChannelMatrix,
    ris_phases: &[f64],
) -> Result<Array2<Complex64>> {
    if g.entries.dim() != h.entries.dim() {
        return Err(Error::DimensionMismatch(format!(
            "G is {:?}, H is {:?}",
            g.entries.dim(),
            h.entries.dim()
        )));
    }
    let (m_count, n_count) = g.entries.dim();
    if ris_phases.len() != n_count {
        return Err(Error::DimensionMismatch(format!(
            "{} RIS phases for {} elements",
            ris_phases.len(),
            n_count
        )));
    }
    let rot: Vec<Complex64> = ris_phases.iter().map(|&p| Complex64::cis(p)).collect();
    Ok(Array2::from_shape_fn((m_count, n_count), |(m, n)| {
        g.entries[[m, n]] * h.entries[[m, n]] * rot[n]
    }))
}

/// `h_UE = (G ∘ H_UE) v` with `v_n = e^{jφ_n}`.
pub fn cascaded_channel(g: &ChannelMatrix, h: &ChannelMatrix, ris_phases: &[f64]) -> Result<CascadedChannel> {
    let prod = reflection_products(g, h, ris_phases)?;
    Ok(CascadedChannel {
        entries: prod.rows().into_iter().map(|r| r.sum()).collect(),
    })
}

/// Cascaded channel assembled from the common two-hop delay and the
/// auxiliary antenna/element delays rather than from the matrices.
pub fn cascaded_channel_factored(
    plan: &FdaPlan,
    geom: &RisGeometry,
    placement: &Placement,
    path_loss: &PathLossModel,
    user: &PolarLocation,
    ris_phases: &[f64],
) -> Result<CascadedChannel> {
    if ris_phases.len() != geom.n() {
        return Err(Error::DimensionMismatch(format!(
            "{} RIS phases for {} elements",
            ris_phases.len(),
            geom.n()
        )));
    }
    let link = placement.transmit_link();
    let amp = (path_loss.gain(link.range_m)? * path_loss.gain(user.range_m)?).sqrt();
    let common = (link.range_m + user.range_m) / SPEED_OF_LIGHT;
    let tau_n: Vec<f64> = (0..geom.n())
        .map(|n| aux_element_delay(geom, link.theta_tx_rad, user, n))
        .collect();
    let entries = (0..plan.m_antennas)
        .map(|m| {
            let f = plan.f0_hz + plan.offset_hz(m);
            let tau_m = aux_antenna_delay(geom, plan.m_antennas, link.theta_tx_rad, m);
            let outer = Complex64::cis(-(phase_from_cycles(f * common) - phase_from_cycles(f * tau_m)));
            let inner: Complex64 = tau_n
                .iter()
                .zip(ris_phases)
                .map(|(&t, &p)| Complex64::cis(p - phase_from_cycles(f * t)))
                .sum();
            outer * inner * amp
        })
        .collect();
    Ok(CascadedChannel { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn setup() -> (FdaPlan, RisGeometry, Placement, PathLossModel) {
        let plan = FdaPlan::new(60e9, 1e6, 5).unwrap();
        let geom = RisGeometry::half_wavelength(3, 3, plan.f0_hz).unwrap();
        let placement = Placement::new(Point::new(30.0, 30.0), Point::new(100.0, -20.0)).unwrap();
        (plan, geom, placement, PathLossModel::new(60.0, 2.0).unwrap())
    }

    #[test]
    fn frequencies_are_centered() {
        let plan = FdaPlan::new(60e9, 1e6, 21).unwrap();
        assert_eq!(plan.antenna_frequency(10).unwrap(), 60e9);
        assert_eq!(plan.antenna_frequency(20).unwrap(), 60e9 + 10e6);
        assert!(plan.antenna_frequency(21).is_err());
        let total: f64 = (0..21).map(|m| plan.offset_hz(m)).sum();
        assert_eq!(total, 0.0);
        let flat = FdaPlan::new(60e9, 0.0, 3).unwrap();
        assert!((0..3).all(|m| flat.antenna_frequency(m).unwrap() == 60e9));
    }

    #[test]
    fn shift_limit_enforced() {
        assert!(FdaPlan::new(60e9, 6e6, 21).is_ok());
        assert!(FdaPlan::new(60e9, 6.1e6, 21).is_err());
        assert!(FdaPlan::new(60e9, 1e6, 0).is_err());
    }

    #[test]
    fn element_index_split() {
        let geom = RisGeometry::half_wavelength(3, 2, 60e9).unwrap();
        assert_eq!(geom.element_offsets(0), (-1.0, -0.5));
        assert_eq!(geom.element_offsets(2), (1.0, -0.5));
        assert_eq!(geom.element_offsets(3), (-1.0, 0.5));
        assert_eq!(geom.element_offsets(5), (1.0, 0.5));
    }

    #[test]
    fn center_delays() {
        let (_, geom, placement, _) = setup();
        let link = placement.transmit_link();
        assert_eq!(
            delay_bs_ris(&geom, 5, &link, 2, 4).unwrap(),
            link.range_m / SPEED_OF_LIGHT
        );
        let bob = placement.bob_polar();
        assert_eq!(
            delay_ris_user(&geom, &bob, 4).unwrap(),
            bob.range_m / SPEED_OF_LIGHT
        );
        assert!(delay_ris_user(&geom, &bob, 9).is_err());
    }

    #[test]
    fn edge_antennas_differ_by_aperture() {
        let geom = RisGeometry::half_wavelength(3, 3, 60e9).unwrap();
        let link = TransmitLink {
            range_m: 42.0,
            theta_tx_rad: PI / 4.0,
        };
        let d =
            delay_bs_ris(&geom, 21, &link, 0, 4).unwrap() - delay_bs_ris(&geom, 21, &link, 20, 4).unwrap();
        let expect = 20.0 * geom.d_bs_m * (PI / 4.0).sin() / SPEED_OF_LIGHT;
        assert!((d - expect).abs() < 1e-20);
        let flat = TransmitLink {
            range_m: 42.0,
            theta_tx_rad: 0.0,
        };
        assert_eq!(
            delay_bs_ris(&geom, 21, &flat, 0, 4).unwrap(),
            delay_bs_ris(&geom, 21, &flat, 20, 4).unwrap()
        );
    }

    #[test]
    fn mirror_elements_symmetric() {
        let geom = RisGeometry::half_wavelength(5, 1, 60e9).unwrap();
        let loc = PolarLocation::new(50.0, 0.3).unwrap();
        let mid = 50.0 / SPEED_OF_LIGHT;
        for n in 0..5 {
            let a = delay_ris_user(&geom, &loc, n).unwrap() - mid;
            let b = delay_ris_user(&geom, &loc, 4 - n).unwrap() - mid;
            assert!((a + b).abs() < 1e-22);
        }
        let broadside = PolarLocation::new(50.0, PI / 2.0).unwrap();
        for n in 0..5 {
            let t = delay_ris_user(&geom, &broadside, n).unwrap();
            assert!((t - mid).abs() < 1e-22);
        }
    }

    #[test]
    fn entries_have_path_loss_magnitude() {
        let (plan, geom, placement, pl) = setup();
        let bob = placement.bob_polar();
        let (g, h) = synthesize_channels(&plan, &geom, &placement, &pl, &bob).unwrap();
        for z in g.entries.iter() {
            assert!((z.norm() / g.amplitude - 1.0).abs() < 1e-12);
        }
        for z in h.entries.iter() {
            assert!((z.norm() / h.amplitude - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn flat_plan_gives_identical_rows() {
        let (plan, geom, placement, pl) = setup();
        let plan = plan.with_delta_f(0.0).unwrap();
        let bob = placement.bob_polar();
        let (_, h) = synthesize_channels(&plan, &geom, &placement, &pl, &bob).unwrap();
        for m in 1..plan.m_antennas {
            assert_eq!(h.entries.row(m), h.entries.row(0));
        }
    }

    #[test]
    fn hadamard_and_factored_forms_agree() {
        let (plan, geom, placement, pl) = setup();
        let eve = PolarLocation::new(37.0, -1.1).unwrap();
        let phases: Vec<f64> = (0..geom.n()).map(|n| 0.7 * n as f64 - 2.0).collect();
        let (g, h) = synthesize_channels(&plan, &geom, &placement, &pl, &eve).unwrap();
        let a = cascaded_channel(&g, &h, &phases).unwrap();
        let b = cascaded_channel_factored(&plan, &geom, &placement, &pl, &eve, &phases).unwrap();
        let scale = a.norm();
        for (x, y) in a.entries.iter().zip(&b.entries) {
            assert!((x - y).norm() / scale < 1e-9);
        }
    }

    #[test]
    fn dimension_mismatch_reported() {
        let (plan, geom, placement, pl) = setup();
        let bob = placement.bob_polar();
        let (g, h) = synthesize_channels(&plan, &geom, &placement, &pl, &bob).unwrap();
        assert!(matches!(
            cascaded_channel(&g, &h, &[0.0; 3]),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
