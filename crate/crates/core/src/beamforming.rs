//! Transmit beamforming, RIS phase design and random subset selection.
//!
//! With RIBES every symbol draws a fresh subset of antennas and RIS elements.
//! Selected antennas keep their MRT weight and selected elements their
//! co-phasing shift; the complement is inverted by π. Bob sees a constant
//! gain while an eavesdropper elsewhere sees a random one.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{aux_element_delay, phase_from_cycles, CascadedChannel, RisGeometry};
use crate::error::{Error, Result};
use crate::geometry::PolarLocation;

/// Number of selected antennas `M_s` and RIS elements `N_s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionSizes {
    pub m_s: usize,
    pub n_s: usize,
}

impl SelectionSizes {
    /// Validates `M/2 < M_s ≤ M` and `N/2 < N_s ≤ N`.
    pub fn new(m_s: usize, n_s: usize, m: usize, n: usize) -> Result<Self> {
        if !(2 * m_s > m && m_s <= m) {
            return Err(Error::InvalidSizes(format!(
                "M_s = {m_s} must satisfy {m}/2 < M_s <= {m}"
            )));
        }
        if !(2 * n_s > n && n_s <= n) {
            return Err(Error::InvalidSizes(format!(
                "N_s = {n_s} must satisfy {n}/2 < N_s <= {n}"
            )));
        }
        Ok(Self { m_s, n_s })
    }

    /// Everything selected: RIBES switched off.
    pub fn full(m: usize, n: usize) -> Self {
        Self { m_s: m, n_s: n }
    }

    /// Smallest valid subset size for a population of `total`.
    pub fn min_size(total: usize) -> usize {
        total / 2 + 1
    }
}

/// Antenna and element subsets used for one symbol.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionMask {
    /// Selected antennas, ascending.
    pub antenna_subset: Vec<usize>,
    /// Selected elements, ascending.
    pub element_subset: Vec<usize>,
    pub symbol_index: u64,
}

impl SelectionMask {
    /// Mask that selects everything.
    pub fn full(m: usize, n: usize) -> Self {
        Self {
            antenna_subset: (0..m).collect(),
            element_subset: (0..n).collect(),
            symbol_index: 0,
        }
    }

    /// `a_m = +1` on the antenna subset, `−1` elsewhere.
    pub fn antenna_signs(&self, m: usize) -> Vec<f64> {
        let mut a = vec![-1.0; m];
        for &i in &self.antenna_subset {
            a[i] = 1.0;
        }
        a
    }

    /// `true` for selected elements.
    pub fn element_flags(&self, n: usize) -> Vec<bool> {
        let mut f = vec![false; n];
        for &i in &self.element_subset {
            f[i] = true;
        }
        f
    }

    fn check(&self, m: usize, n: usize) -> Result<()> {
        let bad =
            |set: &[usize], len: usize| set.iter().any(|&i| i >= len) || set.windows(2).any(|w| w[0] >= w[1]);
        if bad(&self.antenna_subset, m) || bad(&self.element_subset, n) {
            return Err(Error::InvalidSizes(
                "mask indices must be strictly ascending and in range".into(),
            ));
        }
        SelectionSizes::new(self.antenna_subset.len(), self.element_subset.len(), m, n)?;
        Ok(())
    }
}

/// Draws uniformly random selection masks.
///
/// The sampler keeps its index permutations between draws; a partial
/// Fisher-Yates pass over an already shuffled vector is still uniform.
#[derive(Debug, Clone)]
pub struct MaskSampler {
    sizes: SelectionSizes,
    antennas: Vec<usize>,
    elements: Vec<usize>,
    rng: ChaCha8Rng,
    next_symbol: u64,
}

impl MaskSampler {
    pub fn new(sizes: SelectionSizes, m: usize, n: usize, seed: u64) -> Result<Self> {
        let sizes = SelectionSizes::new(sizes.m_s, sizes.n_s, m, n)?;
        Ok(Self {
            sizes,
            antennas: (0..m).collect(),
            elements: (0..n).collect(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            next_symbol: 0,
        })
    }

    /// Next mask in the sequence.
    pub fn draw(&mut self) -> SelectionMask {
        let mut mask = draw_subsets(&mut self.rng, &mut self.antennas, &mut self.elements, &self.sizes);
        mask.symbol_index = self.next_symbol;
        self.next_symbol += 1;
        mask
    }
}

fn pick<R: Rng + ?Sized>(rng: &mut R, pool: &mut [usize], keep: usize) -> Vec<usize> {
    let (chosen, _) = pool.partial_shuffle(rng, keep);
    let mut v = chosen.to_vec();
    v.sort_unstable();
    v
}

fn draw_subsets<R: Rng + ?Sized>(
    rng: &mut R,
    antennas: &mut [usize],
    elements: &mut [usize],
    sizes: &SelectionSizes,
) -> SelectionMask {
    SelectionMask {
        antenna_subset: pick(rng, antennas, sizes.m_s),
        element_subset: pick(rng, elements, sizes.n_s),
        symbol_index: 0,
    }
}

/// One uniformly random mask drawn from `rng`.
pub fn draw_mask<R: Rng + ?Sized>(
    rng: &mut R,
    sizes: &SelectionSizes,
    m: usize,
    n: usize,
) -> Result<SelectionMask> {
    let sizes = SelectionSizes::new(sizes.m_s, sizes.n_s, m, n)?;
    let mut antennas: Vec<usize> = (0..m).collect();
    let mut elements: Vec<usize> = (0..n).collect();
    Ok(draw_subsets(rng, &mut antennas, &mut elements, &sizes))
}

/// Co-phasing RIS shifts `φ_n = 2π f0 τ̃_n^B` for Bob, reduced to `(−π, π]`.
pub fn ris_phases_closed_form(
    f0_hz: f64,
    geom: &RisGeometry,
    theta_tx: f64,
    bob: &PolarLocation,
) -> Vec<f64> {
    (0..geom.n())
        .map(|n| phase_from_cycles(f0_hz * aux_element_delay(geom, theta_tx, bob, n)))
        .collect()
}

/// Base phases with `π` added on every element outside the subset.
pub fn ris_phases_ribes(base: &[f64], mask: &SelectionMask) -> Vec<f64> {
    let flags = mask.element_flags(base.len());
    base.iter()
        .zip(flags)
        .map(|(&p, keep)| if keep { p } else { p + PI })
        .collect()
}

/// Unit-norm transmit weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamformerVector {
    pub weights: Vec<Complex64>,
}

impl BeamformerVector {
    pub fn norm(&self) -> f64 {
        self.weights.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Maximum ratio transmission `w = h / ‖h‖`.
pub fn mrt_beamformer(h: &CascadedChannel) -> Result<BeamformerVector> {
    let norm = h.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::DegenerateChannel);
    }
    Ok(BeamformerVector {
        weights: h.entries.iter().map(|z| z / norm).collect(),
    })
}

/// MRT weights with the unselected antennas sign-inverted.
pub fn ribes_beamformer(h_star: &CascadedChannel, mask: &SelectionMask) -> Result<BeamformerVector> {
    let m = h_star.len();
    if mask.antenna_subset.iter().any(|&i| i >= m) {
        return Err(Error::DimensionMismatch(format!(
            "mask references antennas beyond M = {m}"
        )));
    }
    let mrt = mrt_beamformer(h_star)?;
    let signs = mask.antenna_signs(m);
    Ok(BeamformerVector {
        weights: mrt.weights.iter().zip(signs).map(|(w, a)| w * a).collect(),
    })
}

/// Checks a mask against array sizes and the selection constraints.
pub fn validate_mask(mask: &SelectionMask, m: usize, n: usize) -> Result<()> {
    mask.check(m, n)
}

/// `h^H w`, the effective scalar gain of a link.
pub fn effective_gain(h: &CascadedChannel, w: &BeamformerVector) -> Result<Complex64> {
    if h.len() != w.weights.len() {
        return Err(Error::DimensionMismatch(format!(
            "channel has {} entries, beamformer {}",
            h.len(),
            w.weights.len()
        )));
    }
    Ok(h.entries.iter().zip(&w.weights).map(|(h, w)| h.conj() * w).sum())
}

/// `y = √P h^H w x + n`.
pub fn received_sample(
    h: &CascadedChannel,
    w: &BeamformerVector,
    power_w: f64,
    symbol: Complex64,
    noise: Complex64,
) -> Result<Complex64> {
    Ok(power_w.sqrt() * effective_gain(h, w)? * symbol + noise)
}
