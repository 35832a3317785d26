//! Independent checks for the closed forms.
//!
//! * exhaustive subset enumeration of `u` and `v`, built from raw phasors
//!   rather than Dirichlet kernels;
//! * symbol-level Monte Carlo of Eve's received signal on the exact channel;
//! * dense grids over the two wiretap cuts.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beamforming::{ris_phases_closed_form, SelectionSizes};
use crate::channel::{
    aux_element_delay, reflection_products, synthesize_channels, FdaPlan, RisGeometry, SPEED_OF_LIGHT,
};
use crate::error::{invalid, Error, Result};
use crate::geometry::{wrap_angle, PolarLocation};
use crate::scenario::Scenario;
use crate::stats::{kernels_at, moments_u, moments_v};

/// Largest number of subsets the enumerator will visit.
pub const ENUMERATION_GUARD: u128 = 1_000_000;

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        // acc·(n−i)/(i+1) stays integral at every step
        match acc.checked_mul((n - i) as u128) {
            Some(v) => acc = v / (i + 1) as u128,
            None => return u128::MAX,
        }
    }
    acc
}

/// Every `k`-subset of `0..n` as a bitmask, in increasing numeric order.
pub fn combinations(n: usize, k: usize) -> impl Iterator<Item = u64> {
    assert!(n < 64, "bitmask enumeration supports at most 63 items");
    let limit = 1u64 << n;
    let first = if k == 0 { 0 } else { (1u64 << k) - 1 };
    let mut next = Some(first);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            // Gosper's hack
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            let n2 = (((r ^ cur) >> 2) / c) | r;
            (n2 < limit).then_some(n2)
        };
        Some(cur)
    })
}

/// Exact moments of a signed subset sum against its closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnumerationReport {
    pub exact_mean: Complex64,
    pub exact_variance: f64,
    pub subset_count: u128,
    pub closed_form_mean: Complex64,
    pub closed_form_variance: f64,
    /// `max(|Δmean|, |Δvar|)` with each difference divided by `max(|closed form|, 1)`.
    pub max_rel_error: f64,
    /// `Σ_subsets |subset|`, which must equal `k · C(n, k)`.
    pub inclusion_total: u128,
}

fn enumerate_signed_sums(phasors: &[Complex64], selected: usize) -> Result<(Complex64, f64, u128, u128)> {
    let n = phasors.len();
    if selected == 0 || selected > n {
        return Err(invalid("subset size", format!("{selected} not in 1..={n}")));
    }
    if n >= 64 {
        return Err(Error::CombinatorialGuard {
            count: binomial(n, selected),
            guard: ENUMERATION_GUARD,
        });
    }
    let count = binomial(n, selected);
    if count > ENUMERATION_GUARD {
        return Err(Error::CombinatorialGuard {
            count,
            guard: ENUMERATION_GUARD,
        });
    }
    let total: Complex64 = phasors.iter().sum();
    let sums: Vec<Complex64> = combinations(n, selected)
        .map(|mask| {
            let chosen: Complex64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| phasors[i]).sum();
            2.0 * chosen - total
        })
        .collect();
    let inclusion: u128 = combinations(n, selected).map(|m| m.count_ones() as u128).sum();
    let cnt = sums.len() as f64;
    let mean = sums.iter().sum::<Complex64>() / cnt;
    let var = sums.iter().map(|s| (s - mean).norm_sqr()).sum::<f64>() / cnt;
    Ok((mean, var, sums.len() as u128, inclusion))
}

fn report(exact: (Complex64, f64, u128, u128), closed: (f64, f64)) -> EnumerationReport {
    let (mean, var, count, inclusion) = exact;
    let cf_mean = Complex64::new(closed.0, 0.0);
    let rel = |a: f64, b: f64| a / b.abs().max(1.0);
    EnumerationReport {
        exact_mean: mean,
        exact_variance: var,
        subset_count: count,
        closed_form_mean: cf_mean,
        closed_form_variance: closed.1,
        max_rel_error: rel((mean - cf_mean).norm(), closed.0).max(rel((var - closed.1).abs(), closed.1)),
        inclusion_total: inclusion,
    }
}

/// Antenna phasors `e^{j2πΔf_m (R_E − R_B)/c}` seen by Eve relative to Bob.
pub fn antenna_phasors(plan: &FdaPlan, bob: &PolarLocation, eve: &PolarLocation) -> Vec<Complex64> {
    let dr = eve.range_m - bob.range_m;
    (0..plan.m_antennas)
        .map(|m| Complex64::cis(2.0 * PI * plan.offset_hz(m) * dr / SPEED_OF_LIGHT))
        .collect()
}

/// Element phasors `e^{j2πf0(τ̃_n^E − τ̃_n^B)}` built from the delay model.
pub fn element_phasors(
    f0_hz: f64,
    geom: &RisGeometry,
    theta_tx: f64,
    bob: &PolarLocation,
    eve: &PolarLocation,
) -> Vec<Complex64> {
    (0..geom.n())
        .map(|n| {
            let d = aux_element_delay(geom, theta_tx, eve, n) - aux_element_delay(geom, theta_tx, bob, n);
            Complex64::cis(2.0 * PI * f0_hz * d)
        })
        .collect()
}

/// Exact moments of `u` over all `C(M, M_s)` antenna subsets.
pub fn enumerate_u_moments(
    plan: &FdaPlan,
    bob: &PolarLocation,
    eve: &PolarLocation,
    m_s: usize,
) -> Result<EnumerationReport> {
    let exact = enumerate_signed_sums(&antenna_phasors(plan, bob, eve), m_s)?;
    // only µ1 matters for u; the angle kernels are placeholders
    let geom = RisGeometry::new(1, 1, 1.0, 1.0, 1.0)?;
    let mu1 = kernels_at(plan, &geom, bob, eve).mu1;
    let sizes = SelectionSizes { m_s, n_s: 1 };
    Ok(report(exact, moments_u(plan, &sizes, mu1)?))
}

/// Exact moments of `v` over all `C(N, N_s)` element subsets.
pub fn enumerate_v_moments(
    plan: &FdaPlan,
    geom: &RisGeometry,
    theta_tx: f64,
    bob: &PolarLocation,
    eve: &PolarLocation,
    n_s: usize,
) -> Result<EnumerationReport> {
    let exact = enumerate_signed_sums(&element_phasors(plan.f0_hz, geom, theta_tx, bob, eve), n_s)?;
    let k = kernels_at(plan, geom, bob, eve);
    let sizes = SelectionSizes { m_s: 1, n_s };
    Ok(report(exact, moments_v(geom, &sizes, k.mu2, k.mu3)?))
}

/// Precomputed reflection products of one BS→RIS→user path.
///
/// Inverting an element by π negates its column, so the cascaded channel for
/// a mask is the full row sum minus twice the excluded columns.
#[derive(Debug, Clone)]
pub struct PathSynth {
    products: Array2<Complex64>,
    full: Vec<Complex64>,
}

impl PathSynth {
    /// Exact channel to `user` with the RIS co-phased for Bob.
    pub fn new(scn: &Scenario, user: &PolarLocation) -> Result<Self> {
        let link = scn.placement.transmit_link();
        let phases = ris_phases_closed_form(scn.plan.f0_hz, &scn.geom, link.theta_tx_rad, &scn.bob());
        let (g, h) = synthesize_channels(&scn.plan, &scn.geom, &scn.placement, &scn.path_loss, user)?;
        let products = reflection_products(&g, &h, &phases)?;
        let full = products.rows().into_iter().map(|r| r.sum()).collect();
        Ok(Self { products, full })
    }

    /// Cascaded channel with `excluded` elements inverted.
    pub fn channel(&self, excluded: &[usize], out: &mut Vec<Complex64>) {
        out.clear();
        out.extend_from_slice(&self.full);
        for &n in excluded {
            for (m, h) in out.iter_mut().enumerate() {
                *h -= 2.0 * self.products[[m, n]];
            }
        }
    }
}

/// Empirical Eve SNR from synthesized symbols.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub samples: usize,
    pub empirical_snr: f64,
    pub closed_form_snr: f64,
    /// Standard error of `empirical_snr` from batch means.
    pub std_error: f64,
    pub seed: u64,
    pub mean_beta: Complex64,
    pub var_beta: f64,
}

impl McReport {
    /// `|empirical − closed form|` in standard errors.
    pub fn z_score(&self) -> f64 {
        (self.empirical_snr - self.closed_form_snr).abs() / self.std_error
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Accum {
    n: f64,
    sum_z: Complex64,
    sum_z2: f64,
    sum_b: Complex64,
    sum_b2: f64,
}

impl Accum {
    fn merge(mut self, o: Accum) -> Accum {
        self.n += o.n;
        self.sum_z += o.sum_z;
        self.sum_z2 += o.sum_z2;
        self.sum_b += o.sum_b;
        self.sum_b2 += o.sum_b2;
        self
    }

    fn snr(&self) -> f64 {
        let mean = self.sum_z / self.n;
        let var = (self.sum_z2 - self.n * mean.norm_sqr()) / (self.n - 1.0);
        mean.norm_sqr() / var
    }
}

/// Per-symbol synthesis of Bob and Eve under random masks.
#[derive(Debug, Clone)]
pub struct RibesSimulator {
    sizes: SelectionSizes,
    m: usize,
    n: usize,
    bob: PathSynth,
    eve: PathSynth,
}

impl RibesSimulator {
    pub fn new(scn: &Scenario, eve: &PolarLocation) -> Result<Self> {
        scn.validate()?;
        Ok(Self {
            sizes: scn.sizes,
            m: scn.m(),
            n: scn.n(),
            bob: PathSynth::new(scn, &scn.bob())?,
            eve: PathSynth::new(scn, eve)?,
        })
    }

    /// `(h_B★^H w★, h_E★^H w★)` for the given excluded antennas and elements.
    pub fn gains(
        &self,
        excluded_antennas: &[usize],
        excluded_elements: &[usize],
        hb: &mut Vec<Complex64>,
        he: &mut Vec<Complex64>,
    ) -> (Complex64, Complex64) {
        self.bob.channel(excluded_elements, hb);
        self.eve.channel(excluded_elements, he);
        let norm = hb.iter().map(|h| h.norm_sqr()).sum::<f64>().sqrt();
        let mut gb = Complex64::new(0.0, 0.0);
        let mut ge = Complex64::new(0.0, 0.0);
        for (m, (b, e)) in hb.iter().zip(he.iter()).enumerate() {
            let sign = if excluded_antennas.contains(&m) { -1.0 } else { 1.0 };
            let w = b * (sign / norm);
            gb += b.conj() * w;
            ge += e.conj() * w;
        }
        (gb, ge)
    }

    fn run_batch(&self, rng: &mut ChaCha8Rng, count: usize, noise: &Normal<f64>, power_w: f64) -> Accum {
        let mut ant: Vec<usize> = (0..self.m).collect();
        let mut ele: Vec<usize> = (0..self.n).collect();
        let (mut hb, mut he) = (Vec::with_capacity(self.m), Vec::with_capacity(self.m));
        let mut acc = Accum::default();
        let sqrt_p = power_w.sqrt();
        for _ in 0..count {
            let (xa, _) = ant.partial_shuffle(rng, self.m - self.sizes.m_s);
            let xa = xa.to_vec();
            let (xe, _) = ele.partial_shuffle(rng, self.n - self.sizes.n_s);
            let xe = xe.to_vec();
            let (_, beta) = self.gains(&xa, &xe, &mut hb, &mut he);
            let x = Complex64::cis(PI / 4.0 + PI / 2.0 * rng.random_range(0..4) as f64);
            let w = Complex64::new(noise.sample(rng), noise.sample(rng));
            let y = sqrt_p * beta * x + w;
            let z = y * x.conj() / sqrt_p;
            acc.n += 1.0;
            acc.sum_z += z;
            acc.sum_z2 += z.norm_sqr();
            acc.sum_b += beta;
            acc.sum_b2 += beta.norm_sqr();
        }
        acc
    }
}

/// Number of independent RNG streams a Monte-Carlo run is split into.
pub const MC_BATCHES: usize = 100;

/// Monte-Carlo estimate of Eve's RIBES SNR.
///
/// Symbols are split into [`MC_BATCHES`] batches, each on its own ChaCha
/// stream of `seed`, so results do not depend on the worker count.
pub fn monte_carlo_eve_snr(
    scn: &Scenario,
    eve: &PolarLocation,
    samples: usize,
    seed: u64,
) -> Result<McReport> {
    if samples < 100 {
        return Err(invalid("samples", format!("need at least 100, got {samples}")));
    }
    let sim = RibesSimulator::new(scn, eve)?;
    let noise = Normal::new(0.0, (scn.budget.noise_eve_w / 2.0).sqrt())
        .map_err(|e| invalid("noise_eve", e.to_string()))?;
    let batches = MC_BATCHES.min(samples / 10);
    let per = samples / batches;
    let extra = samples % batches;
    let parts: Vec<Accum> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            sim.run_batch(&mut rng, per + usize::from(b < extra), &noise, scn.budget.power_w)
        })
        .collect();
    let total = parts.iter().copied().fold(Accum::default(), Accum::merge);
    let snrs: Vec<f64> = parts.iter().map(Accum::snr).collect();
    let mean_snr = snrs.iter().sum::<f64>() / batches as f64;
    let sd = (snrs.iter().map(|s| (s - mean_snr).powi(2)).sum::<f64>() / (batches as f64 - 1.0)).sqrt();
    let mean_beta = total.sum_b / total.n;
    let var_beta = (total.sum_b2 - total.n * mean_beta.norm_sqr()) / (total.n - 1.0);
    Ok(McReport {
        samples,
        empirical_snr: total.snr(),
        closed_form_snr: scn.snr_eve_ribes(eve)?,
        std_error: sd / (batches as f64).sqrt(),
        seed,
        mean_beta,
        var_beta: var_beta.max(0.0),
    })
}

/// `|h_B★^H w★|² P / σ_B²` for one mask on the exact channel.
pub fn bob_signal_snr(
    scn: &Scenario,
    sim: &RibesSimulator,
    excluded_antennas: &[usize],
    excluded_elements: &[usize],
) -> f64 {
    let (mut hb, mut he) = (Vec::new(), Vec::new());
    let (gb, _) = sim.gains(excluded_antennas, excluded_elements, &mut hb, &mut he);
    scn.budget.power_w * gb.norm_sqr() / scn.budget.noise_bob_w
}

/// Draws uniform exclusion sets for one symbol.
pub fn draw_exclusions<R: Rng + ?Sized>(
    rng: &mut R,
    sizes: &SelectionSizes,
    m: usize,
    n: usize,
) -> (Vec<usize>, Vec<usize>) {
    let mut ant: Vec<usize> = (0..m).collect();
    let mut ele: Vec<usize> = (0..n).collect();
    let a = ant.partial_shuffle(rng, m - sizes.m_s).0.to_vec();
    let e = ele.partial_shuffle(rng, n - sizes.n_s).0.to_vec();
    (a, e)
}

/// A one-dimensional cut through the wiretap area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Cut {
    /// Eve on Bob's bearing, ranges in `[r_min, r_max]`.
    Range { r_min: f64, r_max: f64 },
    /// Eve at Bob's range, angles in `[theta_min, theta_max]`.
    Angle { theta_min: f64, theta_max: f64 },
}

/// Largest closed-form RIBES Eve SNR found on a cut.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMax {
    pub max_snr: f64,
    pub argmax: PolarLocation,
    /// Grid points that fell inside the wiretap area.
    pub evaluated: usize,
}

fn linspace(lo: f64, hi: f64, points: usize) -> impl Iterator<Item = f64> {
    let step = if points > 1 {
        (hi - lo) / (points - 1) as f64
    } else {
        0.0
    };
    (0..points).map(move |i| lo + step * i as f64)
}

/// Grid locations of a cut that lie in the wiretap area.
///
/// On a cut only one of the two exceedance conditions can hold, so that
/// condition alone decides membership.
pub fn cut_locations(scn: &Scenario, cut: &Cut, points: usize) -> Result<Vec<PolarLocation>> {
    let bob = scn.bob();
    let region = scn.region();
    let locs: Vec<PolarLocation> = match *cut {
        Cut::Range { r_min, r_max } => {
            if region.delta_r_m.is_infinite() {
                return Err(Error::DegenerateRegion(
                    "no range null without a frequency increment".into(),
                ));
            }
            linspace(r_min, r_max, points)
                .filter(|&r| r > 0.0)
                .map(|r| PolarLocation::new(r, bob.aoa_rad))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .filter(|l| region.outside_range_lobe(&bob, l))
                .collect()
        }
        Cut::Angle { theta_min, theta_max } => linspace(theta_min, theta_max, points)
            .map(|t| PolarLocation::new(bob.range_m, t))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|l| region.outside_angle_lobe(&bob, l))
            .collect(),
    };
    if locs.is_empty() {
        return Err(Error::EmptyGrid);
    }
    Ok(locs)
}

/// Dense-grid maximum of Eve's RIBES SNR over a wiretap cut.
pub fn grid_max_eve_snr(scn: &Scenario, cut: &Cut, points: usize) -> Result<GridMax> {
    let locs = cut_locations(scn, cut, points)?;
    let snrs: Vec<f64> = locs
        .par_iter()
        .map(|l| scn.snr_eve_ribes(l))
        .collect::<Result<_>>()?;
    let (i, &max_snr) =
        snrs.iter().enumerate().fold(
            (0, &f64::NEG_INFINITY),
            |b, (i, v)| if v > b.1 { (i, v) } else { b },
        );
    Ok(GridMax {
        max_snr,
        argmax: locs[i],
        evaluated: locs.len(),
    })
}

/// Grid maximum of `|µ2 µ3|` over the wiretap angles at Bob's range.
///
/// Angles span `[theta_min, theta_max]`; the front half-plane
/// `[−π/2, π/2]` covers every direction the RIS serves.
pub fn lambda_exact(scn: &Scenario, theta_min: f64, theta_max: f64, points: usize) -> Result<(f64, f64)> {
    let bob = scn.bob();
    let region = scn.region();
    linspace(theta_min, theta_max, points)
        .filter(|t| wrap_angle(t - bob.aoa_rad).abs() >= region.delta_theta_rad())
        .map(|t| {
            let eve = PolarLocation::new(bob.range_m, t)?;
            let k = kernels_at(&scn.plan, &scn.geom, &bob, &eve);
            Ok(((k.mu2 * k.mu3).abs(), t))
        })
        .try_fold(None, |best: Option<(f64, f64)>, item: Result<(f64, f64)>| {
            let (v, t) = item?;
            Ok(Some(match best {
                Some(b) if b.0 >= v => b,
                _ => (v, t),
            }))
        })?
        .ok_or(Error::EmptyGrid)
}
