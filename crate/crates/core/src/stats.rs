//! Moments of Eve's random scaling factor under RIBES.
//!
//! Eve's per-symbol gain factors as `β = √(L_G L_H / M) · u · v`, where `u`
//! collects the antenna phasors (with random ±1 signs) and `v` the element
//! phasors. Both are sums over subsets drawn without replacement, so their
//! moments reduce to Dirichlet kernels of the range and angle offsets.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::beamforming::SelectionSizes;
use crate::channel::{FdaPlan, RisGeometry, SPEED_OF_LIGHT};
use crate::error::{invalid, Result};
use crate::geometry::PolarLocation;

const SINGULAR_EPS: f64 = 1e-9;

/// `sin(count·x) / sin(x)`, continuous through the zeros of `sin(x)`.
pub fn dirichlet(x: f64, count: usize) -> f64 {
    let k = count as f64;
    // shift to the nearest zero of sin(x) so both sines stay well conditioned
    let lobe = (x / PI).round();
    let y = x - lobe * PI;
    let sign = if lobe as i64 * (count as i64 - 1) % 2 == 0 {
        1.0
    } else {
        -1.0
    };
    let s = y.sin();
    if s.abs() < SINGULAR_EPS {
        sign * (k * y).cos() * k / y.cos()
    } else {
        sign * (k * y).sin() / s
    }
}

/// Range kernel `µ1` and the two angle kernels `µ2`, `µ3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirichletKernels {
    pub mu1: f64,
    pub mu2: f64,
    pub mu3: f64,
}

/// Kernel arguments for an Eve location; see [`kernels_at`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelArguments {
    pub range: f64,
    pub horizontal: f64,
    pub vertical: f64,
}

/// Half-phase arguments of the three kernels.
///
/// Angle differences are formed with sum-to-product identities so that an Eve
/// close to Bob does not lose precision to cancellation.
pub fn kernel_arguments(
    plan: &FdaPlan,
    geom: &RisGeometry,
    bob: &PolarLocation,
    eve: &PolarLocation,
) -> KernelArguments {
    let half_sum = 0.5 * (eve.aoa_rad + bob.aoa_rad);
    let half_diff = 0.5 * (eve.aoa_rad - bob.aoa_rad);
    // cos θB − cos θE and sin θE − sin θB
    let dcos = 2.0 * half_sum.sin() * half_diff.sin();
    let dsin = 2.0 * half_sum.cos() * half_diff.sin();
    let k = PI * plan.f0_hz / SPEED_OF_LIGHT;
    KernelArguments {
        range: PI * plan.delta_f_hz * (eve.range_m - bob.range_m) / SPEED_OF_LIGHT,
        horizontal: k * geom.d_h_m * dcos,
        vertical: k * geom.d_v_m * dsin,
    }
}

/// Kernels at `eve` for a beam steered to `bob`.
pub fn kernels_at(
    plan: &FdaPlan,
    geom: &RisGeometry,
    bob: &PolarLocation,
    eve: &PolarLocation,
) -> DirichletKernels {
    let a = kernel_arguments(plan, geom, bob, eve);
    DirichletKernels {
        mu1: dirichlet(a.range, plan.m_antennas),
        mu2: dirichlet(a.horizontal, geom.n_h),
        mu3: dirichlet(a.vertical, geom.n_v),
    }
}

/// Mean and variance of a signed subset sum of `total` real-symmetric
/// phasors whose plain sum is `kernel`, with `selected` positive signs.
fn signed_subset_moments(total: usize, selected: usize, kernel: f64) -> Result<(f64, f64)> {
    if selected > total || selected == 0 {
        return Err(invalid(
            "sizes",
            format!("subset size {selected} not in 1..={total}"),
        ));
    }
    let n = total as f64;
    let s = selected as f64;
    let mean = (2.0 * s - n) / n * kernel;
    if selected == total {
        return Ok((mean, 0.0));
    }
    if total < 2 {
        return Err(invalid("sizes", "variance needs at least two items"));
    }
    let var = 4.0 * s * (n - s) / (n * (n - 1.0)) * ((n - kernel) * (n + kernel) / n);
    Ok((mean, var.max(0.0)))
}

/// `(E[u], V[u])` for `m_s` of `M` antennas selected.
pub fn moments_u(plan: &FdaPlan, sizes: &SelectionSizes, mu1: f64) -> Result<(f64, f64)> {
    signed_subset_moments(plan.m_antennas, sizes.m_s, mu1)
}

/// `(E[v], V[v])` for `n_s` of `N` elements selected.
pub fn moments_v(geom: &RisGeometry, sizes: &SelectionSizes, mu2: f64, mu3: f64) -> Result<(f64, f64)> {
    signed_subset_moments(geom.n(), sizes.n_s, mu2 * mu3)
}

/// First two moments of `β` and of its factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingStats {
    pub mean_beta: Complex64,
    pub var_beta: f64,
    pub e_u: f64,
    pub v_u: f64,
    pub e_v: f64,
    pub v_v: f64,
}

impl ScalingStats {
    /// `|E[β]|²`.
    pub fn mean_power(&self) -> f64 {
        self.mean_beta.norm_sqr()
    }
}

/// Assembles the moments of `β` from the path-loss gains and kernels.
pub fn scaling_stats(
    gain_g: f64,
    gain_h_eve: f64,
    plan: &FdaPlan,
    geom: &RisGeometry,
    sizes: &SelectionSizes,
    kernels: &DirichletKernels,
) -> Result<ScalingStats> {
    let (e_u, v_u) = moments_u(plan, sizes, kernels.mu1)?;
    let (e_v, v_v) = moments_v(geom, sizes, kernels.mu2, kernels.mu3)?;
    let scale = gain_g * gain_h_eve / plan.m_antennas as f64;
    Ok(ScalingStats {
        mean_beta: Complex64::new(scale.sqrt() * e_u * e_v, 0.0),
        var_beta: scale * (v_u * v_v + v_v * e_u * e_u + v_u * e_v * e_v),
        e_u,
        v_u,
        e_v,
        v_v,
    })
}
