//! Mean Casimir force between two motionless mirrors and its separation gradient.
//!
//! Forces are positive along `+x`. Mirror 1 sits at `−q/2`, so an attractive
//! force has `F1 > 0` and `F2 < 0`.
//!
//! The production path integrates the real-frequency form
//! `⟨F_i⟩ = −ε_i ∫₀^∞ dω/2π ħω·2Re[r e^{2iωq}/d]` with oscillatory tail
//! summation. The same integral rotated onto the imaginary axis,
//! `⟨F_1⟩ = (ħ/π)∫₀^∞ dξ ξ X/(1−X)` with `X = r₁[iξ]r₂[iξ]e^{−2ξq}`, is exposed
//! as an independent route and is the only route for the non-causal ideal band,
//! whose real-axis integrand has poles on the integration path.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::cavity::{epsilon_index, CavityConfig, CavityPoint};
use crate::error::{Error, Result};
use crate::numerics::{integrate_finite, integrate_semi_infinite_oscillatory, Estimate, QuadratureConfig};

/// Whether non-causal (diagnostic) mirror models are accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelPolicy {
    CausalOnly,
    AllowDiagnostic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForceGradient {
    /// `∂⟨F1⟩/∂q` at fixed center.
    pub df1_dq: f64,
    pub df2_dq: f64,
    pub error_bound: f64,
}

impl ForceGradient {
    /// `∂⟨F_i⟩/∂q_j`; moving mirror `j` changes the separation by `−ε_j δq_j`.
    pub fn position_derivative(&self, i: usize, j: usize) -> f64 {
        let df_dq = if i == 1 { self.df1_dq } else { self.df2_dq };
        -epsilon_index(j) * df_dq
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StaticForceResult {
    pub f1: f64,
    pub f2: f64,
    pub error_bound: f64,
    pub gradient: Option<ForceGradient>,
}

fn check_policy(cfg: &CavityConfig, policy: ModelPolicy) -> Result<()> {
    if policy == ModelPolicy::CausalOnly {
        for m in [&cfg.m1, &cfg.m2] {
            if !m.is_causal() {
                return Err(Error::NonCausalModel(m.name().into()));
            }
        }
    }
    Ok(())
}

/// `⟨F1⟩, ⟨F2⟩` for causal mirror models.
pub fn mean_casimir_force(cfg: &CavityConfig, quad: &QuadratureConfig) -> Result<StaticForceResult> {
    mean_casimir_force_with(cfg, quad, ModelPolicy::CausalOnly)
}

pub fn mean_casimir_force_with(
    cfg: &CavityConfig,
    quad: &QuadratureConfig,
    policy: ModelPolicy,
) -> Result<StaticForceResult> {
    check_policy(cfg, policy)?;
    if cfg.has_transparent_mirror() {
        return Ok(StaticForceResult {
            f1: 0.0,
            f2: 0.0,
            error_bound: 0.0,
            gradient: None,
        });
    }
    let est = if cfg.is_causal() {
        real_axis(cfg, quad, force_integrand, force_harmonic)?
    } else {
        imaginary_axis_force_estimate(cfg, quad)?
    };
    let f1 = est.value.re;
    Ok(StaticForceResult {
        f1,
        f2: -f1,
        error_bound: est.error,
        gradient: None,
    })
}

/// Force together with its analytic separation gradient.
pub fn mean_casimir_force_and_gradient(
    cfg: &CavityConfig,
    quad: &QuadratureConfig,
    policy: ModelPolicy,
) -> Result<StaticForceResult> {
    let mut result = mean_casimir_force_with(cfg, quad, policy)?;
    result.gradient = Some(force_gradient_with(cfg, quad, policy)?);
    Ok(result)
}

/// `(∂⟨F1⟩/∂q, ∂⟨F2⟩/∂q)` for causal mirror models.
pub fn force_gradient(cfg: &CavityConfig, quad: &QuadratureConfig) -> Result<ForceGradient> {
    force_gradient_with(cfg, quad, ModelPolicy::CausalOnly)
}

pub fn force_gradient_with(
    cfg: &CavityConfig,
    quad: &QuadratureConfig,
    policy: ModelPolicy,
) -> Result<ForceGradient> {
    check_policy(cfg, policy)?;
    if cfg.has_transparent_mirror() {
        return Ok(ForceGradient {
            df1_dq: 0.0,
            df2_dq: 0.0,
            error_bound: 0.0,
        });
    }
    let est = if cfg.is_causal() {
        real_axis(cfg, quad, gradient_integrand, gradient_harmonic)?
    } else {
        imaginary_axis_gradient_estimate(cfg, quad)?
    };
    Ok(ForceGradient {
        df1_dq: est.value.re,
        df2_dq: -est.value.re,
        error_bound: est.error,
    })
}

/// `−(ħω/π) Re[x/d]`, the integrand of `⟨F1⟩`, with `x = r e^{2iωq}`.
fn force_integrand(cfg: &CavityConfig, p: &CavityPoint) -> f64 {
    let x = p.r() * p.phase * p.phase;
    -cfg.hbar * p.omega / PI * (x / p.d).re
}

/// Harmonic `n` of the force integrand: `−(ħω/π) Re[xⁿ]`.
fn force_harmonic(cfg: &CavityConfig, p: &CavityPoint, n: i32) -> f64 {
    let x = p.r() * p.phase * p.phase;
    -cfg.hbar * p.omega / PI * x.powi(n).re
}

/// `(2ħ/π) ω² Im[x/d²]`, the integrand of `∂⟨F1⟩/∂q`.
fn gradient_integrand(cfg: &CavityConfig, p: &CavityPoint) -> f64 {
    let x = p.r() * p.phase * p.phase;
    let w = p.omega;
    2.0 * cfg.hbar / PI * w * w * (x / (p.d * p.d)).im
}

/// Harmonic `n` of the gradient integrand: `(2ħ/π) ω² n Im[xⁿ]`.
fn gradient_harmonic(cfg: &CavityConfig, p: &CavityPoint, n: i32) -> f64 {
    let x = p.r() * p.phase * p.phase;
    let w = p.omega;
    2.0 * cfg.hbar / PI * w * w * n as f64 * x.powi(n).im
}

/// Largest `|r₁r₂|` accepted at the start of the oscillatory tail.
const TAIL_REFLECTION: f64 = 0.1;

fn real_axis(
    cfg: &CavityConfig,
    quad: &QuadratureConfig,
    integrand: fn(&CavityConfig, &CavityPoint) -> f64,
    harmonic: fn(&CavityConfig, &CavityPoint, i32) -> f64,
) -> Result<Estimate> {
    let eval = |w: f64, g: &dyn Fn(&CavityPoint) -> f64| match CavityPoint::evaluate(cfg, w) {
        Ok(p) if w > 0.0 => Complex64::new(g(&p), 0.0),
        _ => Complex64::new(0.0, 0.0),
    };

    if let Some(limit) = cfg.frequency_limit() {
        // Tabulated data: integrate up to the last node. Probe it so a failing
        // lookup is reported instead of silently integrated as zero.
        CavityPoint::evaluate(cfg, limit)?;
        return integrate_finite(|w| eval(w, &|p| integrand(cfg, p)), 0.0, limit, quad);
    }

    // Move the tail start out until the mirrors are mostly transparent, so that
    // 1/d = Σ xⁿ converges quickly there.
    let mut start = quad.tail_cutoff;
    let mut x_start = CavityPoint::evaluate(cfg, start)?.r().norm();
    while x_start > TAIL_REFLECTION {
        start *= 2.0;
        if start > 1e12 {
            return Err(Error::TailNonConvergence {
                start,
                partial_re: f64::NAN,
                partial_im: 0.0,
                tail_estimate: x_start,
            });
        }
        x_start = CavityPoint::evaluate(cfg, start)?.r().norm();
    }

    let mut total = integrate_finite(|w| eval(w, &|p| integrand(cfg, p)), 0.0, start, quad)?;

    // Each harmonic xⁿ carries e^{2inωq} and is summed with its own carrier.
    let floor = quad.abs_tol.max(quad.rel_tol * total.value.norm()) * 1e-2;
    let scale = start * start.max(1.0) * cfg.hbar;
    let tail_cfg = quad.with_tail_cutoff(start);
    let mut n = 1;
    loop {
        let h = integrate_semi_infinite_oscillatory(
            |w| eval(w, &|p| harmonic(cfg, p, n)),
            start,
            2.0 * n as f64 * cfg.q,
            &tail_cfg,
        )?;
        total = Estimate {
            value: total.value + h.value,
            error: total.error + h.error,
            evaluations: total.evaluations + h.evaluations,
        };
        n += 1;
        if scale * x_start.powi(n) < floor || n > 64 {
            break;
        }
    }
    Ok(total)
}

fn imaginary_axis_product(cfg: &CavityConfig, xi: f64) -> Result<f64> {
    let r1 = cfg.m1.reflectivity_imaginary(xi);
    let r2 = cfg.m2.reflectivity_imaginary(xi);
    match (r1, r2) {
        (Some(a), Some(b)) => Ok(a * b * (-2.0 * xi * cfg.q).exp()),
        _ => Err(Error::InvalidParameter(
            "imaginary-frequency continuation is not available for tabulated mirrors".into(),
        )),
    }
}

fn imaginary_axis<F>(cfg: &CavityConfig, quad: &QuadratureConfig, kernel: F) -> Result<Estimate>
where
    F: Fn(f64, f64) -> f64,
{
    imaginary_axis_product(cfg, 0.0)?;
    // Beyond 60/q every term carries e^{−120} at most.
    let upper = 60.0 / cfg.q;
    let mut breaks = vec![0.0];
    for m in [&cfg.m1, &cfg.m2] {
        if let crate::mirror::MirrorModel::IdealBand { cutoff } = m {
            if *cutoff < upper {
                breaks.push(*cutoff);
            }
        }
    }
    breaks.push(upper);
    breaks.sort_by(f64::total_cmp);
    let f = |xi: f64| {
        let x = imaginary_axis_product(cfg, xi).unwrap_or(0.0);
        Complex64::new(kernel(xi, x), 0.0)
    };
    let mut total = Estimate::zero();
    for w in breaks.windows(2) {
        let seg = integrate_finite(f, w[0], w[1], quad)?;
        total = Estimate {
            value: total.value + seg.value,
            error: total.error + seg.error,
            evaluations: total.evaluations + seg.evaluations,
        };
    }
    Ok(total)
}

fn imaginary_axis_force_estimate(cfg: &CavityConfig, quad: &QuadratureConfig) -> Result<Estimate> {
    let k = cfg.hbar / PI;
    imaginary_axis(cfg, quad, |xi, x| k * xi * x / (1.0 - x))
}

fn imaginary_axis_gradient_estimate(cfg: &CavityConfig, quad: &QuadratureConfig) -> Result<Estimate> {
    let k = -2.0 * cfg.hbar / PI;
    imaginary_axis(cfg, quad, |xi, x| k * xi * xi * x / ((1.0 - x) * (1.0 - x)))
}

/// `⟨F1⟩` from the imaginary-frequency representation.
pub fn imaginary_axis_force(cfg: &CavityConfig, quad: &QuadratureConfig) -> Result<StaticForceResult> {
    let est = imaginary_axis_force_estimate(cfg, quad)?;
    Ok(StaticForceResult {
        f1: est.value.re,
        f2: -est.value.re,
        error_bound: est.error,
        gradient: None,
    })
}

/// `∂⟨F1⟩/∂q` from the imaginary-frequency representation.
pub fn imaginary_axis_gradient(cfg: &CavityConfig, quad: &QuadratureConfig) -> Result<ForceGradient> {
    let est = imaginary_axis_gradient_estimate(cfg, quad)?;
    Ok(ForceGradient {
        df1_dq: est.value.re,
        df2_dq: -est.value.re,
        error_bound: est.error,
    })
}
