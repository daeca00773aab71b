//! Vacuum fluctuations of the radiation-pressure forces on motionless mirrors.
//!
//! The force on mirror `i` is a quadratic form of the input fields with the
//! two-frequency kernel `𝓕_i[ω,ω′]`. Its vacuum covariance is carried by
//! `γ_ij[ω,ω′] = Tr[𝓕_i 𝓕_j†]`, which is also available in closed form as
//! `γ_ij = γ_ij^R + (γ_ji^R)*` from the retarded coefficients `γ^R`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cavity::{epsilon_index, CavityConfig, CavityPoint, Matrix2};
use crate::error::{Error, Result};
use crate::mirror::MirrorModel;
use crate::numerics::{integrate_finite, Estimate, QuadratureConfig, SpectralSeries};

/// How `γ_ij` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GammaMethod {
    /// Retarded closed forms combined as `γ^R_ij + (γ^R_ji)*`.
    #[default]
    ClosedForm,
    /// Direct trace `Tr[𝓕_i 𝓕_j†]`; slower, kept as a verification mode.
    Trace,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaValue {
    pub i: usize,
    pub j: usize,
    pub omega: f64,
    pub omega_prime: f64,
    pub gamma: Complex64,
    pub gamma_retarded: Complex64,
}

fn check_index(i: usize) -> Result<()> {
    if i == 1 || i == 2 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "mirror index must be 1 or 2, got {i}"
        )))
    }
}

fn projector(sign: f64) -> Matrix2 {
    Matrix2::projector(if sign > 0.0 { 1 } else { -1 })
}

/// `𝓕_i[ω,ω′]` from the composite matrices at the two frequencies.
pub fn force_kernel_at(i: usize, q: f64, a: &CavityPoint, b: &CavityPoint) -> Matrix2 {
    let e = epsilon_index(i);
    let half = 0.5 * (a.omega + b.omega) * q;
    let (sa, ra) = (a.global_scattering(), a.resonance());
    let (sb, rb) = (b.global_scattering(), b.resonance());
    let p = projector(e);
    let m = projector(-e);
    let inner = p - rb.transpose() * p * ra;
    let outer = sb.transpose() * m * sa - rb.transpose() * m * ra;
    (inner * Complex64::from_polar(e, -half)) + (outer * Complex64::from_polar(e, half))
}

pub fn force_kernel(cfg: &CavityConfig, i: usize, omega: f64, omega_prime: f64) -> Result<Matrix2> {
    check_index(i)?;
    let a = CavityPoint::new(cfg, omega)?;
    let b = CavityPoint::new(cfg, omega_prime)?;
    Ok(force_kernel_at(i, cfg.q, &a, &b))
}

/// `γ_ij[ω,ω′] = Tr[𝓕_i[ω,ω′] 𝓕_j[ω,ω′]†]`.
pub fn gamma_via_trace(cfg: &CavityConfig, i: usize, j: usize, omega: f64, omega_prime: f64) -> Result<Complex64> {
    check_index(i)?;
    check_index(j)?;
    let a = CavityPoint::new(cfg, omega)?;
    let b = CavityPoint::new(cfg, omega_prime)?;
    Ok(trace_gamma_at(i, j, cfg.q, &a, &b))
}

fn trace_gamma_at(i: usize, j: usize, q: f64, a: &CavityPoint, b: &CavityPoint) -> Complex64 {
    let fi = force_kernel_at(i, q, a, b);
    let fj = if i == j { fi } else { force_kernel_at(j, q, a, b) };
    (fi * fj.adjoint()).trace()
}

fn alpha(ra: Complex64, sa: Complex64, rb: Complex64, sb: Complex64) -> Complex64 {
    1.0 - sa * sb + ra * rb
}

fn beta(ra: Complex64, sa: Complex64, rb: Complex64, sb: Complex64) -> Complex64 {
    1.0 - sa * sb - ra * rb
}

/// `γ_11^R[ω,ω′]` with `a` at `ω` and `b` at `ω′`.
fn gamma11_retarded(a: &CavityPoint, b: &CavityPoint) -> Complex64 {
    let al = alpha(a.r1, a.s1, b.r1, b.s1);
    let be = beta(a.r1, a.s1, b.r1, b.s1);
    let ea = a.phase * a.phase;
    let eb = b.phase * b.phase;
    let ka = a.r2 * ea / a.d;
    let kb = b.r2 * eb / b.d;
    2.0 * al / (a.d * b.d)
        + al * be * ka * kb
        + b.r1 * a.d1() * ka
        + a.r1 * b.d1() * kb
        + (a.r1.conj() + b.r1) * (a.r2.conj() * ea.conj() + b.r2 * eb) / (a.d.conj() * b.d)
        + 2.0
        - 1.0 / a.d
        - 1.0 / b.d
}

/// `γ_21^R[ω,ω′]` with `a` at `ω` and `b` at `ω′`.
fn gamma21_retarded(a: &CavityPoint, b: &CavityPoint) -> Complex64 {
    let al1 = alpha(a.r1, a.s1, b.r1, b.s1);
    let al2 = alpha(a.r2, a.s2, b.r2, b.s2);
    let ub = b.phase / b.d;
    -al1 * al2 * (a.phase / a.d) * ub - (b.r1 + a.r1.conj()) * (b.r2 + a.r2.conj()) * (a.phase / a.d).conj() * ub
}

/// `γ_ij^R` at precomputed points; (2,2) and (1,2) by mirror exchange.
pub fn gamma_retarded_at(i: usize, j: usize, a: &CavityPoint, b: &CavityPoint) -> Complex64 {
    match (i, j) {
        (1, 1) => gamma11_retarded(a, b),
        (2, 1) => gamma21_retarded(a, b),
        (2, 2) => gamma11_retarded(&a.swapped(), &b.swapped()),
        (1, 2) => gamma21_retarded(&a.swapped(), &b.swapped()),
        _ => panic!("mirror indices must be 1 or 2, got ({i}, {j})"),
    }
}

/// Retarded coefficient `γ_ij^R[ω,ω′]`, analytic in the upper half `ω′` plane.
pub fn gamma_retarded(cfg: &CavityConfig, i: usize, j: usize, omega: f64, omega_prime: f64) -> Result<Complex64> {
    check_index(i)?;
    check_index(j)?;
    let a = CavityPoint::new(cfg, omega)?;
    let b = CavityPoint::new(cfg, omega_prime)?;
    Ok(gamma_retarded_at(i, j, &a, &b))
}

/// `γ_ij^R` assembled from traces of `R`, `R̄`, `Q` and `S` projections.
///
/// Independent of the closed forms; used to audit them.
pub fn gamma_retarded_via_trace(
    cfg: &CavityConfig,
    i: usize,
    j: usize,
    omega: f64,
    omega_prime: f64,
) -> Result<Complex64> {
    check_index(i)?;
    check_index(j)?;
    let a = CavityPoint::new(cfg, omega)?;
    let b = CavityPoint::new(cfg, omega_prime)?;
    let (ei, ej) = (epsilon_index(i), epsilon_index(j));
    let (pi, mi, pj, mj) = (projector(ei), projector(-ei), projector(ej), projector(-ej));
    let id = Matrix2::identity();
    let half = id.scale_re(0.5);
    let qa = a.q_matrix();
    let ra = a.resonance();
    let rba = a.rbar();
    let sa = a.global_scattering();
    let qbt = b.q_matrix().transpose();
    let rbt = b.resonance().transpose();
    let rbbt = b.rbar().transpose();
    let sbt = b.global_scattering().transpose();
    let big = id + qa + qa.adjoint();
    let carrier = Complex64::from_polar(1.0, (omega + omega_prime) * cfg.q);

    let mut t = (pi * pj + mi * mj).trace() * 0.5;
    t -= (pi * ra * pj * rbt).trace();
    t -= (mi * rba * mj * rbbt).trace();
    t += (pi * big * pj * (half + qbt)).trace();
    t += (mi * big * mj * (half + qbt)).trace();
    t += carrier * (mi * sa * pj * sbt).trace();
    t -= carrier * (mi * ra * pj * rbt + mi * rba * pj * rbbt).trace();
    t += carrier * (mi * big * pj * (id + qbt)).trace();
    t += carrier.conj() * (pi * big * mj * qbt).trace();
    Ok(t * (ei * ej))
}

/// `γ_ij` and `γ_ij^R` at one frequency pair from the closed forms.
pub fn gamma_closed_form(cfg: &CavityConfig, i: usize, j: usize, omega: f64, omega_prime: f64) -> Result<GammaValue> {
    check_index(i)?;
    check_index(j)?;
    let a = CavityPoint::new(cfg, omega)?;
    let b = CavityPoint::new(cfg, omega_prime)?;
    let gamma_retarded = gamma_retarded_at(i, j, &a, &b);
    let gamma = gamma_retarded + gamma_retarded_at(j, i, &a, &b).conj();
    Ok(GammaValue {
        i,
        j,
        omega,
        omega_prime,
        gamma,
        gamma_retarded,
    })
}

/// `γ_ij[ω,ω′]` by the selected method.
pub fn gamma(
    cfg: &CavityConfig,
    i: usize,
    j: usize,
    omega: f64,
    omega_prime: f64,
    method: GammaMethod,
) -> Result<Complex64> {
    match method {
        GammaMethod::ClosedForm => Ok(gamma_closed_form(cfg, i, j, omega, omega_prime)?.gamma),
        GammaMethod::Trace => gamma_via_trace(cfg, i, j, omega, omega_prime),
    }
}

/// Points in `(lo, hi)` where `γ[ω′, ω−ω′]` jumps because an ideal band ends.
pub(crate) fn band_breaks(cfg: &CavityConfig, omega: f64, lo: f64, hi: f64) -> Vec<f64> {
    let mut breaks = vec![lo, hi];
    for m in [&cfg.m1, &cfg.m2] {
        if let MirrorModel::IdealBand { cutoff } = m {
            for c in [*cutoff, -*cutoff] {
                for x in [c, omega - c] {
                    if x > lo && x < hi {
                        breaks.push(x);
                    }
                }
            }
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    breaks
}

/// `∫₀^ω dω′/2π ω′(ω−ω′) γ_ij[ω′, ω−ω′]`, oriented (negative ω integrates backwards).
fn convolved_gamma(
    cfg: &CavityConfig,
    i: usize,
    j: usize,
    omega: f64,
    quad: &QuadratureConfig,
    method: GammaMethod,
) -> Result<Estimate> {
    check_index(i)?;
    check_index(j)?;
    if omega == 0.0 {
        return Ok(Estimate::zero());
    }
    let (lo, hi) = if omega > 0.0 { (0.0, omega) } else { (omega, 0.0) };
    let failure = std::cell::Cell::new(None);
    let f = |w: f64| {
        let u = omega - w;
        match gamma(cfg, i, j, w, u, method) {
            Ok(g) => g * (w * u / (2.0 * PI)),
            Err(e) => {
                failure.set(Some(e));
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let mut total = Estimate::zero();
    for span in band_breaks(cfg, omega, lo, hi).windows(2) {
        let seg = integrate_finite(f, span[0], span[1], quad)?;
        total.value += seg.value;
        total.error += seg.error;
        total.evaluations += seg.evaluations;
    }
    if let Some(e) = failure.take() {
        return Err(e);
    }
    if omega < 0.0 {
        total.value = -total.value;
    }
    Ok(total)
}

/// Commutator spectrum `ξ_ij[ω] = (ħ/4)∫₀^ω dω′/2π ω′(ω−ω′) γ_ij[ω′,ω−ω′]`.
pub fn commutator_spectrum(
    cfg: &CavityConfig,
    i: usize,
    j: usize,
    omega: f64,
    quad: &QuadratureConfig,
) -> Result<Complex64> {
    commutator_spectrum_with(cfg, i, j, omega, quad, GammaMethod::ClosedForm)
}

pub fn commutator_spectrum_with(
    cfg: &CavityConfig,
    i: usize,
    j: usize,
    omega: f64,
    quad: &QuadratureConfig,
    method: GammaMethod,
) -> Result<Complex64> {
    Ok(convolved_gamma(cfg, i, j, omega, quad, method)?.value * (0.25 * cfg.hbar))
}

/// Noise spectrum `C_ij[ω] = (ħ²/2)θ(ω)∫₀^ω dω′/2π ω′(ω−ω′) γ_ij[ω′,ω−ω′]` on a grid.
pub fn noise_spectrum(
    cfg: &CavityConfig,
    i: usize,
    j: usize,
    grid: &[f64],
    quad: &QuadratureConfig,
) -> Result<SpectralSeries> {
    noise_spectrum_with(cfg, i, j, grid, quad, GammaMethod::ClosedForm)
}

pub fn noise_spectrum_with(
    cfg: &CavityConfig,
    i: usize,
    j: usize,
    grid: &[f64],
    quad: &QuadratureConfig,
    method: GammaMethod,
) -> Result<SpectralSeries> {
    check_index(i)?;
    check_index(j)?;
    quad.validate()?;
    let k = 0.5 * cfg.hbar * cfg.hbar;
    let values: Vec<Result<Complex64>> = grid
        .par_iter()
        .map(|&w| {
            if w > 0.0 {
                Ok(convolved_gamma(cfg, i, j, w, quad, method)?.value * k)
            } else {
                Ok(Complex64::new(0.0, 0.0))
            }
        })
        .collect();
    let values = values.into_iter().collect::<Result<Vec<_>>>()?;
    SpectralSeries::new(format!("C{i}{j}"), grid.to_vec(), values)
}
