//! Motional susceptibilities `χ_ij`: the linear map from the displacement of
//! mirror `j` to the mean force on mirror `i`.
//!
//! The two-frequency kernel is
//! `χ_ij[ω,ω′] = (iħωω′/4)(ε(ω)γ_ij^R[ω,ω′] + ε(ω′)γ_ij^R[ω′,ω])` and the
//! spectrum is its convolution `χ_ij[ω] = ∫dω′/2π χ_ij[ω−ω′,ω′]` over the
//! whole real line.
//!
//! Writing `g(u,v) = γ^R[u,v]` with `u = ω−v`, the kernel splits into the
//! symmetric part `(g(u,v)+g(v,u))/2`, which only contributes where `u` and `v`
//! share a sign (the finite interval between 0 and ω), and the antisymmetric
//! part, which only contributes where they differ. The two semi-infinite
//! antisymmetric ranges are mirror images of each other, so only `v > max(0,ω)`
//! is integrated. Far out, where the mirrors are nearly transparent, the
//! antisymmetric part is expanded in cavity roundtrips; roundtrip `k` carries
//! `e^{±2ikqv}` and its tail is summed with that carrier.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cavity::{sign, CavityConfig, CavityPoint};
use crate::error::{Error, Result};
use crate::fluctuations::{band_breaks, gamma_retarded_at};
use crate::mirror::MirrorModel;
use crate::numerics::{
    integrate_finite, integrate_semi_infinite_oscillatory, Estimate, QuadratureConfig, SpectralSeries,
    UniformTimeGrid,
};

/// How a susceptibility series was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChiMethod {
    Full,
    ResonanceApprox,
    SingleMirror,
    PerfectSeries,
}

/// Samples of one `χ_ij` on a frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiComponent {
    pub i: usize,
    pub j: usize,
    pub values: Vec<Complex64>,
    /// Quadrature error bound per sample (zero for closed forms).
    pub error: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SusceptibilitySeries {
    pub omega: Vec<f64>,
    pub components: Vec<ChiComponent>,
    pub method: ChiMethod,
    /// Start of the summed tail, for the full method.
    pub tail_cutoff: Option<f64>,
}

impl SusceptibilitySeries {
    pub fn get(&self, i: usize, j: usize) -> Option<&ChiComponent> {
        self.components.iter().find(|c| c.i == i && c.j == j)
    }

    pub fn spectral(&self, i: usize, j: usize) -> Option<SpectralSeries> {
        let c = self.get(i, j)?;
        SpectralSeries::new(format!("chi{i}{j}"), self.omega.clone(), c.values.clone()).ok()
    }

    /// Largest `|χ[−ω] − χ[ω]*|` over grid points whose mirror image is also
    /// on the grid, relative to the largest magnitude.
    pub fn reality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for c in &self.components {
            let scale = c.values.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
            for (k, &w) in self.omega.iter().enumerate() {
                if let Some(m) = self.omega.iter().position(|&x| x == -w) {
                    worst = worst.max((c.values[m] - c.values[k].conj()).norm() / scale);
                }
            }
        }
        worst
    }
}

fn check_index(i: usize) -> Result<()> {
    if i == 1 || i == 2 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("mirror index must be 1 or 2, got {i}")))
    }
}

const PAIRS: [(usize, usize); 4] = [(1, 1), (1, 2), (2, 1), (2, 2)];

/// Two-frequency susceptibility `χ_ij[ω,ω′]`.
pub fn chi_two_freq(cfg: &CavityConfig, i: usize, j: usize, omega: f64, omega_prime: f64) -> Result<Complex64> {
    check_index(i)?;
    check_index(j)?;
    if omega == 0.0 || omega_prime == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let a = CavityPoint::new(cfg, omega)?;
    let b = CavityPoint::new(cfg, omega_prime)?;
    let g = sign(omega) * gamma_retarded_at(i, j, &a, &b) + sign(omega_prime) * gamma_retarded_at(i, j, &b, &a);
    Ok(Complex64::new(0.0, 0.25 * cfg.hbar * omega * omega_prime) * g)
}

/// The term of `γ_ij^R[u,v]` that is not symmetric under `u ↔ v`.
///
/// `a` is the point at `u`, `b` the point at `v`.
pub fn asymmetric_term(i: usize, j: usize, a: &CavityPoint, b: &CavityPoint) -> Complex64 {
    let den = a.d.conj() * b.d;
    roundtrip_prefactor(i, j, a, b) / den
}

fn roundtrip_prefactor(i: usize, j: usize, a: &CavityPoint, b: &CavityPoint) -> Complex64 {
    match (i, j) {
        (1, 1) => {
            let ea = a.phase * a.phase;
            let eb = b.phase * b.phase;
            (a.r1.conj() + b.r1) * (a.r2.conj() * ea.conj() + b.r2 * eb)
        }
        (2, 1) => -(b.r1 + a.r1.conj()) * (b.r2 + a.r2.conj()) * a.phase.conj() * b.phase,
        (2, 2) => roundtrip_prefactor(1, 1, &a.swapped(), &b.swapped()),
        (1, 2) => roundtrip_prefactor(2, 1, &a.swapped(), &b.swapped()),
        _ => panic!("mirror indices must be 1 or 2, got ({i}, {j})"),
    }
}

/// Roundtrip `k ≥ 1` of [`asymmetric_term`]: `1/(d[u]* d[v])` expanded as
/// `Σ (x[u]*)ⁿ x[v]^m` and restricted to `n + m = k − 1`.
pub fn asymmetric_roundtrip(i: usize, j: usize, a: &CavityPoint, b: &CavityPoint, k: u32) -> Complex64 {
    let xa = (a.r() * a.phase * a.phase).conj();
    let xb = b.r() * b.phase * b.phase;
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 0..k {
        sum += xa.powu(n) * xb.powu(k - 1 - n);
    }
    roundtrip_prefactor(i, j, a, b) * sum
}

/// Largest `|r₁r₂|` accepted at the start of the roundtrip-expanded tail.
const TAIL_REFLECTION: f64 = 0.1;

/// Prefers an error recorded by an integrand over the quadrature result.
fn capture<T>(failure: &std::cell::Cell<Option<Error>>, r: Result<T>) -> Result<T> {
    if let Some(e) = failure.take() {
        return Err(e);
    }
    r
}

fn add(a: Estimate, b: Estimate) -> Estimate {
    Estimate {
        value: a.value + b.value,
        error: a.error + b.error,
        evaluations: a.evaluations + b.evaluations,
    }
}

fn integrate_pieces<F>(f: F, breaks: &[f64], quad: &QuadratureConfig) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64,
{
    let mut total = Estimate::zero();
    for span in breaks.windows(2) {
        total = add(total, integrate_finite(&f, span[0], span[1], quad)?);
    }
    Ok(total)
}

/// Symmetric contribution `ε(ω)∫ dv/2π (iħuv/2)(g(u,v)+g(v,u))/2` over the
/// interval between 0 and ω.
fn symmetric_part(cfg: &CavityConfig, i: usize, j: usize, omega: f64, quad: &QuadratureConfig) -> Result<Estimate> {
    if omega == 0.0 {
        return Ok(Estimate::zero());
    }
    let (lo, hi) = if omega > 0.0 { (0.0, omega) } else { (omega, 0.0) };
    let k = Complex64::new(0.0, sign(omega) * cfg.hbar / (8.0 * PI));
    let failure = std::cell::Cell::new(None);
    let f = |v: f64| {
        let u = omega - v;
        match (CavityPoint::new(cfg, u), CavityPoint::new(cfg, v)) {
            (Ok(a), Ok(b)) => k * (u * v) * (gamma_retarded_at(i, j, &a, &b) + gamma_retarded_at(i, j, &b, &a)),
            (Err(e), _) | (_, Err(e)) => {
                failure.set(Some(e));
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let r = integrate_pieces(f, &band_breaks(cfg, omega, lo, hi), quad);
    capture(&failure, r)
}

/// First frequency `v` beyond which both `v` and `ω − v` are in the nearly
/// transparent regime.
fn tail_start(cfg: &CavityConfig, omega: f64, quad: &QuadratureConfig) -> Result<(f64, f64)> {
    let mut start = omega.max(0.0) + quad.tail_cutoff;
    loop {
        let xb = CavityPoint::evaluate(cfg, start)?.r().norm();
        let xa = CavityPoint::evaluate(cfg, omega - start)?.r().norm();
        let x = xa.max(xb);
        if x <= TAIL_REFLECTION {
            return Ok((start, x));
        }
        start *= 2.0;
        if start > 1e12 {
            return Err(Error::TailNonConvergence {
                start,
                partial_re: f64::NAN,
                partial_im: 0.0,
                tail_estimate: x,
            });
        }
    }
}

/// Antisymmetric contribution, folded onto `v > max(0, ω)`:
/// `−iħ ∫ dv/2π uv (g(u,v) − g(v,u))/2`.
fn antisymmetric_part(
    cfg: &CavityConfig,
    i: usize,
    j: usize,
    omega: f64,
    quad: &QuadratureConfig,
) -> Result<(Estimate, f64)> {
    let lo = omega.max(0.0);
    let k = Complex64::new(0.0, -cfg.hbar / (4.0 * PI));
    let failure = std::cell::Cell::new(None);
    let points = |v: f64| -> Option<(f64, CavityPoint, CavityPoint)> {
        let u = omega - v;
        match (CavityPoint::new(cfg, u), CavityPoint::new(cfg, v)) {
            (Ok(a), Ok(b)) => Some((u, a, b)),
            (Err(e), _) | (_, Err(e)) => {
                failure.set(Some(e));
                None
            }
        }
    };
    let core = |v: f64| match points(v) {
        Some((u, a, b)) => k * (u * v) * (asymmetric_term(i, j, &a, &b) - asymmetric_term(i, j, &b, &a)),
        None => Complex64::new(0.0, 0.0),
    };

    if let Some(limit) = cfg.frequency_limit() {
        // Tabulated data: stop where either frequency leaves the table.
        let hi = limit.min(limit + omega);
        if hi <= lo {
            return Ok((Estimate::zero(), lo));
        }
        let r = integrate_pieces(core, &band_breaks(cfg, omega, lo, hi), quad);
        return Ok((capture(&failure, r)?, hi));
    }

    let (start, x) = tail_start(cfg, omega, quad)?;
    let r = integrate_pieces(core, &band_breaks(cfg, omega, lo, start), quad);
    let mut total = capture(&failure, r)?;

    let floor = quad.abs_tol.max(quad.rel_tol * total.value.norm()) * 1e-2;
    let scale = start * start * cfg.hbar;
    let tail_cfg = quad.with_tail_cutoff(start);
    let mut n = 1u32;
    loop {
        let harmonic = |v: f64| match points(v) {
            Some((u, a, b)) => {
                k * (u * v) * (asymmetric_roundtrip(i, j, &a, &b, n) - asymmetric_roundtrip(i, j, &b, &a, n))
            }
            None => Complex64::new(0.0, 0.0),
        };
        let r = integrate_semi_infinite_oscillatory(harmonic, start, 2.0 * n as f64 * cfg.q, &tail_cfg);
        total = add(total, capture(&failure, r)?);
        if scale * x.powi(n as i32 + 1) < floor || n >= 64 {
            break;
        }
        n += 1;
    }
    Ok((total, start))
}

/// `χ_ij[ω]` by the full convolution, with its error bound and tail start.
pub fn chi_at(cfg: &CavityConfig, i: usize, j: usize, omega: f64, quad: &QuadratureConfig) -> Result<(Estimate, f64)> {
    check_index(i)?;
    check_index(j)?;
    quad.validate()?;
    let sym = symmetric_part(cfg, i, j, omega, quad)?;
    let (anti, start) = antisymmetric_part(cfg, i, j, omega, quad)?;
    Ok((add(sym, anti), start))
}

fn full_series(
    cfg: &CavityConfig,
    pairs: &[(usize, usize)],
    grid: &[f64],
    quad: &QuadratureConfig,
) -> Result<SusceptibilitySeries> {
    for &(i, j) in pairs {
        check_index(i)?;
        check_index(j)?;
    }
    quad.validate()?;
    let jobs: Vec<(usize, f64)> = (0..pairs.len())
        .flat_map(|p| grid.iter().map(move |&w| (p, w)))
        .collect();
    let results: Vec<Result<(Estimate, f64)>> = jobs
        .par_iter()
        .map(|&(p, w)| chi_at(cfg, pairs[p].0, pairs[p].1, w, quad))
        .collect();
    let mut results = results.into_iter();
    let mut components = Vec::with_capacity(pairs.len());
    let mut tail = 0.0f64;
    for &(i, j) in pairs {
        let mut values = Vec::with_capacity(grid.len());
        let mut error = Vec::with_capacity(grid.len());
        for _ in grid {
            let (est, start) = results.next().expect("one result per job")?;
            values.push(est.value);
            error.push(est.error);
            tail = tail.max(start);
        }
        components.push(ChiComponent { i, j, values, error });
    }
    Ok(SusceptibilitySeries {
        omega: grid.to_vec(),
        components,
        method: ChiMethod::Full,
        tail_cutoff: Some(tail),
    })
}

/// `χ_ij[ω]` on a grid by the full convolution.
pub fn chi_spectrum(
    cfg: &CavityConfig,
    i: usize,
    j: usize,
    grid: &[f64],
    quad: &QuadratureConfig,
) -> Result<SusceptibilitySeries> {
    full_series(cfg, &[(i, j)], grid, quad)
}

/// All four `χ_ij[ω]` on a grid by the full convolution.
pub fn chi_matrix_spectrum(cfg: &CavityConfig, grid: &[f64], quad: &QuadratureConfig) -> Result<SusceptibilitySeries> {
    full_series(cfg, &PAIRS, grid, quad)
}

/// Evaluates a series at the non-negative frequencies of the grid conjugate
/// to `grid` and fills the negative ones from `χ[−ω] = χ[ω]*`, so the result
/// is exactly the spectrum of a real response.
pub fn on_conjugate_grid<F>(grid: &UniformTimeGrid, f: F) -> Result<SusceptibilitySeries>
where
    F: FnOnce(&[f64]) -> Result<SusceptibilitySeries>,
{
    grid.validate()?;
    let omega = grid.conjugate_frequencies();
    let half = grid.n / 2;
    let positive = f(&omega[..=half])?;
    if positive.omega.len() != half + 1 {
        return Err(Error::GridMismatch(format!(
            "expected {} non-negative samples, got {}",
            half + 1,
            positive.omega.len()
        )));
    }
    let extend = |v: &[Complex64]| -> Vec<Complex64> {
        (0..grid.n)
            .map(|k| if k <= half { v[k] } else { v[grid.n - k].conj() })
            .collect()
    };
    let components = positive
        .components
        .iter()
        .map(|c| ChiComponent {
            i: c.i,
            j: c.j,
            values: extend(&c.values),
            error: (0..grid.n)
                .map(|k| if k <= half { c.error[k] } else { c.error[grid.n - k] })
                .collect(),
        })
        .collect();
    Ok(SusceptibilitySeries {
        omega,
        components,
        ..positive
    })
}

/// Single partially transmitting mirror:
/// `χ[ω] = iħ∫₀^ω dω′/2π ω′(ω−ω′) α[ω′,ω−ω′]` with `α = 1 − ss′ + rr′`.
pub fn chi_single_mirror(m: &MirrorModel, hbar: f64, omega: f64, quad: &QuadratureConfig) -> Result<Complex64> {
    quad.validate()?;
    if omega == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let cfg = CavityConfig::new(1.0, hbar, m.clone(), MirrorModel::Transparent)?;
    let (lo, hi) = if omega > 0.0 { (0.0, omega) } else { (omega, 0.0) };
    let failure = std::cell::Cell::new(None);
    let f = |v: f64| {
        let u = omega - v;
        match (m.amplitudes(u), m.amplitudes(v)) {
            (Ok((ra, sa)), Ok((rb, sb))) => (1.0 - sa * sb + ra * rb) * (u * v),
            (Err(e), _) | (_, Err(e)) => {
                failure.set(Some(e));
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let r = integrate_pieces(f, &band_breaks(&cfg, omega, lo, hi), quad);
    let est = capture(&failure, r)?;
    Ok(est.value * Complex64::new(0.0, sign(omega) * hbar / (2.0 * PI)))
}

pub fn single_mirror_series(
    m: &MirrorModel,
    hbar: f64,
    grid: &[f64],
    quad: &QuadratureConfig,
) -> Result<SusceptibilitySeries> {
    let values: Vec<Result<Complex64>> = grid.par_iter().map(|&w| chi_single_mirror(m, hbar, w, quad)).collect();
    let values = values.into_iter().collect::<Result<Vec<_>>>()?;
    let zero = vec![Complex64::new(0.0, 0.0); grid.len()];
    let components = PAIRS
        .iter()
        .map(|&(i, j)| ChiComponent {
            i,
            j,
            values: if (i, j) == (1, 1) { values.clone() } else { zero.clone() },
            error: vec![0.0; grid.len()],
        })
        .collect();
    Ok(SusceptibilitySeries {
        omega: grid.to_vec(),
        components,
        method: ChiMethod::SingleMirror,
        tail_cutoff: None,
    })
}

/// Quasistatic susceptibilities `χ_ij[0]`, which equal `∂⟨F_i⟩/∂q_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuasistaticChi {
    /// `matrix[i−1][j−1] = χ_ij[0]`.
    pub matrix: [[f64; 2]; 2],
    pub error_bound: f64,
    /// Largest imaginary part encountered; zero up to quadrature error.
    pub imaginary_residual: f64,
}

/// `χ_ij[0] = 2∫₀^∞ dω/2π (iħω²/4)(γ^R[−ω,ω] − γ^R[ω,−ω])`.
pub fn chi_quasistatic(cfg: &CavityConfig, quad: &QuadratureConfig) -> Result<QuasistaticChi> {
    let mut out = QuasistaticChi {
        matrix: [[0.0; 2]; 2],
        error_bound: 0.0,
        imaginary_residual: 0.0,
    };
    for (i, j) in PAIRS {
        let (est, _) = chi_at(cfg, i, j, 0.0, quad)?;
        out.matrix[i - 1][j - 1] = est.value.re;
        out.error_bound = out.error_bound.max(est.error);
        out.imaginary_residual = out.imaginary_residual.max(est.value.im.abs());
    }
    Ok(out)
}

/// Constant power reflection coefficients for the resonance approximation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantReflection {
    pub r1_sq: f64,
    pub r2_sq: f64,
    pub q: f64,
    pub hbar: f64,
}

impl ConstantReflection {
    pub fn new(r1_sq: f64, r2_sq: f64, q: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("r1_sq", r1_sq), ("r2_sq", r2_sq)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        if !(q > 0.0) || !q.is_finite() || !(hbar > 0.0) || !hbar.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "q and hbar must be finite and positive, got q={q}, hbar={hbar}"
            )));
        }
        Ok(Self { r1_sq, r2_sq, q, hbar })
    }

    /// `r² = r₁²r₂²`.
    pub fn r_sq(&self) -> f64 {
        self.r1_sq * self.r2_sq
    }

    /// On-resonance enhancement `r₁²/(1 − r²)` of `χ₁₁` over `iħω³/6π`.
    pub fn enhancement(&self) -> f64 {
        self.r1_sq / (1.0 - self.r_sq())
    }
}

/// Resonance approximation of `χ_ij[ω]` for constant reflection:
/// `χ₁₁ = (iħω³/6π) r₁²/(1 − r²e^{2iωq})`,
/// `χ₂₁ = −(iħω³/6π) r²e^{iωq}/(1 − r²e^{2iωq})`.
pub fn resonance_chi(p: &ConstantReflection, i: usize, j: usize, omega: f64) -> Result<Complex64> {
    check_index(i)?;
    check_index(j)?;
    let e = Complex64::from_polar(1.0, omega * p.q);
    let den = 1.0 - p.r_sq() * e * e;
    if den.norm() < 1e-12 {
        return Err(Error::Divergence { omega });
    }
    let base = Complex64::new(0.0, p.hbar * omega.powi(3) / (6.0 * PI));
    Ok(match (i, j) {
        (1, 1) => base * p.r1_sq / den,
        (2, 2) => base * p.r2_sq / den,
        _ => -base * p.r_sq() * e / den,
    })
}

pub fn resonance_series(p: &ConstantReflection, grid: &[f64]) -> Result<SusceptibilitySeries> {
    let mut components = Vec::with_capacity(4);
    for (i, j) in PAIRS {
        let values = grid.iter().map(|&w| resonance_chi(p, i, j, w)).collect::<Result<Vec<_>>>()?;
        components.push(ChiComponent {
            i,
            j,
            values,
            error: vec![0.0; grid.len()],
        });
    }
    Ok(SusceptibilitySeries {
        omega: grid.to_vec(),
        components,
        method: ChiMethod::ResonanceApprox,
        tail_cutoff: None,
    })
}

/// One delayed derivative term of the force on a perfect mirror.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EchoTerm {
    /// Mirror feeling the force.
    pub target: usize,
    /// Mirror whose displacement is differentiated.
    pub source: usize,
    pub delay: f64,
    /// Coefficient of `d^p δq_source(t − delay)/dt^p`.
    pub weight: f64,
}

/// Force on a perfect mirror as a train of delayed time derivatives.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EchoTrain {
    pub derivative_order: u32,
    pub terms: Vec<EchoTerm>,
}

impl EchoTrain {
    /// Transfer function `Σ w (−iω)^p e^{iω·delay}` from `source` to `target`,
    /// at complex frequency.
    pub fn transfer(&self, target: usize, source: usize, omega: Complex64) -> Complex64 {
        let d = (Complex64::new(0.0, -1.0) * omega).powu(self.derivative_order);
        self.terms
            .iter()
            .filter(|t| t.target == target && t.source == source)
            .map(|t| t.weight * d * (Complex64::i() * omega * t.delay).exp())
            .sum()
    }
}

/// Third-derivative and velocity echo trains of the force on mirror 1 between
/// perfect mirrors, keeping `n_echoes` self and cross terms each. Mirror 2
/// follows by exchanging the indices.
pub fn perfect_mirror_echo_train(n_echoes: usize, q: f64, hbar: f64) -> Result<(EchoTrain, EchoTrain)> {
    if n_echoes == 0 {
        return Err(Error::InvalidParameter("n_echoes must be at least 1".into()));
    }
    let w3 = hbar / (6.0 * PI);
    let w1 = hbar * PI / (6.0 * q * q);
    let mut third = Vec::with_capacity(2 * n_echoes);
    let mut first = Vec::with_capacity(2 * n_echoes);
    for k in 0..n_echoes {
        let even = 2.0 * k as f64 * q;
        let odd = even + q;
        third.push(EchoTerm { target: 1, source: 1, delay: even, weight: w3 });
        third.push(EchoTerm { target: 1, source: 2, delay: odd, weight: -w3 });
        let self_weight = if k == 0 { 0.5 * w1 } else { w1 };
        first.push(EchoTerm { target: 1, source: 1, delay: even, weight: self_weight });
        first.push(EchoTerm { target: 1, source: 2, delay: odd, weight: -w1 });
    }
    Ok((
        EchoTrain { derivative_order: 3, terms: third },
        EchoTrain { derivative_order: 1, terms: first },
    ))
}

/// Infinite echo series for perfect mirrors summed in closed form.
///
/// At `ω = 0` the geometric sums telescope to `±ħπ/(12q³)`.
pub fn perfect_series_chi(q: f64, hbar: f64, i: usize, j: usize, omega: f64) -> Result<Complex64> {
    check_index(i)?;
    check_index(j)?;
    let static_value = hbar * PI / (12.0 * q.powi(3));
    if omega == 0.0 {
        let v = if i == j { static_value } else { -static_value };
        return Ok(Complex64::new(v, 0.0));
    }
    let e = Complex64::from_polar(1.0, omega * q);
    let den = 1.0 - e * e;
    if den.norm() < 1e-12 {
        return Err(Error::Divergence { omega });
    }
    let third = Complex64::new(0.0, hbar * omega.powi(3) / (6.0 * PI));
    let first = Complex64::new(0.0, -hbar * PI * omega / (6.0 * q * q));
    Ok(if i == j {
        third / den + first * 0.5 * (1.0 + e * e) / den
    } else {
        -(third + first) * e / den
    })
}

pub fn perfect_series(q: f64, hbar: f64, grid: &[f64]) -> Result<SusceptibilitySeries> {
    let mut components = Vec::with_capacity(4);
    for (i, j) in PAIRS {
        let values = grid
            .iter()
            .map(|&w| perfect_series_chi(q, hbar, i, j, w))
            .collect::<Result<Vec<_>>>()?;
        components.push(ChiComponent {
            i,
            j,
            values,
            error: vec![0.0; grid.len()],
        });
    }
    Ok(SusceptibilitySeries {
        omega: grid.to_vec(),
        components,
        method: ChiMethod::PerfectSeries,
        tail_cutoff: None,
    })
}

/// Transfer functions of the truncated echo trains (`n_echoes` self and cross
/// terms each) on a frequency grid. Finite trains stay bounded on resonance.
pub fn echo_train_series(n_echoes: usize, q: f64, hbar: f64, grid: &[f64]) -> Result<SusceptibilitySeries> {
    let (third, first) = perfect_mirror_echo_train(n_echoes, q, hbar)?;
    let transfer = |target: usize, source: usize, w: f64| {
        let z = Complex64::new(w, 0.0);
        third.transfer(target, source, z) + first.transfer(target, source, z)
    };
    let components = PAIRS
        .iter()
        .map(|&(i, j)| {
            // The trains list the force on mirror 1; mirror 2 by exchange.
            let (t, s) = if i == 1 { (1, j) } else { (1, 3 - j) };
            ChiComponent {
                i,
                j,
                values: grid.iter().map(|&w| transfer(t, s, w)).collect(),
                error: vec![0.0; grid.len()],
            }
        })
        .collect();
    Ok(SusceptibilitySeries {
        omega: grid.to_vec(),
        components,
        method: ChiMethod::PerfectSeries,
        tail_cutoff: None,
    })
}
