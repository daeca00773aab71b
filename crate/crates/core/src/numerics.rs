//! Quadrature and discrete spectral transforms shared by the physics modules.
//!
//! Finite intervals use adaptive 21-point Gauss–Kronrod panels. Semi-infinite
//! integrals of oscillating integrands are split at `tail_cutoff`: the core is
//! integrated adaptively, the remainder is partitioned into half periods of the
//! known carrier `e^{i·phase_rate·ω}` and the resulting alternating partial sums
//! are accelerated with Euler's transform (repeated averaging).
//!
//! Transforms follow `f(t) = ∫ dω/2π f[ω] e^{-iωt}`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and tail controls for every integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Frequency beyond which semi-infinite integrals switch to tail summation.
    pub tail_cutoff: f64,
    /// Number of half-period segments summed in an oscillatory tail.
    pub tail_half_periods: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self::spectra()
    }
}

impl QuadratureConfig {
    /// Settings for exact matrix and trace identities.
    pub fn identities() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-14,
            max_subdivisions: 4000,
            tail_cutoff: 200.0,
            tail_half_periods: 40,
        }
    }

    /// Settings for physical spectra, limited by tail truncation.
    pub fn spectra() -> Self {
        Self {
            rel_tol: 1e-6,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
            tail_cutoff: 200.0,
            tail_half_periods: 40,
        }
    }

    pub fn with_tail_cutoff(mut self, tail_cutoff: f64) -> Self {
        self.tail_cutoff = tail_cutoff;
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "rel_tol must lie in (0, 1), got {}",
                self.rel_tol
            )));
        }
        if !(self.abs_tol >= 0.0) || !self.abs_tol.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "abs_tol must be finite and non-negative, got {}",
                self.abs_tol
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidParameter(
                "max_subdivisions must be positive".into(),
            ));
        }
        if !(self.tail_cutoff > 0.0) || !self.tail_cutoff.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "tail_cutoff must be finite and positive, got {}",
                self.tail_cutoff
            )));
        }
        Ok(())
    }

    fn tolerance(&self, value: Complex64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.norm())
    }
}

/// Result of a quadrature together with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

impl Estimate {
    pub fn zero() -> Self {
        Self {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evaluations: 0,
        }
    }

    fn add(self, other: Estimate) -> Estimate {
        Estimate {
            value: self.value + other.value,
            error: self.error + other.error,
            evaluations: self.evaluations + other.evaluations,
        }
    }

    fn scale(self, factor: f64) -> Estimate {
        Estimate {
            value: self.value * factor,
            error: self.error * factor.abs(),
            evaluations: self.evaluations,
        }
    }
}

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_22,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_725,
    0.054_755_896_574_351_995,
    0.075_039_674_810_919_96,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_84,
    0.134_709_217_311_473_34,
    0.142_775_938_577_060_09,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

/// One Gauss–Kronrod panel: (kronrod estimate, |kronrod - gauss|).
fn gk21<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    for k in 0..10 {
        let dx = half * XGK[k];
        let pair = f(center - dx) + f(center + dx);
        kronrod += pair * WGK[k];
        if k % 2 == 1 {
            gauss += pair * WG[k / 2];
        }
    }
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    (kronrod, (kronrod - gauss).norm())
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    order: usize,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    // Largest error first; ties resolved by creation order for reproducibility.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.order.cmp(&self.order))
    }
}

/// Adaptive Gauss–Kronrod integration of a complex integrand over `[a, b]`.
pub fn integrate_finite<F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64,
{
    if !(a <= b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "integration bounds must be finite with a <= b, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(Estimate::zero());
    }

    let (value, error) = gk21(&f, a, b);
    let mut evaluations = 21;
    let mut heap = BinaryHeap::new();
    let mut order = 0usize;
    heap.push(Panel {
        a,
        b,
        value,
        error,
        order,
    });
    let mut total = value;
    let mut total_error = error;

    let mut subdivisions = 1;
    loop {
        if !total.re.is_finite() || !total.im.is_finite() {
            return Err(non_convergence(a, b, total, f64::INFINITY));
        }
        if total_error <= cfg.tolerance(total) {
            break;
        }
        if subdivisions >= cfg.max_subdivisions {
            let (value, error) = resum(&heap);
            return Err(non_convergence(a, b, value, error));
        }
        let worst = heap.pop().expect("panel heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel cannot be split further in floating point.
            heap.push(worst);
            let (value, error) = resum(&heap);
            return Err(non_convergence(a, b, value, error));
        }
        let (left, left_err) = gk21(&f, worst.a, mid);
        let (right, right_err) = gk21(&f, mid, worst.b);
        evaluations += 42;
        total += left + right - worst.value;
        total_error += left_err + right_err - worst.error;
        order += 1;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: left,
            error: left_err,
            order,
        });
        order += 1;
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: right,
            error: right_err,
            order,
        });
        subdivisions += 1;
    }

    let (value, error) = resum(&heap);
    Ok(Estimate {
        value,
        error,
        evaluations,
    })
}

/// Sum panels in increasing abscissa so the result does not depend on the
/// order in which panels were refined.
fn resum(heap: &BinaryHeap<Panel>) -> (Complex64, f64) {
    let mut panels: Vec<&Panel> = heap.iter().collect();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    panels.iter().fold((Complex64::new(0.0, 0.0), 0.0), |acc, p| {
        (acc.0 + p.value, acc.1 + p.error)
    })
}

fn non_convergence(a: f64, b: f64, value: Complex64, bound: f64) -> Error {
    Error::NonConvergence {
        lower: a,
        upper: b,
        estimate_re: value.re,
        estimate_im: value.im,
        bound,
    }
}

/// Integral of `f` over `[a, ∞)` where `f` carries a carrier `e^{i·phase_rate·ω}`.
///
/// With `phase_rate == 0` the tail beyond `tail_cutoff` is mapped onto a finite
/// interval by `ω = L + t/(1-t)`, which only converges for decaying integrands.
pub fn integrate_semi_infinite_oscillatory<F>(
    f: F,
    a: f64,
    phase_rate: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64,
{
    cfg.validate()?;
    if !a.is_finite() || !phase_rate.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "semi-infinite integral needs finite start and phase rate, got a={a}, rate={phase_rate}"
        )));
    }
    let cutoff = cfg.tail_cutoff.max(a);
    let core = integrate_finite(&f, a, cutoff, cfg)?;

    if phase_rate == 0.0 {
        let mapped = |t: f64| {
            let one_minus = 1.0 - t;
            let x = cutoff + t / one_minus;
            f(x) / (one_minus * one_minus)
        };
        let tail_cfg = QuadratureConfig {
            abs_tol: cfg.abs_tol.max(0.1 * cfg.rel_tol * core.value.norm()),
            ..*cfg
        };
        let tail = integrate_finite(mapped, 0.0, 1.0, &tail_cfg).map_err(|e| match e {
            Error::NonConvergence {
                estimate_re,
                estimate_im,
                bound,
                ..
            } => Error::TailNonConvergence {
                start: cutoff,
                partial_re: core.value.re + estimate_re,
                partial_im: core.value.im + estimate_im,
                tail_estimate: bound,
            },
            other => other,
        })?;
        return Ok(core.add(tail));
    }

    let tail = oscillatory_tail(&f, cutoff, phase_rate, cfg, core.value)?;
    Ok(core.add(tail))
}

/// Integral over `(-∞, b]`, obtained by reflecting onto `[−b, ∞)`.
pub fn integrate_lower_semi_infinite_oscillatory<F>(
    f: F,
    b: f64,
    phase_rate: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64,
{
    integrate_semi_infinite_oscillatory(|x| f(-x), -b, -phase_rate, cfg)
}

fn oscillatory_tail<F>(
    f: &F,
    start: f64,
    phase_rate: f64,
    cfg: &QuadratureConfig,
    core: Complex64,
) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64,
{
    let segments = cfg.tail_half_periods;
    if segments == 0 {
        return Ok(Estimate::zero());
    }
    let half_period = PI / phase_rate.abs();
    let seg_cfg = QuadratureConfig {
        abs_tol: cfg.abs_tol.max(0.01 * cfg.rel_tol * core.norm()),
        ..*cfg
    };

    let mut partial = Vec::with_capacity(segments);
    let mut running = Complex64::new(0.0, 0.0);
    let mut quad_error = 0.0;
    let mut evaluations = 0;
    for k in 0..segments {
        let lo = start + k as f64 * half_period;
        let seg = integrate_finite(f, lo, lo + half_period, &seg_cfg).map_err(|e| match e {
            Error::NonConvergence { bound, .. } => Error::TailNonConvergence {
                start,
                partial_re: core.re + running.re,
                partial_im: core.im + running.im,
                tail_estimate: bound,
            },
            other => other,
        })?;
        running += seg.value;
        quad_error += seg.error;
        evaluations += seg.evaluations;
        partial.push(running);
    }

    let (value, accel_error) = euler_accelerate(&partial);
    let total = core + value;
    let error = quad_error + accel_error;
    // The acceleration stage may lag the panel tolerance, but a sequence that
    // has not settled to within 1000x of it is not alternating.
    if !value.re.is_finite() || !value.im.is_finite() || accel_error > 1e3 * cfg.tolerance(total) {
        return Err(Error::TailNonConvergence {
            start,
            partial_re: total.re,
            partial_im: total.im,
            tail_estimate: accel_error,
        });
    }
    Ok(Estimate {
        value,
        error,
        evaluations,
    })
}

/// Euler transform of a sequence of partial sums by repeated averaging.
///
/// Returns the accelerated limit and the change between the last two levels.
pub fn euler_accelerate(partial: &[Complex64]) -> (Complex64, f64) {
    match partial.len() {
        0 => return (Complex64::new(0.0, 0.0), 0.0),
        1 => return (partial[0], partial[0].norm()),
        _ => {}
    }
    let mut row: Vec<Complex64> = partial.to_vec();
    let mut previous = row[row.len() - 1];
    while row.len() > 1 {
        previous = row[row.len() - 1];
        row = row.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    let value = row[0];
    (value, (value - previous).norm())
}

/// Uniform sampling grid in time, `t_m = t0 + m·dt` for `m < n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniformTimeGrid {
    pub t0: f64,
    pub dt: f64,
    pub n: usize,
}

impl UniformTimeGrid {
    pub fn new(t0: f64, dt: f64, n: usize) -> Result<Self> {
        let grid = Self { t0, dt, n };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() || !self.t0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "time grid needs finite t0 and dt > 0, got t0={}, dt={}",
                self.t0, self.dt
            )));
        }
        if self.n < 2 || !self.n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "time grid size must be a power of two >= 2, got {}",
                self.n
            )));
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n).map(|m| self.t0 + m as f64 * self.dt).collect()
    }

    pub fn span(&self) -> f64 {
        self.n as f64 * self.dt
    }

    /// Spacing `2π/(n·dt)` of the conjugate frequency grid.
    pub fn frequency_step(&self) -> f64 {
        2.0 * PI / (self.n as f64 * self.dt)
    }

    /// Conjugate frequencies in FFT order: `0, Δω, …, (n/2)Δω, −(n/2−1)Δω, …, −Δω`.
    pub fn conjugate_frequencies(&self) -> Vec<f64> {
        let step = self.frequency_step();
        let n = self.n as i64;
        (0..n)
            .map(|k| {
                let signed = if k <= n / 2 { k } else { k - n };
                signed as f64 * step
            })
            .collect()
    }
}

/// Complex samples of a named spectral quantity on a frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSeries {
    pub label: String,
    pub omega: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl SpectralSeries {
    pub fn new(label: impl Into<String>, omega: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if omega.len() != values.len() {
            return Err(Error::GridMismatch(format!(
                "{} frequencies but {} values",
                omega.len(),
                values.len()
            )));
        }
        Ok(Self {
            label: label.into(),
            omega,
            values,
        })
    }

    /// Sample `f` on the grid conjugate to `grid`.
    pub fn sample_conjugate<F>(label: impl Into<String>, grid: &UniformTimeGrid, f: F) -> Self
    where
        F: Fn(f64) -> Complex64,
    {
        let omega = grid.conjugate_frequencies();
        let values = omega.iter().map(|&w| f(w)).collect();
        Self {
            label: label.into(),
            omega,
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn check_conjugate_grid(&self, grid: &UniformTimeGrid) -> Result<()> {
        if self.len() != grid.n {
            return Err(Error::GridMismatch(format!(
                "series '{}' has {} samples, time grid has {}",
                self.label,
                self.len(),
                grid.n
            )));
        }
        let step = grid.frequency_step();
        for (k, (&w, expected)) in self
            .omega
            .iter()
            .zip(grid.conjugate_frequencies())
            .enumerate()
        {
            if (w - expected).abs() > 1e-9 * step.max(expected.abs()) {
                return Err(Error::GridMismatch(format!(
                    "series '{}' frequency #{k} is {w}, conjugate grid expects {expected}",
                    self.label
                )));
            }
        }
        Ok(())
    }

    /// Largest `|f[−ω] − f[ω]*|` relative to the largest sample.
    pub fn reality_residual(&self) -> f64 {
        self.reality_residual_excluding(usize::MAX)
    }

    /// As [`Self::reality_residual`], skipping sample `skip` (typically the
    /// unpaired Nyquist bin).
    pub fn reality_residual_excluding(&self, skip: usize) -> f64 {
        let n = self.values.len();
        let scale = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        (0..n)
            .filter(|&k| k != skip)
            .map(|k| (self.values[k] - self.values[(n - k) % n].conj()).norm())
            .fold(0.0, f64::max)
            / scale
    }
}

const REALITY_TOLERANCE: f64 = 1e-8;

/// Inverse transform of a spectrum sampled on the grid conjugate to `grid`.
pub fn spectrum_to_time(series: &SpectralSeries, grid: &UniformTimeGrid) -> Result<Vec<f64>> {
    grid.validate()?;
    series.check_conjugate_grid(grid)?;
    let residual = series.reality_residual();
    if residual > REALITY_TOLERANCE {
        return Err(Error::RealityViolation {
            residual,
            tolerance: REALITY_TOLERANCE,
        });
    }

    let mut buffer: Vec<Complex64> = series
        .values
        .iter()
        .zip(&series.omega)
        .map(|(v, &w)| v * Complex64::from_polar(1.0, -w * grid.t0))
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(grid.n).process(&mut buffer);
    let norm = 1.0 / (grid.n as f64 * grid.dt);
    Ok(buffer.iter().map(|z| z.re * norm).collect())
}

/// Forward transform `f[ω] = ∫ dt f(t) e^{iωt}` on the conjugate grid.
pub fn time_to_spectrum(
    label: impl Into<String>,
    samples: &[f64],
    grid: &UniformTimeGrid,
) -> Result<SpectralSeries> {
    grid.validate()?;
    if samples.len() != grid.n {
        return Err(Error::GridMismatch(format!(
            "{} samples for a grid of {}",
            samples.len(),
            grid.n
        )));
    }
    let mut buffer: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(grid.n).process(&mut buffer);
    let omega = grid.conjugate_frequencies();
    let values = buffer
        .iter()
        .zip(&omega)
        .map(|(z, &w)| z * grid.dt * Complex64::from_polar(1.0, w * grid.t0))
        .collect();
    SpectralSeries::new(label, omega, values)
}

/// Real part of a causal function reconstructed from its imaginary part.
///
/// Assumes the reality condition `g[−ω] = g[ω]*` and `g → asymptote` at large
/// frequency, so that
/// `Re g(ω) − asymptote = (2/π) ∫₀^∞ [ω'Im g(ω') − ω Im g(ω)]/(ω'² − ω²) dω'`.
/// The subtracted form removes the principal-value singularity.
pub fn dispersion_real_part<F>(
    imag: F,
    omega: f64,
    asymptote: f64,
    upper: Option<f64>,
    cfg: &QuadratureConfig,
) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    let w = omega.abs();
    let g_w = w * imag(w);
    let integrand = |x: f64| {
        let denom = x * x - w * w;
        if denom == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::new((x * imag(x) - g_w) / denom, 0.0)
    };
    let split = if w > 0.0 { 2.0 * w } else { 0.0 };
    let mut total = integrate_finite(integrand, 0.0, w, cfg)?;
    total = total.add(integrate_finite(integrand, w, split, cfg)?);
    match upper {
        Some(limit) if limit > split => {
            total = total.add(integrate_finite(integrand, split, limit, cfg)?);
        }
        Some(_) => {}
        None => {
            total = total.add(integrate_semi_infinite_oscillatory(integrand, split, 0.0, cfg)?);
        }
    }
    let mut result = total.scale(2.0 / PI);
    result.value += asymptote;
    Ok(result)
}

/// Discrete Hilbert transform on a uniform symmetric grid (Maclaurin's rule).
///
/// Given `Im g` at `omega[k] = k·Δ` for `k = −m..=m`, returns the reconstructed
/// `Re g` at every node, summing only nodes of opposite parity.
pub fn maclaurin_real_part(omega: &[f64], imag: &[f64]) -> Result<Vec<f64>> {
    if omega.len() != imag.len() || omega.len() < 3 {
        return Err(Error::GridMismatch(
            "Maclaurin transform needs matching grids with at least 3 nodes".into(),
        ));
    }
    let step = omega[1] - omega[0];
    for pair in omega.windows(2) {
        if ((pair[1] - pair[0]) - step).abs() > 1e-9 * step.abs() {
            return Err(Error::GridMismatch(
                "Maclaurin transform needs a uniform grid".into(),
            ));
        }
    }
    let n = omega.len();
    Ok((0..n)
        .map(|k| {
            let mut acc = 0.0;
            let mut j = if k % 2 == 0 { 1 } else { 0 };
            while j < n {
                acc += imag[j] / (omega[j] - omega[k]);
                j += 2;
            }
            2.0 * step * acc / PI
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn finite_polynomials_are_exact() {
        let cfg = QuadratureConfig::identities();
        let r = integrate_finite(c, 0.0, 1.0, &cfg).unwrap();
        assert!((r.value - c(0.5)).norm() < 1e-15);
        let r = integrate_finite(|x| c(x * (1.0 - x)), 0.0, 1.0, &cfg).unwrap();
        assert!((r.value - c(1.0 / 6.0)).norm() < 1e-15);
    }

    #[test]
    fn full_period_of_exponential_vanishes() {
        let cfg = QuadratureConfig::identities();
        let r = integrate_finite(|x| Complex64::from_polar(1.0, x), 0.0, 2.0 * PI, &cfg).unwrap();
        assert!(r.value.norm() < 1e-14, "{:?}", r);
    }

    #[test]
    fn finite_reports_non_convergence_with_estimate() {
        let cfg = QuadratureConfig {
            max_subdivisions: 3,
            ..QuadratureConfig::identities()
        };
        let err = integrate_finite(|x| c(1.0 / x.sqrt()), 0.0, 1.0, &cfg).unwrap_err();
        match err {
            Error::NonConvergence {
                estimate_re, bound, ..
            } => {
                assert!(estimate_re > 1.0 && estimate_re < 2.0);
                assert!(bound > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn finite_rejects_reversed_bounds() {
        let cfg = QuadratureConfig::identities();
        assert!(integrate_finite(c, 1.0, 0.0, &cfg).is_err());
    }

    #[test]
    fn damped_cosine_tail() {
        let cfg = QuadratureConfig::identities().with_tail_cutoff(20.0);
        let r = integrate_semi_infinite_oscillatory(
            |x| c((-x).exp() * (10.0 * x).cos()),
            0.0,
            10.0,
            &cfg,
        )
        .unwrap();
        assert!((r.value - c(1.0 / 101.0)).norm() < 1e-12);
    }

    #[test]
    fn decaying_exponential_without_carrier() {
        let cfg = QuadratureConfig::identities().with_tail_cutoff(5.0);
        let r = integrate_semi_infinite_oscillatory(|x| c((-x).exp()), 0.0, 0.0, &cfg).unwrap();
        assert!((r.value - c(1.0)).norm() < 1e-10, "{:?}", r);
    }

    #[test]
    fn constant_without_carrier_fails() {
        let cfg = QuadratureConfig::spectra().with_tail_cutoff(5.0);
        let err = integrate_semi_infinite_oscillatory(|_| c(1.0), 0.0, 0.0, &cfg).unwrap_err();
        assert!(matches!(err, Error::TailNonConvergence { .. }), "{err:?}");
    }

    #[test]
    fn constant_with_carrier_rate_fails() {
        let cfg = QuadratureConfig::spectra().with_tail_cutoff(5.0);
        let err = integrate_semi_infinite_oscillatory(|_| c(1.0), 0.0, 2.0, &cfg).unwrap_err();
        assert!(matches!(err, Error::TailNonConvergence { .. }), "{err:?}");
    }

    fn simpson(f: impl Fn(f64) -> Complex64, a: f64, b: f64, n: usize) -> Complex64 {
        let h = (b - a) / n as f64;
        let mut acc = f(a) + f(b);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += f(a + k as f64 * h) * w;
        }
        acc * (h / 3.0)
    }

    #[test]
    fn lorentzian_carrier_matches_brute_force_simpson() {
        let f = |x: f64| Complex64::from_polar(1.0, 2.0 * x) / (1.0 + x * x);
        let reference = simpson(f, 0.0, 1e3, 4_000_000);
        let cfg = QuadratureConfig::identities().with_tail_cutoff(30.0);
        let r = integrate_semi_infinite_oscillatory(f, 0.0, 2.0, &cfg).unwrap();
        assert!((r.value - reference).norm() < 1e-6, "{:?} vs {reference}", r.value);
        // The real part has the closed form (π/2)e^{-2}.
        assert!((r.value.re - 0.5 * PI * (-2.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn lower_semi_infinite_reflects() {
        let cfg = QuadratureConfig::identities().with_tail_cutoff(30.0);
        let r = integrate_lower_semi_infinite_oscillatory(|x| c(x.exp()), 0.0, 0.0, &cfg).unwrap();
        assert!((r.value - c(1.0)).norm() < 1e-10);
    }

    #[test]
    fn euler_sums_alternating_harmonic_series() {
        let mut partial = Vec::new();
        let mut s = Complex64::new(0.0, 0.0);
        for k in 0..30 {
            s += c(if k % 2 == 0 { 1.0 } else { -1.0 } / (k as f64 + 1.0));
            partial.push(s);
        }
        let (value, _) = euler_accelerate(&partial);
        assert!((value.re - 2f64.ln()).abs() < 1e-8);
    }

    #[test]
    fn conjugate_grid_layout() {
        let grid = UniformTimeGrid::new(0.0, 0.5, 8).unwrap();
        let w = grid.conjugate_frequencies();
        let step = 2.0 * PI / 4.0;
        assert_eq!(w.len(), 8);
        assert!((w[1] - step).abs() < 1e-15);
        assert!((w[4] - 4.0 * step).abs() < 1e-15);
        assert!((w[7] + step).abs() < 1e-15);
        assert!(UniformTimeGrid::new(0.0, 0.1, 6).is_err());
        assert!(UniformTimeGrid::new(0.0, 0.0, 8).is_err());
    }

    #[test]
    fn flat_spectrum_is_an_impulse() {
        let grid = UniformTimeGrid::new(0.0, 0.25, 16).unwrap();
        let s = SpectralSeries::sample_conjugate("flat", &grid, |_| c(1.0));
        let t = spectrum_to_time(&s, &grid).unwrap();
        assert!((t[0] - 1.0 / grid.dt).abs() < 1e-12);
        assert!(t[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn spike_at_zero_is_constant() {
        let grid = UniformTimeGrid::new(-3.0, 0.1, 32).unwrap();
        let spike = grid.n as f64 * grid.dt;
        let s = SpectralSeries::sample_conjugate("spike", &grid, |w| {
            if w == 0.0 {
                c(spike)
            } else {
                c(0.0)
            }
        });
        let t = spectrum_to_time(&s, &grid).unwrap();
        assert!(t.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn gaussian_transform_pair() {
        let grid = UniformTimeGrid::new(-25.6, 0.1, 512).unwrap();
        let s = SpectralSeries::sample_conjugate("gauss", &grid, |w| c((-0.5 * w * w).exp()));
        let t = spectrum_to_time(&s, &grid).unwrap();
        let peak = 1.0 / (2.0 * PI).sqrt();
        for (x, v) in grid.times().iter().zip(&t) {
            let exact = peak * (-0.5 * x * x).exp();
            assert!((v - exact).abs() < 1e-6 * peak, "t={x}: {v} vs {exact}");
        }
    }

    #[test]
    fn reality_violation_is_rejected() {
        let grid = UniformTimeGrid::new(0.0, 0.1, 16).unwrap();
        let s = SpectralSeries::sample_conjugate("odd", &grid, |w| Complex64::new(0.0, 1.0 + w));
        assert!(matches!(
            spectrum_to_time(&s, &grid),
            Err(Error::RealityViolation { .. })
        ));
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let grid = UniformTimeGrid::new(0.0, 0.1, 16).unwrap();
        let other = UniformTimeGrid::new(0.0, 0.2, 16).unwrap();
        let s = SpectralSeries::sample_conjugate("x", &other, |_| c(1.0));
        assert!(matches!(
            spectrum_to_time(&s, &grid),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn dispersion_of_lorentzian_response() {
        // g = -1/(1 - iω): Re g = -1/(1+ω²), Im g = -ω/(1+ω²).
        let cfg = QuadratureConfig::identities().with_tail_cutoff(50.0);
        for &w in &[0.0, 0.3, 1.0, 4.0] {
            let r = dispersion_real_part(|x| -x / (1.0 + x * x), w, 0.0, None, &cfg).unwrap();
            let exact = -1.0 / (1.0 + w * w);
            assert!((r.value.re - exact).abs() < 1e-8, "ω={w}: {} vs {exact}", r.value.re);
        }
    }

    #[test]
    fn maclaurin_reconstructs_lorentzian() {
        let m = 4000;
        let step = 0.01;
        let omega: Vec<f64> = (-m..=m).map(|k| k as f64 * step).collect();
        let imag: Vec<f64> = omega.iter().map(|w| -w / (1.0 + w * w)).collect();
        let re = maclaurin_real_part(&omega, &imag).unwrap();
        let k0 = m as usize;
        // Truncation at |ω| = 40 limits accuracy to ~1/40²-ish tails.
        assert!((re[k0] + 1.0).abs() < 2e-2);
        assert!((re[k0 + 100] + 0.5).abs() < 2e-2);
    }
}
