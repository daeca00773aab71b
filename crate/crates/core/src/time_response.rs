//! Mean motional forces for prescribed mirror trajectories.
//!
//! Trajectories are zero-padded, transformed, multiplied by `χ_ij[ω]` and
//! transformed back: `⟨δF_i[ω]⟩ = Σ_j χ_ij[ω] δq_j[ω]`. The padded grid holds
//! at least twice the trajectory span plus six cavity roundtrips, so echoes
//! do not wrap around into the reported window.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{spectrum_to_time, time_to_spectrum, SpectralSeries, UniformTimeGrid};
use crate::susceptibility::{ChiMethod, SusceptibilitySeries};

/// Displacement above which linear response is flagged, as a fraction of `q`.
pub const LINEAR_REGIME_FRACTION: f64 = 0.01;

/// Largest relative imaginary residue accepted in a response.
pub const RESPONSE_REALITY_TOLERANCE: f64 = 1e-10;

/// Echo windows report nothing below this fraction of the record's peak.
pub const ECHO_NOISE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub grid: UniformTimeGrid,
    pub dq1: Vec<f64>,
    pub dq2: Vec<f64>,
}

impl Trajectory {
    pub fn new(grid: UniformTimeGrid, dq1: Vec<f64>, dq2: Vec<f64>) -> Result<Self> {
        grid.validate()?;
        for (name, v) in [("dq1", &dq1), ("dq2", &dq2)] {
            if v.len() != grid.n {
                return Err(Error::GridMismatch(format!(
                    "{name} has {} samples, time grid has {}",
                    v.len(),
                    grid.n
                )));
            }
            if let Some(k) = v.iter().position(|x| !x.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} sample #{k} is not finite")));
            }
        }
        Ok(Self { grid, dq1, dq2 })
    }

    pub fn at_rest(grid: UniformTimeGrid) -> Result<Self> {
        Self::new(grid, vec![0.0; grid.n], vec![0.0; grid.n])
    }

    /// Gaussian displacement pulse of one mirror; `fwhm` is the full width at
    /// half maximum.
    pub fn gaussian_pulse(grid: UniformTimeGrid, mirror: usize, amplitude: f64, center: f64, fwhm: f64) -> Result<Self> {
        if !(fwhm > 0.0) {
            return Err(Error::InvalidParameter(format!("pulse width must be positive, got {fwhm}")));
        }
        let sigma = fwhm / (8.0 * 2f64.ln()).sqrt();
        let pulse: Vec<f64> = grid
            .times()
            .iter()
            .map(|&t| amplitude * (-0.5 * ((t - center) / sigma).powi(2)).exp())
            .collect();
        let rest = vec![0.0; grid.n];
        match mirror {
            1 => Self::new(grid, pulse, rest),
            2 => Self::new(grid, rest, pulse),
            _ => Err(Error::InvalidParameter(format!("mirror index must be 1 or 2, got {mirror}"))),
        }
    }

    pub fn max_displacement(&self) -> f64 {
        self.dq1.iter().chain(&self.dq2).fold(0.0, |m, x| m.max(x.abs()))
    }

    /// A warning when the displacement leaves the linear-response regime.
    pub fn linear_regime_warning(&self, q: f64) -> Option<String> {
        let max = self.max_displacement();
        (max > LINEAR_REGIME_FRACTION * q).then(|| {
            format!(
                "largest displacement {max:e} exceeds {}% of the mirror separation {q:e}",
                LINEAR_REGIME_FRACTION * 100.0
            )
        })
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            grid: self.grid,
            dq1: self.dq1.iter().map(|x| x * k).collect(),
            dq2: self.dq2.iter().map(|x| x * k).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResponseRecord {
    pub grid: UniformTimeGrid,
    pub df1: Vec<f64>,
    pub df2: Vec<f64>,
    pub method: ChiMethod,
    /// Size of the zero-padded transform grid.
    pub padded_n: usize,
    /// Relative imaginary residue of the force spectra before it was dropped.
    pub reality_residual: f64,
}

/// Transform grid for `grid`: same start and step, at least
/// `2·span + 12q` long, rounded up to a power of two.
pub fn padded_grid(grid: &UniformTimeGrid, q: f64) -> Result<UniformTimeGrid> {
    grid.validate()?;
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::InvalidParameter(format!("mirror separation must be positive, got {q}")));
    }
    let needed = ((2.0 * grid.span() + 12.0 * q) / grid.dt).ceil() as usize;
    UniformTimeGrid::new(grid.t0, grid.dt, needed.max(grid.n).next_power_of_two())
}

fn padded(samples: &[f64], n: usize) -> Vec<f64> {
    let mut v = samples.to_vec();
    v.resize(n, 0.0);
    v
}

/// Spectrum of real samples with the FFT roundoff between `x[ω]` and
/// `x[−ω]*` averaged away.
fn hermitian(mut x: SpectralSeries) -> SpectralSeries {
    let n = x.values.len();
    let original = x.values.clone();
    for k in 0..n {
        let partner = original[(n - k) % n].conj();
        x.values[k] = 0.5 * (original[k] + partner);
    }
    x
}

/// Forces `⟨δF_i(t)⟩` for `traj`; `chi` must hold all four components on the
/// grid conjugate to [`padded_grid`].
pub fn force_response(traj: &Trajectory, chi: &SusceptibilitySeries, q: f64) -> Result<ResponseRecord> {
    let grid = padded_grid(&traj.grid, q)?;
    let expected = grid.conjugate_frequencies();
    if chi.omega.len() != expected.len() {
        return Err(Error::GridMismatch(format!(
            "susceptibility has {} frequencies, padded grid needs {}",
            chi.omega.len(),
            expected.len()
        )));
    }
    let step = grid.frequency_step();
    if let Some(k) = chi
        .omega
        .iter()
        .zip(&expected)
        .position(|(w, e)| (w - e).abs() > 1e-9 * step.max(e.abs()))
    {
        return Err(Error::GridMismatch(format!(
            "susceptibility frequency #{k} is {}, padded grid expects {}",
            chi.omega[k], expected[k]
        )));
    }
    let component = |i: usize, j: usize| -> Result<&[Complex64]> {
        chi.get(i, j)
            .map(|c| c.values.as_slice())
            .ok_or_else(|| Error::GridMismatch(format!("susceptibility series lacks chi{i}{j}")))
    };

    let x1 = hermitian(time_to_spectrum("dq1", &padded(&traj.dq1, grid.n), &grid)?);
    let x2 = hermitian(time_to_spectrum("dq2", &padded(&traj.dq2, grid.n), &grid)?);
    let nyquist = grid.n / 2;
    let mut residual: f64 = 0.0;
    let mut forces = Vec::with_capacity(2);
    for i in [1usize, 2] {
        let (a, b) = (component(i, 1)?, component(i, 2)?);
        let mut values: Vec<Complex64> = (0..grid.n).map(|k| a[k] * x1.values[k] + b[k] * x2.values[k]).collect();
        let series = SpectralSeries::new(format!("dF{i}"), expected.clone(), values.clone())?;
        residual = residual.max(series.reality_residual_excluding(nyquist));
        // The Nyquist bin has no partner; only its real part is a real signal.
        values[nyquist] = Complex64::new(values[nyquist].re, 0.0);
        forces.push(SpectralSeries::new(format!("dF{i}"), expected.clone(), values)?);
    }
    if residual > RESPONSE_REALITY_TOLERANCE {
        return Err(Error::RealityViolation {
            residual,
            tolerance: RESPONSE_REALITY_TOLERANCE,
        });
    }
    let mut df: Vec<Vec<f64>> = Vec::with_capacity(2);
    for f in &forces {
        let mut t = spectrum_to_time(f, &grid)?;
        t.truncate(traj.grid.n);
        df.push(t);
    }
    let df2 = df.pop().expect("two forces");
    let df1 = df.pop().expect("two forces");
    Ok(ResponseRecord {
        grid: traj.grid,
        df1,
        df2,
        method: chi.method,
        padded_n: grid.n,
        reality_residual: residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EchoPeak {
    /// Echo index; the window is centred on `source_center + k·q`.
    pub k: usize,
    pub delay: f64,
    pub time: Option<f64>,
    /// Signed extremum in the window; `None` when below the noise floor.
    pub amplitude: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EchoTable {
    pub mirror: usize,
    pub peaks: Vec<EchoPeak>,
}

/// Signed extrema of both forces in windows of width `q/2` centred on
/// `source_center + k·q`, `k = 0..=n`.
///
/// Samples whose magnitudes agree to 1e−9 count as ties and the earliest wins.
pub fn extract_echoes(rec: &ResponseRecord, source_center: f64, q: f64, n: usize) -> Result<[EchoTable; 2]> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::InvalidParameter(format!("mirror separation must be positive, got {q}")));
    }
    let peak = rec.df1.iter().chain(&rec.df2).fold(0.0f64, |m, x| m.max(x.abs()));
    let floor = ECHO_NOISE_FLOOR * peak;
    let times = rec.grid.times();
    let table = |mirror: usize, samples: &[f64]| {
        let peaks = (0..=n)
            .map(|k| {
                let delay = k as f64 * q;
                let center = source_center + delay;
                let mut best: Option<usize> = None;
                for (m, &t) in times.iter().enumerate() {
                    if (t - center).abs() > 0.25 * q {
                        continue;
                    }
                    let v = samples[m].abs();
                    match best {
                        Some(b) if v <= samples[b].abs() * (1.0 + 1e-9) => {}
                        _ => best = Some(m),
                    }
                }
                match best {
                    Some(m) if samples[m].abs() > floor => EchoPeak {
                        k,
                        delay,
                        time: Some(times[m]),
                        amplitude: Some(samples[m]),
                    },
                    _ => EchoPeak {
                        k,
                        delay,
                        time: None,
                        amplitude: None,
                    },
                }
            })
            .collect();
        EchoTable { mirror, peaks }
    };
    Ok([table(1, &rec.df1), table(2, &rec.df2)])
}
