//! Scenario documents read by the `vcf` binary.
//!
//! Quantities are given in natural units (`c = 1`, lengths measured in time)
//! or in SI units. Every computation runs on the dimensionless cavity with
//! `q = 1` and `ħ = 1`; [`Scales`] converts at the boundary.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cavity::CavityConfig;
use crate::error::{Error, Result};
use crate::mirror::{MirrorModel, MirrorTable};
use crate::numerics::{QuadratureConfig, UniformTimeGrid};
use crate::susceptibility::{ChiMethod, ConstantReflection};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const HBAR_SI: f64 = 1.054_571_817e-34;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    #[default]
    Natural,
    Si,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MirrorSpec {
    Lorentzian { omega_c: f64 },
    IdealBand { cutoff: f64 },
    Transparent,
    /// CSV `omega,re_r,im_r,re_s,im_s`; a relative path is resolved against
    /// the directory of the scenario file.
    Tabulated { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavitySpec {
    /// Mirror separation: a time in natural units, metres in SI.
    pub q: f64,
    /// Defaults to 1 in natural units and to the CODATA value in SI.
    #[serde(default)]
    pub hbar: Option<f64>,
    pub mirror1: MirrorSpec,
    pub mirror2: MirrorSpec,
}

/// `count` equally spaced frequencies from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencyGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl FrequencyGrid {
    pub fn points(&self) -> Result<Vec<f64>> {
        if !self.min.is_finite() || !self.max.is_finite() || self.min > self.max {
            return Err(Error::InvalidParameter(format!(
                "frequency_grid needs finite min <= max, got [{}, {}]",
                self.min, self.max
            )));
        }
        match self.count {
            0 => Err(Error::InvalidParameter("frequency_grid.count must be positive".into())),
            1 => Ok(vec![self.min]),
            n => {
                let step = (self.max - self.min) / (n - 1) as f64;
                Ok((0..n)
                    .map(|k| if k == n - 1 { self.max } else { self.min + k as f64 * step })
                    .collect())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StaticForceOptions {
    /// Accept the non-causal ideal band (evaluated on the imaginary axis).
    #[serde(default)]
    pub allow_diagnostic: bool,
    #[serde(default)]
    pub gradient: bool,
}

/// Constant power reflections for the resonance approximation.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReflectionSpec {
    pub r1_sq: f64,
    pub r2_sq: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SusceptibilityOptions {
    #[serde(default = "full_method")]
    pub method: ChiMethod,
}

impl Default for SusceptibilityOptions {
    fn default() -> Self {
        Self { method: ChiMethod::Full }
    }
}

fn full_method() -> ChiMethod {
    ChiMethod::Full
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TrajectorySpec {
    /// Gaussian displacement of one mirror; `fwhm` is the full width at half
    /// maximum.
    GaussianPulse {
        mirror: usize,
        amplitude: f64,
        center: f64,
        fwhm: f64,
    },
    /// CSV `t,dq1,dq2` sampled on the scenario's time grid.
    Samples { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EchoSpec {
    /// Echo windows are centred on `source_center + k·q` for `k = 0..=count`.
    pub count: usize,
    pub source_center: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeResponseOptions {
    pub trajectory: TrajectorySpec,
    #[serde(default = "full_method")]
    pub method: ChiMethod,
    #[serde(default)]
    pub echoes: Option<EchoSpec>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonanceCompareOptions {
    /// Resonance indices `k`, compared at `ω* = kπ/q`.
    #[serde(default = "first_resonances")]
    pub resonances: Vec<u32>,
}

impl Default for ResonanceCompareOptions {
    fn default() -> Self {
        Self {
            resonances: first_resonances(),
        }
    }
}

fn first_resonances() -> Vec<u32> {
    (1..=5).collect()
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub units: Units,
    pub cavity: CavitySpec,
    #[serde(default)]
    pub frequency_grid: Option<FrequencyGrid>,
    /// Times in seconds (SI) or natural time units.
    #[serde(default)]
    pub time_grid: Option<UniformTimeGrid>,
    /// Tolerances for the dimensionless problem; `tail_cutoff` is in units
    /// of `1/q`.
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    /// Overrides the mirrors' own reflection in the resonance approximation.
    #[serde(default)]
    pub reflection: Option<ReflectionSpec>,
    #[serde(default)]
    pub static_force: StaticForceOptions,
    #[serde(default)]
    pub susceptibility: SusceptibilityOptions,
    #[serde(default)]
    pub time_response: Option<TimeResponseOptions>,
    #[serde(default)]
    pub resonance_compare: ResonanceCompareOptions,
}

/// Conversion between the scenario's units and the dimensionless problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scales {
    pub units: Units,
    /// Mirror separation as a time.
    pub q: f64,
    pub hbar: f64,
}

impl Scales {
    fn c(&self) -> f64 {
        match self.units {
            Units::Natural => 1.0,
            Units::Si => SPEED_OF_LIGHT,
        }
    }

    pub fn frequency_in(&self, omega: f64) -> f64 {
        omega * self.q
    }

    pub fn frequency_out(&self, omega: f64) -> f64 {
        omega / self.q
    }

    pub fn time_in(&self, t: f64) -> f64 {
        t / self.q
    }

    pub fn time_out(&self, t: f64) -> f64 {
        t * self.q
    }

    pub fn length_in(&self, x: f64) -> f64 {
        x / (self.c() * self.q)
    }

    pub fn length_out(&self, x: f64) -> f64 {
        x * self.c() * self.q
    }

    /// Force unit `ħ/q²`, divided by `c` in SI.
    pub fn force_out(&self, f: f64) -> f64 {
        f * self.hbar / (self.q * self.q * self.c())
    }

    /// Force per displacement, `ħ/q³`, divided by `c²` in SI.
    pub fn chi_out(&self, chi: f64) -> f64 {
        chi * self.hbar / (self.q.powi(3) * self.c() * self.c())
    }

    /// Force noise spectral density, `ħ²/q³`, divided by `c²` in SI.
    pub fn noise_out(&self, c: f64) -> f64 {
        c * self.hbar * self.hbar / (self.q.powi(3) * self.c() * self.c())
    }
}

/// The dimensionless problem together with its scales.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub cavity: CavityConfig,
    pub scales: Scales,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite and positive, got {v}")))
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Dimensionless cavity; `base` resolves relative table paths.
    pub fn scenario(&self, base: &Path) -> Result<Scenario> {
        let c = match self.units {
            Units::Natural => 1.0,
            Units::Si => SPEED_OF_LIGHT,
        };
        let q = positive("cavity.q", self.cavity.q)? / c;
        let hbar = match (self.cavity.hbar, self.units) {
            (Some(h), _) => positive("cavity.hbar", h)?,
            (None, Units::Natural) => 1.0,
            (None, Units::Si) => HBAR_SI,
        };
        let scales = Scales {
            units: self.units,
            q,
            hbar,
        };
        let m1 = mirror(&self.cavity.mirror1, &scales, base)?;
        let m2 = mirror(&self.cavity.mirror2, &scales, base)?;
        self.quadrature.validate()?;
        Ok(Scenario {
            cavity: CavityConfig::new(1.0, 1.0, m1, m2)?,
            scales,
        })
    }

    pub fn quadrature(&self) -> QuadratureConfig {
        self.quadrature
    }

    /// Frequency grid converted to the dimensionless problem.
    pub fn frequencies(&self, scales: &Scales) -> Result<Vec<f64>> {
        let grid = self
            .frequency_grid
            .ok_or_else(|| Error::InvalidParameter("this command needs a frequency_grid".into()))?;
        Ok(grid.points()?.into_iter().map(|w| scales.frequency_in(w)).collect())
    }

    /// Time grid converted to the dimensionless problem.
    pub fn time_grid(&self, scales: &Scales) -> Result<UniformTimeGrid> {
        let g = self
            .time_grid
            .ok_or_else(|| Error::InvalidParameter("this command needs a time_grid".into()))?;
        let grid = UniformTimeGrid::new(scales.time_in(g.t0), scales.time_in(g.dt), g.n)?;
        grid.validate()?;
        Ok(grid)
    }

    /// Constant reflections for the resonance approximation: the override if
    /// present, otherwise `|r_i[ω]|²` of the mirrors at `omega`.
    pub fn reflection_at(&self, cfg: &CavityConfig, omega: f64) -> Result<ConstantReflection> {
        let (r1_sq, r2_sq) = match self.reflection {
            Some(r) => (r.r1_sq, r.r2_sq),
            None => (
                cfg.m1.reflectivity(omega)?.norm_sqr(),
                cfg.m2.reflectivity(omega)?.norm_sqr(),
            ),
        };
        ConstantReflection::new(r1_sq, r2_sq, cfg.q, cfg.hbar)
    }
}

fn mirror(spec: &MirrorSpec, scales: &Scales, base: &Path) -> Result<MirrorModel> {
    match spec {
        MirrorSpec::Lorentzian { omega_c } => {
            MirrorModel::lorentzian(scales.frequency_in(positive("omega_c", *omega_c)?))
        }
        MirrorSpec::IdealBand { cutoff } => MirrorModel::ideal_band(scales.frequency_in(positive("cutoff", *cutoff)?)),
        MirrorSpec::Transparent => Ok(MirrorModel::Transparent),
        MirrorSpec::Tabulated { path } => {
            let table = MirrorTable::from_csv_path(base.join(path))?;
            Ok(MirrorModel::Tabulated(table.with_scaled_frequencies(scales.q)?))
        }
    }
}
