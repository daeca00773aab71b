//! Mirror scattering amplitudes `r[ω]`, `s[ω]`.
//!
//! Every model is lossless (`|r|² + |s|² = 1`, `Re(s r*) = 0`) and obeys the
//! reality condition `r[−ω] = r[ω]*`. Causal models are analytic in the upper
//! half-plane and become transparent at high frequency. [`MirrorModel::IdealBand`]
//! violates causality and exists only for perfect-mirror limit checks.

use std::io::Read;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{dispersion_real_part, QuadratureConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum MirrorModel {
    /// `r[ω] = −1/(1 − iω/Ω)`, `s[ω] = 1 + r[ω]`; pole at `ω = −iΩ`.
    Lorentzian { omega_c: f64 },
    /// Perfect reflector below `cutoff`, transparent above. Non-causal.
    IdealBand { cutoff: f64 },
    Transparent,
    Tabulated(MirrorTable),
}

impl MirrorModel {
    pub fn lorentzian(omega_c: f64) -> Result<Self> {
        if !(omega_c > 0.0) || !omega_c.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Lorentzian cutoff must be finite and positive, got {omega_c}"
            )));
        }
        Ok(MirrorModel::Lorentzian { omega_c })
    }

    pub fn ideal_band(cutoff: f64) -> Result<Self> {
        if !(cutoff > 0.0) || !cutoff.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "ideal band cutoff must be finite and positive, got {cutoff}"
            )));
        }
        Ok(MirrorModel::IdealBand { cutoff })
    }

    pub fn name(&self) -> &'static str {
        match self {
            MirrorModel::Lorentzian { .. } => "lorentzian",
            MirrorModel::IdealBand { .. } => "ideal_band",
            MirrorModel::Transparent => "transparent",
            MirrorModel::Tabulated(_) => "tabulated",
        }
    }

    /// False only for models flagged as diagnostic (non-analytic).
    pub fn is_causal(&self) -> bool {
        !matches!(self, MirrorModel::IdealBand { .. })
    }

    pub fn is_transparent(&self) -> bool {
        matches!(self, MirrorModel::Transparent)
    }

    /// `(r[ω], s[ω])`.
    pub fn amplitudes(&self, omega: f64) -> Result<(Complex64, Complex64)> {
        match self {
            MirrorModel::Lorentzian { omega_c } => {
                let x = omega / omega_c;
                let denom = Complex64::new(1.0, -x);
                let r = -1.0 / denom;
                let s = Complex64::new(0.0, -x) / denom;
                Ok((r, s))
            }
            MirrorModel::IdealBand { cutoff } => {
                if omega.abs() < *cutoff {
                    Ok((Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0)))
                } else {
                    Ok((Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)))
                }
            }
            MirrorModel::Transparent => {
                Ok((Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)))
            }
            MirrorModel::Tabulated(table) => table.amplitudes(omega),
        }
    }

    pub fn reflectivity(&self, omega: f64) -> Result<Complex64> {
        Ok(self.amplitudes(omega)?.0)
    }

    pub fn transmittivity(&self, omega: f64) -> Result<Complex64> {
        Ok(self.amplitudes(omega)?.1)
    }

    /// `r[iξ]` for `ξ ≥ 0`, real by the reality condition.
    ///
    /// The ideal band is continued as a perfect reflector for `ξ < cutoff`,
    /// which is the exponential regulator of the perfect-mirror limit. Tabulated
    /// data has no continuation and returns `None`.
    pub fn reflectivity_imaginary(&self, xi: f64) -> Option<f64> {
        match self {
            MirrorModel::Lorentzian { omega_c } => Some(-1.0 / (1.0 + xi / omega_c)),
            MirrorModel::IdealBand { cutoff } => Some(if xi < *cutoff { -1.0 } else { 0.0 }),
            MirrorModel::Transparent => Some(0.0),
            MirrorModel::Tabulated(_) => None,
        }
    }
}

/// Piecewise cubic Hermite interpolant with Fritsch–Carlson monotone slopes.
#[derive(Debug, Clone, PartialEq)]
struct Pchip {
    y: Vec<f64>,
    slope: Vec<f64>,
}

impl Pchip {
    fn new(x: &[f64], y: Vec<f64>) -> Self {
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
        let mut slope = vec![0.0; n];
        if n == 2 {
            slope[0] = delta[0];
            slope[1] = delta[0];
            return Self { y, slope };
        }
        for k in 1..n - 1 {
            if delta[k - 1] * delta[k] > 0.0 {
                let w1 = 2.0 * h[k] + h[k - 1];
                let w2 = h[k] + 2.0 * h[k - 1];
                slope[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
            }
        }
        slope[0] = end_slope(h[0], h[1], delta[0], delta[1]);
        slope[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        Self { y, slope }
    }

    fn eval(&self, x: &[f64], k: usize, t: f64) -> f64 {
        let h = x[k + 1] - x[k];
        let s = (t - x[k]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[k] + h10 * h * self.slope[k] + h01 * self.y[k + 1] + h11 * h * self.slope[k + 1]
    }
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

/// Measured or externally computed amplitudes on strictly increasing nodes.
///
/// Real and imaginary parts are interpolated separately; unitarity is reported
/// by the validator but never enforced. A table whose first node is
/// non-negative answers negative frequencies through `r[−ω] = r[ω]*`.
#[derive(Debug, Clone, PartialEq)]
pub struct MirrorTable {
    omega: Vec<f64>,
    r: Vec<Complex64>,
    s: Vec<Complex64>,
    interp: [Pchip; 4],
}

impl MirrorTable {
    pub fn new(omega: Vec<f64>, r: Vec<Complex64>, s: Vec<Complex64>) -> Result<Self> {
        if omega.len() < 2 {
            return Err(Error::InvalidTable("at least two frequency nodes required".into()));
        }
        if omega.len() != r.len() || omega.len() != s.len() {
            return Err(Error::InvalidTable("column lengths differ".into()));
        }
        for w in omega.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidTable(format!(
                    "frequencies must be strictly increasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        let finite = |z: &Complex64| z.re.is_finite() && z.im.is_finite();
        if !omega.iter().all(|w| w.is_finite()) || !r.iter().all(finite) || !s.iter().all(finite)
        {
            return Err(Error::InvalidTable("non-finite entry".into()));
        }
        let interp = [
            Pchip::new(&omega, r.iter().map(|z| z.re).collect()),
            Pchip::new(&omega, r.iter().map(|z| z.im).collect()),
            Pchip::new(&omega, s.iter().map(|z| z.re).collect()),
            Pchip::new(&omega, s.iter().map(|z| z.im).collect()),
        ];
        Ok(Self {
            omega,
            r,
            s,
            interp,
        })
    }

    /// Parse `omega,re_r,im_r,re_s,im_s` CSV with a mandatory header row.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::InvalidTable(e.to_string()))?
            .clone();
        let expected = ["omega", "re_r", "im_r", "re_s", "im_s"];
        if headers.len() != expected.len() || headers.iter().zip(expected).any(|(h, e)| h != e) {
            return Err(Error::InvalidTable(format!(
                "header must be {}, found {}",
                expected.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut omega = Vec::new();
        let mut r = Vec::new();
        let mut s = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::InvalidTable(e.to_string()))?;
            let mut vals = [0.0; 5];
            for (k, v) in vals.iter_mut().enumerate() {
                let field = record.get(k).ok_or_else(|| {
                    Error::InvalidTable(format!("row {} has too few columns", line + 1))
                })?;
                *v = field.parse().map_err(|_| {
                    Error::InvalidTable(format!("row {}: cannot parse '{field}'", line + 1))
                })?;
            }
            omega.push(vals[0]);
            r.push(Complex64::new(vals[1], vals[2]));
            s.push(Complex64::new(vals[3], vals[4]));
        }
        Self::new(omega, r, s)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|e| Error::InvalidTable(format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(file)
    }

    /// The same table with every node frequency multiplied by `factor > 0`.
    pub fn with_scaled_frequencies(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(Error::InvalidParameter(format!("frequency scale must be positive, got {factor}")));
        }
        Self::new(
            self.omega.iter().map(|w| w * factor).collect(),
            self.r.clone(),
            self.s.clone(),
        )
    }

    pub fn nodes(&self) -> &[f64] {
        &self.omega
    }

    pub fn range(&self) -> (f64, f64) {
        (self.omega[0], self.omega[self.omega.len() - 1])
    }

    fn amplitudes(&self, omega: f64) -> Result<(Complex64, Complex64)> {
        let (lo, hi) = self.range();
        if omega < lo && lo >= 0.0 && -omega >= lo && -omega <= hi {
            let (r, s) = self.amplitudes(-omega)?;
            return Ok((r.conj(), s.conj()));
        }
        if !(omega >= lo && omega <= hi) {
            return Err(Error::OutOfRange {
                omega,
                min: lo,
                max: hi,
            });
        }
        let k = match self
            .omega
            .binary_search_by(|w| w.partial_cmp(&omega).expect("finite nodes"))
        {
            Ok(k) => return Ok((self.r[k], self.s[k])),
            Err(k) => k - 1,
        };
        let x = &self.omega;
        let [rr, ri, sr, si] = &self.interp;
        Ok((
            Complex64::new(rr.eval(x, k, omega), ri.eval(x, k, omega)),
            Complex64::new(sr.eval(x, k, omega), si.eval(x, k, omega)),
        ))
    }
}

pub const IDENTITY_TOLERANCE: f64 = 1e-8;
pub const CAUSALITY_TOLERANCE: f64 = 1e-3;
pub const TRANSPARENCY_TOLERANCE: f64 = 1e-6;

/// Residuals of the reality, unitarity, transparency and causality conditions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub model: String,
    pub max_reality_residual: f64,
    pub max_unitarity_residual: f64,
    pub transparency_tail_norm: f64,
    pub causality_residual: f64,
    pub reality_pass: bool,
    pub unitarity_pass: bool,
    pub transparency_pass: bool,
    pub causality_pass: bool,
    /// Set for models that are non-causal by construction.
    pub diagnostic: bool,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.reality_pass && self.unitarity_pass && self.transparency_pass && self.causality_pass
    }
}

/// Check the four mirror conditions on a frequency grid.
///
/// The causality residual compares `Re r` with its dispersion reconstruction
/// from `Im r`; tabulated models are reconstructed over their node range only.
pub fn validate_mirror(
    model: &MirrorModel,
    grid: &[f64],
    cfg: &QuadratureConfig,
) -> Result<ValidationReport> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("validation grid is empty".into()));
    }
    cfg.validate()?;

    let mut reality: f64 = 0.0;
    let mut unitarity: f64 = 0.0;
    for &w in grid {
        let (r, s) = model.amplitudes(w)?;
        let (rm, sm) = model.amplitudes(-w)?;
        reality = reality.max((rm - r.conj()).norm()).max((sm - s.conj()).norm());
        let power = (s.norm_sqr() + r.norm_sqr() - 1.0).abs();
        let cross = (s * r.conj()).re.abs();
        unitarity = unitarity.max(power).max(cross);
    }

    let w_max = grid.iter().fold(0.0f64, |m, w| m.max(w.abs()));
    let (tail, upper) = match model {
        MirrorModel::Tabulated(table) => {
            let (_, hi) = table.range();
            (model.reflectivity(hi)?.norm(), Some(hi))
        }
        _ => (model.reflectivity(1e8 * w_max.max(1.0))?.norm(), None),
    };

    let mut causality: f64 = 0.0;
    if !model.is_transparent() {
        for &w in grid {
            let r = model.reflectivity(w)?;
            let imag = |x: f64| model.reflectivity(x).map(|z| z.im).unwrap_or(0.0);
            let kk = dispersion_real_part(imag, w, 0.0, upper, cfg)?;
            causality = causality.max((r.re - kk.value.re).abs());
        }
    }

    let diagnostic = !model.is_causal();
    Ok(ValidationReport {
        model: model.name().to_string(),
        max_reality_residual: reality,
        max_unitarity_residual: unitarity,
        transparency_tail_norm: tail,
        causality_residual: causality,
        reality_pass: reality < IDENTITY_TOLERANCE,
        unitarity_pass: unitarity < IDENTITY_TOLERANCE,
        transparency_pass: tail < TRANSPARENCY_TOLERANCE,
        causality_pass: !diagnostic && causality < CAUSALITY_TOLERANCE,
        diagnostic,
    })
}

/// Energy reflection coefficient `|r[ω]|²` of a Lorentzian mirror.
pub fn lorentzian_power_reflection(omega_c: f64, omega: f64) -> f64 {
    omega_c * omega_c / (omega_c * omega_c + omega * omega)
}

/// Cutoff that gives a Lorentzian mirror the energy reflection `r2` at `omega`.
pub fn lorentzian_cutoff_for_reflection(r2: f64, omega: f64) -> Result<f64> {
    if !(r2 > 0.0 && r2 < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "energy reflection must lie in (0, 1), got {r2}"
        )));
    }
    Ok(omega.abs() * (r2 / (1.0 - r2)).sqrt())
}
