//! Two-mirror Fabry–Perot composite matrices.
//!
//! Mirror 1 sits at `−q/2` and mirror 2 at `+q/2`. For each frequency the
//! global scattering matrix `S`, the resonance (input → intracavity) matrix `R`,
//! the retarded part `Q` of `R R†` and the output → intracavity matrix `R̄` are
//! assembled from closed-form entries sharing the loop denominator
//! `d[ω] = 1 − r₁r₂e^{2iωq}`.

use num_complex::Complex64;

use crate::error::{Error, Result};
pub use crate::matrix::Matrix2;
use crate::mirror::MirrorModel;

/// Smallest `|d[ω]|` accepted before a frequency is declared singular.
pub const SINGULAR_DENOMINATOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct CavityConfig {
    pub q: f64,
    pub hbar: f64,
    pub m1: MirrorModel,
    pub m2: MirrorModel,
}

impl CavityConfig {
    pub fn new(q: f64, hbar: f64, m1: MirrorModel, m2: MirrorModel) -> Result<Self> {
        if !(q > 0.0) || !q.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mirror separation must be finite and positive, got {q}"
            )));
        }
        if !(hbar > 0.0) || !hbar.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "hbar must be finite and positive, got {hbar}"
            )));
        }
        Ok(Self { q, hbar, m1, m2 })
    }

    /// The same cavity with the roles of the two mirrors exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            q: self.q,
            hbar: self.hbar,
            m1: self.m2.clone(),
            m2: self.m1.clone(),
        }
    }

    pub fn mirror(&self, i: usize) -> &MirrorModel {
        if i == 1 {
            &self.m1
        } else {
            &self.m2
        }
    }

    /// Rest position `q_i` of mirror `i` (`−q/2` or `+q/2`).
    pub fn position(&self, i: usize) -> f64 {
        -0.5 * self.q * epsilon_index(i)
    }

    pub fn is_causal(&self) -> bool {
        self.m1.is_causal() && self.m2.is_causal()
    }

    pub fn has_transparent_mirror(&self) -> bool {
        self.m1.is_transparent() || self.m2.is_transparent()
    }

    /// Highest frequency at which both mirrors are defined (tabulated data).
    pub fn frequency_limit(&self) -> Option<f64> {
        [&self.m1, &self.m2]
            .iter()
            .filter_map(|m| match m {
                MirrorModel::Tabulated(t) => Some(t.range().1),
                _ => None,
            })
            .reduce(f64::min)
    }
}

/// `ε₁ = +1`, `ε₂ = −1`.
pub fn epsilon_index(i: usize) -> f64 {
    match i {
        1 => 1.0,
        2 => -1.0,
        _ => panic!("mirror index must be 1 or 2, got {i}"),
    }
}

/// Sign function with `ε(0) = 0`.
pub fn sign(omega: f64) -> f64 {
    if omega > 0.0 {
        1.0
    } else if omega < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Amplitudes of both mirrors at one frequency with the derived cavity factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityPoint {
    pub omega: f64,
    pub r1: Complex64,
    pub s1: Complex64,
    pub r2: Complex64,
    pub s2: Complex64,
    /// `e^{iωq}`.
    pub phase: Complex64,
    pub d: Complex64,
}

impl CavityPoint {
    /// Evaluate without checking the denominator.
    pub fn evaluate(cfg: &CavityConfig, omega: f64) -> Result<Self> {
        let (r1, s1) = cfg.m1.amplitudes(omega)?;
        let (r2, s2) = cfg.m2.amplitudes(omega)?;
        let phase = Complex64::from_polar(1.0, omega * cfg.q);
        let d = 1.0 - r1 * r2 * phase * phase;
        Ok(Self {
            omega,
            r1,
            s1,
            r2,
            s2,
            phase,
            d,
        })
    }

    /// Evaluate and reject frequencies where `|d| < 1e−14`.
    pub fn new(cfg: &CavityConfig, omega: f64) -> Result<Self> {
        let p = Self::evaluate(cfg, omega)?;
        if p.d.norm() < SINGULAR_DENOMINATOR {
            return Err(Error::ResonanceSingularity {
                omega,
                modulus: p.d.norm(),
            });
        }
        Ok(p)
    }

    /// The same point with the roles of the two mirrors exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            r1: self.r2,
            s1: self.s2,
            r2: self.r1,
            s2: self.s1,
            ..*self
        }
    }

    /// `r = r₁r₂`.
    pub fn r(&self) -> Complex64 {
        self.r1 * self.r2
    }

    pub fn d1(&self) -> Complex64 {
        self.s1 * self.s1 - self.r1 * self.r1
    }

    pub fn d2(&self) -> Complex64 {
        self.s2 * self.s2 - self.r2 * self.r2
    }

    pub fn global_scattering(&self) -> Matrix2 {
        let e = self.phase;
        let ec = e.conj();
        Matrix2::new(
            self.s1 * self.s2,
            self.r2 * ec + self.d2() * self.r1 * e,
            self.r1 * ec + self.d1() * self.r2 * e,
            self.s1 * self.s2,
        )
        .scale(1.0 / self.d)
    }

    pub fn resonance(&self) -> Matrix2 {
        let e = self.phase;
        Matrix2::new(self.s1, self.s2 * self.r1 * e, self.s1 * self.r2 * e, self.s2)
            .scale(1.0 / self.d)
    }

    pub fn q_matrix(&self) -> Matrix2 {
        let e = self.phase;
        let rr = self.r() * e * e;
        Matrix2::new(rr, self.r1 * e, self.r2 * e, rr).scale(1.0 / self.d)
    }

    pub fn rbar(&self) -> Matrix2 {
        let e = self.phase;
        Matrix2::new(self.s2, self.s2 * self.r1 * e, self.s1 * self.r2 * e, self.s1)
            .scale(1.0 / self.d)
    }
}

pub fn loop_denominator(cfg: &CavityConfig, omega: f64) -> Result<Complex64> {
    Ok(CavityPoint::evaluate(cfg, omega)?.d)
}

pub fn global_scattering(cfg: &CavityConfig, omega: f64) -> Result<Matrix2> {
    Ok(CavityPoint::new(cfg, omega)?.global_scattering())
}

pub fn resonance_matrix(cfg: &CavityConfig, omega: f64) -> Result<Matrix2> {
    Ok(CavityPoint::new(cfg, omega)?.resonance())
}

pub fn q_matrix(cfg: &CavityConfig, omega: f64) -> Result<Matrix2> {
    Ok(CavityPoint::new(cfg, omega)?.q_matrix())
}

pub fn rbar_matrix(cfg: &CavityConfig, omega: f64) -> Result<Matrix2> {
    Ok(CavityPoint::new(cfg, omega)?.rbar())
}

/// Single-mirror scattering matrix referred to the origin:
/// `S̄ = e^{−iηωx} S e^{iηωx}` for a mirror at `x`.
pub fn displaced_mirror_scattering(model: &MirrorModel, position: f64, omega: f64) -> Result<Matrix2> {
    let (r, s) = model.amplitudes(omega)?;
    Ok(Matrix2::phase(-omega * position) * Matrix2::mirror(r, s) * Matrix2::phase(omega * position))
}
