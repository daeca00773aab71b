//! First-order motional scattering kernels.
//!
//! A mirror moving as `q_i + δq_i(t)` scatters the input field from frequency
//! `ω′` to `ω = ω′ + ν` for every line `ν` of its motion. The single-mirror
//! kernel is
//! `δS̄_i[ω,ω′] = iω′ δq_i[ω−ω′] e^{−iηωq_i}(S_i[ω]η − ηS_i[ω′])e^{iηω′q_i}`,
//! and the cavity kernels `δR`, `δS` are composed from it with the projectors
//! `P_{±ε_i}` and the partner mirror `ī = 3 − i`.
//!
//! Motions are sums of spectral lines, `δq(t) = Σ a_k e^{−iν_k t}`, so a
//! kernel sampled at `(ω, ω′)` is the coefficient of `2πδ(ω − ω′ − ν_k)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::cavity::{displaced_mirror_scattering, epsilon_index, CavityConfig, CavityPoint, Matrix2};
use crate::error::{Error, Result};
use crate::fluctuations::force_kernel;
use crate::mirror::MirrorModel;

/// Reality residual accepted for a motion spectrum.
pub const REALITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralLine {
    pub nu: f64,
    pub amplitude: Complex64,
}

/// Displacement of one mirror as a set of spectral lines.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MotionSpectrum {
    pub mirror: usize,
    pub lines: Vec<SpectralLine>,
}

impl MotionSpectrum {
    pub fn new(mirror: usize, lines: Vec<SpectralLine>) -> Result<Self> {
        if mirror != 1 && mirror != 2 {
            return Err(Error::InvalidParameter(format!("mirror index must be 1 or 2, got {mirror}")));
        }
        if lines.iter().any(|l| !l.nu.is_finite() || !l.amplitude.re.is_finite() || !l.amplitude.im.is_finite()) {
            return Err(Error::InvalidParameter("motion lines must be finite".into()));
        }
        let m = Self { mirror, lines };
        let residual = m.reality_residual();
        if residual > REALITY_TOLERANCE {
            return Err(Error::RealityViolation {
                residual,
                tolerance: REALITY_TOLERANCE,
            });
        }
        Ok(m)
    }

    /// A mirror at rest.
    pub fn still(mirror: usize) -> Self {
        Self {
            mirror,
            lines: Vec::new(),
        }
    }

    /// A constant displacement `δq(t) = delta`.
    pub fn static_displacement(mirror: usize, delta: f64) -> Result<Self> {
        Self::new(
            mirror,
            vec![SpectralLine {
                nu: 0.0,
                amplitude: Complex64::new(delta, 0.0),
            }],
        )
    }

    /// `δq(t) = amplitude·cos(νt + phase)`.
    pub fn sinusoid(mirror: usize, amplitude: f64, nu: f64, phase: f64) -> Result<Self> {
        if nu == 0.0 {
            return Self::static_displacement(mirror, amplitude * phase.cos());
        }
        let a = Complex64::from_polar(0.5 * amplitude, -phase);
        Self::new(
            mirror,
            vec![
                SpectralLine { nu, amplitude: a },
                SpectralLine {
                    nu: -nu,
                    amplitude: a.conj(),
                },
            ],
        )
    }

    /// Weight of the line at `nu`, zero when there is none.
    pub fn amplitude(&self, nu: f64) -> Complex64 {
        let tol = 1e-12 * nu.abs().max(1.0);
        self.lines
            .iter()
            .filter(|l| (l.nu - nu).abs() <= tol)
            .map(|l| l.amplitude)
            .sum()
    }

    /// Largest `|δq[−ν] − δq[ν]*|`.
    pub fn reality_residual(&self) -> f64 {
        self.lines
            .iter()
            .map(|l| (self.amplitude(-l.nu) - l.amplitude.conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            mirror: self.mirror,
            lines: self
                .lines
                .iter()
                .map(|l| SpectralLine {
                    nu: l.nu,
                    amplitude: l.amplitude * k,
                })
                .collect(),
        }
    }
}

/// `δS̄_i[ω,ω′]` for mirror model `m` at rest position `position`.
pub fn delta_s_single(
    m: &MirrorModel,
    position: f64,
    motion: &MotionSpectrum,
    omega: f64,
    omega_prime: f64,
) -> Result<Matrix2> {
    let dq = motion.amplitude(omega - omega_prime);
    if dq == Complex64::new(0.0, 0.0) {
        return Ok(Matrix2::zero());
    }
    let (r, s) = m.amplitudes(omega)?;
    let (rp, sp) = m.amplitudes(omega_prime)?;
    let eta = Matrix2::eta();
    let inner = Matrix2::mirror(r, s) * eta - eta * Matrix2::mirror(rp, sp);
    let k = Complex64::new(0.0, omega_prime) * dq;
    Ok((Matrix2::phase(-omega * position) * inner * Matrix2::phase(omega_prime * position)).scale(k))
}

/// First-order changes of the resonance and global scattering matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityKernels {
    pub delta_r: Matrix2,
    pub delta_s: Matrix2,
}

fn projector(sign: f64) -> Matrix2 {
    Matrix2::projector(if sign > 0.0 { 1 } else { -1 })
}

/// `δR[ω,ω′]` and `δS[ω,ω′]` of the cavity for the given mirror motions.
///
/// Several spectra for the same mirror add up; a mirror without a spectrum is
/// at rest.
pub fn delta_cavity_kernels(
    cfg: &CavityConfig,
    motions: &[MotionSpectrum],
    omega: f64,
    omega_prime: f64,
) -> Result<CavityKernels> {
    let a = CavityPoint::new(cfg, omega)?;
    let b = CavityPoint::new(cfg, omega_prime)?;
    let r_prime = b.resonance();

    let mut single = [Matrix2::zero(); 2];
    let mut right = [Matrix2::zero(); 2];
    let mut still = [Matrix2::zero(); 2];
    for i in [1usize, 2] {
        for m in motions.iter().filter(|m| m.mirror == i) {
            single[i - 1] = single[i - 1] + delta_s_single(cfg.mirror(i), cfg.position(i), m, omega, omega_prime)?;
        }
        let e = epsilon_index(i);
        right[i - 1] = projector(e) + projector(-e) * r_prime;
        still[i - 1] = displaced_mirror_scattering(cfg.mirror(i), cfg.position(i), omega)?;
    }

    let mut delta_r = Matrix2::zero();
    for i in [1usize, 2] {
        let e = epsilon_index(i);
        let (p, m) = (projector(e), projector(-e));
        let partner = still[2 - i];
        delta_r = delta_r + (p + m * partner * p) * single[i - 1] * right[i - 1];
    }
    delta_r = delta_r.scale(1.0 / a.d);

    let mut delta_s = Matrix2::zero();
    for i in [1usize, 2] {
        let m = projector(-epsilon_index(i));
        delta_s = delta_s + m * single[i - 1] * right[i - 1] + m * still[i - 1] * m * delta_r;
    }
    Ok(CavityKernels { delta_r, delta_s })
}

/// Kernel `ωω′𝓕_j[ω,ω′]` of the secular coupling `δH[0]`.
pub fn secular_hamiltonian_kernel(cfg: &CavityConfig, j: usize, omega: f64, omega_prime: f64) -> Result<Matrix2> {
    if omega == 0.0 || omega_prime == 0.0 {
        return Ok(Matrix2::zero());
    }
    Ok(force_kernel(cfg, j, omega, omega_prime)?.scale_re(omega * omega_prime))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fluctuations::force_kernel;
    use rand::{Rng, SeedableRng};

    fn lorentz(o1: f64, o2: f64) -> CavityConfig {
        CavityConfig::new(
            1.0,
            1.0,
            MirrorModel::lorentzian(o1).unwrap(),
            MirrorModel::lorentzian(o2).unwrap(),
        )
        .unwrap()
    }

    /// Global scattering with mirror `i` moved to `q_i + δ_i`, built from the
    /// centred cavity of the new length and a translation of the origin.
    fn shifted_scattering(cfg: &CavityConfig, d1: f64, d2: f64, w: f64) -> Matrix2 {
        let x1 = cfg.position(1) + d1;
        let x2 = cfg.position(2) + d2;
        let moved = CavityConfig::new(x2 - x1, cfg.hbar, cfg.m1.clone(), cfg.m2.clone()).unwrap();
        let c = 0.5 * (x1 + x2);
        let s = CavityPoint::new(&moved, w).unwrap().global_scattering();
        Matrix2::phase(-w * c) * s * Matrix2::phase(w * c)
    }

    fn rel(a: Matrix2, b: Matrix2) -> f64 {
        (a - b).max_abs() / b.max_abs()
    }

    #[test]
    fn motion_spectrum_reality() {
        let m = MotionSpectrum::sinusoid(1, 0.01, 2.0, 0.3).unwrap();
        assert!(m.reality_residual() < 1e-15);
        let bad = MotionSpectrum::new(
            2,
            vec![SpectralLine {
                nu: 1.0,
                amplitude: Complex64::new(1.0, 0.0),
            }],
        );
        assert!(matches!(bad, Err(Error::RealityViolation { .. })));
        assert!(MotionSpectrum::new(3, vec![]).is_err());
    }

    #[test]
    fn still_mirrors_give_zero_kernels() {
        let cfg = lorentz(3.0, 4.0);
        let m = MirrorModel::lorentzian(3.0).unwrap();
        assert_eq!(
            delta_s_single(&m, -0.5, &MotionSpectrum::still(1), 1.0, 0.5).unwrap(),
            Matrix2::zero()
        );
        let k = delta_cavity_kernels(&cfg, &[MotionSpectrum::still(1), MotionSpectrum::still(2)], 2.0, 1.2).unwrap();
        assert_eq!(k.delta_r, Matrix2::zero());
        assert_eq!(k.delta_s, Matrix2::zero());
    }

    #[test]
    fn single_mirror_static_limit() {
        let m = MirrorModel::lorentzian(2.5).unwrap();
        let x = 0.37;
        let h = 1e-5;
        let motion = MotionSpectrum::static_displacement(1, 1.0).unwrap();
        for w in [-4.0, 0.6, 3.3, 11.0] {
            let fd = (displaced_mirror_scattering(&m, x + h, w).unwrap()
                - displaced_mirror_scattering(&m, x - h, w).unwrap())
            .scale_re(0.5 / h);
            let kernel = delta_s_single(&m, x, &motion, w, w).unwrap();
            assert!(rel(kernel, fd) < 1e-6, "{w}: {}", rel(kernel, fd));
        }
    }

    #[test]
    fn single_mirror_kernel_reality() {
        let m = MirrorModel::lorentzian(2.0).unwrap();
        let motion = MotionSpectrum::sinusoid(1, 0.02, 1.5, 0.4).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for _ in 0..50 {
            let v: f64 = rng.gen_range(-8.0..8.0);
            for nu in [1.5, -1.5] {
                let w = v + nu;
                let k = delta_s_single(&m, -0.5, &motion, w, v).unwrap();
                let km = delta_s_single(&m, -0.5, &motion, -w, -v).unwrap();
                assert!((km - k.conj()).max_abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cavity_static_limits() {
        let cfg = lorentz(3.0, 5.0);
        let h = 1e-5;
        let cases: [(f64, f64); 3] = [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0)];
        for (d1, d2) in cases {
            let mut motions = Vec::new();
            if d1 != 0.0 {
                motions.push(MotionSpectrum::static_displacement(1, d1).unwrap());
            }
            if d2 != 0.0 {
                motions.push(MotionSpectrum::static_displacement(2, d2).unwrap());
            }
            for w in [-2.0, 0.8, 2.9, 7.5] {
                let fd = (shifted_scattering(&cfg, h * d1, h * d2, w) - shifted_scattering(&cfg, -h * d1, -h * d2, w))
                    .scale_re(0.5 / h);
                let k = delta_cavity_kernels(&cfg, &motions, w, w).unwrap();
                assert!(rel(k.delta_s, fd) < 1e-6, "({d1},{d2}) at {w}: {}", rel(k.delta_s, fd));
            }
        }
    }

    #[test]
    fn transparent_partner_reduces_to_single_mirror() {
        let m1 = MirrorModel::lorentzian(2.0).unwrap();
        let cfg = CavityConfig::new(1.0, 1.0, m1.clone(), MirrorModel::Transparent).unwrap();
        let motion = MotionSpectrum::sinusoid(1, 0.01, 0.7, 0.0).unwrap();
        for v in [-3.0, 0.2, 4.0] {
            let w = v + 0.7;
            let k = delta_cavity_kernels(&cfg, std::slice::from_ref(&motion), w, v).unwrap();
            let single = delta_s_single(&m1, cfg.position(1), &motion, w, v).unwrap();
            assert!((k.delta_s - single).max_abs() < 1e-14);
        }
    }

    #[test]
    fn first_order_error_is_quadratic() {
        let cfg = lorentz(3.0, 5.0);
        let w = 2.2;
        let s0 = CavityPoint::new(&cfg, w).unwrap().global_scattering();
        let residual = |a: f64| {
            let motions = [
                MotionSpectrum::static_displacement(1, a).unwrap(),
                MotionSpectrum::static_displacement(2, -0.5 * a).unwrap(),
            ];
            let k = delta_cavity_kernels(&cfg, &motions, w, w).unwrap();
            (shifted_scattering(&cfg, a, -0.5 * a, w) - s0 - k.delta_s).max_abs()
        };
        let r: Vec<f64> = [1e-4, 2e-4, 4e-4].iter().map(|&a| residual(a)).collect();
        // The first-order kernel is linear in a, so what is left is O(a²).
        for pair in r.windows(2) {
            assert!((pair[1] / pair[0] - 4.0).abs() < 0.05, "{r:?}");
        }
    }

    #[test]
    fn secular_kernel_properties() {
        let clear = CavityConfig::new(1.0, 1.0, MirrorModel::Transparent, MirrorModel::Transparent).unwrap();
        assert!(secular_hamiltonian_kernel(&clear, 1, 2.0, -1.0).unwrap().max_abs() < 1e-15);
        let cfg = lorentz(3.0, 6.0);
        assert_eq!(secular_hamiltonian_kernel(&cfg, 2, 0.0, 1.3).unwrap(), Matrix2::zero());
        let mut rng = rand::rngs::StdRng::seed_from_u64(9);
        for _ in 0..50 {
            let w: f64 = rng.gen_range(-10.0..10.0);
            let v: f64 = rng.gen_range(-10.0..10.0);
            for j in [1, 2] {
                let k = secular_hamiltonian_kernel(&cfg, j, w, v).unwrap();
                let kt = secular_hamiltonian_kernel(&cfg, j, v, w).unwrap();
                assert!((k.transpose() - kt).max_abs() < 1e-12 * k.max_abs().max(1.0));
                let f = force_kernel(&cfg, j, w, v).unwrap();
                assert!((k - f.scale_re(w * v)).max_abs() < 1e-12 * k.max_abs().max(1.0));
            }
        }
    }
}
