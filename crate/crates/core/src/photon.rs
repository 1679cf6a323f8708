//! Bessel–Gaussian incident packet, its plane-wave overlaps and the atomic
//! trap distribution. Momenta and energies in eV, lengths in eV⁻¹.

use crate::atom::Helicity;
use crate::quad::{integrate, Tolerance};
use crate::specfun::{bessel_j, ln_factorial};
use crate::units::nm_to_inv_ev;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhotonError {
    #[error("invalid packet: {0}")]
    InvalidPacket(String),
    #[error("invalid trap: {0}")]
    InvalidTrap(String),
    #[error(transparent)]
    Quadrature(#[from] crate::quad::QuadError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotonPacket {
    pub m_gamma: i32,
    pub lambda: Helicity,
    pub kappa_c: f64,
    pub k_c: f64,
    pub sigma: f64,
    /// Impact parameter, eV⁻¹.
    pub b: f64,
    pub phi_b: f64,
}

impl PhotonPacket {
    /// Packet with central energy `omega_c`, transverse momentum
    /// `kappa_ratio * omega_c` and spread `sigma`, on axis.
    pub fn from_energy(omega_c: f64, kappa_ratio: f64, sigma: f64, m_gamma: i32, lambda: Helicity) -> Self {
        let kappa_c = kappa_ratio * omega_c;
        Self {
            m_gamma,
            lambda,
            kappa_c,
            k_c: (omega_c * omega_c - kappa_c * kappa_c).sqrt(),
            sigma,
            b: 0.0,
            phi_b: 0.0,
        }
    }

    /// Sodium figure set: ω_c = 2.1 eV, κ_c = 0.1 ω_c, σ_0 = 0.1 κ_c.
    pub fn sodium_default(m_gamma: i32) -> Self {
        Self::from_energy(2.1, 0.1, 0.021, m_gamma, Helicity::Plus)
    }

    /// Hydrogen figure set: ω_c = 10.2 eV, κ_c = 1.02 eV, σ = 0.102 eV.
    pub fn hydrogen_default(m_gamma: i32) -> Self {
        Self::from_energy(10.2, 0.1, 0.102, m_gamma, Helicity::Plus)
    }

    pub fn omega_c(&self) -> f64 {
        self.kappa_c.hypot(self.k_c)
    }

    pub fn theta_c(&self) -> f64 {
        self.kappa_c.atan2(self.k_c)
    }

    pub fn validate(&self) -> Result<(), PhotonError> {
        let bad = |m: String| Err(PhotonError::InvalidPacket(m));
        if !(self.kappa_c > 0.0 && self.kappa_c.is_finite()) {
            return bad(format!("kappa_c = {} must be positive", self.kappa_c));
        }
        if !(self.k_c > 0.0 && self.k_c.is_finite()) {
            return bad(format!("k_c = {} must be positive", self.k_c));
        }
        if !(self.sigma > 0.0 && self.sigma < self.kappa_c) {
            return bad(format!("sigma = {} must lie in (0, kappa_c)", self.sigma));
        }
        if !(self.b >= 0.0 && self.b.is_finite()) {
            return bad(format!("impact parameter b = {} must be >= 0", self.b));
        }
        Ok(())
    }

    /// Gaussian spectral profile without the normalisation constant.
    pub fn profile(&self, k_perp: f64, k_z: f64) -> f64 {
        let s2 = 2.0 * self.sigma * self.sigma;
        (-(k_perp - self.kappa_c).powi(2) / s2 - (k_z - self.k_c).powi(2) / s2).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapSpec {
    /// Trap width, eV⁻¹.
    pub sigma_b: f64,
}

impl TrapSpec {
    pub fn from_nm(sigma_b_nm: f64) -> Self {
        Self { sigma_b: nm_to_inv_ev(sigma_b_nm) }
    }

    pub fn validate(&self, packet: &PhotonPacket) -> Result<(), PhotonError> {
        if !(self.sigma_b > 0.0 && self.sigma_b.is_finite()) {
            return Err(PhotonError::InvalidTrap(format!("sigma_b = {} must be positive", self.sigma_b)));
        }
        if self.sigma_b * packet.sigma >= 0.1 {
            return Err(PhotonError::InvalidTrap(format!(
                "sigma_b * sigma = {:.3e} violates sigma_b < 0.1/sigma",
                self.sigma_b * packet.sigma
            )));
        }
        Ok(())
    }
}

/// A plane-wave mode: transverse and longitudinal momentum, azimuth and helicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneWaveMode {
    pub k_perp: f64,
    pub k_z: f64,
    pub phi: f64,
    pub s: Helicity,
}

impl PlaneWaveMode {
    pub fn omega(&self) -> f64 {
        self.k_perp.hypot(self.k_z)
    }

    pub fn theta(&self) -> f64 {
        self.k_perp.atan2(self.k_z)
    }
}

/// Packet normalisation under the continuum rule
/// `Σ_ν → V ∫ d³k/(2π)³ Σ_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub n_packet: f64,
    /// Quantisation volume, eV⁻³.
    pub volume: f64,
    /// `∫ d³k/(2π)³ |profile|²`.
    pub profile_norm: f64,
}

impl Normalization {
    /// `N² V`, the volume-free combination every observable depends on.
    pub fn n2v(&self) -> f64 {
        self.n_packet * self.n_packet * self.volume
    }
}

/// `∫_0^∞ κ e^{-(κ-κ_c)²/σ²} dκ`.
pub(crate) fn radial_gauss_moment(kappa_c: f64, sigma: f64) -> f64 {
    0.5 * sigma * sigma * (-(kappa_c / sigma).powi(2)).exp()
        + kappa_c * sigma * 0.5 * PI.sqrt() * (1.0 + erf_real(kappa_c / sigma))
}

/// `∫_0^∞ e^{-(k-k_c)²/σ²} dk`.
pub(crate) fn half_line_gauss(k_c: f64, sigma: f64) -> f64 {
    sigma * 0.5 * PI.sqrt() * (1.0 + erf_real(k_c / sigma))
}

fn erf_real(x: f64) -> f64 {
    1.0 - crate::specfun::erfc_complex(Complex64::new(x, 0.0)).expect("real erfc").re
}

pub fn normalize(packet: &PhotonPacket, volume: f64) -> Result<Normalization, PhotonError> {
    packet.validate()?;
    if !(volume > 0.0 && volume.is_finite()) {
        return Err(PhotonError::InvalidPacket(format!("volume = {volume} must be positive")));
    }
    let profile_norm = 2.0 * PI / (2.0 * PI).powi(3)
        * radial_gauss_moment(packet.kappa_c, packet.sigma)
        * half_line_gauss(packet.k_c, packet.sigma);
    Ok(Normalization { n_packet: 1.0 / (volume * profile_norm).sqrt(), volume, profile_norm })
}

/// `⟨ν|γ_i⟩` for the plane-wave mode `ν`.
pub fn overlap_plane_wave(packet: &PhotonPacket, norm: &Normalization, mode: &PlaneWaveMode) -> Complex64 {
    if mode.s != packet.lambda || mode.k_perp <= 0.0 || mode.k_z <= 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let phase = packet.m_gamma as f64 * mode.phi + mode.k_perp * packet.b * (mode.phi - packet.phi_b).cos();
    Complex64::from_polar(norm.n_packet * packet.profile(mode.k_perp, mode.k_z), phase)
}

/// Transverse trap density `n(b)`, normalised over the plane.
pub fn trap_density(trap: &TrapSpec, b: f64) -> f64 {
    let s2 = trap.sigma_b * trap.sigma_b;
    (-(b * b) / s2).exp() / (PI * s2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselWeight {
    pub value: f64,
    /// Set when `κ_c σ_b / 2 ≥ 0.5`, outside the power-series regime.
    pub out_of_regime: bool,
}

/// Leading-order trap average of `J²_{m_γ-n}(κ_c b)`:
/// `(κ_c σ_b/2)^{2|Δ|} / |Δ|!`.
pub fn bessel_weight(m_gamma: i32, n: i32, kappa_c: f64, sigma_b: f64) -> BesselWeight {
    let d = (m_gamma - n).unsigned_abs();
    let w = 0.5 * kappa_c * sigma_b;
    let value = if d == 0 {
        1.0
    } else {
        (2.0 * d as f64 * w.ln() - ln_factorial(d)).exp()
    };
    BesselWeight { value, out_of_regime: w >= 0.5 }
}

/// `∫ n(b) J²_p(κ b) d²b = ∫_0^∞ e^{-u} J²_p(κ σ_b √u) du`.
pub fn trap_averaged_bessel_sq(p: i32, kappa: f64, sigma_b: f64) -> Result<f64, PhotonError> {
    let a = kappa * sigma_b;
    if a == 0.0 {
        return Ok(if p == 0 { 1.0 } else { 0.0 });
    }
    let f = |u: f64| (-u).exp() * bessel_j(p, a * u.sqrt()).powi(2);
    let breaks: Vec<f64> = [0.5, 2.0, 5.0, 10.0, 20.0, 40.0].to_vec();
    let tol = Tolerance { rel: 1e-12, abs: 1e-300, max_intervals: 4000 };
    Ok(integrate(f, 0.0, 760.0, &breaks, tol)?.value)
}
