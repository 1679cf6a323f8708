//! Time-domain amplitudes and the channel-weight integral.
//!
//! Times are dimensionless, `τ = Γt`; detunings enter as `δ = Δ/Γ` and the
//! packet spread as `s = σ/Γ`. Detuning is `Δ = ω - ω_a`.

use crate::atom::CouplingTable;
use crate::photon::{overlap_plane_wave, Normalization, PhotonPacket, PlaneWaveMode};
use crate::quad::{integrate, Estimate, Tolerance};
use crate::specfun::{bessel_j, faddeeva};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Largest admissible time, in units of Γ⁻¹.
pub const MAX_TIME: f64 = 50.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
    #[error("time {0} outside [0, {MAX_TIME}]")]
    TimeRange(f64),
    #[error("Faddeeva evaluation failed at tau = {tau}, alpha = {alpha}, s = {s}: {reason}")]
    Faddeeva { tau: f64, alpha: Complex64, s: f64, reason: String },
    #[error("{stage} quadrature failed: {source}")]
    Quadrature { stage: &'static str, source: crate::quad::QuadError },
}

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check_time(tau: f64) -> Result<(), DynamicsError> {
    if (0.0..=MAX_TIME).contains(&tau) {
        Ok(())
    } else {
        Err(DynamicsError::TimeRange(tau))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    pub fn new(points: Vec<f64>) -> Result<Self, DynamicsError> {
        if points.is_empty() {
            return Err(DynamicsError::InvalidGrid("empty".into()));
        }
        if !(points[0] >= 0.0) {
            return Err(DynamicsError::InvalidGrid(format!("first point {} < 0", points[0])));
        }
        if points.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(DynamicsError::InvalidGrid("points not strictly increasing".into()));
        }
        let last = *points.last().unwrap();
        if last > MAX_TIME {
            return Err(DynamicsError::InvalidGrid(format!("t_max = {last} exceeds {MAX_TIME}")));
        }
        Ok(Self { points })
    }

    pub fn uniform(t_max: f64, count: usize) -> Result<Self, DynamicsError> {
        let count = count.max(2);
        Self::new((0..count).map(|i| t_max * i as f64 / (count - 1) as f64).collect())
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn t_max(&self) -> f64 {
        *self.points.last().unwrap()
    }
}

/// `(e^x - 1)/x`, continuous through `x = 0`.
pub fn phi1(x: Complex64) -> Complex64 {
    if x.norm() < 1e-3 {
        let mut term = c(1.0, 0.0);
        let mut sum = term;
        for k in 2..10 {
            term *= x / k as f64;
            sum += term;
        }
        sum
    } else {
        (x.exp() - 1.0) / x
    }
}

/// `∫_0^1 u² e^{xu} du`.
fn phi_sq(x: Complex64) -> Complex64 {
    if x.norm() < 0.5 {
        let mut term = c(1.0, 0.0);
        let mut sum = term / 3.0;
        for k in 1..30 {
            term *= x / k as f64;
            sum += term / (k + 3) as f64;
        }
        sum
    } else {
        let x2 = x * x;
        x.exp() * (1.0 / x - 2.0 / x2 + 2.0 / (x2 * x)) - 2.0 / (x2 * x)
    }
}

/// `∫_{t0}^{t1} e^{ατ - s²τ²/2} dτ` for `0 ≤ t0 ≤ t1`.
///
/// Completes the square and evaluates erfc differences through the Faddeeva
/// function on whichever side of the saddle each endpoint lies; falls back to
/// a two-term Taylor expansion in `s` when `s·t1 < 1e-6`.
pub fn gauss_exp_integral(alpha: Complex64, s: f64, t0: f64, t1: f64) -> Result<Complex64, DynamicsError> {
    if t1 <= t0 {
        return Ok(c(0.0, 0.0));
    }
    if s * t1 < 1e-6 {
        let prim = |t: f64| {
            let x = alpha * t;
            t * phi1(x) - 0.5 * s * s * t.powi(3) * phi_sq(x)
        };
        return Ok(prim(t1) - prim(t0));
    }
    let a = alpha / (s * s);
    let r2 = std::f64::consts::SQRT_2;
    let x = |t: f64| (t - a) * (s / r2);
    let env = |t: f64| (alpha * t - 0.5 * s * s * t * t).exp();
    let w = |z: Complex64, t: f64| {
        faddeeva(z).map_err(|e| DynamicsError::Faddeeva { tau: t, alpha, s, reason: e.to_string() })
    };
    let (x0, x1) = (x(t0), x(t1));
    // e^{s²a²/2} erfc(x) = env(t) w(ix), erfc(-x) likewise with w(-ix).
    let diff = if x0.re >= 0.0 {
        env(t0) * w(I * x0, t0)? - env(t1) * w(I * x1, t1)?
    } else if x1.re < 0.0 {
        env(t1) * w(-I * x1, t1)? - env(t0) * w(-I * x0, t0)?
    } else {
        2.0 * (alpha * alpha / (2.0 * s * s)).exp() - env(t0) * w(-I * x0, t0)? - env(t1) * w(I * x1, t1)?
    };
    Ok(diff * ((PI / 2.0).sqrt() / s))
}

/// Spontaneous-emission kernel `f = (1 - e^{-Γt/2 - iΔt})/(Γ/2 + iΔ)`, eV⁻¹.
/// `delta` in eV, `tau` in units of Γ⁻¹.
pub fn emission_kernel_f(gamma: f64, delta: f64, tau: f64) -> Complex64 {
    let z = c(0.5, delta / gamma);
    let x = -z * tau;
    // 1 - e^{x} = -x φ1(x)
    -x * phi1(x) / (z * gamma)
}

/// Plane-wave coupling `g_{ν,n}` with the volume restored, eV.
pub fn mode_coupling(table: &CouplingTable, volume: f64, mode: &PlaneWaveMode, n: i32) -> Complex64 {
    Complex64::from_polar(1.0, n as f64 * mode.phi) * table.amplitude(n, mode.s, mode.omega(), mode.theta())
        / volume.sqrt()
}

fn detuning(table: &CouplingTable, omega: f64) -> f64 {
    let atom = table.atom();
    (omega - atom.omega_a) / atom.gamma
}

/// `∫_0^τ dτ2 ∫_0^{τ2} dτ1 e^{aτ2 - bτ1}`.
pub fn pw_double_integral(a: Complex64, b: Complex64, tau: f64) -> Complex64 {
    (tau * phi1(a * tau) - tau * phi1((a - b) * tau)) / b
}

/// `C^pw_{e,ν,n}(τ)` for an atom initially in `m_e` with one photon in `ν0`.
#[allow(clippy::too_many_arguments)]
pub fn amplitude_e_pw(
    table: &CouplingTable,
    volume: f64,
    mode: &PlaneWaveMode,
    mode0: &PlaneWaveMode,
    n: i32,
    m_e: i32,
    tau: f64,
) -> Result<Complex64, DynamicsError> {
    check_time(tau)?;
    let gamma = table.atom().gamma;
    let decay = (-0.5 * tau).exp();
    let direct = if mode == mode0 && n == m_e { decay } else { 0.0 };
    let g = mode_coupling(table, volume, mode, m_e);
    let g0 = mode_coupling(table, volume, mode0, n).conj();
    let a = c(0.5, detuning(table, mode0.omega()));
    let b = c(0.5, detuning(table, mode.omega()));
    Ok(direct - g * g0 / (gamma * gamma) * decay * pw_double_integral(a, b, tau))
}

/// Laplace-method prefactor of the packet-integrated amplitudes for channel
/// `n`: `N√V i^{m-n} σ²κ_c/(2π) G*_n(ω_c,θ_c) e^{i(m-n)φ_b} J_{m-n}(κ_c b)`.
pub fn vortex_prefactor(table: &CouplingTable, packet: &PhotonPacket, norm: &Normalization, n: i32) -> Complex64 {
    let d = packet.m_gamma - n;
    let bessel = bessel_j(d, packet.kappa_c * packet.b);
    if bessel == 0.0 {
        return c(0.0, 0.0);
    }
    let g = table.amplitude(n, packet.lambda, packet.omega_c(), packet.theta_c()).conj();
    let phase = Complex64::from_polar(1.0, d as f64 * packet.phi_b) * I.powi(d);
    norm.n_packet * norm.volume.sqrt() * packet.sigma.powi(2) * packet.kappa_c / (2.0 * PI) * g * phase * bessel
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VortexAmplitude {
    pub value: Complex64,
    /// Set when `b σ ≥ 0.1`, where the Laplace step is unreliable.
    pub out_of_regime: bool,
}

fn regime_flag(packet: &PhotonPacket) -> bool {
    packet.b * packet.sigma >= 0.1
}

/// `C^v_{e,ν,n}(τ)` for the packet.
#[allow(clippy::too_many_arguments)]
pub fn amplitude_e_vortex(
    table: &CouplingTable,
    packet: &PhotonPacket,
    norm: &Normalization,
    mode: &PlaneWaveMode,
    n: i32,
    m_e: i32,
    tau: f64,
) -> Result<VortexAmplitude, DynamicsError> {
    check_time(tau)?;
    let gamma = table.atom().gamma;
    let decay = (-0.5 * tau).exp();
    let mut value = if n == m_e { overlap_plane_wave(packet, norm, mode) * decay } else { c(0.0, 0.0) };
    let pref = vortex_prefactor(table, packet, norm, n);
    if pref != c(0.0, 0.0) && tau > 0.0 {
        let s = packet.sigma / gamma;
        let cc = c(0.5, detuning(table, packet.omega_c()));
        let b = c(0.5, detuning(table, mode.omega()));
        let t = (gauss_exp_integral(cc, s, 0.0, tau)? - gauss_exp_integral(cc - b, s, 0.0, tau)?) / b;
        let g = mode_coupling(table, norm.volume, mode, m_e);
        value -= pref * g / (gamma * gamma) * decay * t;
    }
    Ok(VortexAmplitude { value, out_of_regime: regime_flag(packet) })
}

/// Dimensionless triple integral of the scattering kernel:
/// `∫_0^τ dτ3 ∫_0^τ3 dτ2 ∫_0^τ2 dτ1 e^{-c1 τ3 + cc τ2 - c2 τ1 - s²τ2²/2}`
/// with `c_j = 1/2 + iδ_j` and `cc = 1/2 + iδ_c`.
pub fn scattering_triple_integral(
    delta1: f64,
    delta2: f64,
    delta_c: f64,
    s: f64,
    tau: f64,
) -> Result<Complex64, DynamicsError> {
    if tau <= 0.0 {
        return Ok(c(0.0, 0.0));
    }
    let (c1, c2, cc) = (c(0.5, delta1), c(0.5, delta2), c(0.5, delta_c));
    let tail = (-c1 * tau).exp();
    let gi = |alpha: Complex64| gauss_exp_integral(alpha, s, 0.0, tau);
    let sum = gi(cc - c1)? - tail * gi(cc)? - gi(cc - c1 - c2)? + tail * gi(cc - c2)?;
    Ok(sum / (c1 * c2))
}

/// `F_{m,n}(ω1, ω2, τ)`, eV⁻³.
#[allow(clippy::too_many_arguments)]
pub fn scattering_kernel_f(
    table: &CouplingTable,
    packet: &PhotonPacket,
    norm: &Normalization,
    n: i32,
    omega1: f64,
    omega2: f64,
    tau: f64,
) -> Result<VortexAmplitude, DynamicsError> {
    check_time(tau)?;
    let gamma = table.atom().gamma;
    let pref = vortex_prefactor(table, packet, norm, n);
    let value = if pref == c(0.0, 0.0) || tau == 0.0 {
        c(0.0, 0.0)
    } else {
        let t = scattering_triple_integral(
            detuning(table, omega1),
            detuning(table, omega2),
            detuning(table, packet.omega_c()),
            packet.sigma / gamma,
            tau,
        )?;
        pref * t / gamma.powi(3)
    };
    Ok(VortexAmplitude { value, out_of_regime: regime_flag(packet) })
}

/// Symmetrised two-photon amplitude `C^v_{g,ν1,ν2}(τ)`.
#[allow(clippy::too_many_arguments)]
pub fn amplitude_g_vortex(
    table: &CouplingTable,
    packet: &PhotonPacket,
    norm: &Normalization,
    mode1: &PlaneWaveMode,
    mode2: &PlaneWaveMode,
    m_e: i32,
    tau: f64,
) -> Result<VortexAmplitude, DynamicsError> {
    check_time(tau)?;
    let gamma = table.atom().gamma;
    let half = |a: &PlaneWaveMode, b: &PlaneWaveMode| -> Result<Complex64, DynamicsError> {
        let delta = a.omega() - table.atom().omega_a;
        let mut v = mode_coupling(table, norm.volume, a, m_e)
            * emission_kernel_f(gamma, delta, tau)
            * overlap_plane_wave(packet, norm, b);
        let gb = mode_coupling(table, norm.volume, b, m_e);
        for n in -1..=1 {
            let f = scattering_kernel_f(table, packet, norm, n, a.omega(), b.omega(), tau)?.value;
            if f != c(0.0, 0.0) {
                v -= mode_coupling(table, norm.volume, a, n) * gb * f;
            }
        }
        Ok(v)
    };
    let value = half(mode1, mode2)? + half(mode2, mode1)?;
    Ok(VortexAmplitude { value, out_of_regime: regime_flag(packet) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeSet {
    pub e_pw: Complex64,
    pub e_v: Complex64,
    pub g_v: Complex64,
}

/// All three amplitudes at once for a given pair of modes; `mode1` doubles
/// as the incident plane-wave mode of `e_pw`.
#[allow(clippy::too_many_arguments)]
pub fn amplitude_set(
    table: &CouplingTable,
    packet: &PhotonPacket,
    norm: &Normalization,
    mode1: &PlaneWaveMode,
    mode2: &PlaneWaveMode,
    n: i32,
    m_e: i32,
    tau: f64,
) -> Result<AmplitudeSet, DynamicsError> {
    Ok(AmplitudeSet {
        e_pw: amplitude_e_pw(table, norm.volume, mode2, mode1, n, m_e, tau)?,
        e_v: amplitude_e_vortex(table, packet, norm, mode2, n, m_e, tau)?.value,
        g_v: amplitude_g_vortex(table, packet, norm, mode1, mode2, m_e, tau)?.value,
    })
}

/// Tolerances for the channel-weight integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelTolerance {
    pub rel: f64,
    /// Absolute floor, in units of the integral's natural scale `s⁻³`.
    pub abs_floor: f64,
}

impl Default for ChannelTolerance {
    fn default() -> Self {
        Self { rel: 1e-7, abs_floor: 1e-30 }
    }
}

/// `K(τ) = ∬_{0≤τ1≤τ3≤τ} e^{-(τ1+τ3)} |∫_{τ1}^{τ3} e^{(1/2+iδ_c)τ2 - s²τ2²/2} dτ2|²`.
pub fn reduced_channel_integral(
    s: f64,
    delta_c: f64,
    tau: f64,
    tol: ChannelTolerance,
) -> Result<Estimate<f64>, DynamicsError> {
    check_time(tau)?;
    if tau == 0.0 {
        return Ok(Estimate { value: 0.0, error: 0.0, intervals: 0 });
    }
    // A coarse pass fixes the absolute scale, so inner integrals far below
    // the total are not refined into round-off.
    let floor = tol.abs_floor / (s.max(1.0)).powi(3);
    let pilot = reduced_channel_pass(s, delta_c, tau, tol.rel.max(1e-4), floor)?;
    reduced_channel_pass(s, delta_c, tau, tol.rel, floor.max(tol.rel * 1e-3 * pilot.value.abs()))
}

fn reduced_channel_pass(s: f64, delta_c: f64, tau: f64, rel: f64, abs: f64) -> Result<Estimate<f64>, DynamicsError> {
    let cc = c(0.5, delta_c);
    let width = 1.0 / s.max(1e-3);
    let marks: Vec<f64> = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0].iter().map(|k| k * width).collect();
    let unit: Vec<f64> = (1..=MAX_TIME as usize).map(|k| k as f64).collect();
    let inner_tol = Tolerance { rel: rel * 1e-2, abs: abs / tau, max_intervals: 2000 };
    let outer_tol = Tolerance { rel, abs, max_intervals: 2000 };
    let mut failure: Option<DynamicsError> = None;
    let outer = |t1: f64| -> f64 {
        if failure.is_some() {
            return 0.0;
        }
        let mut inner_err = None;
        let inner = |t3: f64| -> f64 {
            match gauss_exp_integral(cc, s, t1, t3) {
                Ok(j) => (-(t1 + t3)).exp() * j.norm_sqr(),
                Err(e) => {
                    inner_err.get_or_insert(e);
                    0.0
                }
            }
        };
        let mut breaks: Vec<f64> = marks.iter().map(|m| t1 + m).collect();
        breaks.extend(unit.iter().copied());
        let r = integrate(inner, t1, tau, &breaks, inner_tol);
        match (r, inner_err) {
            (_, Some(e)) => {
                failure = Some(e);
                0.0
            }
            (Ok(est), None) => est.value,
            (Err(q), None) => {
                failure = Some(DynamicsError::Quadrature { stage: "inner", source: q });
                0.0
            }
        }
    };
    let mut breaks = marks.clone();
    breaks.extend(unit.iter().copied());
    let est = integrate(outer, 0.0, tau, &breaks, outer_tol)
        .map_err(|q| DynamicsError::Quadrature { stage: "outer", source: q });
    if let Some(e) = failure {
        return Err(e);
    }
    est
}

/// Channel weights `I_{n,λ}(τ)` for `n = -1, 0, 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelWeights {
    pub tau: f64,
    /// Indexed by `n + 1`.
    pub values: [f64; 3],
    /// Absolute error estimate carried from the reduced integral.
    pub errors: [f64; 3],
}

impl ChannelWeights {
    pub fn get(&self, n: i32) -> f64 {
        self.values[(n + 1) as usize]
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// `[1+δ_{n,m_e}] · 4 N²V κ_c²σ⁴/(4π²) · |G_n(ω_c,θ_c)|² / Γ²`, multiplying `K(τ)`.
pub fn channel_prefactor(table: &CouplingTable, packet: &PhotonPacket, norm: &Normalization, n: i32, m_e: i32) -> f64 {
    let gamma = table.atom().gamma;
    let g = table.amplitude(n, packet.lambda, packet.omega_c(), packet.theta_c());
    let degeneracy = if n == m_e { 2.0 } else { 1.0 };
    degeneracy * 4.0 * norm.n2v() * packet.kappa_c.powi(2) * packet.sigma.powi(4) / (4.0 * PI * PI) * g.norm_sqr()
        / (gamma * gamma)
}

pub fn channel_weights(
    table: &CouplingTable,
    packet: &PhotonPacket,
    norm: &Normalization,
    m_e: i32,
    tau: f64,
    tol: ChannelTolerance,
) -> Result<ChannelWeights, DynamicsError> {
    let gamma = table.atom().gamma;
    let k = reduced_channel_integral(
        packet.sigma / gamma,
        detuning(table, packet.omega_c()),
        tau,
        tol,
    )?;
    let mut values = [0.0; 3];
    let mut errors = [0.0; 3];
    for n in -1..=1 {
        let p = channel_prefactor(table, packet, norm, n, m_e);
        values[(n + 1) as usize] = p * k.value;
        errors[(n + 1) as usize] = p * k.error;
    }
    Ok(ChannelWeights { tau, values, errors })
}

/// Single channel weight `I_{n,λ}(τ)`.
pub fn channel_weight(
    table: &CouplingTable,
    packet: &PhotonPacket,
    norm: &Normalization,
    n: i32,
    m_e: i32,
    tau: f64,
) -> Result<f64, DynamicsError> {
    Ok(channel_weights(table, packet, norm, m_e, tau, ChannelTolerance::default())?.get(n))
}
