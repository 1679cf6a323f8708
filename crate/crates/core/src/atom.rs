//! Hydrogenlike bound states and the non-dipolar atom–photon coupling.
//!
//! Inside this module lengths and momenta are in atomic units; frequencies
//! cross the boundary in eV. Coupling amplitudes carry the mode-volume factor
//! `1/√V` divided out and have units of eV^(-1/2).

use crate::quad::{integrate, Tolerance};
use crate::specfun::{clebsch_gordan, spherical_bessel, wigner_d1};
use crate::units::{ev_to_atomic_momentum, lifetime_to_width, ALPHA};
use crate::quad::gauss_legendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AtomError {
    #[error("invalid atom: {0}")]
    Invalid(String),
    #[error("multipole sum not converged by L = {max_l}: last term {last_term:e}, sum {sum:e}")]
    Truncation { max_l: u32, last_term: f64, sum: f64 },
    #[error("unknown preset `{0}` (known: Na-3p3s, H-2p1s)")]
    UnknownPreset(String),
    #[error(transparent)]
    Quadrature(#[from] crate::quad::QuadError),
}

/// Photon helicity, ±1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub enum Helicity {
    Plus,
    Minus,
}

impl Helicity {
    pub fn value(self) -> i32 {
        match self {
            Helicity::Plus => 1,
            Helicity::Minus => -1,
        }
    }

    pub fn both() -> [Helicity; 2] {
        [Helicity::Plus, Helicity::Minus]
    }
}

impl TryFrom<i32> for Helicity {
    type Error = String;
    fn try_from(v: i32) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(Helicity::Plus),
            -1 => Ok(Helicity::Minus),
            other => Err(format!("helicity must be +1 or -1, got {other}")),
        }
    }
}

impl From<Helicity> for i32 {
    fn from(h: Helicity) -> i32 {
        h.value()
    }
}

/// Which second Clebsch–Gordan factor enters the multipole sum.
///
/// `AsPrinted` uses `<1 λ; L 0 | 1 n>`, which is non-zero only for `n = λ`.
/// `SublevelResolved` uses `<1 λ; L n-λ | 1 n>` and lets higher multipoles
/// populate `n ≠ λ` directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CgConvention {
    #[default]
    AsPrinted,
    SublevelResolved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    /// Principal quantum number of the ground s-state.
    pub n_g: u32,
    /// Principal quantum number of the excited p-state.
    pub n_e: u32,
    pub z_eff: f64,
    /// Resonance energy, eV.
    pub omega_a: f64,
    /// Decay rate Γ, eV.
    pub gamma: f64,
    /// Multiplier on |M|. `None` calibrates the coupling so that the mode sum
    /// of |g|² reproduces `gamma` exactly.
    #[serde(default)]
    pub coupling_scale: Option<f64>,
    #[serde(default)]
    pub cg_convention: CgConvention,
}

pub const PRESET_NAMES: [&str; 2] = ["Na-3p3s", "H-2p1s"];

impl AtomSpec {
    /// Na 3p–3s modelled with 1s–2p hydrogenlike radial shapes. The effective
    /// charge reproduces the D-line oscillator strength in the length form;
    /// the coupling magnitude is calibrated to the 16.4 ns lifetime.
    pub fn sodium() -> Self {
        let omega_a = 2.1;
        Self {
            n_g: 1,
            n_e: 2,
            z_eff: fit_z_eff(0.96, omega_a, 1, 2),
            omega_a,
            gamma: 4.0e-8,
            coupling_scale: None,
            cg_convention: CgConvention::AsPrinted,
        }
    }

    /// Hydrogen 2p–1s with the ab initio coupling.
    pub fn hydrogen() -> Self {
        Self {
            n_g: 1,
            n_e: 2,
            z_eff: 1.0,
            omega_a: 10.2,
            gamma: lifetime_to_width(1.596e-9),
            coupling_scale: Some(1.0),
            cg_convention: CgConvention::AsPrinted,
        }
    }

    pub fn preset(name: &str) -> Result<Self, AtomError> {
        match name {
            "Na-3p3s" => Ok(Self::sodium()),
            "H-2p1s" => Ok(Self::hydrogen()),
            other => Err(AtomError::UnknownPreset(other.to_string())),
        }
    }

    pub fn validate(&self) -> Result<(), AtomError> {
        let bad = |m: String| Err(AtomError::Invalid(m));
        if self.n_g < 1 {
            return bad(format!("n_g = {} must be >= 1", self.n_g));
        }
        if self.n_e < 2 {
            return bad(format!("n_e = {} must be >= 2", self.n_e));
        }
        if !(self.z_eff > 0.0) {
            return bad(format!("z_eff = {} must be positive", self.z_eff));
        }
        if !(self.omega_a > 0.0) {
            return bad(format!("omega_a = {} must be positive", self.omega_a));
        }
        if !(self.gamma > 0.0) || self.gamma / self.omega_a >= 1e-3 {
            return bad(format!(
                "gamma = {} must satisfy 0 < gamma/omega_a < 1e-3",
                self.gamma
            ));
        }
        if let Some(s) = self.coupling_scale {
            if !s.is_finite() || s < 0.0 {
                return bad(format!("coupling_scale = {s} must be finite and >= 0"));
            }
        }
        Ok(())
    }
}

fn assoc_laguerre(k: u32, alpha: f64, x: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let (mut l0, mut l1) = (1.0, 1.0 + alpha - x);
    for j in 1..k {
        let j = j as f64;
        let l2 = ((2.0 * j + 1.0 + alpha - x) * l1 - (j + alpha) * l0) / (j + 1.0);
        l0 = l1;
        l1 = l2;
    }
    l1
}

fn radial_norm(n: u32, l: u32, z: f64) -> f64 {
    let f = |m: u32| (1..=m).fold(1.0, |a, k| a * k as f64);
    let nf = n as f64;
    ((2.0 * z / nf).powi(3) * f(n - l - 1) / (2.0 * nf * f(n + l))).sqrt()
}

/// Normalised hydrogenlike radial function `R_{n,l}(r)`, `r` in Bohr radii.
pub fn radial_wavefunction(n: u32, l: u32, z_eff: f64, r: f64) -> Result<f64, AtomError> {
    if l >= n {
        return Err(AtomError::Invalid(format!("need l < n, got n = {n}, l = {l}")));
    }
    let rho = 2.0 * z_eff * r / n as f64;
    Ok(radial_norm(n, l, z_eff)
        * rho.powi(l as i32)
        * (-0.5 * rho).exp()
        * assoc_laguerre(n - l - 1, (2 * l + 1) as f64, rho))
}

/// `dR_{n,l}/dr`.
pub fn radial_derivative(n: u32, l: u32, z_eff: f64, r: f64) -> Result<f64, AtomError> {
    if l >= n {
        return Err(AtomError::Invalid(format!("need l < n, got n = {n}, l = {l}")));
    }
    let scale = 2.0 * z_eff / n as f64;
    let rho = scale * r;
    let alpha = (2 * l + 1) as f64;
    let k = n - l - 1;
    let lag = assoc_laguerre(k, alpha, rho);
    let dlag = if k == 0 { 0.0 } else { -assoc_laguerre(k - 1, alpha + 1.0, rho) };
    let e = (-0.5 * rho).exp();
    let poly = if l == 0 { 0.0 } else { l as f64 * rho.powi(l as i32 - 1) * lag };
    let d_rho = e * (poly + rho.powi(l as i32) * (dlag - 0.5 * lag));
    Ok(radial_norm(n, l, z_eff) * scale * d_rho)
}

/// `∫ R_{n_e,1}(r) j_L(kr) R'_{n_g,0}(r) r² dr`, `k` in inverse Bohr radii.
pub fn radial_overlap(n_e: u32, n_g: u32, z_eff: f64, l: u32, k: f64) -> Result<f64, AtomError> {
    if n_e < 2 || n_g < 1 {
        return Err(AtomError::Invalid(format!("bad principal numbers n_e = {n_e}, n_g = {n_g}")));
    }
    let decay = z_eff * (1.0 / n_e as f64 + 1.0 / n_g as f64);
    let r_max = (120.0 + 4.0 * (n_e + n_g) as f64) / decay;
    let breaks: Vec<f64> = (1..12).map(|i| i as f64 * 4.0 / decay).collect();
    let f = |r: f64| {
        radial_wavefunction(n_e, 1, z_eff, r).unwrap()
            * spherical_bessel(l, k * r)
            * radial_derivative(n_g, 0, z_eff, r).unwrap()
            * r
            * r
    };
    let est = integrate(f, 0.0, r_max, &breaks, Tolerance::new(1e-13, 1e-300))?;
    Ok(est.value)
}

/// Length-form radial dipole integral `∫ R_{n_e,1} r R_{n_g,0} r² dr`.
fn radial_dipole(n_e: u32, n_g: u32, z_eff: f64) -> f64 {
    let decay = z_eff * (1.0 / n_e as f64 + 1.0 / n_g as f64);
    let f = |r: f64| {
        radial_wavefunction(n_e, 1, z_eff, r).unwrap() * radial_wavefunction(n_g, 0, z_eff, r).unwrap() * r.powi(3)
    };
    integrate(f, 0.0, 200.0 / decay, &[], Tolerance::new(1e-13, 1e-300))
        .expect("smooth integrand")
        .value
}

/// Effective charge for which the hydrogenlike s→p oscillator strength
/// `(2/3) ω |<r>|²` (atomic units) equals `f_osc` at transition energy
/// `omega_ev`. The dipole scales as `1/Z`.
pub fn fit_z_eff(f_osc: f64, omega_ev: f64, n_g: u32, n_e: u32) -> f64 {
    let omega_au = omega_ev / 27.211_386_245_988;
    let r1 = radial_dipole(n_e, n_g, 1.0).abs();
    r1 * (2.0 * omega_au / (3.0 * f_osc)).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultipoleTerm {
    pub l: u32,
    pub value: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultipoleElement {
    pub value: Complex64,
    pub terms: Vec<MultipoleTerm>,
}

const MAX_MULTIPOLE: u32 = 40;
const MULTIPOLE_REL_CUTOFF: f64 = 1e-10;

/// Transition matrix element `M^0_{n,0}` in atomic momentum units (e = m = 1),
/// `k` in inverse Bohr radii.
pub fn multipole_element(
    atom: &AtomSpec,
    n: i32,
    helicity: Helicity,
    k: f64,
) -> Result<MultipoleElement, AtomError> {
    if n.abs() > 1 {
        return Err(AtomError::Invalid(format!("sublevel n = {n} outside p manifold")));
    }
    let lam = helicity.value() as f64;
    let scale = atom.coupling_scale.unwrap_or(1.0);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut terms = Vec::new();
    let mut quiet = 0;
    for l in 0..=MAX_MULTIPOLE {
        let lf = l as f64;
        let cg1 = clebsch_gordan(1.0, 0.0, lf, 0.0, 1.0, 0.0).expect("valid indices");
        let cg2 = match atom.cg_convention {
            CgConvention::AsPrinted => clebsch_gordan(1.0, lam, lf, 0.0, 1.0, n as f64),
            CgConvention::SublevelResolved => {
                clebsch_gordan(1.0, lam, lf, n as f64 - lam, 1.0, n as f64)
            }
        }
        .expect("valid indices");
        let value = if cg1 == 0.0 || cg2 == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            let radial = radial_overlap(atom.n_e, atom.n_g, atom.z_eff, l, k)?;
            let il = Complex64::i().powu(l);
            -Complex64::i() * il * ((2.0 * lf + 1.0).powi(3) / 3.0).sqrt() * cg1 * cg2 * radial * scale
        };
        sum += value;
        terms.push(MultipoleTerm { l, value });
        // Beyond the triangle range every term vanishes; stop after two
        // consecutive negligible contributions.
        if value.norm() <= MULTIPOLE_REL_CUTOFF * sum.norm() {
            quiet += 1;
            if quiet >= 2 && l >= 3 {
                return Ok(MultipoleElement { value: sum, terms });
            }
        } else {
            quiet = 0;
        }
    }
    let last = terms.last().map(|t| t.value.norm()).unwrap_or(0.0);
    if last <= MULTIPOLE_REL_CUTOFF * sum.norm() {
        return Ok(MultipoleElement { value: sum, terms });
    }
    Err(AtomError::Truncation { max_l: MAX_MULTIPOLE, last_term: last, sum: sum.norm() })
}

/// `G_n(ω, θ)` with √V divided out, before any Γ calibration, in eV^(-1/2).
pub fn coupling_amplitude(
    atom: &AtomSpec,
    n: i32,
    helicity: Helicity,
    omega: f64,
    theta: f64,
) -> Result<Complex64, AtomError> {
    let k = ev_to_atomic_momentum(omega);
    let mut sum = Complex64::new(0.0, 0.0);
    for np in -1..=1 {
        let d = wigner_d1(n, np, theta).map_err(|e| AtomError::Invalid(e.to_string()))?;
        if d != 0.0 {
            sum += d * multipole_element(atom, np, helicity, k)?.value;
        }
    }
    Ok(-(2.0 * PI * ALPHA / omega).sqrt() * ALPHA * sum)
}

/// Coupling amplitudes with the overall normalisation fixed, cached on a
/// strictly increasing frequency grid. Angular dependence is exact through
/// `d^1`; the multipole matrix elements are interpolated linearly in ω.
#[derive(Debug, Clone)]
pub struct CouplingTable {
    atom: AtomSpec,
    /// Applied on top of `coupling_amplitude`.
    calibration: f64,
    omega_nodes: Vec<f64>,
    /// `m_nodes[h][n'+1][i]` for helicity index h (0: +1, 1: -1).
    m_nodes: [[Vec<Complex64>; 3]; 2],
}

impl CouplingTable {
    /// Builds the table on `[omega_a(1 - span), omega_a(1 + span)]`.
    pub fn new(atom: &AtomSpec) -> Result<Self, AtomError> {
        Self::with_span(atom, 0.05, 33)
    }

    pub fn with_span(atom: &AtomSpec, span: f64, nodes: usize) -> Result<Self, AtomError> {
        atom.validate()?;
        let nodes = nodes.max(2);
        let lo = atom.omega_a * (1.0 - span);
        let hi = atom.omega_a * (1.0 + span);
        let omega_nodes: Vec<f64> =
            (0..nodes).map(|i| lo + (hi - lo) * i as f64 / (nodes - 1) as f64).collect();
        let mut m_nodes: [[Vec<Complex64>; 3]; 2] = Default::default();
        for (h, hel) in Helicity::both().into_iter().enumerate() {
            for np in -1..=1 {
                m_nodes[h][(np + 1) as usize] = omega_nodes
                    .iter()
                    .map(|&w| multipole_element(atom, np, hel, ev_to_atomic_momentum(w)).map(|m| m.value))
                    .collect::<Result<_, _>>()?;
            }
        }
        let mut table = Self { atom: atom.clone(), calibration: 1.0, omega_nodes, m_nodes };
        if atom.coupling_scale.is_none() {
            let raw = table.decay_rate(0);
            table.calibration = (atom.gamma / raw).sqrt();
        }
        Ok(table)
    }

    pub fn atom(&self) -> &AtomSpec {
        &self.atom
    }

    pub fn calibration(&self) -> f64 {
        self.calibration
    }

    pub fn omega_nodes(&self) -> &[f64] {
        &self.omega_nodes
    }

    fn multipole_at(&self, h: usize, np: i32, omega: f64) -> Complex64 {
        let nodes = &self.omega_nodes;
        let vals = &self.m_nodes[h][(np + 1) as usize];
        let last = nodes.len() - 1;
        let pos = nodes.partition_point(|&w| w <= omega);
        let i = pos.clamp(1, last) - 1;
        let t = (omega - nodes[i]) / (nodes[i + 1] - nodes[i]);
        vals[i] * (1.0 - t) + vals[i + 1] * t
    }

    /// Calibrated `G_n(ω, θ)`.
    pub fn amplitude(&self, n: i32, helicity: Helicity, omega: f64, theta: f64) -> Complex64 {
        let h = if helicity == Helicity::Plus { 0 } else { 1 };
        let mut sum = Complex64::new(0.0, 0.0);
        for np in -1..=1 {
            let d = wigner_d1(n, np, theta).expect("n in p manifold");
            if d != 0.0 {
                sum += d * self.multipole_at(h, np, omega);
            }
        }
        -(2.0 * PI * ALPHA / omega).sqrt() * ALPHA * sum * self.calibration
    }

    /// Decay rate implied by the mode sum of |g_{ν,n}|² at resonance:
    /// `Γ = ω_a²/(4π²) ∫ dΩ Σ_s |G_{n,s}(ω_a, θ)|²`.
    pub fn decay_rate(&self, n: i32) -> f64 {
        let (x, w) = gauss_legendre(48);
        let omega = self.atom.omega_a;
        let mut acc = 0.0;
        for (xi, wi) in x.iter().zip(&w) {
            let theta = 0.5 * PI * (xi + 1.0);
            let s: f64 = Helicity::both()
                .into_iter()
                .map(|h| self.amplitude(n, h, omega, theta).norm_sqr())
                .sum();
            acc += wi * 0.5 * PI * theta.sin() * s;
        }
        omega * omega / (4.0 * PI * PI) * 2.0 * PI * acc
    }
}
