//! TAM statistics of the emitted pair, trap averaging, and the OAM
//! coincidence matrix.

use crate::atom::CouplingTable;
use crate::dynamics::{channel_weights, ChannelTolerance, ChannelWeights, DynamicsError};
use crate::photon::{bessel_weight, normalize, trap_averaged_bessel_sq, PhotonError, PhotonPacket, TrapSpec};
use crate::quad::composite_gauss_legendre;
use crate::specfun::ln_factorial;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObservableError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Photon(#[from] PhotonError),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("resolution error: {0}")]
    Resolution(String),
}

/// Everything needed to evaluate observables for one parameter point.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub table: CouplingTable,
    pub packet: PhotonPacket,
    pub trap: TrapSpec,
    pub m_e: i32,
    pub tol: ChannelTolerance,
    /// Quantisation volume, eV⁻³. Observables do not depend on it.
    pub volume: f64,
}

impl Scenario {
    pub fn new(table: CouplingTable, packet: PhotonPacket, trap: TrapSpec, m_e: i32) -> Self {
        Self { table, packet, trap, m_e, tol: ChannelTolerance::default(), volume: 1.0 }
    }

    pub fn validate(&self) -> Result<(), ObservableError> {
        self.packet.validate()?;
        self.trap.validate(&self.packet)?;
        if self.m_e.abs() > 1 {
            return Err(ObservableError::Domain(format!("m_e = {} outside p manifold", self.m_e)));
        }
        Ok(())
    }

    pub fn weights(&self, tau: f64) -> Result<ChannelWeights, ObservableError> {
        self.validate()?;
        let norm = normalize(&self.packet, self.volume)?;
        Ok(channel_weights(&self.table, &self.packet, &norm, self.m_e, tau, self.tol)?)
    }

    /// `κ_c σ_b / 2`.
    pub fn expansion_parameter(&self) -> f64 {
        0.5 * self.packet.kappa_c * self.trap.sigma_b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TamStats {
    pub j_z_mean: f64,
    /// `J_z - (m_γ + m_e)`.
    pub mismatch: f64,
    pub variance: f64,
    pub std: f64,
    /// `⟨γ_f|γ_f⟩ = 1 + Σ_n w_n I_n`.
    pub norm: f64,
    pub out_of_regime: bool,
}

/// TAM moments from channel weights. Channel terms are divided by the state
/// norm `1 + Σ w_n I_n`; the variance is `⟨J_z²⟩ - ⟨J_z⟩²`.
pub fn tam_stats(weights: &ChannelWeights, m_gamma: i32, m_e: i32, kappa_c: f64, sigma_b: f64) -> TamStats {
    let mut z = 1.0;
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    let mut out_of_regime = false;
    for n in -1..=1 {
        let bw = bessel_weight(m_gamma, n, kappa_c, sigma_b);
        out_of_regime |= bw.out_of_regime;
        let p = bw.value * weights.get(n);
        let d = (n - m_gamma) as f64;
        z += p;
        s1 += d * p;
        s2 += d * d * p;
    }
    let mismatch = s1 / z;
    let variance = (s2 / z - mismatch * mismatch).max(0.0);
    TamStats {
        j_z_mean: (m_gamma + m_e) as f64 + mismatch,
        mismatch,
        variance,
        std: variance.sqrt(),
        norm: z,
        out_of_regime,
    }
}

pub fn tam_mean(scn: &Scenario, tau: f64) -> Result<TamStats, ObservableError> {
    let w = scn.weights(tau)?;
    Ok(tam_stats(&w, scn.packet.m_gamma, scn.m_e, scn.packet.kappa_c, scn.trap.sigma_b))
}

/// Same record as [`tam_mean`]; both moments come from one channel evaluation.
pub fn tam_variance(scn: &Scenario, tau: f64) -> Result<TamStats, ObservableError> {
    tam_mean(scn, tau)
}

/// Large-`m_γ` estimate `δJ_z ≈ (κ_cσ_b/2)^{m_γ} √((m_γ²/m_γ!) Σ_n I_n)`.
pub fn tam_variance_asymptotic(scn: &Scenario, tau: f64, m_gamma: i32) -> Result<f64, ObservableError> {
    if m_gamma < 3 {
        return Err(ObservableError::Domain(format!("asymptotic form needs m_gamma >= 3, got {m_gamma}")));
    }
    let total = scn.weights(tau)?.total();
    let m = m_gamma as f64;
    let ln = m * scn.expansion_parameter().ln() + 0.5 * (2.0 * m.ln() - ln_factorial(m_gamma as u32) + total.ln());
    Ok(ln.exp())
}

/// Channels with the largest `(n-m_γ)² · bessel_weight` at fixed `m_γ`.
pub fn dominant_channels(m_gamma: i32, kappa_c: f64, sigma_b: f64) -> Vec<i32> {
    let score = |n: i32| ((n - m_gamma) as f64).powi(2) * bessel_weight(m_gamma, n, kappa_c, sigma_b).value;
    let best = (-1..=1).map(score).fold(0.0, f64::max);
    (-1..=1).filter(|&n| score(n) >= best * (1.0 - 1e-12) && best > 0.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OamWindow {
    pub l_min: i32,
    pub l_max: i32,
}

impl OamWindow {
    pub fn len(&self) -> usize {
        (self.l_max - self.l_min + 1).max(0) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, l: i32) -> bool {
        (self.l_min..=self.l_max).contains(&l)
    }

    /// Smallest window covering `{m_e, m_γ} ± 2`.
    pub fn around(m_gamma: i32, m_e: i32) -> Self {
        Self { l_min: m_gamma.min(m_e) - 2, l_max: m_gamma.max(m_e) + 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Gauss–Legendre nodes per σ of transverse momentum.
    pub nodes_per_sigma: usize,
    /// Half-width of the momentum grid, in σ.
    pub span_sigmas: f64,
    /// Resolution demanded across the emission line, nodes per Γ.
    pub nodes_per_gamma: usize,
    pub line_span_gammas: f64,
    /// Partial-wave tail tolerance `1 - Σ_p W_p`.
    pub partial_wave_tol: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { nodes_per_sigma: 8, span_sigmas: 5.0, nodes_per_gamma: 8, line_span_gammas: 20.0, partial_wave_tol: 1e-12 }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), ObservableError> {
        if self.nodes_per_sigma < 8 || self.nodes_per_gamma < 8 {
            return Err(ObservableError::Resolution(format!(
                "need >= 8 nodes per sigma and per gamma, got {} and {}",
                self.nodes_per_sigma, self.nodes_per_gamma
            )));
        }
        if !(self.span_sigmas >= 3.0) || !(self.line_span_gammas >= 5.0) {
            return Err(ObservableError::Resolution("grid spans too narrow".into()));
        }
        if !(self.partial_wave_tol > 0.0 && self.partial_wave_tol < 1e-3) {
            return Err(ObservableError::Resolution("partial_wave_tol must lie in (0, 1e-3)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairProbabilityMatrix {
    pub window: OamWindow,
    /// Row-major, `values[l1 - l_min][l2 - l_min]`.
    pub values: Vec<Vec<f64>>,
    pub captured_mass: f64,
    /// Mass away from `l1 + l2 = m_γ + m_e`, within the window.
    pub off_line_mass: f64,
    pub grid_spec: GridSpec,
    /// Partial-wave cutoff actually used.
    pub p_max: u32,
    /// Time standing in for t → ∞, Γ⁻¹.
    pub tau: f64,
    /// Largest element change between τ and τ/2, relative to the largest element.
    pub late_time_change: f64,
    /// Cauchy–Schwarz bound on the neglected cross term, relative to the total.
    pub interference_bound: f64,
}

impl PairProbabilityMatrix {
    pub fn get(&self, l1: i32, l2: i32) -> f64 {
        if !self.window.contains(l1) || !self.window.contains(l2) {
            return 0.0;
        }
        self.values[(l1 - self.window.l_min) as usize][(l2 - self.window.l_min) as usize]
    }
}

const PAIR_TAU: f64 = 20.0;

struct PairParts {
    /// Trap- and packet-averaged `J_p²(κb)` for `p = 0..=p_max`.
    w: Vec<f64>,
    /// `⟨J²_{m_γ-n}(κ_c b)⟩` for `n = -1, 0, 1`.
    t: [f64; 3],
}

fn pair_parts(scn: &Scenario, grid: &GridSpec) -> Result<PairParts, ObservableError> {
    let p = &scn.packet;
    let lo = (p.kappa_c - grid.span_sigmas * p.sigma).max(0.0);
    let hi = p.kappa_c + grid.span_sigmas * p.sigma;
    let panels = ((hi - lo) / p.sigma).ceil().max(1.0) as usize;
    let edges: Vec<f64> = (0..=panels).map(|i| lo + (hi - lo) * i as f64 / panels as f64).collect();
    let mut nodes = composite_gauss_legendre(&edges, grid.nodes_per_sigma);
    for (k, w) in nodes.iter_mut() {
        *w *= *k * (-((*k - p.kappa_c) / p.sigma).powi(2)).exp();
    }
    let total: f64 = nodes.iter().map(|n| n.1).sum();
    let sb = scn.trap.sigma_b;
    let mut w = Vec::new();
    let mut mass = 0.0;
    for order in 0..=400u32 {
        let mut acc = 0.0;
        for (k, wk) in &nodes {
            acc += wk * trap_averaged_bessel_sq(order as i32, *k, sb)?;
        }
        let v = acc / total;
        mass += if order == 0 { v } else { 2.0 * v };
        w.push(v);
        if order > 0 && 1.0 - mass < grid.partial_wave_tol && v < grid.partial_wave_tol {
            let mut t = [0.0; 3];
            for n in -1..=1 {
                t[(n + 1) as usize] = trap_averaged_bessel_sq(p.m_gamma - n, p.kappa_c, sb)?;
            }
            return Ok(PairParts { w, t });
        }
    }
    Err(ObservableError::Resolution("partial-wave sum did not converge by p = 400".into()))
}

fn assemble(
    scn: &Scenario,
    window: OamWindow,
    parts: &PairParts,
    weights: &ChannelWeights,
    tau: f64,
) -> (Vec<Vec<f64>>, f64, f64) {
    let len = window.len();
    let mut m = vec![vec![0.0; len]; len];
    let mut add = |l1: i32, l2: i32, v: f64| {
        if window.contains(l1) && window.contains(l2) {
            m[(l1 - window.l_min) as usize][(l2 - window.l_min) as usize] += 0.5 * v;
            m[(l2 - window.l_min) as usize][(l1 - window.l_min) as usize] += 0.5 * v;
        }
    };
    let mg = scn.packet.m_gamma;
    let me = scn.m_e;
    let emitted = -(-tau).exp_m1();
    let mut f_total = 0.0;
    for (p, wp) in parts.w.iter().enumerate() {
        let p = p as i32;
        add(me, mg + p, emitted * wp);
        f_total += emitted * wp;
        if p > 0 {
            add(me, mg - p, emitted * wp);
            f_total += emitted * wp;
        }
    }
    let mut big_f = 0.0;
    for n in -1..=1 {
        let v = weights.get(n) * parts.t[(n + 1) as usize];
        add(n, me, v);
        big_f += v;
    }
    let total = f_total + big_f;
    for row in m.iter_mut() {
        for v in row.iter_mut() {
            *v /= total;
        }
    }
    (m, total, 2.0 * (f_total * big_f).sqrt() / total)
}

/// OAM coincidence matrix in the late-time limit, averaged over the trap.
pub fn pair_probability(
    scn: &Scenario,
    window: OamWindow,
    grid: &GridSpec,
) -> Result<PairProbabilityMatrix, ObservableError> {
    grid.validate()?;
    scn.validate()?;
    let need = OamWindow::around(scn.packet.m_gamma, scn.m_e);
    if window.l_min > need.l_min || window.l_max < need.l_max {
        return Err(ObservableError::Domain(format!(
            "window [{}, {}] must cover [{}, {}]",
            window.l_min, window.l_max, need.l_min, need.l_max
        )));
    }
    let parts = pair_parts(scn, grid)?;
    let late = scn.weights(PAIR_TAU)?;
    let mid = scn.weights(0.5 * PAIR_TAU)?;
    let (values, _, interference_bound) = assemble(scn, window, &parts, &late, PAIR_TAU);
    let (half, _, _) = assemble(scn, window, &parts, &mid, 0.5 * PAIR_TAU);
    let peak = values.iter().flatten().fold(0.0_f64, |a, &b| a.max(b));
    let change = values
        .iter()
        .flatten()
        .zip(half.iter().flatten())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let line = scn.packet.m_gamma + scn.m_e;
    let mut captured = 0.0;
    let mut off_line = 0.0;
    for (i, row) in values.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            captured += v;
            if window.l_min + i as i32 + window.l_min + j as i32 != line {
                off_line += v;
            }
        }
    }
    Ok(PairProbabilityMatrix {
        window,
        values,
        captured_mass: captured,
        off_line_mass: off_line,
        grid_spec: *grid,
        p_max: (parts.w.len() - 1) as u32,
        tau: PAIR_TAU,
        late_time_change: if peak > 0.0 { change / peak } else { 0.0 },
        interference_bound,
    })
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| m[i][j].powi(2)).sum();
        let diag: f64 = (0..n).map(|i| m[i][i].powi(2)).sum();
        if off <= 1e-30 * diag.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q] == 0.0 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i][i]).collect()
}

/// `1 - σ_max²/‖P‖_F²`; zero for a rank-1 pattern.
pub fn entanglement_witness(matrix: &PairProbabilityMatrix) -> Result<f64, ObservableError> {
    if matrix.captured_mass < 0.98 {
        return Err(ObservableError::Domain(format!(
            "captured mass {} below 0.98",
            matrix.captured_mass
        )));
    }
    rank_one_defect(&matrix.values)
}

/// Witness value of a bare square matrix.
pub fn rank_one_defect(values: &[Vec<f64>]) -> Result<f64, ObservableError> {
    let n = values.len();
    let frob: f64 = values.iter().flatten().map(|v| v * v).sum();
    if frob == 0.0 {
        return Err(ObservableError::Domain("all-zero coincidence matrix".into()));
    }
    let mut gram = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            gram[i][j] = (0..n).map(|k| values[k][i] * values[k][j]).sum();
        }
    }
    let smax2 = symmetric_eigenvalues(&gram).into_iter().fold(0.0, f64::max);
    Ok((1.0 - smax2 / frob).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one_is_zero() {
        let u = [0.1, 0.5, 0.2];
        let v = [0.3, 0.0, 0.7];
        let m: Vec<Vec<f64>> = u.iter().map(|a| v.iter().map(|b| a * b).collect()).collect();
        assert!(rank_one_defect(&m).unwrap() < 1e-14);
    }

    #[test]
    fn antidiagonal_pair_is_positive() {
        let m = vec![vec![0.0, 0.5], vec![0.5, 0.0]];
        assert!((rank_one_defect(&m).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn zero_matrix_rejected() {
        assert!(rank_one_defect(&[vec![0.0]]).is_err());
    }

    #[test]
    fn channel_table() {
        let (k, sb) = (0.21, 0.5068);
        assert_eq!(dominant_channels(-2, k, sb), vec![-1]);
        assert_eq!(dominant_channels(-1, k, sb), vec![0]);
        assert_eq!(dominant_channels(0, k, sb), vec![-1, 1]);
        assert_eq!(dominant_channels(1, k, sb), vec![0]);
        assert_eq!(dominant_channels(2, k, sb), vec![1]);
    }

    #[test]
    fn stats_vanish_without_weights() {
        let w = ChannelWeights { tau: 1.0, values: [0.0; 3], errors: [0.0; 3] };
        let s = tam_stats(&w, 3, 1, 0.21, 0.5);
        assert_eq!(s.mismatch, 0.0);
        assert_eq!(s.std, 0.0);
        assert_eq!(s.j_z_mean, 4.0);
    }
}
