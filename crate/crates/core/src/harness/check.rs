//! Acceptance checks, shared by the `check` subcommand and the test suite.

use super::cache::Cache;
use super::config::{Axis, Format, Observable, RunConfig, SweepSpec, ToleranceConfig};
use super::emit::{render, EmitOptions};
use super::figures::{pairprob_sigma_b_nm, SIGMA_FACTORS};
use super::oracle::{compare, random_nodes, OracleNode};
use super::sweep::run_sweep;
use crate::atom::{AtomSpec, CouplingTable, Helicity};
use crate::observables::{pair_probability, tam_mean, GridSpec, OamWindow, Scenario};
use crate::photon::{PhotonPacket, TrapSpec};
use crate::specfun::{bessel_j, clebsch_gordan, faddeeva, spherical_bessel, spherical_neumann, wigner_d1_matrix};
use crate::units::{inv_ev_to_um, nm_to_inv_ev};
use num_complex::Complex64;
use serde::Serialize;
use std::time::Instant;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub measured: String,
    pub expected: String,
    pub wall_time_s: f64,
}

impl CheckResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {:<28} measured: {} | expected: {} | {:.2}s",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.measured,
            self.expected,
            self.wall_time_s
        )
    }
}

fn timed(id: u32, name: &str, f: impl FnOnce() -> (bool, String, String)) -> CheckResult {
    let start = Instant::now();
    let (passed, measured, expected) = f();
    CheckResult { id, name: name.into(), passed, measured, expected, wall_time_s: start.elapsed().as_secs_f64() }
}

pub const T_EVAL: f64 = 10.0;

fn sodium_scenario(m_gamma: i32, lambda: Helicity, sigma_factor: f64, sigma_b_nm: f64) -> Scenario {
    let table = CouplingTable::new(&AtomSpec::sodium()).expect("preset is valid");
    let mut p = PhotonPacket::sodium_default(m_gamma);
    p.lambda = lambda;
    p.sigma *= sigma_factor;
    Scenario::new(table, p, TrapSpec::from_nm(sigma_b_nm), 1)
}

fn sodium_std(m_gamma: i32, lambda: Helicity) -> f64 {
    tam_mean(&sodium_scenario(m_gamma, lambda, 1.0, 100.0), T_EVAL).expect("default point evaluates").std
}

/// Criterion 1: `κ_c σ_b / 2` for the given packet and trap.
pub fn unit_anchor(packet: &PhotonPacket, sigma_b_nm: f64) -> CheckResult {
    timed(1, "unit anchor", || {
        let w = 0.5 * packet.kappa_c * nm_to_inv_ev(sigma_b_nm);
        ((w - 0.053).abs() <= 1e-3, format!("kappa_c*sigma_b/2 = {w:.5}"), "0.053 +- 0.001".into())
    })
}

/// Criterion 2: coherence length `1/σ_0` in μm.
pub fn coherence_length(sigma0: f64) -> CheckResult {
    timed(2, "coherence length", || {
        let l = inv_ev_to_um(1.0 / sigma0);
        ((l - 9.38).abs() <= 0.02, format!("{l:.4} um"), "9.38 +- 0.02 um".into())
    })
}

pub fn magnitude_band() -> CheckResult {
    timed(3, "magnitude band", || {
        let s = sodium_std(3, Helicity::Plus);
        ((1e-8..=1e-7).contains(&s), format!("dJz = {s:.4e}"), "[1e-8, 1e-7]".into())
    })
}

/// Local maxima of `values` (endpoints compared with their single neighbour).
pub fn local_maxima(xs: &[i32], values: &[f64]) -> Vec<i32> {
    let n = values.len();
    (0..n)
        .filter(|&i| (i == 0 || values[i] > values[i - 1]) && (i + 1 == n || values[i] > values[i + 1]))
        .map(|i| xs[i])
        .collect()
}

pub fn variance_curve(lambda: Helicity) -> (Vec<i32>, Vec<f64>) {
    let xs: Vec<i32> = (-4..=4).collect();
    let ys = xs.iter().map(|&m| sodium_std(m, lambda)).collect();
    (xs, ys)
}

pub fn two_maxima() -> CheckResult {
    timed(4, "two-maxima structure", || {
        let (xs, plus) = variance_curve(Helicity::Plus);
        let (_, minus) = variance_curve(Helicity::Minus);
        let mp = local_maxima(&xs, &plus);
        let mm = local_maxima(&xs, &minus);
        (mp == [0, 2] && mm == [-2, 0], format!("lambda=+1: {mp:?}, lambda=-1: {mm:?}"), "[0, 2] and [-2, 0]".into())
    })
}

pub fn sigma_orderings() -> CheckResult {
    timed(5, "sigma orderings", || {
        let stats: Vec<_> = SIGMA_FACTORS
            .iter()
            .map(|&f| tam_mean(&sodium_scenario(3, Helicity::Plus, f, 100.0), T_EVAL).expect("evaluates"))
            .collect();
        let std_dec = stats.windows(2).all(|w| w[1].std < w[0].std);
        let mis_inc = stats.windows(2).all(|w| w[1].mismatch > w[0].mismatch);
        let fmt = |f: &dyn Fn(usize) -> f64| (0..3).map(|i| format!("{:.3e}", f(i))).collect::<Vec<_>>().join(", ");
        (
            std_dec && mis_inc,
            format!("dJz: {}; DJz: {}", fmt(&|i| stats[i].std), fmt(&|i| stats[i].mismatch)),
            "dJz decreasing, DJz increasing".into(),
        )
    })
}

/// Least-squares slope of `ln δJ_z` over `m_γ ∈ {4, 5, 6}`.
pub fn tail_slope() -> (f64, f64) {
    let xs = [4.0, 5.0, 6.0];
    let ys: Vec<f64> = [4, 5, 6].iter().map(|&m| sodium_std(m, Helicity::Plus).ln()).collect();
    let mx = 5.0;
    let my = ys.iter().sum::<f64>() / 3.0;
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / 2.0;
    let w = 0.5 * PhotonPacket::sodium_default(0).kappa_c * nm_to_inv_ev(100.0);
    (slope, w.ln())
}

pub fn log_linear_tail() -> CheckResult {
    timed(6, "log-linear tail", || {
        let (slope, target) = tail_slope();
        let dev = ((slope - target) / target).abs();
        (dev <= 0.15, format!("slope {slope:.4} ({:.1}% off)", 100.0 * dev), format!("{target:.4} within 15%"))
    })
}

pub fn oracle_equivalence() -> CheckResult {
    timed(7, "oracle equivalence", || {
        let nodes = random_nodes(20, 7);
        let na = OracleNode {
            s: PhotonPacket::sodium_default(0).sigma / AtomSpec::sodium().gamma,
            delta1: 0.0,
            delta2: 0.0,
            delta_c: 0.0,
            tau: T_EVAL,
        };
        let r = compare(&nodes, &[na], 200_000);
        let worst = r.max_rel_pw.max(r.max_rel_triple).max(r.max_rel_reduced);
        (
            worst <= 1e-7 && r.max_mc_z <= 3.0,
            format!(
                "{} nodes: rel pw {:.1e}, F {:.1e}, I {:.1e}; MC max z {:.2} over {} nodes",
                r.nodes, r.max_rel_pw, r.max_rel_triple, r.max_rel_reduced, r.max_mc_z, r.mc_nodes
            ),
            "rel <= 1e-7, |z| <= 3".into(),
        )
    })
}

#[derive(Debug, Clone, Copy)]
pub struct ConservationNumbers {
    pub mismatch_small: f64,
    pub std_small: f64,
    pub std_ref: f64,
    pub off_line: f64,
}

pub fn conservation_numbers() -> ConservationNumbers {
    let small = tam_mean(&sodium_scenario(3, Helicity::Plus, 1.0, 1.0), T_EVAL).expect("evaluates");
    let reference = tam_mean(&sodium_scenario(3, Helicity::Plus, 1.0, 100.0), T_EVAL).expect("evaluates");
    let scn = sodium_scenario(3, Helicity::Plus, 1.0, 1.0);
    let m = pair_probability(&scn, OamWindow::around(3, 1), &GridSpec::default()).expect("evaluates");
    ConservationNumbers {
        mismatch_small: small.mismatch,
        std_small: small.std,
        std_ref: reference.std,
        off_line: m.off_line_mass,
    }
}

pub fn conservation_limit() -> CheckResult {
    timed(8, "conservation limit", || {
        let c = conservation_numbers();
        let ratio = c.std_small / c.std_ref;
        (
            c.mismatch_small.abs() < 1e-12 && ratio < 1e-6 && c.off_line < 1e-4,
            format!("|DJz| {:.1e}, dJz ratio {ratio:.2e}, off-line {:.1e}", c.mismatch_small.abs(), c.off_line),
            "< 1e-12, < 1e-6, < 1e-4".into(),
        )
    })
}

/// `P_{1,-1} + P_{-1,1}` for the hydrogen preset, `m_γ = -1`, over the trap grid.
pub fn hydrogen_pair_curve() -> (Vec<f64>, Vec<f64>) {
    let table = CouplingTable::new(&AtomSpec::hydrogen()).expect("preset is valid");
    let grid = pairprob_sigma_b_nm();
    let vals = grid
        .iter()
        .map(|&nm| {
            let scn = Scenario::new(table.clone(), PhotonPacket::hydrogen_default(-1), TrapSpec::from_nm(nm), 1);
            let m = pair_probability(&scn, OamWindow::around(-1, 1), &GridSpec::default()).expect("evaluates");
            m.get(1, -1) + m.get(-1, 1)
        })
        .collect();
    (grid, vals)
}

pub fn hydrogen_nonmonotonic() -> CheckResult {
    timed(9, "H-preset non-monotonicity", || {
        let (_, v) = hydrogen_pair_curve();
        let imax = v.iter().enumerate().fold(0, |b, (i, x)| if *x > v[b] { i } else { b });
        let interior = imax > 0 && imax + 1 < v.len();
        (
            interior,
            format!("max at index {imax} of {}; P from {:.4} to {:.4}", v.len(), v[0], v[v.len() - 1]),
            "interior maximum".into(),
        )
    })
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SpecfunResiduals {
    pub unitarity: f64,
    pub cg_orthogonality: f64,
    pub bessel_recurrence: f64,
    pub wronskian: f64,
    pub faddeeva_reflection: f64,
}

pub fn specfun_residuals() -> SpecfunResiduals {
    let mut r = SpecfunResiduals::default();
    for k in 0..=12 {
        let d = wigner_d1_matrix(std::f64::consts::PI * k as f64 / 12.0);
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|m| d[m][i] * d[m][j]).sum();
                r.unitarity = r.unitarity.max((dot - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
    }
    for (j1, j2) in [(1.0, 1.0), (1.0, 2.0), (2.0, 2.0), (0.5, 1.5)] {
        for m1a in 0..=(2.0 * j1) as i32 {
            let m1 = -j1 + m1a as f64;
            for m1b in 0..=(2.0 * j1) as i32 {
                let m1p = -j1 + m1b as f64;
                for m in 0..=(2.0 * (j1 + j2)) as i32 {
                    let mm = -(j1 + j2) + m as f64;
                    let (m2, m2p) = (mm - m1, mm - m1p);
                    if m2.abs() > j2 || m2p.abs() > j2 {
                        continue;
                    }
                    let mut sum = 0.0;
                    let mut jj = (j1 - j2).abs();
                    while jj <= j1 + j2 + 1e-9 {
                        if mm.abs() <= jj {
                            sum += clebsch_gordan(j1, m1, j2, m2, jj, mm).unwrap()
                                * clebsch_gordan(j1, m1p, j2, m2p, jj, mm).unwrap();
                        }
                        jj += 1.0;
                    }
                    let want = if m1a == m1b { 1.0 } else { 0.0 };
                    r.cg_orthogonality = r.cg_orthogonality.max((sum - want).abs());
                }
            }
        }
    }
    for &x in &[0.3, 1.7, 6.0, 25.0] {
        for m in 1..12 {
            let lhs = bessel_j(m - 1, x) + bessel_j(m + 1, x);
            let rhs = 2.0 * m as f64 / x * bessel_j(m, x);
            r.bessel_recurrence = r.bessel_recurrence.max((lhs - rhs).abs());
        }
        for l in 1..10u32 {
            let w = spherical_bessel(l, x) * spherical_neumann(l - 1, x) - spherical_bessel(l - 1, x) * spherical_neumann(l, x);
            r.wronskian = r.wronskian.max(((w - 1.0 / (x * x)) * x * x).abs());
        }
    }
    for &(re, im) in &[(0.3, 0.2), (2.0, -1.0), (-4.0, 0.5), (0.0, -0.7)] {
        let z = Complex64::new(re, im);
        let lhs = faddeeva(-z).unwrap();
        let rhs = 2.0 * (-z * z).exp() - faddeeva(z).unwrap();
        r.faddeeva_reflection = r.faddeeva_reflection.max((lhs - rhs).norm() / lhs.norm());
    }
    r
}

pub fn specfun_suite() -> CheckResult {
    timed(10, "special-function suite", || {
        let r = specfun_residuals();
        (
            r.unitarity < 1e-14
                && r.cg_orthogonality < 1e-12
                && r.bessel_recurrence < 1e-12
                && r.wronskian < 1e-12
                && r.faddeeva_reflection < 1e-12,
            format!(
                "d1 {:.1e}, CG {:.1e}, J rec {:.1e}, W {:.1e}, w refl {:.1e}",
                r.unitarity, r.cg_orthogonality, r.bessel_recurrence, r.wronskian, r.faddeeva_reflection
            ),
            "1e-14, 1e-12, 1e-12, 1e-12, 1e-12".into(),
        )
    })
}

/// Small Na sweep used by the determinism check.
pub fn determinism_config(workers: usize) -> RunConfig {
    RunConfig {
        preset: Some("Na-3p3s".into()),
        atom: None,
        packet: None,
        trap: None,
        sweep: SweepSpec {
            observable: Observable::Tam,
            axis: Axis::MGamma { values: (-2..=4).collect() },
            series: Some(Axis::Time { values: vec![5.0, 10.0] }),
            t: T_EVAL,
            window: None,
        },
        tolerance: ToleranceConfig::default(),
        output: Default::default(),
        workers,
    }
}

fn scratch_dir() -> std::path::PathBuf {
    let nanos = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_nanos()).unwrap_or(0);
    std::env::temp_dir().join(format!("biphoton-check-{}-{nanos}", std::process::id()))
}

pub fn determinism_cache() -> CheckResult {
    timed(11, "determinism and cache", || {
        let opts = EmitOptions::default();
        let one = run_sweep(&determinism_config(1), None, false).expect("sweep runs");
        let many = run_sweep(&determinism_config(4), None, false).expect("sweep runs");
        let same_bytes = render(&one.result, Format::Csv, opts) == render(&many.result, Format::Csv, opts)
            && render(&one.result, Format::Json, opts) == render(&many.result, Format::Json, opts);
        let dir = scratch_dir();
        let cache = Cache::new(&dir);
        let first = run_sweep(&determinism_config(2), Some(&cache), true).expect("sweep runs");
        let second = run_sweep(&determinism_config(2), Some(&cache), true).expect("sweep runs");
        let hit_ok = second.cache_hit
            && second.evaluations == 0
            && second.result == first.result
            && second.result.without_timing() == one.result.without_timing();
        let _ = std::fs::remove_dir_all(&dir);
        (
            same_bytes && hit_ok,
            format!(
                "bytes equal across workers: {same_bytes}; cache hit: {}, evaluations on hit: {}",
                second.cache_hit, second.evaluations
            ),
            "identical output, hit with 0 evaluations".into(),
        )
    })
}

pub fn run_all() -> Vec<CheckResult> {
    let na = PhotonPacket::sodium_default(3);
    vec![
        unit_anchor(&na, 100.0),
        coherence_length(na.sigma),
        magnitude_band(),
        two_maxima(),
        sigma_orderings(),
        log_linear_tail(),
        oracle_equivalence(),
        conservation_limit(),
        hydrogen_nonmonotonic(),
        specfun_suite(),
        determinism_cache(),
    ]
}
