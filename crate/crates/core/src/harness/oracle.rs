//! Brute-force references for the closed-form kernels: nested adaptive
//! quadrature of the original integrands and a Monte Carlo estimate of the
//! channel integral before the delta reduction.

use crate::dynamics::{pw_double_integral, reduced_channel_integral, scattering_triple_integral, ChannelTolerance};
use crate::quad::{integrate, Tolerance};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tol(rel: f64) -> Tolerance {
    Tolerance { rel, abs: 1e-300, max_intervals: 4000 }
}

fn breaks(s: f64, upto: f64) -> Vec<f64> {
    let mut b: Vec<f64> = [0.5, 1.0, 2.0, 4.0].iter().map(|k| k / s).filter(|&x| x < upto).collect();
    b.extend((1..upto.ceil() as usize).map(|k| k as f64));
    b
}

/// `∫_0^τ dτ2 ∫_0^{τ2} dτ1 e^{aτ2 - bτ1}` by nested adaptive quadrature.
pub fn pw_double_oracle(a: Complex64, b: Complex64, tau: f64) -> Complex64 {
    let outer = |t2: f64| integrate(|t1: f64| (a * t2 - b * t1).exp(), 0.0, t2, &[], tol(1e-13)).unwrap().value;
    integrate(outer, 0.0, tau, &breaks(1.0, tau), tol(1e-12)).unwrap().value
}

/// The scattering triple integral by three nested adaptive rules.
pub fn triple_oracle(d1: f64, d2: f64, dc: f64, s: f64, tau: f64) -> Complex64 {
    let (c1, c2, cc) = (Complex64::new(0.5, d1), Complex64::new(0.5, d2), Complex64::new(0.5, dc));
    let f3 = |t3: f64| {
        let f2 = |t2: f64| {
            let inner = integrate(|t1: f64| (-c2 * t1).exp(), 0.0, t2, &[], tol(1e-13)).unwrap().value;
            (cc * t2 - 0.5 * s * s * t2 * t2).exp() * inner
        };
        (-c1 * t3).exp() * integrate(f2, 0.0, t3, &breaks(s, t3), tol(1e-12)).unwrap().value
    };
    integrate(f3, 0.0, tau, &breaks(s, tau), tol(1e-11)).unwrap().value
}

/// Reduced channel integral with the inner Gaussian integral done by
/// quadrature instead of the Faddeeva function.
pub fn reduced_oracle(s: f64, dc: f64, tau: f64) -> f64 {
    let cc = Complex64::new(0.5, dc);
    let g = |t: f64| (cc * t - 0.5 * s * s * t * t).exp();
    let j = |a: f64, b: f64| integrate(g, a, b, &breaks(s, b.max(1e-300)), tol(1e-13)).unwrap().value;
    let outer = |t1: f64| {
        let inner = |t3: f64| (-(t1 + t3)).exp() * j(t1, t3).norm_sqr();
        let mut b = breaks(s, tau);
        b.extend([0.5, 1.0, 2.0, 4.0].iter().map(|k| t1 + k / s));
        integrate(inner, t1, tau, &b, tol(1e-11)).unwrap().value
    };
    integrate(outer, 0.0, tau, &breaks(s, tau), tol(1e-9)).unwrap().value
}

/// Monte Carlo estimate of the channel integral in its four-fold form
/// `∫ e^{-(τ1+τ3)} e^{cτ2 + c̄τ2' - s²(τ2²+τ2'²)/2}` over
/// `0 ≤ τ1 ≤ min(τ2,τ2')`, `max(τ2,τ2') ≤ τ3 ≤ τ`. Both `τ2` are drawn
/// half-normally on the scale `1/s`, `τ1` uniformly and `τ3` from a truncated
/// exponential. Returns `(mean, standard error)`.
pub fn channel_monte_carlo(s: f64, dc: f64, tau: f64, samples: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = |rng: &mut ChaCha8Rng| {
        // Box–Muller
        let u1: f64 = 1.0 - rng.gen::<f64>();
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    for _ in 0..samples {
        let a: f64 = normal(&mut rng).abs() / s;
        let b: f64 = normal(&mut rng).abs() / s;
        let (lo, hi) = (a.min(b), a.max(b));
        let mut w = 0.0;
        if hi < tau {
            let t1 = lo * rng.gen::<f64>();
            let phase = dc * (a - b);
            // e^{(a+b)/2} Re e^{iδ(a-b)} from the τ2, τ2' exponentials.
            let osc = (0.5 * (a + b)).exp() * phase.cos();
            w = (-t1).exp() * osc * ((-hi).exp() - (-tau).exp()) * lo * std::f64::consts::FRAC_PI_2 / (s * s);
        }
        sum += w;
        sum2 += w * w;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum2 / n - mean * mean).max(0.0);
    (mean, (var / n).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleNode {
    pub s: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta_c: f64,
    pub tau: f64,
}

/// Deterministic pseudo-random parameter nodes in moderate-`s` ranges.
pub fn random_nodes(count: usize, seed: u64) -> Vec<OracleNode> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| OracleNode {
            s: rng.gen_range(0.3..6.0),
            delta1: rng.gen_range(-2.0..2.0),
            delta2: rng.gen_range(-2.0..2.0),
            delta_c: rng.gen_range(-1.5..1.5),
            tau: rng.gen_range(0.5..6.0),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReport {
    pub nodes: usize,
    pub max_rel_pw: f64,
    pub max_rel_triple: f64,
    pub max_rel_reduced: f64,
    /// Largest |closed form - MC| / SE over the Monte Carlo nodes.
    pub max_mc_z: f64,
    pub mc_nodes: usize,
}

/// Compares every closed-form kernel against its brute-force reference.
pub fn compare(nodes: &[OracleNode], mc_extra: &[OracleNode], mc_samples: usize) -> OracleReport {
    let rel = |a: Complex64, b: Complex64| (a - b).norm() / b.norm();
    let mut rep = OracleReport { nodes: nodes.len(), max_rel_pw: 0.0, max_rel_triple: 0.0, max_rel_reduced: 0.0, max_mc_z: 0.0, mc_nodes: 0 };
    let tol = ChannelTolerance { rel: 1e-9, abs_floor: 1e-30 };
    for n in nodes {
        let a = Complex64::new(0.5, n.delta2);
        let b = Complex64::new(0.5, n.delta1);
        rep.max_rel_pw = rep.max_rel_pw.max(rel(pw_double_integral(a, b, n.tau), pw_double_oracle(a, b, n.tau)));
        let closed = scattering_triple_integral(n.delta1, n.delta2, n.delta_c, n.s, n.tau).unwrap();
        rep.max_rel_triple = rep.max_rel_triple.max(rel(closed, triple_oracle(n.delta1, n.delta2, n.delta_c, n.s, n.tau)));
        let k = reduced_channel_integral(n.s, n.delta_c, n.tau, tol).unwrap().value;
        let o = reduced_oracle(n.s, n.delta_c, n.tau);
        rep.max_rel_reduced = rep.max_rel_reduced.max(((k - o) / o).abs());
    }
    for (i, n) in nodes.iter().take(4).chain(mc_extra).enumerate() {
        let k = reduced_channel_integral(n.s, n.delta_c, n.tau, tol).unwrap().value;
        let (m, se) = channel_monte_carlo(n.s, n.delta_c, n.tau, mc_samples, 1000 + i as u64);
        rep.max_mc_z = rep.max_mc_z.max((k - m).abs() / se);
        rep.mc_nodes += 1;
    }
    rep
}
