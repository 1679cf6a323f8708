//! Special functions against independent oracles: matrix exponential for d^1,
//! closed-form CG special cases, ascending series for J_m, elementary forms
//! for j_L, and a high-precision reference table for w(z).

#![allow(clippy::approx_constant, clippy::excessive_precision)]

use biphoton::specfun::*;
use biphoton::Complex64;
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};

/// exp(-iθJ_y) for spin 1 via Taylor series of the real generator
/// A = -iJ_y (rows/cols ordered +1, 0, -1).
fn rotation_oracle(theta: f64) -> [[f64; 3]; 3] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let a = [[0.0, -r, 0.0], [r, 0.0, -r], [0.0, r, 0.0]];
    let mut out = [[0.0; 3]; 3];
    let mut term = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for k in 0..60 {
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] += term[i][j];
            }
        }
        let mut next = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for l in 0..3 {
                    next[i][j] += term[i][l] * a[l][j] * theta / (k + 1) as f64;
                }
            }
        }
        term = next;
    }
    out
}

#[test]
fn d1_matches_rotation_generator() {
    for &theta in &[0.0, 0.09, 0.7, FRAC_PI_2, 2.3, PI] {
        let oracle = rotation_oracle(theta);
        let m = wigner_d1_matrix(theta);
        for i in 0..3 {
            for j in 0..3 {
                assert!((m[i][j] - oracle[i][j]).abs() < 1e-13, "θ={theta} ({i},{j})");
            }
        }
    }
    assert!((wigner_d1(1, 0, FRAC_PI_2).unwrap() - (-0.707_106_78)).abs() < 1e-8);
    assert!((wigner_d1(0, 0, 0.09).unwrap() - 0.995_952_7).abs() < 1e-7);
}

/// Closed form of <j1 0 j2 0 | J 0> for even j1 + j2 + J = 2g.
fn cg_zero_projection(j1: i64, j2: i64, j: i64) -> f64 {
    let f = |n: i64| (1..=n).fold(1.0, |a, k| a * k as f64);
    let s = j1 + j2 + j;
    if s % 2 == 1 {
        return 0.0;
    }
    let g = s / 2;
    let sign = if (g - j) % 2 == 0 { 1.0 } else { -1.0 };
    let delta = (f(j1 + j2 - j) * f(j1 - j2 + j) * f(-j1 + j2 + j) / f(s + 1)).sqrt();
    sign * ((2 * j + 1) as f64).sqrt() * delta * f(g) / (f(g - j1) * f(g - j2) * f(g - j))
}

#[test]
fn cg_zero_projection_closed_form() {
    let v = clebsch_gordan(1.0, 0.0, 2.0, 0.0, 1.0, 0.0).unwrap();
    assert!((v.abs() - (2.0_f64 / 5.0).sqrt()).abs() < 1e-12);
    assert!((v - cg_zero_projection(1, 2, 1)).abs() < 1e-13);
    for j1 in 0..4 {
        for j2 in 0..6 {
            for j in (j1 as i64 - j2 as i64).abs()..=(j1 + j2) as i64 {
                let got = clebsch_gordan(j1 as f64, 0.0, j2 as f64, 0.0, j as f64, 0.0).unwrap();
                let want = cg_zero_projection(j1 as i64, j2 as i64, j);
                assert!((got - want).abs() < 1e-12, "<{j1}0{j2}0|{j}0>");
            }
        }
    }
}

#[test]
fn cg_orthogonality() {
    let j1 = 1.0;
    for j2i in 0..=3 {
        let j2 = j2i as f64;
        let js: Vec<i32> = ((j2i - 1_i32).abs()..=(j2i + 1)).collect();
        for &ja in &js {
            for &jb in &js {
                for ma in -ja..=ja {
                    for mb in -jb..=jb {
                        let mut s = 0.0;
                        for m1 in -1..=1 {
                            for m2 in -j2i..=j2i {
                                s += clebsch_gordan(j1, m1 as f64, j2, m2 as f64, ja as f64, ma as f64).unwrap()
                                    * clebsch_gordan(j1, m1 as f64, j2, m2 as f64, jb as f64, mb as f64).unwrap();
                            }
                        }
                        let want = if ja == jb && ma == mb { 1.0 } else { 0.0 };
                        assert!((s - want).abs() < 1e-12);
                    }
                }
            }
        }
    }
}

fn bessel_series_oracle(m: u32, x: f64) -> f64 {
    let f = |n: u32| (1..=n).fold(1.0, |a, k| a * k as f64);
    let mut sum = 0.0;
    for k in 0..80u32 {
        let t = (-1.0f64).powi(k as i32) * (0.5 * x).powi((2 * k + m) as i32) / (f(k) * f(k + m));
        sum += t;
    }
    sum
}

#[test]
fn bessel_against_series() {
    assert!((bessel_j(2, 1.0) - 0.114_903_5).abs() < 1e-7);
    assert!((bessel_j(2, 1.0) - 0.114_903_484_931_900_48).abs() < 1e-15);
    for m in 0..8 {
        for &x in &[0.05, 0.5, 1.0, 2.5, 4.0, 7.5] {
            let want = bessel_series_oracle(m, x);
            let got = bessel_j(m as i32, x);
            assert!(((got - want) / want).abs() < 1e-12, "J_{m}({x}) {got} vs {want}");
        }
    }
}

#[test]
fn bessel_large_argument_reference() {
    // J_0(50), J_1(50), J_5(30) from a 40-digit evaluation.
    let cases = [
        (0, 50.0, 0.055_812_327_669_251_815),
        (1, 50.0, -0.097_511_828_125_175_138),
        (5, 30.0, -0.143_240_295_512_077_08),
    ];
    for (m, x, want) in cases {
        let got = bessel_j(m, x);
        assert!(((got - want) / want).abs() < 1e-12, "J_{m}({x}) = {got}");
    }
}

#[test]
fn bessel_recurrence_residual() {
    for m in -8..=8 {
        let mut x = 0.1;
        while x <= 20.0 {
            let r = bessel_j(m - 1, x) + bessel_j(m + 1, x) - 2.0 * m as f64 / x * bessel_j(m, x);
            assert!(r.abs() <= 1e-10, "m={m}, x={x}, r={r}");
            x += 0.37;
        }
    }
}

#[test]
fn spherical_bessel_elementary() {
    let x: f64 = 2.0;
    let oracle = x.sin() / (x * x) - x.cos() / x;
    assert!((spherical_bessel(1, 2.0) - oracle).abs() < 1e-15);
    assert!((spherical_bessel(1, 2.0) - 0.435_397_8).abs() < 1e-7);
    for &x in &[0.3_f64, 1.7, 2.5, 6.0, 17.0] {
        let j2 = (3.0 / (x * x) - 1.0) * x.sin() / x - 3.0 * x.cos() / (x * x);
        assert!(((spherical_bessel(2, x) - j2) / j2).abs() < 1e-10, "x={x}");
    }
}

#[test]
fn spherical_wronskian() {
    for l in 1..=12u32 {
        for &x in &[0.5, 1.0, 2.2, 3.14159, 5.0, 9.0, 15.0, 30.0] {
            let w = spherical_bessel(l, x) * spherical_neumann(l - 1, x)
                - spherical_bessel(l - 1, x) * spherical_neumann(l, x);
            let want = 1.0 / (x * x);
            assert!(((w - want) / want).abs() < 1e-10, "l={l}, x={x}, w={w}");
        }
    }
}

include!("data/faddeeva_reference.rs");

#[test]
fn faddeeva_reference_table() {
    assert!((faddeeva(Complex64::new(0.0, 1.0)).unwrap().re - 0.427_583_6).abs() < 1e-7);
    for &(x, y, re, im) in FADDEEVA_REFERENCE {
        let want = Complex64::new(re, im);
        let got = faddeeva(Complex64::new(x, y)).unwrap();
        let rel = (got - want).norm() / want.norm();
        assert!(rel <= 1e-10, "w({x}+{y}i) = {got}, want {want}, rel {rel:e}");
    }
}

proptest! {
    #[test]
    fn d1_rows_are_unit_vectors(theta in 0.0..PI) {
        let m = wigner_d1_matrix(theta);
        for row in m {
            let s: f64 = row.iter().map(|v| v * v).sum();
            prop_assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn faddeeva_reflection(x in -9.0..9.0f64, y in 0.0..9.0f64) {
        let z = Complex64::new(x, y);
        let a = faddeeva(-z.conj()).unwrap();
        let b = faddeeva(z).unwrap().conj();
        prop_assert!((a - b).norm() <= 1e-14 * b.norm().max(1e-300));
    }
}
