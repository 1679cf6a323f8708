use biphoton::photon::{
    bessel_weight, normalize, overlap_plane_wave, trap_averaged_bessel_sq, trap_density, PlaneWaveMode,
};
use biphoton::quad::composite_gauss_legendre;
use biphoton::specfun::bessel_j;
use biphoton::{Complex64, Helicity, PhotonPacket, TrapSpec};
use std::f64::consts::PI;

fn ln_fact(n: u32) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// `e^{-x} I_p(x)` by its power series.
fn scaled_bessel_i(p: u32, x: f64) -> f64 {
    let mut sum = 0.0;
    for k in 0..200u32 {
        let ln = (2 * k + p) as f64 * (0.5 * x).ln() - ln_fact(k) - ln_fact(k + p);
        sum += ln.exp();
    }
    (-x).exp() * sum
}

#[test]
fn profile_norm_by_quadrature() {
    for p in [PhotonPacket::sodium_default(0), PhotonPacket::hydrogen_default(2)] {
        let norm = normalize(&p, 1.0).unwrap();
        let span = 8.0 * p.sigma;
        let edges = |c: f64| (0..=32).map(move |i| c - span + 2.0 * span * i as f64 / 32.0).collect::<Vec<_>>();
        let (kp, kz) = (composite_gauss_legendre(&edges(p.kappa_c), 8), composite_gauss_legendre(&edges(p.k_c), 8));
        let mut acc = 0.0;
        for &(a, wa) in &kp {
            for &(b, wb) in &kz {
                acc += wa * wb * a * p.profile(a, b).powi(2);
            }
        }
        let want = 2.0 * PI * acc / (2.0 * PI).powi(3);
        assert!((norm.profile_norm / want - 1.0).abs() < 1e-10, "{} vs {want}", norm.profile_norm);
    }
}

#[test]
fn profile_norm_scales_as_sigma_squared() {
    let p = PhotonPacket::sodium_default(1);
    let mut q = p.clone();
    q.sigma *= 1.5;
    let r = normalize(&q, 1.0).unwrap().profile_norm / normalize(&p, 1.0).unwrap().profile_norm;
    assert!((r - 2.25).abs() < 1e-10, "{r}");
}

#[test]
fn n2v_is_volume_free() {
    let p = PhotonPacket::hydrogen_default(0);
    let base = normalize(&p, 1.0).unwrap().n2v();
    for v in [1e-6, 3.0, 1e9] {
        assert!((normalize(&p, v).unwrap().n2v() / base - 1.0).abs() < 1e-14);
    }
}

#[test]
fn displaced_overlap_is_partial_wave_sum() {
    // e^{i x cos(φ-φ_b)} = Σ_p i^p J_p(x) e^{ip(φ-φ_b)}
    let mut p = PhotonPacket::sodium_default(2);
    p.b = 40.0;
    p.phi_b = 0.7;
    let norm = normalize(&p, 1.0).unwrap();
    for &phi in &[0.0, 1.3, 4.0] {
        let mode = PlaneWaveMode { k_perp: p.kappa_c * 1.01, k_z: p.k_c, phi, s: Helicity::Plus };
        let direct = overlap_plane_wave(&p, &norm, &mode);
        let x = mode.k_perp * p.b;
        let mut sum = Complex64::new(0.0, 0.0);
        for q in -60..=60 {
            sum += Complex64::i().powi(q) * bessel_j(q, x) * Complex64::from_polar(1.0, q as f64 * (phi - p.phi_b));
        }
        let amp = norm.n_packet * p.profile(mode.k_perp, mode.k_z);
        let resum = Complex64::from_polar(amp, 2.0 * phi) * sum;
        assert!((direct - resum).norm() <= 1e-9 * amp, "phi {phi}");
    }
}

#[test]
fn wrong_helicity_has_no_overlap() {
    let p = PhotonPacket::sodium_default(0);
    let norm = normalize(&p, 1.0).unwrap();
    let mode = PlaneWaveMode { k_perp: p.kappa_c, k_z: p.k_c, phi: 0.0, s: Helicity::Minus };
    assert_eq!(overlap_plane_wave(&p, &norm, &mode).norm(), 0.0);
}

#[test]
fn trap_average_closed_form() {
    // ⟨J_p²(κb)⟩ = e^{-a²/2} I_p(a²/2), a = κσ_b.
    for &a in &[0.05, 0.1064, 0.6, 2.0] {
        for p in 0..6 {
            let got = trap_averaged_bessel_sq(p, a, 1.0).unwrap();
            let want = scaled_bessel_i(p as u32, 0.5 * a * a);
            assert!((got - want).abs() <= 1e-10 * want.max(1e-300), "a {a} p {p}: {got} vs {want}");
        }
    }
}

#[test]
fn series_weight_close_to_exact_in_regime() {
    let p = PhotonPacket::sodium_default(0);
    let trap = TrapSpec::from_nm(100.0);
    for d in 0..6 {
        let series = bessel_weight(d, 0, p.kappa_c, trap.sigma_b);
        assert!(!series.out_of_regime);
        let exact = trap_averaged_bessel_sq(d, p.kappa_c, trap.sigma_b).unwrap();
        assert!((series.value / exact - 1.0).abs() < 0.01, "d {d}");
    }
    assert!(bessel_weight(3, 0, p.kappa_c, 20.0 * trap.sigma_b).out_of_regime);
}

#[test]
fn trap_density_moments() {
    let trap = TrapSpec::from_nm(50.0);
    let edges: Vec<f64> = (0..=80).map(|i| i as f64 * 0.1 * trap.sigma_b).collect();
    let nodes = composite_gauss_legendre(&edges, 8);
    let m0: f64 = nodes.iter().map(|(b, w)| w * 2.0 * PI * b * trap_density(&trap, *b)).sum();
    let m2: f64 = nodes.iter().map(|(b, w)| w * 2.0 * PI * b.powi(3) * trap_density(&trap, *b)).sum();
    assert!((m0 - 1.0).abs() < 1e-12);
    assert!((m2 / trap.sigma_b.powi(2) - 1.0).abs() < 1e-12);
}

#[test]
fn trap_validity_bound() {
    let p = PhotonPacket::sodium_default(0);
    assert!(TrapSpec::from_nm(100.0).validate(&p).is_ok());
    let too_wide = TrapSpec { sigma_b: 0.2 / p.sigma };
    assert!(too_wide.validate(&p).is_err());
}
