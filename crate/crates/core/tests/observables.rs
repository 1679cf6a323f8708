use biphoton::observables::{
    dominant_channels, entanglement_witness, pair_probability, tam_mean, tam_stats, tam_variance_asymptotic,
};
use biphoton::{AtomSpec, CouplingTable, GridSpec, Helicity, OamWindow, PhotonPacket, Scenario, TrapSpec};

fn sodium(m_gamma: i32, lambda: Helicity, m_e: i32, sigma_b_nm: f64) -> Scenario {
    let mut p = PhotonPacket::sodium_default(m_gamma);
    p.lambda = lambda;
    Scenario::new(CouplingTable::new(&AtomSpec::sodium()).unwrap(), p, TrapSpec::from_nm(sigma_b_nm), m_e)
}

fn hydrogen(m_gamma: i32, sigma_b_nm: f64) -> Scenario {
    Scenario::new(
        CouplingTable::new(&AtomSpec::hydrogen()).unwrap(),
        PhotonPacket::hydrogen_default(m_gamma),
        TrapSpec::from_nm(sigma_b_nm),
        1,
    )
}

#[test]
fn narrow_trap_conserves_tam() {
    let wide = tam_mean(&sodium(3, Helicity::Plus, 1, 100.0), 10.0).unwrap();
    let narrow = tam_mean(&sodium(3, Helicity::Plus, 1, 0.01), 10.0).unwrap();
    assert!(narrow.mismatch.abs() < 1e-30);
    assert!(narrow.std < 1e-8 * wide.std);
    assert_eq!(narrow.j_z_mean, 4.0);
}

#[test]
fn helicity_mirror() {
    for m in -3..=4 {
        let a = tam_mean(&sodium(m, Helicity::Plus, 1, 100.0), 10.0).unwrap();
        let b = tam_mean(&sodium(-m, Helicity::Minus, -1, 100.0), 10.0).unwrap();
        assert!((a.std / b.std - 1.0).abs() < 1e-9, "m {m}: {} vs {}", a.std, b.std);
        assert!((a.mismatch + b.mismatch).abs() <= 1e-9 * a.mismatch.abs());
    }
}

#[test]
fn variance_settles_at_late_times() {
    let scn = sodium(2, Helicity::Plus, 1, 100.0);
    let a = tam_mean(&scn, 20.0).unwrap();
    let b = tam_mean(&scn, 30.0).unwrap();
    assert!((a.std / b.std - 1.0).abs() < 1e-8);
}

#[test]
fn tail_is_carried_by_nearest_channel() {
    let p = PhotonPacket::sodium_default(0);
    let sb = TrapSpec::from_nm(100.0).sigma_b;
    for m in 2..=8 {
        assert_eq!(dominant_channels(m, p.kappa_c, sb), vec![1]);
    }
    assert_eq!(dominant_channels(-4, p.kappa_c, sb), vec![-1]);
}

#[test]
fn asymptotic_form_relation() {
    // The closed-form tail uses m_γ powers of w and m_γ!; the exact sum is
    // led by the n = +1 channel, |Δ| = m_γ - 1. Their ratio is w√m/(m-1).
    for m in 4..=7 {
        let scn = sodium(m, Helicity::Plus, 1, 100.0);
        let exact = tam_mean(&scn, 10.0).unwrap().std;
        let asym = tam_variance_asymptotic(&scn, 10.0, m).unwrap();
        let w = scn.expansion_parameter();
        let want = w * (m as f64).sqrt() / (m - 1) as f64;
        assert!((asym / exact / want - 1.0).abs() < 0.01, "m {m}: {} vs {want}", asym / exact);
    }
    assert!(tam_variance_asymptotic(&sodium(2, Helicity::Plus, 1, 100.0), 10.0, 2).is_err());
}

#[test]
fn zero_weights_give_sharp_tam() {
    let w = biphoton::ChannelWeights { tau: 0.0, values: [0.0; 3], errors: [0.0; 3] };
    let s = tam_stats(&w, 3, 1, 0.21, 500.0);
    assert_eq!((s.mismatch, s.variance, s.norm, s.j_z_mean), (0.0, 0.0, 1.0, 4.0));
}

#[test]
fn pair_matrix_structure() {
    let scn = hydrogen(-1, 60.0);
    let m = pair_probability(&scn, OamWindow::around(-1, 1), &GridSpec::default()).unwrap();
    let n = m.values.len();
    let sum: f64 = m.values.iter().flatten().sum();
    assert!((sum - m.captured_mass).abs() < 1e-14);
    assert!(m.captured_mass <= 1.0 + 1e-12 && m.captured_mass > 0.999);
    for i in 0..n {
        for j in 0..n {
            assert_eq!(m.values[i][j], m.values[j][i]);
            assert!(m.values[i][j] >= 0.0);
        }
    }
    assert!(m.late_time_change < 1e-6, "{}", m.late_time_change);
    let wit = entanglement_witness(&m).unwrap();
    assert!(wit > 0.4 && wit <= 0.5, "{wit}");
}

#[test]
fn partial_wave_cutoff_converged() {
    let scn = hydrogen(-1, 150.0);
    let base = pair_probability(&scn, OamWindow::around(-1, 1), &GridSpec::default()).unwrap();
    let tight = GridSpec { partial_wave_tol: 1e-15, nodes_per_sigma: 16, ..GridSpec::default() };
    let fine = pair_probability(&scn, OamWindow::around(-1, 1), &tight).unwrap();
    assert!(fine.p_max >= base.p_max);
    for (a, b) in base.values.iter().flatten().zip(fine.values.iter().flatten()) {
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }
}

#[test]
fn conserving_pairs_fall_with_trap_width() {
    let mut last = 1.0;
    for nm in [1.0, 30.0, 100.0, 190.0] {
        let m = pair_probability(&hydrogen(-1, nm), OamWindow::around(-1, 1), &GridSpec::default()).unwrap();
        let p = m.get(1, -1) + m.get(-1, 1);
        assert!(p < last);
        last = p;
    }
}

#[test]
fn pair_inputs_validated() {
    let scn = hydrogen(-1, 60.0);
    assert!(pair_probability(&scn, OamWindow { l_min: -1, l_max: 1 }, &GridSpec::default()).is_err());
    let coarse = GridSpec { nodes_per_sigma: 4, ..GridSpec::default() };
    assert!(pair_probability(&scn, OamWindow::around(-1, 1), &coarse).is_err());
}
