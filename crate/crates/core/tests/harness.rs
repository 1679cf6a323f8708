use biphoton::harness::cache::Cache;
use biphoton::harness::check::determinism_config;
use biphoton::harness::config::{Axis, Format, Observable, RunConfig};
use biphoton::harness::emit::{from_csv, render, to_csv, to_json, EmitOptions};
use biphoton::harness::figures::{figure_config, Figure};
use biphoton::harness::sweep::run_sweep;
use biphoton::HarnessError;
use std::str::FromStr;

const SCHEMA: &str = include_str!("../../../schemas/sweep_result.schema.json");

fn small_sweep() -> RunConfig {
    let mut cfg = determinism_config(1);
    cfg.sweep.axis = Axis::MGamma { values: vec![0, 3] };
    cfg
}

#[test]
fn config_toml_round_trip() {
    for fig in ["fig2a", "fig2b", "fig2c", "fig3", "pairprob"] {
        let cfg = Figure::from_str(fig).unwrap().config();
        let back = RunConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, back, "{fig}");
    }
    assert!(Figure::from_str("fig9").is_err());
}

#[test]
fn bad_configs_rejected() {
    let base = small_sweep().to_toml();
    let cases = [
        base.replace("rel = 0.0000001", "rel = 0.01"),
        base.replace("workers = 1", "workers = 0"),
        base.replace("preset = \"Na-3p3s\"", "preset = \"Li\""),
        format!("{base}\nunknown_key = 3\n"),
        base.replace("values = [5.0, 10.0]", "values = [5.0, 80.0]"),
    ];
    assert!(base.contains("rel = 0.0000001"), "{base}");
    for text in cases {
        assert_ne!(text, base);
        let err = RunConfig::from_toml(&text).unwrap_err();
        assert!(matches!(err, HarnessError::Config(_)));
        assert_eq!(err.exit_code(), 2);
    }
}

#[test]
fn pair_sweep_rejects_time_axis() {
    let mut cfg = Figure::Pairprob.config();
    cfg.sweep.series = Some(Axis::Time { values: vec![5.0] });
    assert!(cfg.validate().is_err());
}

#[test]
fn figure_overrides_merge() {
    let over: toml::Table = toml::from_str("workers = 3\n[sweep]\nt = 5.0\n").unwrap();
    let cfg = figure_config(Figure::Fig3, &over).unwrap();
    assert_eq!(cfg.workers, 3);
    assert_eq!(cfg.sweep.t, 5.0);
    assert_eq!(cfg.sweep.observable, Observable::Tam);
    assert_eq!(cfg.sweep.axis.len(), 13);
}

#[test]
fn hash_tracks_physics_inputs() {
    let a = small_sweep().resolve().unwrap().hash();
    let mut cfg = small_sweep();
    cfg.workers = 4;
    cfg.output.format = Format::Json;
    assert_eq!(cfg.resolve().unwrap().hash(), a);
    cfg.tolerance.rel = 1e-8;
    assert_ne!(cfg.resolve().unwrap().hash(), a);
}

#[test]
fn cache_hit_and_invalidation() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path());
    let cfg = small_sweep();
    let first = run_sweep(&cfg, Some(&cache), true).unwrap();
    assert!(!first.cache_hit);
    assert_eq!(first.evaluations, 4);
    let second = run_sweep(&cfg, Some(&cache), true).unwrap();
    assert!(second.cache_hit);
    assert_eq!(second.evaluations, 0);
    assert_eq!(second.result, first.result);

    let bypass = run_sweep(&cfg, Some(&cache), false).unwrap();
    assert!(!bypass.cache_hit);

    let path = dir.path().join(format!("{}.json", first.result.config_hash));
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, text.replacen("\"index\":1", "\"index\":7", 1)).unwrap();
    assert!(cache.load(&first.result.config_hash).is_none());
    assert!(!path.exists());
    let third = run_sweep(&cfg, Some(&cache), true).unwrap();
    assert!(!third.cache_hit);
    assert_eq!(third.result.without_timing(), first.result.without_timing());
}

#[test]
fn csv_and_json_round_trip() {
    let res = run_sweep(&small_sweep(), None, false).unwrap().result;
    let opts = EmitOptions { timing: true };
    assert_eq!(from_csv(&to_csv(&res, opts)).unwrap(), res);
    let json: biphoton::SweepResult = serde_json::from_str(&to_json(&res, opts)).unwrap();
    assert_eq!(json, res);
}

#[test]
fn output_matches_schema() {
    let schema: serde_json::Value = serde_json::from_str(SCHEMA).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).unwrap();
    for cfg in [small_sweep(), {
        let mut c = Figure::Pairprob.config();
        c.sweep.axis = Axis::SigmaBNm { values: vec![20.0] };
        c
    }] {
        let res = run_sweep(&cfg, None, false).unwrap().result;
        let value: serde_json::Value = serde_json::from_str(&to_json(&res, EmitOptions::default())).unwrap();
        assert!(compiled.is_valid(&value));
    }
    let broken = serde_json::json!({"config_hash": "x", "records": []});
    assert!(!compiled.is_valid(&broken));
}

#[test]
fn output_independent_of_worker_count() {
    let a = run_sweep(&determinism_config(1), None, false).unwrap().result;
    let b = run_sweep(&determinism_config(8), None, false).unwrap().result;
    let opts = EmitOptions::default();
    assert_eq!(render(&a, Format::Csv, opts), render(&b, Format::Csv, opts));
    assert_eq!(render(&a, Format::Json, opts), render(&b, Format::Json, opts));
}

#[test]
fn per_point_errors_are_recorded() {
    // A trap wider than 0.1/σ is invalid at every point.
    let mut cfg = small_sweep();
    cfg.trap = Some(biphoton::harness::config::TrapConfig { sigma_b_nm: 1e5 });
    match run_sweep(&cfg, None, false) {
        Ok(out) => {
            assert!(out.result.has_errors());
            assert!(out.result.records.iter().all(|r| r.error.is_some() && r.std.is_none()));
        }
        Err(e) => assert_eq!(e.exit_code(), 2),
    }
}

#[test]
fn empty_overrides_reproduce_defaults() {
    let cfg = figure_config(Figure::Fig3, &toml::Table::new()).unwrap();
    assert_eq!(cfg, Figure::Fig3.config());
    let opts = EmitOptions::default();
    let a = run_sweep(&cfg, None, false).unwrap().result;
    let b = run_sweep(&cfg, None, false).unwrap().result;
    assert_eq!(render(&a, Format::Csv, opts), render(&b, Format::Csv, opts));
    assert_eq!(a.records.len(), 13);
    assert!(a.records.iter().all(|r| r.t == 10.0 && r.lambda == 1));
}

#[test]
fn cached_equals_recomputed_on_random_configs() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path());
    for _ in 0..10 {
        let mut cfg = determinism_config(rng.gen_range(1..4));
        cfg.sweep.axis = Axis::MGamma { values: vec![rng.gen_range(-4..=8)] };
        cfg.sweep.series = Some(Axis::SigmaFactor { values: vec![rng.gen_range(0.5..2.5)] });
        cfg.sweep.t = rng.gen_range(0.5..20.0);
        cfg.tolerance.rel = 10f64.powf(rng.gen_range(-9.0..-5.0));
        let fresh = run_sweep(&cfg, Some(&cache), false).unwrap();
        let hit = run_sweep(&cfg, Some(&cache), true).unwrap();
        assert!(hit.cache_hit);
        assert_eq!(hit.result, fresh.result);
    }
}
