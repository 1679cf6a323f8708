//! Curve-data presets for the figure sets.

use super::cache::Cache;
use super::config::{Axis, Observable, OutputConfig, RunConfig, SweepSpec, ToleranceConfig};
use super::sweep::{run_sweep, SweepOutcome};
use super::HarnessError;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig2a,
    Fig2b,
    Fig2c,
    Fig3,
    Pairprob,
}

impl FromStr for Figure {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fig2a" => Ok(Figure::Fig2a),
            "fig2b" => Ok(Figure::Fig2b),
            "fig2c" => Ok(Figure::Fig2c),
            "fig3" => Ok(Figure::Fig3),
            "pairprob" => Ok(Figure::Pairprob),
            other => Err(HarnessError::Config(format!(
                "unknown figure `{other}` (expected fig2a, fig2b, fig2c, fig3, pairprob)"
            ))),
        }
    }
}

pub const SIGMA_FACTORS: [f64; 3] = [1.0, 1.5, 2.0];

fn time_axis() -> Axis {
    Axis::Time { values: (1..=20).map(|k| 0.5 * k as f64).collect() }
}

/// 12-point trap-width grid for the hydrogen coincidence curves, nm.
pub fn pairprob_sigma_b_nm() -> Vec<f64> {
    (0..12).map(|k| 10.0 + 16.0 * k as f64).collect()
}

impl Figure {
    pub fn config(self) -> RunConfig {
        let (preset, sweep) = match self {
            // ΔJ_z and δJ_z against time come from the same records.
            Figure::Fig2a | Figure::Fig2b => (
                "Na-3p3s",
                SweepSpec {
                    observable: Observable::Tam,
                    axis: time_axis(),
                    series: Some(Axis::SigmaFactor { values: SIGMA_FACTORS.to_vec() }),
                    t: 10.0,
                    window: None,
                },
            ),
            Figure::Fig2c => (
                "Na-3p3s",
                SweepSpec {
                    observable: Observable::Tam,
                    axis: time_axis(),
                    series: Some(Axis::MGamma { values: vec![0, 1, 2, 3] }),
                    t: 10.0,
                    window: None,
                },
            ),
            Figure::Fig3 => (
                "Na-3p3s",
                SweepSpec {
                    observable: Observable::Tam,
                    axis: Axis::MGamma { values: (-4..=8).collect() },
                    series: None,
                    t: 10.0,
                    window: None,
                },
            ),
            Figure::Pairprob => (
                "H-2p1s",
                SweepSpec {
                    observable: Observable::PairProbability,
                    axis: Axis::SigmaBNm { values: pairprob_sigma_b_nm() },
                    series: Some(Axis::MGamma { values: vec![-1, 0, 2] }),
                    t: 20.0,
                    window: None,
                },
            ),
        };
        RunConfig {
            preset: Some(preset.into()),
            atom: None,
            packet: None,
            trap: None,
            sweep,
            tolerance: ToleranceConfig::default(),
            output: OutputConfig::default(),
            workers: 1,
        }
    }
}

fn merge(base: &mut toml::Table, over: &toml::Table) {
    for (k, v) in over {
        match (base.get_mut(k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            _ => {
                base.insert(k.clone(), v.clone());
            }
        }
    }
}

/// Figure defaults with `overrides` merged in key by key.
pub fn figure_config(figure: Figure, overrides: &toml::Table) -> Result<RunConfig, HarnessError> {
    let mut base: toml::Table = toml::from_str(&figure.config().to_toml()).expect("defaults round-trip");
    merge(&mut base, overrides);
    RunConfig::from_toml(&toml::to_string(&base).expect("merged table serialises"))
}

pub fn run_figure(
    figure: Figure,
    overrides: &toml::Table,
    cache: Option<&Cache>,
    use_cache: bool,
) -> Result<SweepOutcome, HarnessError> {
    run_sweep(&figure_config(figure, overrides)?, cache, use_cache)
}
