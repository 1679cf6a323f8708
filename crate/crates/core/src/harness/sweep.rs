use super::cache::Cache;
use super::config::{Axis, Observable, PacketConfig, ResolvedRun, RunConfig};
use super::HarnessError;
use crate::atom::CouplingTable;
use crate::observables::{entanglement_witness, pair_probability, tam_stats, Scenario};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

/// One grid point. Optional fields are empty when the observable does not
/// produce them or the point failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub index: usize,
    pub series: Option<f64>,
    pub x: f64,
    pub t: f64,
    pub m_gamma: i32,
    pub lambda: i32,
    pub sigma: f64,
    pub sigma_b_nm: f64,
    pub j_z_mean: Option<f64>,
    pub mismatch: Option<f64>,
    pub variance: Option<f64>,
    pub std: Option<f64>,
    pub i_m1: Option<f64>,
    pub i_0: Option<f64>,
    pub i_p1: Option<f64>,
    pub channel_error: Option<f64>,
    pub pair_conserving: Option<f64>,
    pub captured_mass: Option<f64>,
    pub off_line_mass: Option<f64>,
    pub witness: Option<f64>,
    pub warnings: Vec<String>,
    pub error: Option<String>,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config_hash: String,
    pub preset: String,
    pub version: String,
    pub axis: String,
    pub series: Option<String>,
    pub records: Vec<SweepRecord>,
}

impl SweepResult {
    pub fn has_errors(&self) -> bool {
        self.records.iter().any(|r| r.error.is_some())
    }

    /// Copy with wall times zeroed, for comparisons across runs.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        for rec in &mut r.records {
            rec.wall_time_s = 0.0;
        }
        r
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub result: SweepResult,
    pub cache_hit: bool,
    /// Number of grid points evaluated by the core in this call.
    pub evaluations: usize,
}

struct Point {
    index: usize,
    series: Option<f64>,
    x: f64,
    t: f64,
    packet: PacketConfig,
    sigma_b_nm: f64,
}

fn apply(axis: &Axis, i: usize, t: &mut f64, packet: &mut PacketConfig, sigma_b_nm: &mut f64, sigma0: f64) {
    match axis {
        Axis::Time { values } => *t = values[i],
        Axis::SigmaFactor { values } => packet.sigma = sigma0 * values[i],
        Axis::MGamma { values } => packet.m_gamma = values[i],
        Axis::Lambda { values } => packet.lambda = values[i],
        Axis::SigmaBNm { values } => *sigma_b_nm = values[i],
    }
}

fn points(run: &ResolvedRun) -> Vec<Point> {
    let sweep = &run.sweep;
    let series_len = sweep.series.as_ref().map_or(1, |s| s.len());
    let mut out = Vec::with_capacity(series_len * sweep.axis.len());
    for si in 0..series_len {
        for xi in 0..sweep.axis.len() {
            let mut t = sweep.t;
            let mut packet = run.packet.clone();
            let mut sigma_b_nm = run.trap.sigma_b_nm;
            let sigma0 = run.packet.sigma;
            let series = sweep.series.as_ref().map(|s| {
                apply(s, si, &mut t, &mut packet, &mut sigma_b_nm, sigma0);
                s.value(si)
            });
            apply(&sweep.axis, xi, &mut t, &mut packet, &mut sigma_b_nm, sigma0);
            out.push(Point { index: out.len(), series, x: sweep.axis.value(xi), t, packet, sigma_b_nm });
        }
    }
    out
}

fn empty_record(p: &Point) -> SweepRecord {
    SweepRecord {
        index: p.index,
        series: p.series,
        x: p.x,
        t: p.t,
        m_gamma: p.packet.m_gamma,
        lambda: p.packet.lambda.value(),
        sigma: p.packet.sigma,
        sigma_b_nm: p.sigma_b_nm,
        j_z_mean: None,
        mismatch: None,
        variance: None,
        std: None,
        i_m1: None,
        i_0: None,
        i_p1: None,
        channel_error: None,
        pair_conserving: None,
        captured_mass: None,
        off_line_mass: None,
        witness: None,
        warnings: Vec::new(),
        error: None,
        wall_time_s: 0.0,
    }
}

fn evaluate(run: &ResolvedRun, table: &CouplingTable, p: &Point) -> SweepRecord {
    let start = Instant::now();
    let mut rec = empty_record(p);
    let scn: Scenario = run.scenario(table, &p.packet, p.sigma_b_nm);
    if let Err(e) = scn.validate() {
        rec.error = Some(e.to_string());
        return rec;
    }
    if scn.expansion_parameter() >= 0.5 {
        rec.warnings.push(format!("kappa_c*sigma_b/2 = {:.3} outside power-series regime", scn.expansion_parameter()));
    }
    match run.sweep.observable {
        Observable::Tam => match scn.weights(p.t) {
            Ok(w) => {
                let s = tam_stats(&w, p.packet.m_gamma, p.packet.m_e, scn.packet.kappa_c, scn.trap.sigma_b);
                rec.j_z_mean = Some(s.j_z_mean);
                rec.mismatch = Some(s.mismatch);
                rec.variance = Some(s.variance);
                rec.std = Some(s.std);
                rec.i_m1 = Some(w.get(-1));
                rec.i_0 = Some(w.get(0));
                rec.i_p1 = Some(w.get(1));
                rec.channel_error = Some(w.errors.iter().cloned().fold(0.0, f64::max));
            }
            Err(e) => rec.error = Some(e.to_string()),
        },
        Observable::PairProbability => {
            let window = run.window(p.packet.m_gamma, p.packet.m_e);
            match pair_probability(&scn, window, &run.grid()) {
                Ok(m) => {
                    let (me, mg) = (p.packet.m_e, p.packet.m_gamma);
                    rec.pair_conserving = Some(if me == mg { m.get(me, me) } else { m.get(me, mg) + m.get(mg, me) });
                    rec.captured_mass = Some(m.captured_mass);
                    rec.off_line_mass = Some(m.off_line_mass);
                    match entanglement_witness(&m) {
                        Ok(w) => rec.witness = Some(w),
                        Err(e) => rec.warnings.push(e.to_string()),
                    }
                    if m.interference_bound > 1e-3 {
                        rec.warnings.push(format!("interference bound {:.2e}", m.interference_bound));
                    }
                    if m.late_time_change > 1e-3 {
                        rec.warnings.push(format!("late-time change {:.2e}", m.late_time_change));
                    }
                }
                Err(e) => rec.error = Some(e.to_string()),
            }
        }
    }
    rec.wall_time_s = start.elapsed().as_secs_f64();
    rec
}

/// Evaluates every grid point of the resolved run on `workers` threads.
pub fn execute(run: &ResolvedRun, workers: usize, counter: &AtomicUsize) -> Result<SweepResult, HarnessError> {
    let table = CouplingTable::new(&run.atom).map_err(|e| HarnessError::Numerical(e.to_string()))?;
    let pts = points(run);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| HarnessError::Numerical(e.to_string()))?;
    let records: Vec<SweepRecord> = pool.install(|| {
        pts.par_iter()
            .map(|p| {
                counter.fetch_add(1, Ordering::Relaxed);
                evaluate(run, &table, p)
            })
            .collect()
    });
    Ok(SweepResult {
        config_hash: run.hash(),
        preset: run.preset.clone(),
        version: run.version.clone(),
        axis: run.sweep.axis.name().to_string(),
        series: run.sweep.series.as_ref().map(|s| s.name().to_string()),
        records,
    })
}

/// Runs a sweep, serving identical configurations from `cache` unless
/// `use_cache` is false. Fresh results are written back either way.
pub fn run_sweep(cfg: &RunConfig, cache: Option<&Cache>, use_cache: bool) -> Result<SweepOutcome, HarnessError> {
    cfg.validate()?;
    let run = cfg.resolve()?;
    let hash = run.hash();
    if use_cache {
        if let Some(hit) = cache.and_then(|c| c.load(&hash)) {
            return Ok(SweepOutcome { result: hit, cache_hit: true, evaluations: 0 });
        }
    }
    let counter = AtomicUsize::new(0);
    let result = execute(&run, cfg.workers, &counter)?;
    if let Some(c) = cache {
        if !result.has_errors() {
            c.store(&result)?;
        }
    }
    Ok(SweepOutcome { result, cache_hit: false, evaluations: counter.load(Ordering::Relaxed) })
}
