use super::HarnessError;
use crate::atom::{AtomSpec, CouplingTable, Helicity};
use crate::dynamics::{ChannelTolerance, MAX_TIME};
use crate::observables::{GridSpec, OamWindow, Scenario};
use crate::photon::{PhotonPacket, TrapSpec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketConfig {
    /// Central photon energy, eV.
    pub omega_c: f64,
    /// `κ_c / ω_c`.
    pub kappa_ratio: f64,
    /// Momentum spread σ, eV.
    pub sigma: f64,
    pub m_gamma: i32,
    pub lambda: Helicity,
    /// Initial excited sublevel.
    pub m_e: i32,
}

impl PacketConfig {
    pub fn packet(&self) -> PhotonPacket {
        PhotonPacket::from_energy(self.omega_c, self.kappa_ratio, self.sigma, self.m_gamma, self.lambda)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapConfig {
    pub sigma_b_nm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Axis {
    /// Times in Γ⁻¹.
    Time { values: Vec<f64> },
    /// Multiples of the configured σ.
    SigmaFactor { values: Vec<f64> },
    MGamma { values: Vec<i32> },
    Lambda { values: Vec<Helicity> },
    SigmaBNm { values: Vec<f64> },
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::Time { .. } => "t",
            Axis::SigmaFactor { .. } => "sigma_factor",
            Axis::MGamma { .. } => "m_gamma",
            Axis::Lambda { .. } => "lambda",
            Axis::SigmaBNm { .. } => "sigma_b_nm",
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Axis::Time { values } | Axis::SigmaFactor { values } | Axis::SigmaBNm { values } => values.len(),
            Axis::MGamma { values } => values.len(),
            Axis::Lambda { values } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn value(&self, i: usize) -> f64 {
        match self {
            Axis::Time { values } | Axis::SigmaFactor { values } | Axis::SigmaBNm { values } => values[i],
            Axis::MGamma { values } => values[i] as f64,
            Axis::Lambda { values } => values[i].value() as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    #[default]
    Tam,
    PairProbability,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub observable: Observable,
    pub axis: Axis,
    /// One curve per value of this axis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<Axis>,
    /// Evaluation time when neither axis is time, Γ⁻¹.
    #[serde(default = "default_time")]
    pub t: f64,
    /// OAM window for coincidence matrices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<OamWindow>,
}

fn default_time() -> f64 {
    10.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    pub rel: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self { rel: 1e-7 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atom: Option<AtomSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub packet: Option<PacketConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trap: Option<TrapConfig>,
    pub sweep: SweepSpec,
    #[serde(default)]
    pub tolerance: ToleranceConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default = "default_workers")]
    pub workers: usize,
}

fn default_workers() -> usize {
    1
}

/// Fully resolved physics inputs of a run; the content hash covers exactly this.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedRun {
    pub preset: String,
    pub atom: AtomSpec,
    pub packet: PacketConfig,
    pub trap: TrapConfig,
    pub sweep: SweepSpec,
    pub tolerance: ToleranceConfig,
    pub version: String,
}

pub fn preset_packet(name: &str) -> Option<(PacketConfig, TrapConfig)> {
    let trap = TrapConfig { sigma_b_nm: 100.0 };
    match name {
        "Na-3p3s" => Some((
            PacketConfig { omega_c: 2.1, kappa_ratio: 0.1, sigma: 0.021, m_gamma: 3, lambda: Helicity::Plus, m_e: 1 },
            trap,
        )),
        "H-2p1s" => Some((
            PacketConfig { omega_c: 10.2, kappa_ratio: 0.1, sigma: 0.102, m_gamma: -1, lambda: Helicity::Plus, m_e: 1 },
            trap,
        )),
        _ => None,
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn load(path: &std::path::Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Io { path: path.display().to_string(), source: e })?;
        Self::from_toml(&text).map_err(|e| match e {
            HarnessError::Config(m) => HarnessError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if !(1e-12..=1e-3).contains(&self.tolerance.rel) {
            return bad(format!("tolerance.rel = {} outside [1e-12, 1e-3]", self.tolerance.rel));
        }
        if self.workers == 0 {
            return bad("workers must be >= 1".into());
        }
        if self.sweep.axis.is_empty() {
            return bad("sweep.axis has no values".into());
        }
        if let Some(series) = &self.sweep.series {
            if series.is_empty() {
                return bad("sweep.series has no values".into());
            }
            if series.name() == self.sweep.axis.name() {
                return bad(format!("sweep.series repeats the axis `{}`", series.name()));
            }
        }
        if !(0.0..=MAX_TIME).contains(&self.sweep.t) {
            return bad(format!("sweep.t = {} outside [0, {MAX_TIME}]", self.sweep.t));
        }
        for axis in std::iter::once(&self.sweep.axis).chain(self.sweep.series.as_ref()) {
            if let Axis::Time { values } = axis {
                if values.iter().any(|t| !(0.0..=MAX_TIME).contains(t)) {
                    return bad(format!("time values must lie in [0, {MAX_TIME}]"));
                }
                if self.sweep.observable == Observable::PairProbability {
                    return bad("coincidence matrices are late-time only; time axis not allowed".into());
                }
            }
        }
        self.resolve().map(|_| ())
    }

    pub fn resolve(&self) -> Result<ResolvedRun, HarnessError> {
        let preset = self.preset.clone().unwrap_or_else(|| "custom".into());
        let base_atom = match &self.preset {
            Some(p) => Some(AtomSpec::preset(p).map_err(|e| HarnessError::Config(e.to_string()))?),
            None => None,
        };
        let base_packet = self.preset.as_deref().and_then(preset_packet);
        let atom = self
            .atom
            .clone()
            .or(base_atom)
            .ok_or_else(|| HarnessError::Config("no [atom] section and no preset".into()))?;
        atom.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        let packet = self
            .packet
            .clone()
            .or_else(|| base_packet.clone().map(|p| p.0))
            .ok_or_else(|| HarnessError::Config("no [packet] section and no preset".into()))?;
        let trap = self
            .trap
            .clone()
            .or_else(|| base_packet.map(|p| p.1))
            .ok_or_else(|| HarnessError::Config("no [trap] section and no preset".into()))?;
        packet.packet().validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        if packet.m_e.abs() > 1 {
            return Err(HarnessError::Config(format!("packet.m_e = {} outside [-1, 1]", packet.m_e)));
        }
        if !(trap.sigma_b_nm > 0.0) {
            return Err(HarnessError::Config(format!("trap.sigma_b_nm = {} must be positive", trap.sigma_b_nm)));
        }
        Ok(ResolvedRun {
            preset,
            atom,
            packet,
            trap,
            sweep: self.sweep.clone(),
            tolerance: self.tolerance,
            version: super::VERSION.to_string(),
        })
    }
}

impl ResolvedRun {
    /// SHA-256 of the canonical JSON encoding, hex.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("resolved run serialises");
        format!("{:x}", Sha256::digest(&json))
    }

    pub fn channel_tolerance(&self) -> ChannelTolerance {
        ChannelTolerance { rel: self.tolerance.rel, ..ChannelTolerance::default() }
    }

    pub fn window(&self, m_gamma: i32, m_e: i32) -> OamWindow {
        self.sweep.window.unwrap_or_else(|| {
            let w = OamWindow::around(m_gamma, m_e);
            OamWindow { l_min: w.l_min - 2, l_max: w.l_max + 2 }
        })
    }

    pub fn grid(&self) -> GridSpec {
        GridSpec::default()
    }

    pub fn scenario(&self, table: &CouplingTable, packet: &PacketConfig, sigma_b_nm: f64) -> Scenario {
        let mut s = Scenario::new(table.clone(), packet.packet(), TrapSpec::from_nm(sigma_b_nm), packet.m_e);
        s.tol = self.channel_tolerance();
        s
    }
}
