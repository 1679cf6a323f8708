//! Content-addressed result cache keyed by the resolved-config hash.

use super::sweep::SweepResult;
use super::HarnessError;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

pub const CACHE_ENV: &str = "BIPHOTON_CACHE_DIR";

#[derive(Serialize, Deserialize)]
struct Entry {
    config_hash: String,
    payload_sha256: String,
    result: SweepResult,
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

fn payload_digest(result: &SweepResult) -> String {
    format!("{:x}", Sha256::digest(serde_json::to_vec(result).expect("result serialises")))
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// `$BIPHOTON_CACHE_DIR`, or `biphoton-cache` under the system temp dir.
    pub fn from_env() -> Self {
        match std::env::var_os(CACHE_ENV) {
            Some(d) => Self::new(d),
            None => Self::new(std::env::temp_dir().join("biphoton-cache")),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, hash: &str) -> PathBuf {
        self.dir.join(format!("{hash}.json"))
    }

    /// Returns the cached result, removing entries that fail verification.
    pub fn load(&self, hash: &str) -> Option<SweepResult> {
        let path = self.path(hash);
        let bytes = std::fs::read(&path).ok()?;
        let valid = serde_json::from_slice::<Entry>(&bytes).ok().filter(|e| {
            e.config_hash == hash && e.result.config_hash == hash && payload_digest(&e.result) == e.payload_sha256
        });
        if valid.is_none() {
            let _ = std::fs::remove_file(&path);
        }
        valid.map(|e| e.result)
    }

    /// Writes atomically: a temporary file renamed into place.
    pub fn store(&self, result: &SweepResult) -> Result<(), HarnessError> {
        let io = |path: &Path| {
            let p = path.display().to_string();
            move |e| HarnessError::Io { path: p, source: e }
        };
        std::fs::create_dir_all(&self.dir).map_err(io(&self.dir))?;
        let entry = Entry {
            config_hash: result.config_hash.clone(),
            payload_sha256: payload_digest(result),
            result: result.clone(),
        };
        let final_path = self.path(&result.config_hash);
        let tmp = self.dir.join(format!(".{}.{}.tmp", result.config_hash, std::process::id()));
        std::fs::write(&tmp, serde_json::to_vec(&entry).expect("entry serialises")).map_err(io(&tmp))?;
        std::fs::rename(&tmp, &final_path).map_err(io(&final_path))
    }
}
