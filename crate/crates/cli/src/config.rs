use std::fmt::Display;
use std::path::Path;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::args::{DomainArg, FamilyArg, WeightingArg};
use crate::UsageError;

/// Values a `--config` file may supply. Keys mirror the long flag names with
/// `-` replaced by `_`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub threads: Option<usize>,
    pub family: Option<FamilyArg>,
    pub alpha: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub k: Option<usize>,
    pub grid: Option<usize>,
    pub domain: Option<DomainArg>,
    pub weighting: Option<WeightingArg>,
    pub noise_var: Option<f64>,
    pub angle: Option<f64>,
    pub seed: Option<u64>,
    pub size: Option<usize>,
    pub count: Option<usize>,
    pub suite_seed: Option<u64>,
    pub images: Option<std::path::PathBuf>,
    pub variances: Option<Vec<f64>>,
    pub angles: Option<Vec<f64>>,
    pub ks: Option<Vec<usize>>,
    pub order: Option<Vec<i32>>,
    pub orders: Option<usize>,
    pub k_max: Option<usize>,
    pub s_max: Option<usize>,
    pub tail_tol: Option<f64>,
    pub points: Option<usize>,
    pub key: Option<u64>,
    pub bits: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| UsageError(format!("bad config {}: {e}", path.display())))
    }
}

/// Flag, then config file, then default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Resolved settings in a fixed order; hashed into the fingerprint and echoed
/// into output headers.
#[derive(Debug, Default, Clone)]
pub struct Settings {
    command: String,
    pairs: Vec<(String, String)>,
}

impl Settings {
    pub fn new(command: &str) -> Self {
        Self { command: command.to_string(), pairs: Vec::new() }
    }

    pub fn set(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.pairs.push((key.to_string(), value.to_string()));
        self
    }

    pub fn set_list<T: Display>(&mut self, key: &str, values: &[T]) -> &mut Self {
        let joined = values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
        self.set(key, joined)
    }

    pub fn canonical(&self) -> String {
        let mut s = self.command.clone();
        for (k, v) in &self.pairs {
            s.push(' ');
            s.push_str(k);
            s.push('=');
            s.push_str(v);
        }
        s
    }

    /// First 16 hex digits of the SHA-256 of the canonical form.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn header_line(&self) -> String {
        format!("# fmr {} {}", self.fingerprint(), self.canonical())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_beats_file_beats_default() {
        assert_eq!(pick(Some(1), Some(2), 3), 1);
        assert_eq!(pick(None, Some(2), 3), 2);
        assert_eq!(pick(None, None, 3), 3);
    }

    #[test]
    fn fingerprint_tracks_settings() {
        let mut a = Settings::new("moments");
        a.set("k", 10).set("seed", 0);
        let mut b = Settings::new("moments");
        b.set("k", 10).set("seed", 1);
        assert_eq!(a.fingerprint().len(), 16);
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.canonical(), "moments k=10 seed=0");
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        assert!(toml::from_str::<FileConfig>("alpha = 2.0\nk = 4").is_ok());
        assert!(toml::from_str::<FileConfig>("colour = 1").is_err());
    }
}
