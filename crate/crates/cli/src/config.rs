//! Optional key=value config files mirroring the command-line flags.
//! Flags win over config values; unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::Path;

const KNOWN_KEYS: [&str; 7] = [
    "backend",
    "seed",
    "output",
    "tolerance",
    "tmin",
    "tmax",
    "samples",
];

#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    pub values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let mut values = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!(
                    "config line {}: expected key=value, got {line:?}",
                    lineno + 1
                ));
            };
            let key = key.trim().to_ascii_lowercase();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(format!("config line {}: unknown key {key:?}", lineno + 1));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(FileConfig { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }
}
