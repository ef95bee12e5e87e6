//! Line-oriented `key = value` configuration with `[section]` headers.
//!
//! Values act as defaults; command-line flags win, and `PVZETA_THREADS`
//! overrides the thread count over everything. Unknown keys are rejected so
//! typos do not silently change runs.

use std::collections::BTreeMap;
use std::path::Path;

#[derive(Default, Debug, Clone)]
pub struct Config {
    values: BTreeMap<String, String>,
}

const KNOWN_KEYS: &[&str] = &[
    "global.threads",
    "global.seed",
    "global.budget",
    "census.budget",
    "census.strategy",
    "census.samples",
    "census.precision_k",
    "gamma.tolerance",
    "zeta_real.abs_tol",
    "zeta_real.rel_tol",
    "zeta_real.max_evals",
];

impl Config {
    pub fn load(path: &Path) -> Result<Config, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Config, String> {
        let mut section = "global".to_string();
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_string();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!("line {}: expected key = value", lineno + 1));
            };
            let full = format!("{}.{}", section, key.trim());
            if !KNOWN_KEYS.contains(&full.as_str()) {
                return Err(format!("line {}: unknown key `{full}`", lineno + 1));
            }
            values.insert(full, value.trim().to_string());
        }
        Ok(Config { values })
    }

    pub fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, String> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| format!("config key `{key}`: cannot parse `{v}`")),
        }
    }
}

/// Thread-count resolution: PVZETA_THREADS env > --threads flag > config >
/// default.
pub fn resolve_threads(flag: Option<usize>, config: &Config) -> Result<usize, String> {
    if let Ok(env) = std::env::var("PVZETA_THREADS") {
        return env
            .parse::<usize>()
            .map_err(|_| format!("PVZETA_THREADS: cannot parse `{env}`"));
    }
    if let Some(t) = flag {
        return Ok(t);
    }
    if let Some(t) = config.get::<usize>("global.threads")? {
        return Ok(t);
    }
    Ok(pvzeta_core::zeta_padic::default_threads())
}
