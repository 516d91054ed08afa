//! Plain-text `key = value` config files. Flags always override file
//! values; unknown keys are hard errors so typos cannot silently fall
//! back to defaults.

use std::collections::HashMap;
use std::path::Path;

/// Every key a config file may set. Mirrors the long flag names.
const KNOWN_KEYS: &[&str] = &[
    "a0", "k", "energy", "pz", "harmonic", "theta", "phi", "pol", "sigma", "sigma-out", "n-occ",
    "averaged", "a", "length", "steps", "electrons", "order", "arg", "method", "pperp", "n", "h",
    "nmax", "which", "figure", "grid", "axis", "start", "stop", "count", "log",
];

#[derive(Debug, Default, Clone)]
pub struct ConfigBag {
    values: HashMap<String, String>,
}

impl ConfigBag {
    pub fn load(path: &Path) -> Result<ConfigBag, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let mut values = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("config {}:{lineno}: expected `key = value`, got `{raw}`", path.display()))?;
            let key = key.trim();
            let value = value.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(format!("config {}:{lineno}: unknown key `{key}`", path.display()));
            }
            if value.is_empty() {
                return Err(format!("config {}:{lineno}: empty value for `{key}`", path.display()));
            }
            values.insert(key.to_string(), value.to_string());
        }
        Ok(ConfigBag { values })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// flag wins, then the file, then the built-in default
    pub fn f64_or(&self, flag: Option<f64>, key: &str, default: f64) -> Result<f64, String> {
        self.f64_opt(flag, key).map(|v| v.unwrap_or(default))
    }

    pub fn f64_opt(&self, flag: Option<f64>, key: &str) -> Result<Option<f64>, String> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.raw(key) {
            None => Ok(None),
            Some(s) => s
                .parse::<f64>()
                .map(Some)
                .map_err(|_| format!("config key `{key}`: `{s}` is not a number")),
        }
    }

    pub fn f64_required(&self, flag: Option<f64>, key: &str) -> Result<f64, String> {
        self.f64_opt(flag, key)?
            .ok_or_else(|| format!("missing required parameter `--{key}` (flag or config)"))
    }

    pub fn i64_or(&self, flag: Option<i64>, key: &str, default: i64) -> Result<i64, String> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.raw(key) {
            None => Ok(default),
            Some(s) => s
                .parse::<i64>()
                .map_err(|_| format!("config key `{key}`: `{s}` is not an integer")),
        }
    }

    pub fn u32_or(&self, flag: Option<u32>, key: &str, default: u32) -> Result<u32, String> {
        self.i64_or(flag.map(i64::from), key, default as i64)?
            .try_into()
            .map_err(|_| format!("config key `{key}` out of range"))
    }

    pub fn u64_or(&self, flag: Option<u64>, key: &str, default: u64) -> Result<u64, String> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.raw(key) {
            None => Ok(default),
            Some(s) => s
                .parse::<u64>()
                .map_err(|_| format!("config key `{key}`: `{s}` is not a non-negative integer")),
        }
    }

    pub fn bool_or(&self, flag: bool, key: &str) -> Result<bool, String> {
        if flag {
            return Ok(true);
        }
        match self.raw(key) {
            None => Ok(false),
            Some("true") | Some("1") => Ok(true),
            Some("false") | Some("0") => Ok(false),
            Some(s) => Err(format!("config key `{key}`: `{s}` is not a boolean")),
        }
    }

    pub fn string_opt(&self, flag: Option<String>, key: &str) -> Option<String> {
        flag.or_else(|| self.raw(key).map(str::to_string))
    }
}
