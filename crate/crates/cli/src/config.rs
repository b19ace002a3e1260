//! Layered run configuration: defaults < `key = value` file < flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::Serialize;

/// Keys understood by some subcommand; anything else in a config file is
/// rejected so typos cannot silently fall back to defaults.
const KNOWN_KEYS: &[&str] = &[
    "format", "out", "seed", "equation", "file", "poly", "model", "c", "r_min", "r_max", "ratio", "delta", "eps",
    "threshold", "tol", "growth", "lemma", "h", "k", "levels", "n1", "k0", "steps", "degree", "blacklist",
];

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Resolved settings for one invocation.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub settings: BTreeMap<String, String>,
}

pub fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| ConfigError(format!("config line {}: expected `key = value`", i + 1)))?;
        let k = k.trim();
        if !KNOWN_KEYS.contains(&k) {
            return Err(ConfigError(format!("config line {}: unknown key `{k}`", i + 1)));
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

impl RunConfig {
    /// Keeps file entries only for keys the command declares a default for.
    pub fn layer(
        command: &str,
        defaults: &[(&str, &str)],
        file: &BTreeMap<String, String>,
        flags: Vec<(&str, Option<String>)>,
    ) -> Self {
        let mut settings: BTreeMap<String, String> =
            defaults.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        for (k, v) in file {
            if settings.contains_key(k) {
                settings.insert(k.clone(), v.clone());
            }
        }
        for (k, v) in flags {
            if let Some(v) = v {
                settings.insert(k.to_string(), v);
            }
        }
        RunConfig {
            command: command.to_string(),
            settings,
        }
    }

    pub fn str(&self, key: &str) -> &str {
        self.settings.get(key).map(String::as_str).unwrap_or("")
    }

    pub fn opt(&self, key: &str) -> Option<&str> {
        Some(self.str(key)).filter(|s| !s.is_empty())
    }

    pub fn num<T: std::str::FromStr>(&self, key: &str) -> Result<T, ConfigError> {
        self.str(key)
            .parse()
            .map_err(|_| ConfigError(format!("`{key}` = `{}` is not a valid number", self.str(key))))
    }

    pub fn positive(&self, key: &str) -> Result<f64, ConfigError> {
        let v: f64 = self.num(key)?;
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(ConfigError(format!("`{key}` must be positive, got {v}")))
        }
    }

    /// Grid ratio, required to exceed 1.
    pub fn ratio(&self) -> Result<f64, ConfigError> {
        let v: f64 = self.num("ratio")?;
        if v > 1.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(ConfigError(format!("`ratio` must exceed 1, got {v}")))
        }
    }

    pub fn list(&self, key: &str) -> Result<Vec<u64>, ConfigError> {
        self.str(key)
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|_| ConfigError(format!("`{key}`: `{s}` is not an integer"))))
            .collect()
    }

    /// Rejects non-positive tolerances and ratios ≤ 1 before any work.
    pub fn validate(&self) -> Result<(), ConfigError> {
        for key in ["tol", "threshold", "delta", "eps", "r_min", "r_max", "h"] {
            if self.settings.contains_key(key) {
                self.positive(key)?;
            }
        }
        if self.settings.contains_key("ratio") {
            self.ratio()?;
        }
        if self.settings.contains_key("r_min") && self.positive("r_min")? >= self.positive("r_max")? {
            return Err(ConfigError("`r_min` must be below `r_max`".into()));
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("# {}\n", self.command);
        for (k, v) in &self.settings {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layering_order() {
        let file = parse_config_text("# run\nratio = 1.2\nr_max = 50\nlevels = 9\n").unwrap();
        let cfg = RunConfig::layer(
            "shift-check",
            &[("ratio", "1.1"), ("r_max", "200"), ("r_min", "3")],
            &file,
            vec![("r_max", Some("80".into())), ("r_min", None)],
        );
        assert_eq!(cfg.str("ratio"), "1.2");
        assert_eq!(cfg.str("r_max"), "80");
        assert_eq!(cfg.str("r_min"), "3");
        assert!(!cfg.settings.contains_key("levels"));
    }

    #[test]
    fn rejects_bad_files_and_values() {
        assert!(parse_config_text("ratio 1.2").is_err());
        assert!(parse_config_text("ration = 1.2").is_err());
        let cfg = RunConfig::layer("x", &[("ratio", "1.0"), ("tol", "1e-6")], &BTreeMap::new(), vec![]);
        assert!(cfg.validate().is_err());
        let cfg = RunConfig::layer("x", &[("ratio", "1.1"), ("tol", "-1")], &BTreeMap::new(), vec![]);
        assert!(cfg.validate().is_err());
    }
}
