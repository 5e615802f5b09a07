//! Minimal flat config dialect: `[section]` headers over `key = value`
//! lines. Full-line `#` comments only, one section per name, one value per
//! key. Readers consume keys as they go; anything left over (unknown key,
//! unknown section) aborts before any work happens.

use std::collections::BTreeMap;

use wtconv_core::wtconv::InitScheme;
use wtconv_core::{Error, Result};

/// Parsed config file: section name -> key -> value.
#[derive(Debug, Default)]
pub struct ConfigDoc {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl ConfigDoc {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (number, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim().to_string();
                if name.is_empty() {
                    return Err(Error::Format(format!("line {}: empty section name", number + 1)));
                }
                if sections.contains_key(&name) {
                    return Err(Error::Format(format!(
                        "line {}: duplicate section [{name}]",
                        number + 1
                    )));
                }
                sections.insert(name.clone(), BTreeMap::new());
                current = Some(name);
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Format(format!(
                    "line {}: expected `key = value` or `[section]`, got `{line}`",
                    number + 1
                )));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(Error::Format(format!(
                    "line {}: empty key or value",
                    number + 1
                )));
            }
            let Some(section) = &current else {
                return Err(Error::Format(format!(
                    "line {}: `{key}` appears before any [section]",
                    number + 1
                )));
            };
            let map = sections.get_mut(section).unwrap();
            if map.insert(key.clone(), value).is_some() {
                return Err(Error::Format(format!(
                    "line {}: duplicate key `{key}` in [{section}]",
                    number + 1
                )));
            }
        }
        Ok(ConfigDoc { sections })
    }

    /// Remove and return a section for consumption. Missing section is an
    /// error naming it.
    pub fn take_section(&mut self, name: &str) -> Result<Section> {
        self.sections
            .remove(name)
            .map(|keys| Section { name: name.to_string(), keys })
            .ok_or_else(|| Error::Format(format!("missing [{name}] section")))
    }

    /// After all expected sections were taken, anything left is unknown.
    pub fn ensure_consumed(&self) -> Result<()> {
        if let Some(name) = self.sections.keys().next() {
            return Err(Error::Format(format!("unknown section [{name}]")));
        }
        Ok(())
    }
}

/// One section under consumption: every read removes its key, and
/// [`Section::ensure_consumed`] rejects leftovers.
#[derive(Debug)]
pub struct Section {
    name: String,
    keys: BTreeMap<String, String>,
}

impl Section {
    pub fn take(&mut self, key: &str) -> Option<String> {
        self.keys.remove(key)
    }

    pub fn require(&mut self, key: &str) -> Result<String> {
        self.take(key)
            .ok_or_else(|| Error::Format(format!("[{}] is missing `{key}`", self.name)))
    }

    fn parse_with<T, F: FnOnce(&str) -> Option<T>>(&self, key: &str, raw: &str, f: F, what: &str) -> Result<T> {
        f(raw).ok_or_else(|| {
            Error::Format(format!(
                "[{}] `{key} = {raw}` is not a valid {what}",
                self.name
            ))
        })
    }

    pub fn require_usize(&mut self, key: &str) -> Result<usize> {
        let raw = self.require(key)?;
        self.parse_with(key, &raw, |s| s.parse().ok(), "non-negative integer")
    }

    pub fn usize_or(&mut self, key: &str, default: usize) -> Result<usize> {
        match self.take(key) {
            None => Ok(default),
            Some(raw) => self.parse_with(key, &raw, |s| s.parse().ok(), "non-negative integer"),
        }
    }

    pub fn require_u64(&mut self, key: &str) -> Result<u64> {
        let raw = self.require(key)?;
        self.parse_with(key, &raw, |s| s.parse().ok(), "non-negative integer")
    }

    pub fn require_f64(&mut self, key: &str) -> Result<f64> {
        let raw = self.require(key)?;
        self.parse_with(key, &raw, |s| s.parse().ok(), "number")
    }

    pub fn f64_or(&mut self, key: &str, default: f64) -> Result<f64> {
        match self.take(key) {
            None => Ok(default),
            Some(raw) => self.parse_with(key, &raw, |s| s.parse().ok(), "number"),
        }
    }

    pub fn ensure_consumed(&self) -> Result<()> {
        if let Some(key) = self.keys.keys().next() {
            return Err(Error::Format(format!(
                "unknown key `{key}` in [{}]",
                self.name
            )));
        }
        Ok(())
    }
}

/// Element type selector for a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    F32,
    F64,
}

impl Precision {
    pub fn dump_suffix(self) -> &'static str {
        match self {
            Precision::F32 => "f32t",
            Precision::F64 => "f64t",
        }
    }
}

/// The `[layer]` section shared by forward/erf/train/info.
#[derive(Debug, Clone)]
pub struct LayerConfig {
    pub channels: usize,
    pub kernel: usize,
    pub levels: usize,
    pub seed: u64,
    pub init: InitScheme,
    pub precision: Precision,
    /// Optional parameter file to load instead of initializing.
    pub params_file: Option<String>,
}

impl LayerConfig {
    pub fn from_doc(doc: &mut ConfigDoc) -> Result<Self> {
        let mut section = doc.take_section("layer")?;
        let channels = section.require_usize("channels")?;
        let kernel = section.require_usize("kernel")?;
        let levels = section.require_usize("levels")?;
        let seed = section.require_u64("seed")?;
        let init = match section.take("init").as_deref() {
            None | Some("uniform-fan-in") => InitScheme::UniformFanIn,
            Some("zeros") => InitScheme::Zeros,
            Some(other) => {
                return Err(Error::Format(format!(
                    "[layer] `init = {other}` must be `uniform-fan-in` or `zeros`"
                )))
            }
        };
        let precision = match section.take("precision").as_deref() {
            None | Some("f64") => Precision::F64,
            Some("f32") => Precision::F32,
            Some(other) => {
                return Err(Error::Format(format!(
                    "[layer] `precision = {other}` must be `f32` or `f64`"
                )))
            }
        };
        let params_file = section.take("params-file");
        section.ensure_consumed()?;
        Ok(LayerConfig { channels, kernel, levels, seed, init, precision, params_file })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "\
# layer under test
[layer]
channels = 4
kernel = 3
levels = 2
seed = 42
init = uniform-fan-in
precision = f64
";

    #[test]
    fn parses_a_layer_section() {
        let mut doc = ConfigDoc::parse(GOOD).unwrap();
        let layer = LayerConfig::from_doc(&mut doc).unwrap();
        doc.ensure_consumed().unwrap();
        assert_eq!(layer.channels, 4);
        assert_eq!(layer.kernel, 3);
        assert_eq!(layer.levels, 2);
        assert_eq!(layer.seed, 42);
        assert_eq!(layer.init, InitScheme::UniformFanIn);
        assert_eq!(layer.precision, Precision::F64);
    }

    #[test]
    fn unknown_key_is_rejected() {
        let text = format!("{GOOD}unknown = 1\n");
        let mut doc = ConfigDoc::parse(&text).unwrap();
        let err = LayerConfig::from_doc(&mut doc).unwrap_err().to_string();
        assert!(err.contains("unknown key `unknown`"), "{err}");
    }

    #[test]
    fn unknown_section_is_rejected() {
        let text = format!("{GOOD}[mystery]\nkey = 1\n");
        let mut doc = ConfigDoc::parse(&text).unwrap();
        LayerConfig::from_doc(&mut doc).unwrap();
        let err = doc.ensure_consumed().unwrap_err().to_string();
        assert!(err.contains("unknown section [mystery]"), "{err}");
    }

    #[test]
    fn malformed_lines_are_rejected() {
        assert!(ConfigDoc::parse("[layer]\nchannels\n").is_err());
        assert!(ConfigDoc::parse("channels = 1\n").is_err());
        assert!(ConfigDoc::parse("[layer]\nchannels = 1\nchannels = 2\n").is_err());
        assert!(ConfigDoc::parse("[layer]\n[layer]\n").is_err());
    }

    #[test]
    fn bad_values_are_rejected() {
        for (key, value) in [
            ("channels", "x"),
            ("kernel", "-3"),
            ("init", "random"),
            ("precision", "f16"),
        ] {
            let text = GOOD.replace(
                &format!("{key} = {}",
                    match key {
                        "channels" => "4",
                        "kernel" => "3",
                        "init" => "uniform-fan-in",
                        _ => "f64",
                    }
                ),
                &format!("{key} = {value}"),
            );
            let mut doc = ConfigDoc::parse(&text).unwrap();
            assert!(
                LayerConfig::from_doc(&mut doc).is_err(),
                "{key} = {value} should be rejected"
            );
        }
    }
}
