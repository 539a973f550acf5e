use crate::error::{LabError, Result};
use std::str::FromStr;

/// One accepted `key=value` parameter.
#[derive(Debug, Clone, Copy)]
pub struct ParamSpec {
    pub key: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Default,
    File,
    Cli,
}

impl Source {
    pub fn name(self) -> &'static str {
        match self {
            Source::Default => "default",
            Source::File => "file",
            Source::Cli => "cli",
        }
    }
}

/// Resolved parameters in declaration order.
#[derive(Debug, Clone)]
pub struct Params {
    entries: Vec<(&'static str, String, Source)>,
}

fn toml_scalar(v: &toml::Value) -> Option<String> {
    match v {
        toml::Value::String(s) => Some(s.clone()),
        toml::Value::Integer(i) => Some(i.to_string()),
        toml::Value::Float(f) => Some(f.to_string()),
        toml::Value::Boolean(b) => Some((*b as u8).to_string()),
        toml::Value::Array(a) => a.iter().map(toml_scalar).collect::<Option<Vec<_>>>().map(|v| v.join(",")),
        _ => None,
    }
}

impl Params {
    pub fn resolve(specs: &[ParamSpec], file: Option<&str>, command: &str, cli: &[String]) -> Result<Self> {
        let mut entries: Vec<(&'static str, String, Source)> =
            specs.iter().map(|s| (s.key, s.default.to_string(), Source::Default)).collect();
        let mut set = |key: &str, value: String, src: Source, strict: bool| -> Result<()> {
            match entries.iter_mut().find(|e| e.0 == key) {
                Some(e) => {
                    e.1 = value;
                    e.2 = src;
                    Ok(())
                }
                None if strict => {
                    let names: Vec<_> = specs.iter().map(|s| s.key).collect();
                    Err(LabError::Config(format!(
                        "unknown parameter '{key}' for {command} (accepted: {})",
                        names.join(", ")
                    )))
                }
                None => Ok(()),
            }
        };
        if let Some(text) = file {
            let doc: toml::Table = text.parse().map_err(|e| LabError::Config(format!("config file: {e}")))?;
            for (k, v) in &doc {
                if let Some(s) = toml_scalar(v) {
                    set(k, s, Source::File, false)?;
                }
            }
            if let Some(toml::Value::Table(t)) = doc.get(command) {
                for (k, v) in t {
                    let s = toml_scalar(v)
                        .ok_or_else(|| LabError::Config(format!("config value for '{k}' must be a scalar or array")))?;
                    set(k, s, Source::File, true)?;
                }
            }
        }
        for arg in cli {
            let (k, v) = arg
                .split_once('=')
                .ok_or_else(|| LabError::Config(format!("expected key=value, got '{arg}'")))?;
            set(k.trim(), v.trim().to_string(), Source::Cli, true)?;
        }
        Ok(Self { entries })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, Source)> {
        self.entries.iter().map(|(k, v, s)| (*k, v.as_str(), *s))
    }

    pub fn raw(&self, key: &str) -> &str {
        self.entries
            .iter()
            .find(|e| e.0 == key)
            .map(|e| e.1.as_str())
            .unwrap_or_else(|| panic!("parameter '{key}' is not declared"))
    }

    /// Whether the value is nonempty.
    pub fn has(&self, key: &str) -> bool {
        !self.raw(key).is_empty()
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T> {
        let v = self.raw(key);
        v.parse()
            .map_err(|_| LabError::Config(format!("cannot parse {key}={v} as {}", std::any::type_name::<T>())))
    }

    pub fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>> {
        let v = self.raw(key);
        if v.is_empty() {
            return Ok(Vec::new());
        }
        v.split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| LabError::Config(format!("cannot parse element '{s}' of {key}")))
            })
            .collect()
    }

    /// `lo-hi,lo-hi` as half-open intervals.
    pub fn intervals(&self, key: &str) -> Result<Vec<(u64, u64)>> {
        let v = self.raw(key);
        v.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| {
                let (a, b) = s
                    .split_once('-')
                    .ok_or_else(|| LabError::Config(format!("interval '{s}' in {key} must be lo-hi")))?;
                let p = |t: &str| {
                    t.trim()
                        .parse::<u64>()
                        .map_err(|_| LabError::Config(format!("bad interval bound '{t}' in {key}")))
                };
                Ok((p(a)?, p(b)?))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPECS: &[ParamSpec] = &[
        ParamSpec { key: "n", default: "10", help: "" },
        ParamSpec { key: "seed", default: "1", help: "" },
        ParamSpec { key: "w", default: "3-8,11-30", help: "" },
    ];

    #[test]
    fn precedence() {
        let file = "seed = 5\nother = 1\n[lemma-check]\nn = 20\n";
        let p = Params::resolve(SPECS, Some(file), "lemma-check", &["n=30".into()]).unwrap();
        assert_eq!(p.get::<u64>("n").unwrap(), 30);
        assert_eq!(p.get::<u64>("seed").unwrap(), 5);
        let srcs: Vec<_> = p.iter().map(|e| e.2).collect();
        assert_eq!(srcs, vec![Source::Cli, Source::File, Source::Default]);
        assert_eq!(p.intervals("w").unwrap(), vec![(3, 8), (11, 30)]);
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(Params::resolve(SPECS, None, "x", &["bogus=1".into()]).is_err());
        assert!(Params::resolve(SPECS, None, "x", &["n".into()]).is_err());
        assert!(Params::resolve(SPECS, Some("[x]\nbogus = 2"), "x", &[]).is_err());
        let p = Params::resolve(SPECS, None, "x", &["n=abc".into()]).unwrap();
        assert!(p.get::<u64>("n").is_err());
    }
}
