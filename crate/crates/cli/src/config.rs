//! Flags merged over an optional TOML file. The file mirrors the flags: one
//! table per subcommand, keys spelled as the long flag names.

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;
use std::fs::File;
use std::path::{Path, PathBuf};

use toral_core::automorphism::{parse_matrix, Mat2, RationalPoint};
use toral_core::numbers::parse_rational;
use toral_core::Rational;

pub struct ConfigFile {
    root: toml::Table,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(ConfigFile { root: toml::Table::new() });
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let root: toml::Table = text.parse().with_context(|| format!("parsing config {}", path.display()))?;
        Ok(ConfigFile { root })
    }

    pub fn out_dir(&self) -> Option<PathBuf> {
        self.root.get("out-dir").and_then(|v| v.as_str()).map(PathBuf::from)
    }

    /// Command-line values win; missing ones come from the `[section]` table.
    pub fn resolve<T: Serialize + DeserializeOwned>(&self, section: &str, cli: &T) -> Result<T> {
        let mut merged = match self.root.get(section) {
            Some(t) => serde_json::to_value(t)?,
            None => Value::Object(Default::default()),
        };
        let Value::Object(over) = serde_json::to_value(cli)? else {
            unreachable!("argument structs serialize to objects")
        };
        let Value::Object(base) = &mut merged else {
            bail!("config section [{section}] must be a table");
        };
        for (k, v) in over {
            if !v.is_null() && v != Value::Array(vec![]) {
                base.insert(k, v);
            }
        }
        serde_json::from_value(merged).with_context(|| format!("invalid settings for `{section}`"))
    }
}

pub fn matrix(s: &Option<String>, flag: &str) -> Result<Mat2> {
    let s = s.as_deref().with_context(|| format!("missing --{flag} (e.g. --{flag} 2,1,1,1)"))?;
    parse_matrix(s).with_context(|| format!("--{flag}"))
}

pub fn rational(s: &Option<String>, flag: &str, default: Option<&str>) -> Result<Rational> {
    let s = s.as_deref().or(default).with_context(|| format!("missing --{flag} (e.g. --{flag} 1/10)"))?;
    parse_rational(s).with_context(|| format!("--{flag}: expected a rational like 1/10"))
}

pub fn point(s: &str, flag: &str) -> Result<RationalPoint> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        bail!("--{flag}: expected x,y (e.g. 1/5,2/5), got {s:?}");
    }
    Ok(RationalPoint::new(parse_rational(parts[0])?, parse_rational(parts[1])?))
}

pub fn opt_point(s: &Option<String>, flag: &str) -> Result<Option<RationalPoint>> {
    s.as_deref().map(|s| point(s, flag)).transpose()
}

/// `x,y` or `x,y,ell`.
pub fn probe(s: &str, default_ell: u32) -> Result<(RationalPoint, u32)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.len() {
        2 => Ok((point(s, "probe")?, default_ell)),
        3 => {
            let ell = parts[2].parse().with_context(|| format!("--probe: bad ell in {s:?}"))?;
            Ok((point(&format!("{},{}", parts[0], parts[1]), "probe")?, ell))
        }
        _ => bail!("--probe: expected x,y or x,y,ell, got {s:?}"),
    }
}

/// Creates the file up front so an unwritable path fails before any computation.
pub fn open_output(path: &Path) -> Result<File> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    File::create(path).with_context(|| format!("{} is not writable", path.display()))
}
