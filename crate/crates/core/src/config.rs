//! Surface configuration files.
//!
//! Configs are TOML key-value files:
//!
//! ```toml
//! frequency_hz = 12e9
//! surface_index = 1.52
//! rows = 1
//! cols = 16
//! spacing_x_m = 0.0082
//! spacing_y_m = 0.0082
//! feeds = [[0.0, 0.0]]
//! amp_on = 1.0
//! amp_off = 0.0
//! leakage_alpha = 0.0
//! ```
//!
//! `frequency_hz`, `rows`, `cols`, `spacing_x_m` and `feeds` are required.
//! `spacing_y_m` defaults to `spacing_x_m`. Optional extras:
//! `element_factor` (`"isotropic"` or `"cosine"`), `ground_plane` (bool) and
//! `max_dimension_m`.

use std::path::Path;
use thiserror::Error;
use toml::{Table, Value};

use crate::geometry::{ElementFactor, FeedPosition, RhsConfig, DEFAULT_SURFACE_INDEX};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: syntax error at line {line}, column {column}: {message}")]
    Syntax {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: missing required key `{key}`")]
    MissingKey { path: String, key: &'static str },
    #[error("{path}: key `{key}` (line {line}): {reason}")]
    InvalidValue {
        path: String,
        key: String,
        line: usize,
        reason: String,
    },
    #[error("{path}: unknown key `{key}` (line {line})")]
    UnknownKey {
        path: String,
        key: String,
        line: usize,
    },
    #[error("{path}: {reason}")]
    Inconsistent { path: String, reason: String },
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

const KNOWN_KEYS: &[&str] = &[
    "frequency_hz",
    "surface_index",
    "rows",
    "cols",
    "spacing_x_m",
    "spacing_y_m",
    "feeds",
    "amp_on",
    "amp_off",
    "leakage_alpha",
    "element_factor",
    "ground_plane",
    "max_dimension_m",
];

/// 1-based line of the first occurrence of `key = ` in the source.
fn key_line(src: &str, key: &str) -> usize {
    src.lines()
        .position(|l| {
            let l = l.trim_start();
            l.strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map_or(0, |i| i + 1)
}

fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before
        .rfind('\n')
        .map_or(before.len(), |p| before.len() - p - 1)
        + 1;
    (line, column)
}

struct Reader<'a> {
    src: &'a str,
    path: &'a str,
    table: Table,
}

impl<'a> Reader<'a> {
    fn invalid(&self, key: &str, reason: impl Into<String>) -> ConfigError {
        ConfigError::InvalidValue {
            path: self.path.to_string(),
            key: key.to_string(),
            line: key_line(self.src, key),
            reason: reason.into(),
        }
    }

    fn missing(&self, key: &'static str) -> ConfigError {
        ConfigError::MissingKey {
            path: self.path.to_string(),
            key,
        }
    }

    fn number(&self, key: &'static str) -> Result<Option<f64>, ConfigError> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::Float(f)) => Ok(Some(*f)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(other) => Err(self.invalid(
                key,
                format!("expected a number, found {}", other.type_str()),
            )),
        }
    }

    fn required_number(&self, key: &'static str) -> Result<f64, ConfigError> {
        self.number(key)?.ok_or_else(|| self.missing(key))
    }

    fn required_count(&self, key: &'static str) -> Result<usize, ConfigError> {
        match self.table.get(key) {
            None => Err(self.missing(key)),
            Some(Value::Integer(i)) if *i >= 1 => Ok(*i as usize),
            Some(Value::Integer(i)) => {
                Err(self.invalid(key, format!("must be a positive integer, got {i}")))
            }
            Some(other) => Err(self.invalid(
                key,
                format!("expected an integer, found {}", other.type_str()),
            )),
        }
    }

    fn feeds(&self) -> Result<Vec<FeedPosition>, ConfigError> {
        let key = "feeds";
        let arr = match self.table.get(key) {
            None => return Err(self.missing(key)),
            Some(Value::Array(a)) => a,
            Some(other) => {
                return Err(self.invalid(
                    key,
                    format!("expected a list of [x, y], found {}", other.type_str()),
                ))
            }
        };
        if arr.is_empty() {
            return Err(self.invalid(key, "at least one feed is required"));
        }
        arr.iter()
            .enumerate()
            .map(|(i, v)| {
                let pair = v.as_array().filter(|p| p.len() == 2).ok_or_else(|| {
                    self.invalid(key, format!("feed {i} must be a two-element [x, y] list"))
                })?;
                let coord = |c: &Value| match c {
                    Value::Float(f) => Ok(*f),
                    Value::Integer(n) => Ok(*n as f64),
                    _ => Err(self.invalid(key, format!("feed {i} coordinates must be numbers"))),
                };
                Ok(FeedPosition::new(coord(&pair[0])?, coord(&pair[1])?))
            })
            .collect()
    }
}

/// Parse a config from TOML text. `path` is only used in diagnostics.
pub fn parse_config(src: &str, path: &str) -> Result<RhsConfig, ConfigError> {
    let table: Table = src.parse().map_err(|e: toml::de::Error| {
        let (line, column) = e.span().map_or((0, 0), |s| line_col(src, s.start));
        ConfigError::Syntax {
            path: path.to_string(),
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    let r = Reader { src, path, table };

    if let Some(key) = r.table.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
        return Err(ConfigError::UnknownKey {
            path: path.to_string(),
            key: key.clone(),
            line: key_line(src, key),
        });
    }

    let spacing_x_m = r.required_number("spacing_x_m")?;
    let element_factor = match r.table.get("element_factor") {
        None => ElementFactor::Isotropic,
        Some(Value::String(s)) => match s.as_str() {
            "isotropic" => ElementFactor::Isotropic,
            "cosine" => ElementFactor::Cosine,
            other => {
                return Err(r.invalid(
                    "element_factor",
                    format!("expected \"isotropic\" or \"cosine\", got \"{other}\""),
                ))
            }
        },
        Some(other) => {
            return Err(r.invalid(
                "element_factor",
                format!("expected a string, found {}", other.type_str()),
            ))
        }
    };
    let ground_plane = match r.table.get("ground_plane") {
        None => true,
        Some(Value::Boolean(b)) => *b,
        Some(other) => {
            return Err(r.invalid(
                "ground_plane",
                format!("expected a boolean, found {}", other.type_str()),
            ))
        }
    };

    let cfg = RhsConfig {
        frequency_hz: r.required_number("frequency_hz")?,
        surface_index: r.number("surface_index")?.unwrap_or(DEFAULT_SURFACE_INDEX),
        rows: r.required_count("rows")?,
        cols: r.required_count("cols")?,
        spacing_x_m,
        spacing_y_m: r.number("spacing_y_m")?.unwrap_or(spacing_x_m),
        feeds: r.feeds()?,
        amp_on: r.number("amp_on")?.unwrap_or(1.0),
        amp_off: r.number("amp_off")?.unwrap_or(0.0),
        leakage_alpha: r.number("leakage_alpha")?.unwrap_or(0.0),
        element_factor,
        ground_plane,
        max_dimension_m: r.number("max_dimension_m")?,
    };
    cfg.validate().map_err(|e| ConfigError::Inconsistent {
        path: path.to_string(),
        reason: e.to_string(),
    })?;
    Ok(cfg)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<RhsConfig, ConfigError> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let src = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: display.clone(),
        source,
    })?;
    parse_config(&src, &display)
}

/// Serialize a config back to TOML text.
pub fn to_toml(cfg: &RhsConfig) -> String {
    let feeds: Vec<String> = cfg
        .feeds
        .iter()
        .map(|f| format!("[{:?}, {:?}]", f.0.x, f.0.y))
        .collect();
    let mut out = format!(
        "frequency_hz = {:?}\nsurface_index = {:?}\nrows = {}\ncols = {}\nspacing_x_m = {:?}\nspacing_y_m = {:?}\nfeeds = [{}]\namp_on = {:?}\namp_off = {:?}\nleakage_alpha = {:?}\nelement_factor = \"{}\"\nground_plane = {}\n",
        cfg.frequency_hz,
        cfg.surface_index,
        cfg.rows,
        cfg.cols,
        cfg.spacing_x_m,
        cfg.spacing_y_m,
        feeds.join(", "),
        cfg.amp_on,
        cfg.amp_off,
        cfg.leakage_alpha,
        match cfg.element_factor {
            ElementFactor::Isotropic => "isotropic",
            ElementFactor::Cosine => "cosine",
        },
        cfg.ground_plane,
    );
    if let Some(d) = cfg.max_dimension_m {
        out.push_str(&format!("max_dimension_m = {d:?}\n"));
    }
    out
}
