//! `key = value` settings file, `#` starts a comment.
//!
//! ```text
//! tol_norm = 1e-10
//! tol_oracle = 1e-8
//! tail = 1e-12        # target truncated mass for the Fock oracle
//! cutoff = adaptive   # or a fixed even photon number
//! refine_tol = 1e-6
//! out_dir = results
//! format = csv
//! ```

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use janus_core::analytic::Tolerances;
use janus_core::export::Format;
use janus_core::fock::DEFAULT_TAIL;
use janus_core::optimize::DEFAULT_REFINE_TOL;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "JANUS_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutoffPolicy {
    /// Grow the cutoff until the tail bound meets `tail`.
    Adaptive,
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub tolerances: Tolerances,
    pub tail: f64,
    pub cutoff: CutoffPolicy,
    pub refine_tol: f64,
    pub out_dir: PathBuf,
    pub format: Format,
}

impl Default for CliConfig {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            tail: DEFAULT_TAIL,
            cutoff: CutoffPolicy::Adaptive,
            refine_tol: DEFAULT_REFINE_TOL,
            out_dir: PathBuf::from("."),
            format: Format::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub origin: String,
    pub line: usize,
    pub msg: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}: {}", self.origin, self.msg)
        } else {
            write!(f, "{}:{}: {}", self.origin, self.line, self.msg)
        }
    }
}

impl std::error::Error for ConfigError {}

fn positive(key: &str, v: &str) -> Result<f64, String> {
    let x: f64 = v.parse().map_err(|e| format!("{key}: bad number {v:?}: {e}"))?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(format!("{key} must be > 0, got {v}"));
    }
    Ok(x)
}

impl CliConfig {
    /// Defaults with the output directory taken from [`OUT_DIR_ENV`] if set.
    pub fn from_env() -> Self {
        let mut c = Self::default();
        if let Some(dir) = std::env::var_os(OUT_DIR_ENV).filter(|d| !d.is_empty()) {
            c.out_dir = PathBuf::from(dir);
        }
        c
    }

    /// Apply one setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "tol_norm" => self.tolerances.norm = positive(key, value)?,
            "tol_oracle" => self.tolerances.oracle = positive(key, value)?,
            "tail" => self.tail = positive(key, value)?,
            "refine_tol" => self.refine_tol = positive(key, value)?,
            "cutoff" => {
                self.cutoff = if value == "adaptive" {
                    CutoffPolicy::Adaptive
                } else {
                    let n: usize = value
                        .parse()
                        .map_err(|_| format!("cutoff must be \"adaptive\" or an integer, got {value:?}"))?;
                    if n < 2 || !n.is_multiple_of(2) {
                        return Err(format!("cutoff must be even and >= 2, got {n}"));
                    }
                    CutoffPolicy::Fixed(n)
                }
            }
            "out_dir" => {
                if value.is_empty() {
                    return Err("out_dir is empty".into());
                }
                self.out_dir = PathBuf::from(value)
            }
            "format" => {
                self.format =
                    Format::parse(value).ok_or_else(|| format!("format must be csv or json, got {value:?}"))?
            }
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    /// Overlay the settings in `text` onto `self`.
    pub fn merge_str(&mut self, text: &str, origin: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let err = |msg: String| ConfigError {
                origin: origin.to_string(),
                line: i + 1,
                msg,
            };
            let line = raw.split_once('#').map_or(raw, |(l, _)| l).trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
            self.set(k.trim(), v.trim()).map_err(err)?;
        }
        Ok(())
    }

    pub fn merge_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = fs::read_to_string(path).map_err(|e| ConfigError {
            origin: path.display().to_string(),
            line: 0,
            msg: e.to_string(),
        })?;
        self.merge_str(&text, &path.display().to_string())
    }
}
