//! Run configuration: value parsing, config files and flag/file merging.
//!
//! Every parameter reaches the command implementations through a single
//! string-keyed map. Config files contribute base values, explicit CLI
//! flags override them, and built-in defaults fill the rest, so a run
//! specified by flags and the same run specified by file resolve to
//! identical parameters and identical output bytes.
//!
//! Config files are flat text: one `key = value` pair per line, `#` starts
//! a comment line, blank lines are ignored, later entries win. Keys are the
//! long CLI flag names plus the reserved keys `command`, `output` and
//! `format`.
//!
//! Complex literals are whitespace-free and use `i` for the imaginary
//! unit: `a`, `bi`, `a+bi`, `a-bi` (e.g. `-1`, `0.5+0.5i`, `2i`, `-i`,
//! `1e-3+2.5e-2i`). Ranges are `min:max:count` with `min < max` and
//! `count >= 2`.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use num_complex::Complex64;

/// Error carrying the process exit code: 1 usage, 2 numerical, 3 I/O.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Numerical(msg) => write!(f, "{msg}"),
            CliError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<emdet::Error> for CliError {
    fn from(e: emdet::Error) -> Self {
        CliError::Numerical(e.to_string())
    }
}

/// Keys accepted by every command.
pub const RESERVED_KEYS: [&str; 3] = ["command", "output", "format"];

/// Parses a flat `key = value` config file.
pub fn load_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config file {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!(
                "{}:{}: expected `key = value`, got `{line}`",
                path.display(),
                lineno + 1
            ))
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Resolved key-value parameters for one run.
#[derive(Debug, Default)]
pub struct Params {
    map: BTreeMap<String, String>,
}

impl Params {
    /// File entries overlaid with explicit flag values (flags win).
    pub fn merge(
        file: BTreeMap<String, String>,
        overrides: Vec<(&str, Option<String>)>,
    ) -> Self {
        let mut map = file;
        for (key, value) in overrides {
            if let Some(value) = value {
                map.insert(key.to_string(), value);
            }
        }
        Self { map }
    }

    /// Rejects keys that are neither reserved nor in `allowed`.
    pub fn validate_keys(&self, allowed: &[&str]) -> Result<(), CliError> {
        for key in self.map.keys() {
            if !RESERVED_KEYS.contains(&key.as_str()) && !allowed.contains(&key.as_str()) {
                return Err(CliError::Usage(format!(
                    "unknown key `{key}` (accepted: {})",
                    allowed.join(", ")
                )));
            }
        }
        Ok(())
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    pub fn get_f64(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.map.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| CliError::Usage(format!("invalid number for `{key}`: `{v}`"))),
        }
    }

    pub fn get_usize(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.map.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| CliError::Usage(format!("invalid integer for `{key}`: `{v}`"))),
        }
    }

    pub fn get_u64(&self, key: &str, default: u64) -> Result<u64, CliError> {
        match self.map.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| CliError::Usage(format!("invalid integer for `{key}`: `{v}`"))),
        }
    }

    pub fn get_complex(&self, key: &str, default: Complex64) -> Result<Complex64, CliError> {
        match self.map.get(key) {
            None => Ok(default),
            Some(v) => parse_complex(v)
                .map_err(|e| CliError::Usage(format!("invalid complex for `{key}`: {e}"))),
        }
    }

    pub fn get_range(&self, key: &str, default: &str) -> Result<Range, CliError> {
        let raw = self.map.get(key).map(String::as_str).unwrap_or(default);
        parse_range(raw).map_err(|e| CliError::Usage(format!("invalid range for `{key}`: {e}")))
    }

    pub fn get_choice(
        &self,
        key: &str,
        choices: &[&str],
        default: &str,
    ) -> Result<String, CliError> {
        let raw = self.map.get(key).map(String::as_str).unwrap_or(default);
        if choices.contains(&raw) {
            Ok(raw.to_string())
        } else {
            Err(CliError::Usage(format!(
                "invalid value `{raw}` for `{key}` (choices: {})",
                choices.join(", ")
            )))
        }
    }
}

/// `min:max:count` sweep specification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

pub fn parse_range(s: &str) -> Result<Range, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("`{s}` is not of the form min:max:count"));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| format!("bad range minimum `{}`", parts[0]))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| format!("bad range maximum `{}`", parts[1]))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| format!("bad range count `{}`", parts[2]))?;
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(format!("range needs finite min < max, got {lo}:{hi}"));
    }
    if count < 2 {
        return Err(format!("range needs count >= 2, got {count}"));
    }
    Ok(Range { lo, hi, count })
}

/// Parses the whitespace-free complex grammar `a`, `bi`, `a+bi`, `a-bi`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    if s.is_empty() {
        return Err("empty literal".to_string());
    }
    if s.chars().any(char::is_whitespace) {
        return Err(format!("literal `{s}` must not contain whitespace"));
    }
    let (body, imaginary) = match s.strip_suffix(['i', 'I']) {
        Some(body) => (body, true),
        None => (s, false),
    };
    if !imaginary {
        return body
            .parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| format!("`{s}` is not a number"));
    }
    // split before the last +/- that is not a leading sign or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| {
            (bytes[i] == b'+' || bytes[i] == b'-')
                && bytes[i - 1] != b'e'
                && bytes[i - 1] != b'E'
        });
    match split {
        Some(i) => {
            let re: f64 = body[..i]
                .parse()
                .map_err(|_| format!("bad real part in `{s}`"))?;
            let im = parse_imaginary_coeff(&body[i..], s)?;
            Ok(Complex64::new(re, im))
        }
        None => Ok(Complex64::new(0.0, parse_imaginary_coeff(body, s)?)),
    }
}

fn parse_imaginary_coeff(coeff: &str, whole: &str) -> Result<f64, String> {
    match coeff {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        other => other
            .parse()
            .map_err(|_| format!("bad imaginary part in `{whole}`")),
    }
}
