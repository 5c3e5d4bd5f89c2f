//! Run configuration assembled from an optional `key = value` file and
//! command-line flags, flags taking precedence.
//!
//! Recognized keys: `dim`, `group`, `rho`, `R`, `sweep`, `tol_ode`,
//! `tol_eig`, `tol_bracket`, `out`, `cache`, `jobs`, `svg`, `imax`, `points`.
//! Parameter values accept a trailing `invL2` to mean a multiple of `λ̄₂⁻¹`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use radbif_core::radial_solver::lambda_bar_2_inv;
use radbif_core::{SpectralTolerances, SymmetryGroup, Tolerances};

use crate::error::{CliError, Result};

/// Environment variable naming the default cache directory.
pub const CACHE_ENV: &str = "RADBIF_CACHE_DIR";
pub const DEFAULT_OUT: &str = "radbif-out";

pub const KEYS: [&str; 14] = [
    "dim",
    "group",
    "rho",
    "R",
    "sweep",
    "tol_ode",
    "tol_eig",
    "tol_bracket",
    "out",
    "cache",
    "jobs",
    "svg",
    "imax",
    "points",
];

pub type Settings = BTreeMap<String, String>;

/// Parse a `key = value` configuration text.
pub fn parse_settings(text: &str) -> Result<Settings> {
    let mut out = Settings::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "config line {}: expected key = value",
                k + 1
            )));
        };
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(CliError::Usage(format!(
                "config line {}: unknown key `{key}`",
                k + 1
            )));
        }
        out.insert(key.to_string(), value.trim().to_string());
    }
    Ok(out)
}

pub fn read_settings(path: &Path) -> Result<Settings> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_settings(&text)
}

/// A parameter given either absolutely or as a multiple of `λ̄₂⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Param {
    pub value: f64,
    pub relative: bool,
}

impl Param {
    pub fn parse(token: &str) -> Result<Self> {
        let token = token.trim();
        let (number, relative) = match token.strip_suffix("invL2") {
            Some(head) => (head.trim_end_matches('*').trim(), true),
            None => (token, false),
        };
        let number = if number.is_empty() && relative {
            "1"
        } else {
            number
        };
        let value: f64 = number
            .parse()
            .map_err(|_| CliError::Usage(format!("cannot parse `{token}` as a number")))?;
        if !value.is_finite() {
            return Err(CliError::Usage(format!("`{token}` is not finite")));
        }
        Ok(Self { value, relative })
    }

    pub fn resolve(self, dimension: u32) -> Result<f64> {
        if self.relative {
            Ok(self.value * lambda_bar_2_inv(dimension)?)
        } else {
            Ok(self.value)
        }
    }
}

/// Which parameter values a command runs over.
#[derive(Debug, Clone, PartialEq)]
pub enum Selection {
    Rho(Vec<Param>),
    Radius(Vec<f64>),
    Sweep { lo: Param, hi: Param, n: usize },
}

impl Selection {
    /// Values of `ρ` in dimension `n`.
    pub fn rhos(&self, dimension: u32) -> Result<Vec<f64>> {
        match self {
            Selection::Rho(v) => v.iter().map(|p| p.resolve(dimension)).collect(),
            Selection::Radius(v) => Ok(v.iter().map(|r| 1.0 / (r * r)).collect()),
            Selection::Sweep { lo, hi, n } => {
                let (lo, hi) = (lo.resolve(dimension)?, hi.resolve(dimension)?);
                Ok((0..*n)
                    .map(|k| {
                        if *n == 1 {
                            lo
                        } else {
                            lo + (hi - lo) * k as f64 / (*n - 1) as f64
                        }
                    })
                    .collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dimension: Option<u32>,
    pub group: Option<SymmetryGroup>,
    pub selection: Option<Selection>,
    pub tol_ode: Option<f64>,
    pub tol_eig: Option<f64>,
    pub tol_bracket: Option<Param>,
    pub out: PathBuf,
    pub cache: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub svg: bool,
    pub imax: Option<u32>,
    pub points: Option<usize>,
}

fn parse_list<T>(text: &str, item: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    let v = text
        .split(',')
        .map(|t| item(t.trim()))
        .collect::<Result<Vec<_>>>()?;
    if v.is_empty() {
        return Err(CliError::Usage("empty list".into()));
    }
    Ok(v)
}

fn parse_num<T: std::str::FromStr>(key: &str, text: &str) -> Result<T> {
    text.trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("cannot parse {key} = `{text}`")))
}

fn positive(key: &str, text: &str) -> Result<f64> {
    let v: f64 = parse_num(key, text)?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(CliError::Usage(format!(
            "{key} must be positive, got {text}"
        )));
    }
    Ok(v)
}

fn parse_bool(key: &str, text: &str) -> Result<bool> {
    match text.trim() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(CliError::Usage(format!(
            "cannot parse {key} = `{text}` as a boolean"
        ))),
    }
}

impl RunConfig {
    /// Build from merged settings. `cache_env` is the value of [`CACHE_ENV`].
    pub fn from_settings(s: &Settings, cache_env: Option<String>) -> Result<Self> {
        let get = |k: &str| s.get(k).map(String::as_str);
        let dimension = get("dim").map(|t| parse_num::<u32>("dim", t)).transpose()?;
        let group = get("group")
            .map(|t| {
                t.parse::<SymmetryGroup>()
                    .map_err(|e| CliError::Usage(e.to_string()))
            })
            .transpose()?;
        if let (Some(n), Some(g)) = (dimension, group) {
            if g.dimension() != n {
                return Err(CliError::Usage(format!(
                    "group {g} acts in dimension {}, not {n}",
                    g.dimension()
                )));
            }
        }
        let chosen: Vec<&str> = ["rho", "R", "sweep"]
            .into_iter()
            .filter(|k| s.contains_key(*k))
            .collect();
        if chosen.len() > 1 {
            return Err(CliError::Usage(format!(
                "give exactly one of rho, R, sweep (got {})",
                chosen.join(", ")
            )));
        }
        let selection = match chosen.first().copied() {
            Some("rho") => Some(Selection::Rho(parse_list(&s["rho"], Param::parse)?)),
            Some("R") => Some(Selection::Radius(parse_list(&s["R"], |t| {
                positive("R", t)
            })?)),
            Some("sweep") => {
                let parts: Vec<&str> = s["sweep"].split(':').collect();
                let [lo, hi, n] = parts[..] else {
                    return Err(CliError::Usage("sweep must read lo:hi:n".into()));
                };
                let n: usize = parse_num("sweep count", n)?;
                if n == 0 {
                    return Err(CliError::Usage("sweep count must be positive".into()));
                }
                Some(Selection::Sweep {
                    lo: Param::parse(lo)?,
                    hi: Param::parse(hi)?,
                    n,
                })
            }
            _ => None,
        };
        let tol_bracket = get("tol_bracket").map(Param::parse).transpose()?;
        if tol_bracket.is_some_and(|p| !(p.value > 0.0)) {
            return Err(CliError::Usage("tol_bracket must be positive".into()));
        }
        let jobs = get("jobs")
            .map(|t| parse_num::<usize>("jobs", t))
            .transpose()?;
        if jobs == Some(0) {
            return Err(CliError::Usage("jobs must be positive".into()));
        }
        Ok(Self {
            dimension,
            group,
            selection,
            tol_ode: get("tol_ode").map(|t| positive("tol_ode", t)).transpose()?,
            tol_eig: get("tol_eig").map(|t| positive("tol_eig", t)).transpose()?,
            tol_bracket,
            out: PathBuf::from(get("out").unwrap_or(DEFAULT_OUT)),
            cache: get("cache")
                .map(PathBuf::from)
                .or(cache_env.filter(|v| !v.is_empty()).map(PathBuf::from)),
            jobs,
            svg: get("svg")
                .map(|t| parse_bool("svg", t))
                .transpose()?
                .unwrap_or(false),
            imax: get("imax")
                .map(|t| parse_num::<u32>("imax", t))
                .transpose()?,
            points: get("points")
                .map(|t| parse_num::<usize>("points", t))
                .transpose()?,
        })
    }

    /// Dimension from `--dim` or from the group.
    pub fn dimension(&self) -> Result<u32> {
        self.dimension
            .or(self.group.map(|g| g.dimension()))
            .ok_or_else(|| CliError::Usage("missing --dim".into()))
    }

    pub fn group(&self) -> Result<SymmetryGroup> {
        self.group
            .ok_or_else(|| CliError::Usage("missing --group".into()))
    }

    pub fn selection(&self) -> Result<&Selection> {
        self.selection
            .as_ref()
            .ok_or_else(|| CliError::Usage("give one of --rho, --R, --sweep".into()))
    }

    pub fn radial_tolerances(&self) -> Tolerances {
        let mut t = Tolerances::default();
        if let Some(v) = self.tol_ode {
            t.ode = v;
        }
        t
    }

    pub fn spectral_tolerances(&self) -> SpectralTolerances {
        let mut t = SpectralTolerances::default();
        if let Some(v) = self.tol_ode {
            t.ode = t.ode.min(0.1 * v);
        }
        if let Some(v) = self.tol_eig {
            t.eig = v;
        }
        t
    }

    /// Bracket width for `ρ₀` and `ρ*`, by default `1e-6·λ̄₂⁻¹`.
    pub fn bracket_tol(&self, dimension: u32) -> Result<f64> {
        match self.tol_bracket {
            Some(p) => p.resolve(dimension),
            None => Ok(1e-6 * lambda_bar_2_inv(dimension)?),
        }
    }
}
