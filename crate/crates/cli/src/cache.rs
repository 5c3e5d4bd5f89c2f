//! On-disk cache of radial solutions: one file per key, a `#` header followed
//! by CSV rows, written through a temporary file and renamed into place.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use radbif_core::{ProblemParams, RadialSolution, RadialSource, Result as CoreResult, Tolerances};

use crate::error::{CliError, Result};
use crate::output::header_block;

/// Tag written into every artifact; bump when solver output changes.
pub const VERSION_TAG: &str = concat!("radbif-", env!("CARGO_PKG_VERSION"), "-r1");

/// `ρ` rounded to 12 significant digits.
pub fn round_rho(rho: f64) -> f64 {
    format!("{rho:.11e}").parse().unwrap_or(rho)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CacheKey {
    pub dimension: u32,
    pub rho: f64,
    pub ode_tol: f64,
}

impl CacheKey {
    pub fn new(dimension: u32, rho: f64, ode_tol: f64) -> Self {
        Self {
            dimension,
            rho: round_rho(rho),
            ode_tol,
        }
    }

    pub fn file_name(&self) -> String {
        format!(
            "radial_N{}_rho{:.11e}_tol{:e}_{}.csv",
            self.dimension, self.rho, self.ode_tol, VERSION_TAG
        )
    }
}

/// Write `sol` under `key` in `dir`.
pub fn store(dir: &Path, key: &CacheKey, sol: &RadialSolution) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(key.file_name());
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    let header = header_block(
        "radial solution cache",
        &[
            ("version", VERSION_TAG.to_string()),
            ("dimension", key.dimension.to_string()),
            ("rho", format!("{:?}", sol.rho())),
            ("ode_tol", format!("{:?}", key.ode_tol)),
            ("center_deficit", format!("{:?}", sol.center_deficit())),
            ("p_index", sol.p_index().to_string()),
            ("radius", format!("{:?}", sol.radius())),
            ("p_r", format!("{:?}", sol.p_r())),
            ("c_rho", format!("{:?}", sol.c_rho())),
            (
                "boundary_residual",
                format!("{:e}", sol.boundary_residual()),
            ),
        ],
        &[
            "s: rescaled radius",
            "v: rescaled solution",
            "dv: derivative in s",
        ],
    );
    tmp.write_all(header.as_bytes())
        .map_err(|e| CliError::io(&path, e))?;
    {
        let mut w = csv::Writer::from_writer(tmp.as_file_mut());
        let io = |e: csv::Error| CliError::Cache {
            path: path.display().to_string(),
            reason: e.to_string(),
        };
        w.write_record(["s", "v", "dv"]).map_err(io)?;
        for ((s, v), dv) in sol.grid().iter().zip(sol.values()).zip(sol.derivatives()) {
            w.write_record([format!("{s:?}"), format!("{v:?}"), format!("{dv:?}")])
                .map_err(io)?;
        }
        w.flush().map_err(|e| CliError::io(&path, e))?;
    }
    tmp.persist(&path)
        .map_err(|e| CliError::io(&path, e.error))?;
    Ok(path)
}

/// Read the entry for `key`, or `None` if absent.
pub fn load(dir: &Path, key: &CacheKey) -> Result<Option<RadialSolution>> {
    let path = dir.join(key.file_name());
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(CliError::io(&path, e)),
    };
    let bad = |reason: String| CliError::Cache {
        path: path.display().to_string(),
        reason,
    };
    let field = |name: &str| -> Result<&str> {
        text.lines()
            .filter_map(|l| l.strip_prefix("# "))
            .find_map(|l| l.strip_prefix(name).and_then(|r| r.strip_prefix(": ")))
            .ok_or_else(|| bad(format!("missing header field {name}")))
    };
    let num = |name: &str| -> Result<f64> {
        field(name)?.parse().map_err(|_| bad(format!("bad {name}")))
    };
    if field("version")? != VERSION_TAG {
        return Ok(None);
    }
    let rho = num("rho")?;
    let deficit = num("center_deficit")?;
    let p_index: usize = field("p_index")?
        .parse()
        .map_err(|_| bad("bad p_index".into()))?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let (mut grid, mut v, mut dv) = (Vec::new(), Vec::new(), Vec::new());
    for rec in reader.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let get = |k: usize| -> Result<f64> {
            rec.get(k)
                .and_then(|x| x.parse().ok())
                .ok_or_else(|| bad(format!("bad row {rec:?}")))
        };
        grid.push(get(0)?);
        v.push(get(1)?);
        dv.push(get(2)?);
    }
    let params = ProblemParams::new(key.dimension, rho)?;
    Ok(Some(RadialSolution::from_raw_parts(
        params, deficit, grid, v, dv, p_index,
    )?))
}

/// Radial source backed by an optional cache directory. Requests are
/// rounded to the key's 12 significant digits before solving.
#[derive(Debug, Clone)]
pub struct CachedSolver {
    pub dir: Option<PathBuf>,
    pub tol: Tolerances,
}

impl CachedSolver {
    fn cached(&self, params: &ProblemParams) -> Result<Arc<RadialSolution>> {
        let key = CacheKey::new(params.dimension(), params.rho(), self.tol.ode);
        let params = ProblemParams::new(key.dimension, key.rho)?;
        let Some(dir) = &self.dir else {
            return Ok(Arc::new(radbif_core::solve_radial(&params, &self.tol)?));
        };
        if let Some(sol) = load(dir, &key)? {
            return Ok(Arc::new(sol));
        }
        let sol = radbif_core::solve_radial(&params, &self.tol)?;
        store(dir, &key, &sol)?;
        Ok(Arc::new(sol))
    }
}

impl RadialSource for CachedSolver {
    fn solve(&self, params: &ProblemParams) -> CoreResult<Arc<RadialSolution>> {
        self.cached(params).map_err(|e| match e {
            CliError::Core(c) => c,
            other => radbif_core::Error::Source(other.to_string()),
        })
    }
}
