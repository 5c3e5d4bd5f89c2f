use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use radbif_cli::commands;
use radbif_cli::config::{read_settings, RunConfig, Settings, CACHE_ENV};
use radbif_cli::{exit, CliError, Result};

#[derive(Parser)]
#[command(
    name = "radbif",
    version,
    about = "Radial nodal solutions, their spectra and symmetry-breaking bifurcation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// First zeros of the radial profile derivatives, checked against reference tables.
    BesselTables,
    /// Condition (G) for a symmetry group.
    CheckGroup,
    /// Radial solutions and their profiles.
    Radial,
    /// Recentered profiles against the interface limit.
    ProfileLimit,
    /// Spectrum of the Dirichlet linearization.
    Spectrum,
    /// Critical value rho0.
    Rho0,
    /// Critical value rho* and the bifurcation report.
    Bifurcate,
}

#[derive(Args)]
struct Options {
    /// key = value configuration file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    dim: Option<String>,
    /// dihedral:k, icosahedral, hyper-icosahedral or custom:N:i1:m.
    #[arg(long, global = true)]
    group: Option<String>,
    /// Comma-separated values; a trailing invL2 scales by 1/lambda2.
    #[arg(long, global = true, allow_hyphen_values = true)]
    rho: Option<String>,
    /// Comma-separated rescaled radii.
    #[arg(long = "R", global = true)]
    radius: Option<String>,
    /// lo:hi:n, endpoints may carry invL2.
    #[arg(long, global = true)]
    sweep: Option<String>,
    #[arg(long, global = true)]
    tol_ode: Option<String>,
    #[arg(long, global = true)]
    tol_eig: Option<String>,
    /// Bracket width for rho0 and rho*; may carry invL2.
    #[arg(long, global = true)]
    tol_bracket: Option<String>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cache directory; defaults to $RADBIF_CACHE_DIR.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    #[arg(long, global = true)]
    jobs: Option<String>,
    #[arg(long, global = true)]
    svg: bool,
    /// Largest degree for bessel-tables.
    #[arg(long, global = true)]
    imax: Option<String>,
    /// Number of sweep points in the bifurcation report.
    #[arg(long, global = true)]
    points: Option<String>,
}

impl Options {
    fn settings(&self) -> Result<Settings> {
        let mut s = match &self.config {
            Some(path) => read_settings(path)?,
            None => Settings::new(),
        };
        let flags = [
            ("dim", self.dim.clone()),
            ("group", self.group.clone()),
            ("rho", self.rho.clone()),
            ("R", self.radius.clone()),
            ("sweep", self.sweep.clone()),
            ("tol_ode", self.tol_ode.clone()),
            ("tol_eig", self.tol_eig.clone()),
            ("tol_bracket", self.tol_bracket.clone()),
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
            (
                "cache",
                self.cache.as_ref().map(|p| p.display().to_string()),
            ),
            ("jobs", self.jobs.clone()),
            ("svg", self.svg.then(|| "true".to_string())),
            ("imax", self.imax.clone()),
            ("points", self.points.clone()),
        ];
        let selection = ["rho", "R", "sweep"];
        if flags
            .iter()
            .any(|(k, v)| selection.contains(k) && v.is_some())
        {
            s.retain(|k, _| !selection.contains(&k.as_str()));
        }
        for (k, v) in flags {
            if let Some(v) = v {
                s.insert(k.to_string(), v);
            }
        }
        Ok(s)
    }
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = RunConfig::from_settings(&cli.opts.settings()?, std::env::var(CACHE_ENV).ok())?;
    if let Some(jobs) = cfg.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    match cli.command {
        Command::BesselTables => commands::bessel_tables(&cfg),
        Command::CheckGroup => commands::check_group(&cfg),
        Command::Radial => commands::radial(&cfg),
        Command::ProfileLimit => commands::profile_limit(&cfg),
        Command::Spectrum => commands::spectrum(&cfg),
        Command::Rho0 => commands::rho0(&cfg),
        Command::Bifurcate => commands::bifurcate(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                exit::USAGE as u8
            } else {
                exit::SUCCESS as u8
            });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Core(radbif_core::Error::ShootingFailure { scan, .. }) = &e {
                eprintln!("shooting scan (theta, second zero):");
                for (theta, zero) in scan {
                    eprintln!("  {theta:.6} {zero:.6}");
                }
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
