use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;

use radbif_core::dirichlet_spectrum::mu2_g;
use radbif_core::radial_solver::{energy, lambda_bar_2_inv, limit_profile, recentered_profile};
use radbif_core::special_functions::{derivative_zero_table, reference_zero_table};
use radbif_core::{
    bifurcation_report, check_condition_g, find_rho0, BifurcationSettings, ProblemParams,
    RadialSolution, RadialSource, ReportStatus, SymmetryGroup,
};

use crate::cache::{CachedSolver, VERSION_TAG};
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::{line_chart, write_text, Series, Table};

/// Largest accepted difference from the reference tables.
pub const GOLDEN_TOLERANCE: f64 = 1e-4;

fn solver(cfg: &RunConfig) -> CachedSolver {
    CachedSolver {
        dir: cfg.cache.clone(),
        tol: cfg.radial_tolerances(),
    }
}

fn out_file(cfg: &RunConfig, name: &str) -> PathBuf {
    cfg.out.join(name)
}

fn group_slug(group: &SymmetryGroup) -> String {
    group.to_string().replace(':', "-")
}

fn announce(path: &std::path::Path) {
    println!("wrote {}", path.display());
}

pub fn bessel_tables(cfg: &RunConfig) -> Result<()> {
    let n = cfg.dimension()?;
    let Some(golden) = reference_zero_table(n) else {
        return Err(CliError::Usage(format!(
            "bessel-tables supports --dim 2, 3 or 4, got {n}"
        )));
    };
    let i_max = cfg.imax.unwrap_or(golden.rows.len() as u32);
    if i_max == 0 {
        return Err(CliError::Usage("--imax must be positive".into()));
    }
    let table = derivative_zero_table(n, i_max)?;
    let mut worst: f64 = (table.r2 - golden.r2).abs();
    println!("N = {n}");
    println!(
        "{:>4}  {:>12}  {:>10}  {:>10}",
        "i", "zero", "golden", "diff"
    );
    println!(
        "{:>4}  {:>12.7}  {:>10.5}  {:>10.2e}",
        "r2",
        table.r2,
        golden.r2,
        table.r2 - golden.r2
    );
    let mut csv = Table::new("first zeros of the radial profile derivatives")
        .field("dimension", n)
        .field("r2", format!("{:?}", table.r2))
        .field("r2_golden", golden.r2)
        .field("golden_tolerance", GOLDEN_TOLERANCE)
        .column("i", "harmonic degree")
        .column(
            "s_i",
            "first positive zero of the derivative of r^(1-N/2) J_(i+N/2-1)(r)",
        )
        .column("golden", "reference value (NaN when not tabulated)")
        .column("diff", "s_i - golden");
    for &(i, z) in &table.rows {
        let gold = golden
            .rows
            .iter()
            .find(|r| r.0 == i)
            .map_or(f64::NAN, |r| r.1);
        if gold.is_finite() {
            worst = worst.max((z - gold).abs());
            println!("{i:>4}  {z:>12.7}  {gold:>10.5}  {:>10.2e}", z - gold);
        } else {
            println!("{i:>4}  {z:>12.7}  {:>10}  {:>10}", "-", "-");
        }
        csv.rows.push(vec![i as f64, z, gold, z - gold]);
    }
    announce(&csv.write(&out_file(cfg, &format!("bessel_N{n}.csv")))?);
    println!("max |diff| = {worst:.2e}");
    if worst > GOLDEN_TOLERANCE {
        return Err(CliError::Golden(format!(
            "max |diff| = {worst:e} exceeds {GOLDEN_TOLERANCE:e}"
        )));
    }
    Ok(())
}

pub fn check_group(cfg: &RunConfig) -> Result<()> {
    let group = cfg.group()?;
    let r = check_condition_g(&group)?;
    println!("group: {group}");
    println!("dimension: {}", group.dimension());
    println!("first invariant degree i1: {}", r.i1);
    println!("gamma1: {}", r.gamma1);
    println!("multiplicity: {}", r.multiplicity);
    println!("s1: {:.7}", r.s1);
    println!("r2: {:.7}", r.r2);
    println!("condition (G): {}", if r.passes { "pass" } else { "fail" });
    if !r.passes {
        return Err(CliError::Precondition(format!(
            "group {group} fails condition (G): s1 = {:.5}, r2 = {:.5}, multiplicity {}",
            r.s1, r.r2, r.multiplicity
        )));
    }
    Ok(())
}

fn solve_all(cfg: &RunConfig, n: u32) -> Result<Vec<std::sync::Arc<RadialSolution>>> {
    let rhos = cfg.selection()?.rhos(n)?;
    let source = solver(cfg);
    rhos.par_iter()
        .map(|&rho| Ok(source.solve(&ProblemParams::new(n, rho)?)?))
        .collect()
}

pub fn radial(cfg: &RunConfig) -> Result<()> {
    let n = cfg.dimension()?;
    let sols = solve_all(cfg, n)?;
    let mut series = Vec::new();
    for sol in &sols {
        let h = energy(sol);
        let mut t = Table::new("radial solution profile")
            .field("dimension", n)
            .field("rho", format!("{:?}", sol.rho()))
            .field("rho_over_inv_lambda2", sol.rho() / lambda_bar_2_inv(n)?)
            .field("R", format!("{:?}", sol.radius()))
            .field("a", format!("{:?}", sol.center_value()))
            .field("p_R", format!("{:?}", sol.p_r()))
            .field("p_rho", format!("{:?}", sol.p_rho()))
            .field("c_rho", format!("{:?}", sol.c_rho()))
            .field("ode_tol", cfg.radial_tolerances().ode)
            .column("s", "rescaled radius in [0, R]")
            .column("r", "unit-ball radius s/R")
            .column("v", "v_R(s) = u(s/R)")
            .column("dv", "dv/ds")
            .column("H", "dv^2 + v^2 - (v+)^4/2");
        for (k, ((&s, &v), &dv)) in sol
            .grid()
            .iter()
            .zip(sol.values())
            .zip(sol.derivatives())
            .enumerate()
        {
            t.rows.push(vec![s, s / sol.radius(), v, dv, h[k]]);
        }
        println!(
            "N = {n}, rho = {:.10e}, R = {:.6}, a = {:.10}, p_R = {:.6}, p_rho = {:.6}, c_rho = {:.10}",
            sol.rho(),
            sol.radius(),
            sol.center_value(),
            sol.p_r(),
            sol.p_rho(),
            sol.c_rho()
        );
        announce(&t.write(&out_file(
            cfg,
            &format!("radial_N{n}_rho{:.6e}.csv", sol.rho()),
        ))?);
        series.push(Series {
            label: format!("R = {:.3}", sol.radius()),
            points: sol
                .grid()
                .iter()
                .copied()
                .zip(sol.values().iter().copied())
                .collect(),
        });
    }
    if cfg.svg {
        let svg = line_chart(&format!("v_R in dimension {n}"), "s", "v_R(s)", &series);
        announce(&write_text(
            &out_file(cfg, &format!("radial_N{n}.svg")),
            &svg,
        )?);
    }
    Ok(())
}

pub fn profile_limit(cfg: &RunConfig) -> Result<()> {
    let n = cfg.dimension.unwrap_or(3);
    let cfg = &RunConfig {
        dimension: Some(n),
        selection: Some(
            cfg.selection
                .clone()
                .unwrap_or(crate::config::Selection::Radius(vec![10.0, 20.0, 30.0])),
        ),
        ..cfg.clone()
    };
    let sols = solve_all(cfg, n)?;
    let grid: Vec<f64> = (0..=800).map(|k| -5.0 + 8.0 * k as f64 / 800.0).collect();
    let mut t = Table::new("recentered profiles against the interface limit")
        .field("dimension", n)
        .column("r", "recentered coordinate s - p_R")
        .column(
            "limit",
            "-tanh(r/sqrt 2) for r <= 0, -sin(r)/sqrt 2 on (0, pi]",
        );
    let mut columns = vec![grid
        .iter()
        .map(|&r| limit_profile(r))
        .collect::<radbif_core::Result<Vec<_>>>()?];
    let mut series = vec![Series {
        label: "limit".into(),
        points: grid
            .iter()
            .copied()
            .zip(columns[0].iter().copied())
            .collect(),
    }];
    for sol in &sols {
        let values = grid
            .iter()
            .map(|&r| recentered_profile(sol, r))
            .collect::<radbif_core::Result<Vec<_>>>()?;
        let fine = (0..=8000)
            .map(|k| -5.0 + 8.0 * k as f64 / 8000.0)
            .map(|r| Ok((recentered_profile(sol, r)? - limit_profile(r)?).abs()))
            .collect::<radbif_core::Result<Vec<f64>>>()?;
        let sup = fine.into_iter().fold(0.0, f64::max);
        println!(
            "R = {:.4}: sup over [-5, 3] of |v~_R - v~_0| = {sup:.6}, R - p_R = {:.6}",
            sol.radius(),
            sol.radius() - sol.p_r()
        );
        t = t.column(
            format!("R{:.3}", sol.radius()),
            format!("recentered v_R, sup error {sup:e}"),
        );
        series.push(Series {
            label: format!("R = {:.3}", sol.radius()),
            points: grid.iter().copied().zip(values.iter().copied()).collect(),
        });
        columns.push(values);
    }
    t.rows = grid
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            std::iter::once(r)
                .chain(columns.iter().map(|c| c[k]))
                .collect()
        })
        .collect();
    announce(&t.write(&out_file(cfg, &format!("profile_limit_N{n}.csv")))?);
    if cfg.svg {
        let svg = line_chart("recentered profiles", "s - p_R", "v", &series);
        announce(&write_text(
            &out_file(cfg, &format!("profile_limit_N{n}.svg")),
            &svg,
        )?);
    }
    Ok(())
}

pub fn spectrum(cfg: &RunConfig) -> Result<()> {
    let group = cfg.group()?;
    let n = cfg.dimension()?;
    let limit = lambda_bar_2_inv(n)?;
    let tol = cfg.spectral_tolerances();
    let sols = solve_all(cfg, n)?;
    let reports = sols
        .par_iter()
        .map(|s| mu2_g(s.clone(), &group, &tol))
        .collect::<radbif_core::Result<Vec<_>>>()?;
    let mut t = Table::new("Dirichlet linearization spectrum")
        .field("dimension", n)
        .field("group", group)
        .field("ode_tol", tol.ode)
        .field("eig_tol", tol.eig)
        .column("rho", "parameter")
        .column("rho_fraction", "rho times lambda2")
        .column("mu_bar_1", "first radial eigenvalue")
        .column("mu_bar_2", "second radial eigenvalue")
        .column(
            "mu_gamma1",
            "first eigenvalue on the first invariant channel",
        )
        .column("mu2", "min(mu_bar_2, mu_gamma1)");
    println!(
        "{:>16}  {:>8}  {:>12}  {:>12}  {:>12}  {:>12}",
        "rho", "fraction", "mu_bar_1", "mu_bar_2", "mu_gamma1", "mu2"
    );
    for r in &reports {
        println!(
            "{:>16.10e}  {:>8.5}  {:>12.6}  {:>12.6}  {:>12.6}  {:>12.6}",
            r.rho,
            r.rho / limit,
            r.mu_bar_1,
            r.mu_bar_2,
            r.mu_mode1,
            r.mu2_g
        );
        t.rows.push(vec![
            r.rho,
            r.rho / limit,
            r.mu_bar_1,
            r.mu_bar_2,
            r.mu_mode1,
            r.mu2_g,
        ]);
    }
    announce(&t.write(&out_file(
        cfg,
        &format!("spectrum_{}.csv", group_slug(&group)),
    ))?);
    Ok(())
}

pub fn rho0(cfg: &RunConfig) -> Result<()> {
    let group = cfg.group()?;
    let n = cfg.dimension()?;
    let limit = lambda_bar_2_inv(n)?;
    let c = find_rho0(
        &solver(cfg),
        &group,
        cfg.bracket_tol(n)?,
        &cfg.spectral_tolerances(),
    )?;
    println!("group: {group}");
    println!("rho0: {:?}", c.value);
    println!("rho0 / lambda2^-1: {:.8}", c.value / limit);
    println!(
        "bracket: [{:?}, {:?}] width {:e}",
        c.bracket.0,
        c.bracket.1,
        c.width()
    );
    println!(
        "mu2 at bracket: {:e}, {:e}",
        c.values_at_bracket.0, c.values_at_bracket.1
    );
    let mut t = Table::new("mu2 sweep")
        .field("dimension", n)
        .field("group", group)
        .field("rho0", format!("{:?}", c.value))
        .field("bracket", format!("{:?} {:?}", c.bracket.0, c.bracket.1))
        .column("rho", "parameter")
        .column(
            "mu2",
            "second eigenvalue of the symmetric Dirichlet linearization",
        );
    t.rows = c.samples.iter().map(|&(r, v)| vec![r, v]).collect();
    announce(&t.write(&out_file(cfg, &format!("rho0_{}.csv", group_slug(&group))))?);
    Ok(())
}

pub fn bifurcate(cfg: &RunConfig) -> Result<()> {
    let group = cfg.group()?;
    let n = cfg.dimension()?;
    let settings = BifurcationSettings {
        bracket_tol: cfg.bracket_tol(n)?,
        sweep: cfg
            .points
            .unwrap_or(radbif_core::dtn_bifurcation::RHO_STAR_LADDER),
        spectral: cfg.spectral_tolerances(),
        ..BifurcationSettings::for_dimension(n)?
    };
    if settings.sweep < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let report = bifurcation_report(&solver(cfg), &group, &settings)?;
    let slug = group_slug(&group);
    let limit = report.lambda_bar_2_inv;

    let mut text = String::new();
    let mut line = |k: &str, v: String| {
        let _ = writeln!(text, "{k}: {v}");
    };
    line("report", "radbif bifurcation report".into());
    line("version", VERSION_TAG.into());
    line("dimension", n.to_string());
    line("group", group.to_string());
    line(
        "status",
        match &report.status {
            ReportStatus::Complete => "complete".into(),
            ReportStatus::Incomplete { stage, error } => format!("incomplete at {stage}: {error}"),
        },
    );
    line("lambda_bar_2_inv", format!("{limit:?}"));
    line("bracket_tol", format!("{:?}", settings.bracket_tol));
    line("ode_tol", format!("{:?}", cfg.radial_tolerances().ode));
    line("spectral_ode_tol", format!("{:?}", settings.spectral.ode));
    line("eig_tol", format!("{:?}", settings.spectral.eig));
    line("sweep_points", settings.sweep.to_string());
    line(
        "channels",
        report
            .channels
            .iter()
            .map(|c| format!("i={} gamma={} m={}", c.degree, c.gamma, c.multiplicity))
            .collect::<Vec<_>>()
            .join("; "),
    );
    for (name, c) in [("rho0", &report.rho0), ("rho_star", &report.rho_star)] {
        match c {
            Some(c) => {
                line(name, format!("{:?}", c.value));
                line(
                    &format!("{name}_fraction"),
                    format!("{:.10}", c.value / limit),
                );
                line(
                    &format!("{name}_bracket"),
                    format!("{:?} {:?}", c.bracket.0, c.bracket.1),
                );
                line(
                    &format!("{name}_values_at_bracket"),
                    format!("{:e} {:e}", c.values_at_bracket.0, c.values_at_bracket.1),
                );
                line(&format!("{name}_sign_changes"), c.sign_changes.to_string());
                if !c.failed.is_empty() {
                    line(&format!("{name}_failed_samples"), format!("{:?}", c.failed));
                }
            }
            None => line(name, "unavailable".into()),
        }
    }
    if let (Some(a), Some(b)) = (&report.rho0, &report.rho_star) {
        if b.bracket.0 - a.bracket.1 <= settings.bracket_tol {
            line(
                "warning",
                "rho0 and rho_star brackets are within tolerance of each other".into(),
            );
        }
    }
    line(
        "kernel_multiplicity",
        report.kernel_multiplicity.to_string(),
    );
    let opt = |v: Option<u32>| v.map_or("unavailable".into(), |x| x.to_string());
    line("index_below", opt(report.index_below));
    line("index_above", opt(report.index_above));
    line(
        "c_rho_at_star",
        report
            .c_rho_at_star
            .map_or("unavailable".into(), |c| format!("{c:?}")),
    );

    let report_path = out_file(cfg, &format!("bifurcation_{slug}.txt"));
    write_text(&report_path, &text)?;
    print!("{text}");
    announce(&report_path);

    let mut t = Table::new("first eigenvalue of the Dirichlet-to-Neumann linearization")
        .field("dimension", n)
        .field("group", group)
        .field("lambda_bar_2_inv", format!("{limit:?}"))
        .column("rho", "parameter")
        .column("rho_fraction", "rho times lambda2")
        .column("tau1", "smallest tau over the tested channels");
    for c in &report.channels {
        t = t.column(
            format!("tau_i{}", c.degree),
            format!("tau on the channel gamma = {}", c.gamma),
        );
    }
    t.rows = report
        .samples
        .iter()
        .map(|s| {
            [s.rho, s.rho / limit, s.tau1]
                .into_iter()
                .chain(s.channels.iter().map(|c| c.tau))
                .collect()
        })
        .collect();
    announce(&t.write(&out_file(cfg, &format!("tau_curve_{slug}.csv")))?);

    let curve: Vec<(f64, f64)> = report
        .samples
        .iter()
        .map(|s| (s.rho / limit, s.tau1))
        .collect();
    let clipped: Vec<(f64, f64)> = curve.iter().map(|&(x, y)| (x, y.max(-20.0))).collect();
    let svg = line_chart(
        &format!("tau1 for {group}"),
        "rho times lambda2",
        "tau1 (clipped below at -20)",
        &[Series {
            label: "tau1".into(),
            points: clipped,
        }],
    );
    announce(&write_text(
        &out_file(cfg, &format!("tau_curve_{slug}.svg")),
        &svg,
    )?);

    if let ReportStatus::Incomplete { stage, error } = &report.status {
        return Err(CliError::Incomplete {
            path: report_path.display().to_string(),
            reason: format!("{stage}: {error}"),
        });
    }
    Ok(())
}
