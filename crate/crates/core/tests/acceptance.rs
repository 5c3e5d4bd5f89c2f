//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use radbif_core::dirichlet_spectrum::{
    bump, limit_form_value, negative_bump_witness, oracle_eigenvalues, shooting_eigenvalues,
};
use radbif_core::radial_solver::{
    energy, limit_profile, max_energy_increment, outer_linear_residual, recentered_profile,
};
use radbif_core::special_functions::{derivative_zero_table, reference_zero_table};
use radbif_core::symmetry_groups::hyper_icosahedron_multiplicity;
use radbif_core::*;

const GOLDEN: &str = include_str!("golden/critical_values.txt");

struct Outcome {
    id: u32,
    title: &'static str,
    passed: bool,
    detail: String,
}

fn criterion<F>(id: u32, title: &'static str, budget: Duration, run: F) -> Outcome
where
    F: FnOnce(&mut Vec<(String, bool)>),
{
    let mut checks = Vec::new();
    let start = Instant::now();
    run(&mut checks);
    let elapsed = start.elapsed();
    checks.push((
        format!(
            "runtime {:.3}s < {}s",
            elapsed.as_secs_f64(),
            budget.as_secs_f64()
        ),
        elapsed < budget,
    ));
    let mut detail = String::new();
    for (what, ok) in &checks {
        let _ = write!(
            detail,
            "\n    [{}] {what}",
            if *ok { "ok" } else { "FAILED" }
        );
    }
    Outcome {
        id,
        title,
        passed: checks.iter().all(|c| c.1),
        detail,
    }
}

fn sweep_fractions() -> Vec<f64> {
    (0..10).map(|k| 0.05 + 0.94 * k as f64 / 9.0).collect()
}

fn solve(n: u32, fraction: f64) -> Arc<RadialSolution> {
    let p = ProblemParams::from_fraction(n, fraction).expect("admissible fraction");
    Arc::new(solve_radial(&p, &Tolerances::default()).expect("radial solve"))
}

fn zero_tables(checks: &mut Vec<(String, bool)>) {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in [2, 3, 4] {
        let golden = reference_zero_table(n).unwrap();
        let table = derivative_zero_table(n, golden.rows.len() as u32).unwrap();
        worst = worst.max((table.r2 - golden.r2).abs());
        for (row, gold) in table.rows.iter().zip(&golden.rows) {
            worst = worst.max((row.1 - gold.1).abs());
            count += 1;
        }
    }
    checks.push((
        format!("r2 and {count} tabulated zeros, max |diff| = {worst:.2e} <= 1e-4"),
        count == 16 && worst <= 1e-4,
    ));
    let r2 = derivative_zero_table(3, 1).unwrap().r2;
    checks.push((
        format!("r2(N=3) - 2pi = {:.2e}", r2 - 2.0 * PI),
        (r2 - 2.0 * PI).abs() <= 1e-10,
    ));
}

fn multiplicities(checks: &mut Vec<(String, bool)>) {
    let m: Vec<u32> = (1..=12)
        .map(|i| hyper_icosahedron_multiplicity(i).unwrap())
        .collect();
    checks.push((
        format!("m(1..=12) = {m:?}"),
        m[..11].iter().all(|&x| x == 0) && m[11] == 1,
    ));
}

fn condition_g(checks: &mut Vec<(String, bool)>) {
    let cases = [
        ("dihedral:5", true),
        ("dihedral:6", true),
        ("dihedral:9", true),
        ("icosahedral", true),
        ("hyper-icosahedral", true),
        ("dihedral:4", false),
    ];
    for (spec, expected) in cases {
        let group: SymmetryGroup = spec.parse().unwrap();
        let r = check_condition_g(&group).unwrap();
        checks.push((
            format!(
                "{spec}: s1 = {:.5}, r2 = {:.5}, passes = {}",
                r.s1, r.r2, r.passes
            ),
            r.passes == expected,
        ));
    }
}

fn radial_family(checks: &mut Vec<(String, bool)>) {
    let fractions = sweep_fractions();
    for n in [2, 3] {
        let rows: Vec<_> = fractions
            .par_iter()
            .map(|&f| {
                let sol = solve(n, f);
                let v = sol.values();
                let zeros = v[..v.len() - 1]
                    .windows(2)
                    .filter(|w| (w[0] > 0.0) != (w[1] > 0.0))
                    .count();
                let h = energy(&sol);
                (
                    f,
                    zeros,
                    sol.c_rho(),
                    sol.sup_abs(),
                    max_energy_increment(&h) / h[0],
                    outer_linear_residual(&sol),
                )
            })
            .collect();
        let one_zero = rows.iter().all(|r| r.1 == 1);
        let c_pos = rows.iter().all(|r| r.2 > 0.0);
        let sup = rows.iter().fold(0.0f64, |m, r| m.max(r.3));
        let inc = rows.iter().fold(f64::NEG_INFINITY, |m, r| m.max(r.4));
        let lin = rows.iter().fold(0.0f64, |m, r| m.max(r.5));
        let c_min = rows.iter().fold(f64::INFINITY, |m, r| m.min(r.2));
        checks.push((
            format!("N={n}: exactly one interior zero at all 10 points"),
            one_zero,
        ));
        checks.push((format!("N={n}: min c_rho = {c_min:.4} > 0"), c_pos));
        checks.push((format!("N={n}: max sup|v| = {sup:.10} < 1"), sup < 1.0));
        checks.push((
            format!("N={n}: max energy increment / H(0) = {inc:.2e} <= 1e-8"),
            inc <= 1e-8,
        ));
        checks.push((
            format!("N={n}: max outer linear residual = {lin:.2e} <= 1e-6"),
            lin <= 1e-6,
        ));
    }
}

fn collapse_limit(checks: &mut Vec<(String, bool)>) {
    let sols: Vec<_> = [0.9, 0.95, 0.99].par_iter().map(|&f| solve(3, f)).collect();
    let sups: Vec<f64> = sols.iter().map(|s| s.sup_abs()).collect();
    checks.push((
        format!(
            "sup|u| at 0.9, 0.95, 0.99 = {:.5}, {:.5}, {:.5} strictly decreasing",
            sups[0], sups[1], sups[2]
        ),
        sups[0] > sups[1] && sups[1] > sups[2],
    ));
    let p = sols[2].p_rho();
    checks.push((
        format!("p_rho at 0.99 = {p:.5}, |p - 1/2| <= 0.05"),
        (p - 0.5).abs() <= 0.05,
    ));
}

fn interface_limit(checks: &mut Vec<(String, bool)>) {
    let radii = [10.0, 20.0, 30.0];
    let sols: Vec<_> = radii
        .par_iter()
        .map(|&r| {
            let p = ProblemParams::from_radius(3, r).unwrap();
            solve_radial(&p, &Tolerances::default()).unwrap()
        })
        .collect();
    let errors: Vec<f64> = sols
        .iter()
        .map(|sol| {
            (0..=8000)
                .map(|k| -5.0 + 8.0 * k as f64 / 8000.0)
                .map(|r| (recentered_profile(sol, r).unwrap() - limit_profile(r).unwrap()).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    checks.push((
        format!(
            "sup error at R = 10, 20, 30: {:.4}, {:.4}, {:.4} decreasing",
            errors[0], errors[1], errors[2]
        ),
        errors[0] > errors[1] && errors[1] > errors[2],
    ));
    checks.push((
        format!("sup error at R = 30: {:.4} <= 0.05", errors[2]),
        errors[2] <= 0.05,
    ));
    let gap = sols[2].radius() - sols[2].p_r();
    checks.push((
        format!("R - p_R at R = 30: {gap:.4}, |gap - pi| <= 0.3"),
        (gap - PI).abs() <= 0.3,
    ));
}

fn morse_index(checks: &mut Vec<(String, bool)>) {
    let tol = SpectralTolerances::default();
    for n in [2, 3] {
        let rows: Vec<_> = sweep_fractions()
            .par_iter()
            .map(|&f| {
                let op = ModeOperator::linearized(solve(n, f), 0.0).unwrap();
                let s = shooting_eigenvalues(&op, 3, &tol).unwrap();
                let o = oracle_eigenvalues(&op, 3);
                let rel = s
                    .iter()
                    .zip(&o)
                    .map(|(a, b)| (a - b).abs() / b.abs())
                    .fold(0.0, f64::max);
                (s[0], s[1], rel)
            })
            .collect();
        let signs = rows.iter().all(|r| r.0 < 0.0 && r.1 > 0.0);
        let min2 = rows.iter().fold(f64::INFINITY, |m, r| m.min(r.1));
        let max1 = rows.iter().fold(f64::NEG_INFINITY, |m, r| m.max(r.0));
        let rel = rows.iter().fold(0.0f64, |m, r| m.max(r.2));
        checks.push((
            format!("N={n}: max mu1 = {max1:.4} < 0 < {min2:.4} = min mu2"),
            signs,
        ));
        checks.push((
            format!("N={n}: shooting vs finite differences, max relative diff = {rel:.2e} <= 1e-4"),
            rel <= 1e-4,
        ));
    }
}

fn limit_form(checks: &mut Vec<(String, bool)>) {
    let sine = |r: f64| {
        if (0.0..=PI).contains(&r) {
            (r.sin(), r.cos())
        } else {
            (0.0, 0.0)
        }
    };
    let q = limit_form_value(sine, 20.0).unwrap();
    checks.push((format!("Q(sin) = {q:.2e}, |Q| <= 1e-8"), q.abs() <= 1e-8));
    let (c, w, q) = negative_bump_witness(20.0).unwrap();
    let again = limit_form_value(bump(c, w), 20.0).unwrap();
    checks.push((
        format!("bump at c = {c:.2}, w = {w:.2}: Q = {q:.4} < 0"),
        q < 0.0 && again == q,
    ));
}

fn golden(group: &str, what: &str) -> f64 {
    GOLDEN
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split_whitespace().collect::<Vec<_>>())
        .find(|f| f.len() == 3 && f[0] == group && f[1] == what)
        .map(|f| f[2].parse().unwrap())
        .unwrap_or(f64::NAN)
}

fn report(spec: &str) -> BifurcationReport {
    let group: SymmetryGroup = spec.parse().unwrap();
    let settings = BifurcationSettings::for_dimension(group.dimension()).unwrap();
    bifurcation_report(&DirectSolver::default(), &group, &settings).unwrap()
}

fn critical_values(checks: &mut Vec<(String, bool)>, reports: &[(&str, BifurcationReport)]) {
    for (spec, r) in reports {
        let limit = r.lambda_bar_2_inv;
        let (Some(rho0), Some(star)) = (&r.rho0, &r.rho_star) else {
            checks.push((format!("{spec}: report incomplete: {:?}", r.status), false));
            continue;
        };
        let tol = 1e-6 * limit;
        checks.push((
            format!(
                "{spec}: rho0 = {:.12} (width {:.1e}), rho* = {:.12} (width {:.1e}), limit {:.6}",
                rho0.value,
                rho0.width(),
                star.value,
                star.width(),
                limit
            ),
            rho0.width() <= tol && star.width() <= tol,
        ));
        checks.push((
            format!(
                "{spec}: 0 < rho0 < rho* < 1/lambda2 ({:.4} < {:.4} of the limit)",
                rho0.value / limit,
                star.value / limit
            ),
            0.0 < rho0.value && rho0.bracket.1 < star.bracket.0 && star.bracket.1 < limit,
        ));
        let curve = r.tau_curve();
        let ladder = curve
            .iter()
            .all(|&(rho, t)| (t < 0.0) == (rho < star.value));
        let crossings = curve
            .windows(2)
            .filter(|w| (w[0].1 < 0.0) != (w[1].1 < 0.0))
            .count();
        checks.push((
            format!(
                "{spec}: tau1 ladder over {} points, {crossings} crossing, signs follow rho*",
                curve.len()
            ),
            curve.len() == 24 && ladder && crossings == 1 && star.sign_changes == 1,
        ));
        let (g0, gs) = (golden(spec, "rho0"), golden(spec, "rho_star"));
        checks.push((
            format!(
                "{spec}: golden regression, rho0 diff {:.1e}, rho* diff {:.1e} <= {:.1e}",
                rho0.value - g0,
                star.value - gs,
                2.0 * tol
            ),
            (rho0.value - g0).abs() <= 2.0 * tol && (star.value - gs).abs() <= 2.0 * tol,
        ));
    }
}

fn duality(checks: &mut Vec<(String, bool)>, reports: &[(&str, BifurcationReport)]) {
    for (spec, r) in reports {
        let residuals: Vec<f64> = r
            .samples
            .iter()
            .flat_map(|t| t.channels.iter().map(|c| c.duality_residual))
            .collect();
        let worst = residuals.iter().fold(0.0f64, |m, &x| m.max(x));
        checks.push((
            format!(
                "{spec}: {} channels, max |Q - rho tau f(1)^2| / |rho tau| = {worst:.2e} <= 1e-5",
                residuals.len()
            ),
            !residuals.is_empty() && worst <= 1e-5,
        ));
    }
}

fn monotonicity(checks: &mut Vec<(String, bool)>, reports: &[(&str, BifurcationReport)]) {
    for (spec, r) in reports {
        let picked: Vec<&Tau1> = r.samples.iter().step_by(5).take(5).collect();
        let ok = picked.len() == 5
            && picked.iter().all(|t| {
                t.channels.len() == 4 && t.channels.windows(2).all(|w| w[1].tau > w[0].tau)
            });
        let gammas: Vec<f64> = r.channels.iter().map(|c| c.gamma).collect();
        checks.push((
            format!("{spec}: tau strictly increasing over gamma = {gammas:?} at 5 sweep points"),
            ok,
        ));
    }
}

fn parity(checks: &mut Vec<(String, bool)>, reports: &[(&str, BifurcationReport)]) {
    for (spec, r) in reports {
        let jump = r.index_jump();
        checks.push((
            format!(
                "{spec}: index {:?} -> {:?} across rho* = {:.12}, kernel multiplicity {}",
                r.index_below,
                r.index_above,
                r.rho_star.as_ref().map_or(f64::NAN, |c| c.value),
                r.kernel_multiplicity
            ),
            jump == Some(1) && r.kernel_multiplicity == 1,
        ));
    }
}

fn main() {
    let mut outcomes = vec![
        criterion(
            1,
            "zero table reproduction",
            Duration::from_secs(1),
            zero_tables,
        ),
        criterion(
            2,
            "multiplicity formula",
            Duration::from_millis(1),
            multiplicities,
        ),
        criterion(
            3,
            "condition (G) verdicts",
            Duration::from_secs(1),
            condition_g,
        ),
        criterion(
            4,
            "radial family properties",
            Duration::from_secs(30),
            radial_family,
        ),
        criterion(5, "collapse limit", Duration::from_secs(10), collapse_limit),
        criterion(
            6,
            "interface limit",
            Duration::from_secs(10),
            interface_limit,
        ),
        criterion(7, "Morse index", Duration::from_secs(60), morse_index),
        criterion(8, "limit form", Duration::from_secs(1), limit_form),
    ];

    let mut reports = Vec::new();
    outcomes.push(criterion(
        9,
        "critical values",
        Duration::from_secs(300),
        |checks| {
            reports = ["icosahedral", "dihedral:5"].map(|g| (g, report(g))).into();
            critical_values(checks, &reports);
        },
    ));
    reports.push(("hyper-icosahedral", report("hyper-icosahedral")));
    outcomes.push(criterion(
        10,
        "duality identity",
        Duration::from_secs(1),
        |c| duality(c, &reports[..2]),
    ));
    outcomes.push(criterion(
        11,
        "channel monotonicity",
        Duration::from_secs(1),
        |c| monotonicity(c, &reports),
    ));
    outcomes.push(criterion(
        12,
        "parity change",
        Duration::from_secs(1),
        |c| parity(c, &reports),
    ));

    let mut failed = 0;
    for o in &outcomes {
        println!(
            "{} criterion {:>2}: {}{}",
            if o.passed { "PASS" } else { "FAIL" },
            o.id,
            o.title,
            o.detail
        );
        failed += usize::from(!o.passed);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        outcomes.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
