use std::sync::{Arc, OnceLock};

use proptest::prelude::*;

use radbif_core::dirichlet_spectrum::{dirichlet_form, eigenfunction, shooting_eigenvalues};
use radbif_core::dtn_bifurcation::quadratic_form_qk;
use radbif_core::radial_solver::ode_residual;
use radbif_core::special_functions::{bessel_j, first_profile_derivative_zero, helmholtz_profile};
use radbif_core::symmetry_groups::hyper_icosahedron_multiplicity;
use radbif_core::*;

fn solution(n: u32, fraction: f64) -> Arc<RadialSolution> {
    let p = ProblemParams::from_fraction(n, fraction).unwrap();
    Arc::new(solve_radial(&p, &Tolerances::default()).unwrap())
}

/// `ρ*` for the icosahedral group, located once.
fn icosahedral_rho_star() -> f64 {
    static CELL: OnceLock<f64> = OnceLock::new();
    *CELL.get_or_init(|| {
        let group = SymmetryGroup::IcosahedralFull;
        let tol = SpectralTolerances::default();
        let limit = lambda_bar_2_inv(3).unwrap();
        let rho0 = find_rho0(&DirectSolver::default(), &group, 1e-5 * limit, &tol).unwrap();
        find_rho_star(
            &DirectSolver::default(),
            &group,
            rho0.bracket.1,
            1e-5 * limit,
            &tol,
        )
        .unwrap()
        .bracket
        .1
    })
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn bessel_three_term_recurrence(twice in 2u32..24, x in 0.1f64..40.0) {
        let a = BesselOrder::from_twice(twice);
        let lower = bessel_j(BesselOrder::from_twice(twice - 2), x).unwrap();
        let upper = bessel_j(BesselOrder::from_twice(twice + 2), x).unwrap();
        let mid = bessel_j(a, x).unwrap();
        prop_assert!((lower + upper - 2.0 * a.alpha() / x * mid).abs() <= 1e-10);
    }

    #[test]
    fn helmholtz_profile_solves_its_equation(n in 2u32..5, i in 0u32..8, x in 0.25f64..30.0) {
        let h = 1e-2;
        let at = |k: f64| helmholtz_profile(n, i, x + k * h).unwrap().0;
        let (f, df) = helmholtz_profile(n, i, x).unwrap();
        let d2 = (-at(2.0) + 16.0 * at(1.0) - 30.0 * f + 16.0 * at(-1.0) - at(-2.0)) / (12.0 * h * h);
        let gamma = gamma(i, n);
        let residual = d2 + (n as f64 - 1.0) / x * df + (1.0 - gamma / (x * x)) * f;
        prop_assert!(residual.abs() <= 1e-8, "residual {residual}");
    }

    #[test]
    fn gamma_increases_with_degree(n in 2u32..8, i in 0u32..200) {
        prop_assert!(gamma(i + 1, n) > gamma(i, n));
    }
}

#[test]
fn derivative_zeros_interlace() {
    for n in [2, 3, 4] {
        let z: Vec<f64> = (1..=8)
            .map(|i| first_profile_derivative_zero(n, i).unwrap())
            .collect();
        assert!(z.windows(2).all(|w| w[1] > w[0]), "N={n}: {z:?}");
    }
}

#[test]
fn multiplicities_are_integers() {
    assert_eq!(hyper_icosahedron_multiplicity(0).unwrap(), 1);
    for i in 0..=60 {
        hyper_icosahedron_multiplicity(i).unwrap();
    }
}

#[test]
fn condition_g_catalog() {
    let groups = [
        (SymmetryGroup::Dihedral(2), false),
        (SymmetryGroup::Dihedral(3), false),
        (SymmetryGroup::Dihedral(4), false),
        (SymmetryGroup::Dihedral(5), true),
        (SymmetryGroup::Dihedral(8), true),
        (SymmetryGroup::IcosahedralFull, true),
        (SymmetryGroup::HyperIcosahedralRotations, true),
    ];
    for (g, expected) in groups {
        assert_eq!(check_condition_g(&g).unwrap().passes, expected, "{g}");
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn shooting_scan_has_one_transition(n in 2u32..4, fraction in 0.05f64..0.99) {
        let p = ProblemParams::from_fraction(n, fraction).unwrap();
        let scan = radial_solver::shooting_scan(&p, &Tolerances::default()).unwrap();
        let flips = scan.windows(2).filter(|w| w[0].hits() != w[1].hits()).count();
        prop_assert_eq!(flips, 1);
        let sol = solve_radial(&p, &Tolerances::default()).unwrap();
        let k = scan.windows(2).position(|w| w[0].hits() != w[1].hits()).unwrap();
        let (a, b) = (scan[k].theta.min(scan[k + 1].theta), scan[k].theta.max(scan[k + 1].theta));
        prop_assert!(sol.theta() >= a && sol.theta() <= b);
    }

    #[test]
    fn radial_solution_residuals(n in 2u32..5, fraction in 0.05f64..0.99) {
        let sol = solution(n, fraction);
        prop_assert!(ode_residual(&sol) <= 1e-8);
        prop_assert!(radial_solver::outer_linear_residual(&sol) <= 1e-6);
        prop_assert!(sol.c_rho() > 0.0);
        let r = 0.37;
        let (u, _) = sol.u_at(r).unwrap();
        let (v, _) = sol.value_at(sol.radius() * r).unwrap();
        prop_assert_eq!(u, v);
        let (_, dv) = sol.value_at(sol.radius()).unwrap();
        prop_assert!((sol.c_rho() - sol.radius() * dv).abs() <= 1e-12 * sol.c_rho().abs().max(1.0));
    }

    #[test]
    fn nonnegative_potential_raises_eigenvalues(n in 2u32..4, fraction in 0.05f64..0.99) {
        let tol = SpectralTolerances::default();
        let op = ModeOperator::linearized(solution(n, fraction), 0.0).unwrap();
        let with = shooting_eigenvalues(&op, 3, &tol).unwrap();
        let without = shooting_eigenvalues(&op.without_potential(), 3, &tol).unwrap();
        for (a, b) in with.iter().zip(&without) {
            prop_assert!(a >= b);
        }
    }

    #[test]
    fn eigenvalues_increase_with_gamma(fraction in 0.05f64..0.99, i in 0u32..6) {
        let tol = SpectralTolerances::default();
        let sol = solution(3, fraction);
        let low = ModeOperator::linearized(sol.clone(), gamma(i, 3)).unwrap();
        let high = ModeOperator::linearized(sol, gamma(i + 1, 3)).unwrap();
        let a = shooting_eigenvalues(&low, 3, &tol).unwrap();
        let b = shooting_eigenvalues(&high, 3, &tol).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!(y > x);
        }
    }

    #[test]
    fn rayleigh_quotient_matches_eigenvalue(n in 2u32..4, fraction in 0.05f64..0.99, i in 0u32..3) {
        let tol = SpectralTolerances::default();
        let op = ModeOperator::linearized(solution(n, fraction), gamma(i, n)).unwrap();
        for mu in shooting_eigenvalues(&op, 3, &tol).unwrap() {
            let f = eigenfunction(&op, mu, &tol).unwrap();
            let q = dirichlet_form(&op, &f);
            prop_assert!((q - mu).abs() <= 1e-6, "form {q} vs eigenvalue {mu}");
        }
    }

    #[test]
    fn duality_identity_holds(fraction in 0.35f64..0.99, k in 0usize..4) {
        let group = SymmetryGroup::IcosahedralFull;
        let channels = group.invariant_channels(4).unwrap();
        let sol = solution(3, fraction);
        let c = steklov_value(sol.clone(), channels[k].gamma, &SpectralTolerances::default()).unwrap();
        let q = quadratic_form_qk(&c.f, &sol, c.gamma).unwrap();
        prop_assert!((q - c.rho * c.tau).abs() <= 1e-5 * (c.rho * c.tau).abs());
    }

    #[test]
    fn tau1_never_uses_the_radial_channel(fraction in 0.35f64..0.99) {
        let t = tau1(solution(3, fraction), &SymmetryGroup::IcosahedralFull, 4, &SpectralTolerances::default()).unwrap();
        prop_assert!(t.channels.iter().all(|c| c.mode.gamma > 0.0 && c.mode.degree > 0));
    }
}

/// Smooth test function on `[0, 1]` behaving like `r^i` at the origin.
fn test_function(degree: u32, coeffs: &[f64]) -> RadialFunction {
    RadialFunction::from_fn(
        |r| {
            let (mut p, mut dp) = (0.0, 0.0);
            for (k, c) in coeffs.iter().enumerate() {
                p += c * r.powi(k as i32);
                if k > 0 {
                    dp += c * k as f64 * r.powi(k as i32 - 1);
                }
            }
            let ri = r.powi(degree as i32);
            let dri = if degree == 0 {
                0.0
            } else {
                degree as f64 * r.powi(degree as i32 - 1)
            };
            (ri * p, dri * p + ri * dp)
        },
        512,
        &[],
    )
}

proptest! {
    #![proptest_config(config(50))]

    #[test]
    fn form_is_nonnegative_above_rho_star(
        t in 0.05f64..0.95,
        k in 0usize..3,
        coeffs in prop::collection::vec(-3.0f64..3.0, 1..5),
    ) {
        let limit = lambda_bar_2_inv(3).unwrap();
        let star = icosahedral_rho_star();
        let margin = 1e-3 * limit;
        let rho = star + margin + t * (limit - star - 2.0 * margin);
        let sol = Arc::new(solve_radial(&ProblemParams::new(3, rho).unwrap(), &Tolerances::default()).unwrap());
        let mode = SymmetryGroup::IcosahedralFull.invariant_channels(3).unwrap()[k];
        let f = test_function(mode.degree, &coeffs);
        let q = quadratic_form_qk(&f, &sol, mode.gamma).unwrap();
        prop_assert!(q >= 0.0, "Q = {q} at rho = {rho}");
    }
}
