//! Nodal radial solutions of `-ρΔu = u - (u⁺)³` on the unit ball, their
//! linearized spectrum restricted to symmetry-invariant channels, and the
//! symmetry-breaking bifurcation detected through a Dirichlet-to-Neumann
//! operator.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dirichlet_spectrum;
pub mod dtn_bifurcation;
pub mod error;
pub mod ode;
pub mod quadrature;
pub mod radial_solver;
pub mod roots;
pub mod special_functions;
pub mod symmetry_groups;
pub mod tridiag;

pub use dirichlet_spectrum::{
    find_rho0, mode_eigenvalues, morse_check, mu2_g, CriticalValue, ModeOperator, Potential,
    RadialFunction, SpectralTolerances, SpectrumReport,
};
pub use dtn_bifurcation::{
    bifurcation_report, find_rho_star, steklov_value, tau1, BifurcationReport, BifurcationSettings,
    ReportStatus, SteklovChannel, Tau1,
};
pub use error::{Error, Result};
pub use radial_solver::{
    lambda_bar, lambda_bar_2_inv, solve_radial, DirectSolver, ProblemParams, RadialSolution,
    RadialSource, Tolerances,
};
pub use special_functions::{BesselOrder, ZeroTable};
pub use symmetry_groups::{check_condition_g, gamma, ConditionGReport, ModeSpec, SymmetryGroup};
