//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use radbif_core::{solve_radial, ProblemParams, RadialSolution, Tolerances};

/// Radial solution at `fraction` of `λ̄₂⁻¹`.
pub fn solution(dimension: u32, fraction: f64) -> Arc<RadialSolution> {
    let params = ProblemParams::from_fraction(dimension, fraction).expect("admissible fraction");
    Arc::new(solve_radial(&params, &Tolerances::default()).expect("radial solve"))
}
