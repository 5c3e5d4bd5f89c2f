//! Sign-changing radial solutions of `-ρΔu = u - (u⁺)³` on the unit ball.
//!
//! Work happens in the rescaled variable `s = R r`, `R = ρ^{-1/2}`, where
//! `v(s) = u(s/R)` solves `-v'' - (N-1)v'/s = v - (v⁺)³` on `[0, R]`.
//! The profile is found by shooting from the centre: the trajectory starting
//! at `v(0) = a` must have its second zero at `s = R`.
//!
//! For large `R` the centre value is extremely close to 1 (`1 - a ≈ 1e-23` at
//! `R = 40`), so the integration is carried out for `w = 1 - v` and the
//! shooting parameter is the logit `θ = ln((1 - a)/a)`.

use std::sync::{Arc, OnceLock};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ode::{Control, Dopri5};
use crate::roots::find_zero;
use crate::special_functions::{check_dimension, radial_dirichlet_eigenvalue};

/// Number of uniform storage intervals on `[0, R]`.
pub const STORAGE_INTERVALS: usize = 2048;
/// Number of shooting parameters sampled before refinement.
pub const SCAN_POINTS: usize = 200;
/// Smallest centre value `a` included in the shooting scan.
pub const MIN_CENTER_VALUE: f64 = 1e-8;

const SERIES_START: f64 = 1e-6;
const SCAN_H_MAX: f64 = 0.25;

/// `(λ̄₁, λ̄₂)` for dimension `N`, cached.
pub fn lambda_bar(dimension: u32) -> Result<(f64, f64)> {
    static CACHE: [OnceLock<(f64, f64)>; 17] = [const { OnceLock::new() }; 17];
    check_dimension(dimension)?;
    let compute = || -> Result<(f64, f64)> {
        Ok((
            radial_dirichlet_eigenvalue(dimension, 1)?,
            radial_dirichlet_eigenvalue(dimension, 2)?,
        ))
    };
    match CACHE.get(dimension as usize) {
        Some(cell) => {
            if let Some(v) = cell.get() {
                return Ok(*v);
            }
            let v = compute()?;
            Ok(*cell.get_or_init(|| v))
        }
        None => compute(),
    }
}

/// Right end `λ̄₂⁻¹` of the admissible parameter interval.
pub fn lambda_bar_2_inv(dimension: u32) -> Result<f64> {
    Ok(1.0 / lambda_bar(dimension)?.1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemParams {
    dimension: u32,
    rho: f64,
    radius: f64,
}

impl ProblemParams {
    /// Validates `0 < ρ < λ̄₂⁻¹`.
    pub fn new(dimension: u32, rho: f64) -> Result<Self> {
        check_dimension(dimension)?;
        let limit = lambda_bar_2_inv(dimension)?;
        if !(rho > 0.0 && rho < limit) {
            return Err(Error::NoSolution { rho, limit });
        }
        Ok(Self {
            dimension,
            rho,
            radius: rho.sqrt().recip(),
        })
    }

    pub fn from_radius(dimension: u32, radius: f64) -> Result<Self> {
        Self::new(dimension, radius.powi(-2))
    }

    /// `ρ = fraction · λ̄₂⁻¹`.
    pub fn from_fraction(dimension: u32, fraction: f64) -> Result<Self> {
        Self::new(dimension, fraction * lambda_bar_2_inv(dimension)?)
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative tolerance of the shooting integrations.
    pub ode: f64,
    /// Required `|v(R)|` of the accepted trajectory.
    pub boundary: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            ode: 1e-10,
            boundary: 1e-10,
        }
    }
}

impl Tolerances {
    /// Tolerance of the final integration that fills the storage grid.
    fn storage(&self) -> f64 {
        (self.ode * 1e-2).clamp(1e-13, 1e-8)
    }
}

/// One member of the radial family, sampled on `[0, R]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSolution {
    params: ProblemParams,
    center_deficit: f64,
    grid: Vec<f64>,
    v: Vec<f64>,
    dv: Vec<f64>,
    d2v: Vec<f64>,
    p_index: usize,
}

impl RadialSolution {
    /// Rebuild a solution from stored samples; second derivatives are
    /// recomputed from the equation and all invariants are checked.
    pub fn from_raw_parts(
        params: ProblemParams,
        center_deficit: f64,
        grid: Vec<f64>,
        v: Vec<f64>,
        dv: Vec<f64>,
        p_index: usize,
    ) -> Result<Self> {
        let n = grid.len();
        if v.len() != n || dv.len() != n || n < 8 || p_index == 0 || p_index + 1 >= n {
            return Err(Error::Precondition(
                "inconsistent radial sample arrays".into(),
            ));
        }
        if grid[0] != 0.0 || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Precondition(
                "grid must start at 0 and increase".into(),
            ));
        }
        let nm1 = params.dimension as f64 - 1.0;
        let a = 1.0 - center_deficit;
        let d2v = grid
            .iter()
            .zip(v.iter().zip(&dv))
            .map(|(&s, (&y, &dy))| {
                if s == 0.0 {
                    -a * center_deficit * (2.0 - center_deficit) / params.dimension as f64
                } else {
                    -nm1 * dy / s - y + y.max(0.0).powi(3)
                }
            })
            .collect();
        let sol = Self {
            params,
            center_deficit,
            grid,
            v,
            dv,
            d2v,
            p_index,
        };
        sol.validate(f64::INFINITY)?;
        Ok(sol)
    }

    pub fn params(&self) -> &ProblemParams {
        &self.params
    }

    pub fn dimension(&self) -> u32 {
        self.params.dimension
    }

    pub fn rho(&self) -> f64 {
        self.params.rho
    }

    pub fn radius(&self) -> f64 {
        self.params.radius
    }

    /// Centre value `a = v(0)`. Rounds to 1 for large `R`; see
    /// [`center_deficit`](Self::center_deficit).
    pub fn center_value(&self) -> f64 {
        1.0 - self.center_deficit
    }

    /// `1 - a`, kept separately because it underflows the spacing of f64 near 1.
    pub fn center_deficit(&self) -> f64 {
        self.center_deficit
    }

    /// Shooting parameter `ln((1 - a)/a)`.
    pub fn theta(&self) -> f64 {
        (self.center_deficit / (1.0 - self.center_deficit)).ln()
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.v
    }

    pub fn derivatives(&self) -> &[f64] {
        &self.dv
    }

    pub fn second_derivatives(&self) -> &[f64] {
        &self.d2v
    }

    /// Index of the interior zero in [`grid`](Self::grid).
    pub fn p_index(&self) -> usize {
        self.p_index
    }

    /// Interior zero in rescaled coordinates.
    pub fn p_r(&self) -> f64 {
        self.grid[self.p_index]
    }

    /// Interior zero on the unit ball, `p_R / R`.
    pub fn p_rho(&self) -> f64 {
        self.p_r() / self.radius()
    }

    /// `u'(1) = R v'(R)`.
    pub fn c_rho(&self) -> f64 {
        self.radius() * self.dv[self.dv.len() - 1]
    }

    pub fn sup_abs(&self) -> f64 {
        self.v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// `(v, v')` at `s ∈ [0, R]` by quintic Hermite interpolation.
    pub fn value_at(&self, s: f64) -> Result<(f64, f64)> {
        let r = self.radius();
        if !(s >= 0.0 && s <= r * (1.0 + 1e-14)) {
            return Err(Error::Domain {
                what: "rescaled radius outside [0, R]",
                value: s,
            });
        }
        let s = s.min(r);
        let j = self
            .grid
            .partition_point(|&x| x <= s)
            .clamp(1, self.grid.len() - 1)
            - 1;
        Ok(hermite5(
            self.grid[j],
            self.grid[j + 1],
            [self.v[j], self.dv[j], self.d2v[j]],
            [self.v[j + 1], self.dv[j + 1], self.d2v[j + 1]],
            s,
        ))
    }

    /// `(u, u')` at unit-ball radius `r ∈ [0, 1]`.
    pub fn u_at(&self, r: f64) -> Result<(f64, f64)> {
        let (v, dv) = self
            .value_at(r * self.radius())
            .map_err(|_| Error::Domain {
                what: "unit-ball radius outside [0, 1]",
                value: r,
            })?;
        Ok((v, self.radius() * dv))
    }

    /// `|v(R)|`.
    pub fn boundary_residual(&self) -> f64 {
        self.v[self.v.len() - 1].abs()
    }

    /// Check the structural invariants of the family.
    pub fn validate(&self, boundary_tol: f64) -> Result<()> {
        let fail = |msg: String| Err(Error::PropertyViolation(msg));
        let n = self.v.len();
        if !(self.center_deficit > 0.0 && self.center_deficit < 1.0) {
            return fail(format!(
                "centre deficit {} outside (0, 1)",
                self.center_deficit
            ));
        }
        if self.dv[0] != 0.0 {
            return fail("v'(0) must vanish".into());
        }
        if self.v[self.p_index] != 0.0 {
            return fail("interior zero node must carry v = 0".into());
        }
        if self.v[..self.p_index].iter().any(|&x| x <= 0.0) {
            return fail("v must be positive before the interior zero".into());
        }
        if self.v[self.p_index + 1..n - 1].iter().any(|&x| x >= 0.0) {
            return fail("v must be negative between the interior zero and R".into());
        }
        if self.boundary_residual() > boundary_tol {
            return fail(format!(
                "|v(R)| = {:e} exceeds {boundary_tol:e}",
                self.boundary_residual()
            ));
        }
        if !(self.c_rho() > 0.0) {
            return fail(format!("c_rho = {} is not positive", self.c_rho()));
        }
        if self.v.iter().any(|&x| x <= -1.0) {
            return fail("v reaches -1".into());
        }
        let (l1, _) = lambda_bar(self.dimension())?;
        if self.p_r() <= l1.sqrt() {
            return fail(format!("p_R = {} is below sqrt(lambda_1)", self.p_r()));
        }
        Ok(())
    }
}

/// Anything that can produce radial solutions, e.g. a cached solver.
pub trait RadialSource: Sync {
    fn solve(&self, params: &ProblemParams) -> Result<Arc<RadialSolution>>;
}

/// Solves from scratch every time.
#[derive(Debug, Clone, Copy, Default)]
pub struct DirectSolver {
    pub tol: Tolerances,
}

impl RadialSource for DirectSolver {
    fn solve(&self, params: &ProblemParams) -> Result<Arc<RadialSolution>> {
        solve_radial(params, &self.tol).map(Arc::new)
    }
}

/// One sample of the shooting map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub theta: f64,
    pub center_deficit: f64,
    /// Second zero of the trajectory, if it occurs in `(0, R]`.
    pub second_zero: Option<f64>,
}

impl ScanPoint {
    pub fn center_value(&self) -> f64 {
        1.0 - self.center_deficit
    }

    pub fn hits(&self) -> bool {
        self.second_zero.is_some()
    }
}

fn deficit_of(theta: f64) -> f64 {
    1.0 / (1.0 + (-theta).exp())
}

fn forcing(w: f64) -> f64 {
    if w < 1.0 {
        w * (1.0 - w) * (2.0 - w)
    } else {
        1.0 - w
    }
}

fn series_state(dimension: u32, eps: f64) -> [f64; 2] {
    let f = forcing(eps);
    let n = dimension as f64;
    [
        eps + f * SERIES_START * SERIES_START / (2.0 * n),
        f * SERIES_START / n,
    ]
}

fn w_rhs(dimension: u32) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] + Copy {
    let nm1 = dimension as f64 - 1.0;
    move |s, y| [y[1], -nm1 * y[1] / s + forcing(y[0])]
}

struct Shot {
    crossings: u8,
    second_zero: Option<f64>,
    v_end: f64,
}

impl Shot {
    /// Continuous through the target: negative before the second zero reaches
    /// `R`, positive after.
    fn target(&self) -> f64 {
        match self.crossings {
            0 => -1.0,
            1 | 2 => self.v_end,
            _ => 1.0,
        }
    }
}

fn shoot(dimension: u32, radius: f64, theta: f64, rtol: f64) -> Result<Shot> {
    let eps = deficit_of(theta);
    let solver = Dopri5::new(rtol, rtol * eps).with_h_max(SCAN_H_MAX);
    let mut crossings = 0u8;
    let mut second_zero = None;
    let out = solver.integrate_observed(
        w_rhs(dimension),
        SERIES_START,
        series_state(dimension, eps),
        radius,
        |step| {
            let g0 = step.y0[0] - 1.0;
            let g1 = step.y1[0] - 1.0;
            let crossed = if crossings.is_multiple_of(2) {
                g0 < 0.0 && g1 >= 0.0
            } else {
                g0 > 0.0 && g1 <= 0.0
            };
            if crossed {
                crossings += 1;
                if crossings == 2 {
                    second_zero = Some(step.t0 + (step.t1 - step.t0) * g0 / (g0 - g1));
                }
            }
            if crossings >= 3 || step.y1[0] < 0.0 {
                Control::Stop
            } else {
                Control::Continue
            }
        },
    )?;
    if out.stopped && crossings < 3 {
        return Err(Error::Integrator {
            t: out.t,
            reason: "trajectory exceeded v = 1",
        });
    }
    Ok(Shot {
        crossings,
        second_zero,
        v_end: 1.0 - out.y[0],
    })
}

fn scan_range(params: &ProblemParams) -> (f64, f64) {
    let theta_max = ((1.0 - MIN_CENTER_VALUE) / MIN_CENTER_VALUE).ln();
    let theta_min = -(std::f64::consts::SQRT_2 * params.radius + 30.0);
    (theta_min, theta_max)
}

/// Sample the shooting map at [`SCAN_POINTS`] logit-uniform centre values.
pub fn shooting_scan(params: &ProblemParams, tol: &Tolerances) -> Result<Vec<ScanPoint>> {
    let (theta_min, theta_max) = scan_range(params);
    (0..SCAN_POINTS)
        .into_par_iter()
        .map(|k| {
            let theta = theta_min + (theta_max - theta_min) * k as f64 / (SCAN_POINTS - 1) as f64;
            let shot = shoot(params.dimension, params.radius, theta, tol.ode)?;
            Ok(ScanPoint {
                theta,
                center_deficit: deficit_of(theta),
                second_zero: shot.second_zero,
            })
        })
        .collect()
}

/// Shoot for the unique sign-changing radial solution.
pub fn solve_radial(params: &ProblemParams, tol: &Tolerances) -> Result<RadialSolution> {
    let (n, radius) = (params.dimension, params.radius);
    let scan = shooting_scan(params, tol)?;
    let transitions: Vec<usize> = scan
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0].hits() != w[1].hits())
        .map(|(k, _)| k)
        .collect();
    let diagnostics = || {
        scan.iter()
            .map(|p| (p.theta, p.second_zero.unwrap_or(f64::INFINITY)))
            .collect::<Vec<_>>()
    };
    let k = match transitions.as_slice() {
        [k] if !scan[*k].hits() => *k,
        _ => {
            return Err(Error::ShootingFailure {
                radius,
                reason: format!(
                    "expected one crossing of the target radius, found {}",
                    transitions.len()
                ),
                scan: diagnostics(),
            })
        }
    };

    let rtol = tol.storage();
    let g = |theta: f64| {
        shoot(n, radius, theta, rtol)
            .map(|s| s.target())
            .unwrap_or(f64::NAN)
    };
    let theta = find_zero(g, (scan[k].theta, scan[k + 1].theta), 0.0).map_err(|e| {
        Error::ShootingFailure {
            radius,
            reason: format!("refinement failed: {e}"),
            scan: diagnostics(),
        }
    })?;

    let sol = trace(params, theta, rtol)?;
    if sol.boundary_residual() > tol.boundary {
        return Err(Error::ShootingFailure {
            radius,
            reason: format!(
                "boundary residual {:e} above tolerance",
                sol.boundary_residual()
            ),
            scan: diagnostics(),
        });
    }
    sol.validate(tol.boundary)?;
    Ok(sol)
}

/// Integrate node by node and insert the interior zero.
fn trace(params: &ProblemParams, theta: f64, rtol: f64) -> Result<RadialSolution> {
    let (n, radius) = (params.dimension, params.radius);
    let m = STORAGE_INTERVALS;
    let eps = deficit_of(theta);
    let rhs = w_rhs(n);
    let solver = Dopri5::new(rtol, rtol * eps).with_h_max(SCAN_H_MAX);
    let nodes: Vec<f64> = (0..=m).map(|j| radius * j as f64 / m as f64).collect();

    let mut states = Vec::with_capacity(m + 1);
    states.push([eps, 0.0]);
    let mut y = series_state(n, eps);
    let mut t = SERIES_START;
    let mut h = None;
    for &s in &nodes[1..] {
        let stepper = match h {
            Some(h) => solver.with_h_init(h),
            None => solver,
        };
        let out = stepper.integrate(rhs, t, y, s)?;
        h = Some(out.last_h);
        y = out.y;
        t = s;
        states.push(y);
    }

    let j = states
        .windows(2)
        .position(|w| w[0][0] < 1.0 && w[1][0] >= 1.0)
        .ok_or_else(|| {
            Error::PropertyViolation("accepted trajectory has no interior zero".into())
        })?;
    let (t0, y0) = if j == 0 {
        (SERIES_START, series_state(n, eps))
    } else {
        (nodes[j], states[j])
    };
    let seg = Dopri5::new(rtol, rtol * eps).with_h_max(SCAN_H_MAX);
    let p = find_zero(
        |x| {
            seg.integrate(rhs, t0, y0, x)
                .map(|o| o.y[0] - 1.0)
                .unwrap_or(f64::NAN)
        },
        (nodes[j], nodes[j + 1]),
        0.0,
    )?;
    let at_p = seg.integrate(rhs, t0, y0, p)?.y;

    let mut grid = nodes;
    let mut v: Vec<f64> = states.iter().map(|s| 1.0 - s[0]).collect();
    let mut dv: Vec<f64> = states.iter().map(|s| -s[1]).collect();
    let p_index = if p == grid[j + 1] {
        v[j + 1] = 0.0;
        j + 1
    } else if p == grid[j] {
        v[j] = 0.0;
        j
    } else {
        grid.insert(j + 1, p);
        v.insert(j + 1, 0.0);
        dv.insert(j + 1, -at_p[1]);
        j + 1
    };
    v[0] = 1.0 - eps;
    RadialSolution::from_raw_parts(*params, eps, grid, v, dv, p_index)
}

/// Limit profile of the recentred family:
/// `-tanh(r/√2)` for `r ≤ 0` and `-sin(r)/√2` on `(0, π]`.
pub fn limit_profile(r: f64) -> Result<f64> {
    if !(r <= std::f64::consts::PI) {
        return Err(Error::Domain {
            what: "limit profile is defined for r <= pi",
            value: r,
        });
    }
    Ok(if r <= 0.0 {
        -(r / std::f64::consts::SQRT_2).tanh()
    } else {
        -r.sin() / std::f64::consts::SQRT_2
    })
}

/// `ṽ_R(r) = v_R(r + p_R)`.
pub fn recentered_profile(sol: &RadialSolution, r: f64) -> Result<f64> {
    if r == 0.0 {
        return Ok(0.0);
    }
    let s = r + sol.p_r();
    if !(s >= 0.0 && s <= sol.radius()) {
        return Err(Error::Domain {
            what: "shifted radius outside [0, R]",
            value: r,
        });
    }
    Ok(sol.value_at(s)?.0)
}

/// `v'² + v² - (v⁺)⁴/2`.
pub fn energy_density(v: f64, dv: f64) -> f64 {
    let vp = v.max(0.0);
    dv * dv + v * v - 0.5 * vp.powi(4)
}

/// The energy `H` on the solution grid.
pub fn energy(sol: &RadialSolution) -> Vec<f64> {
    sol.v
        .iter()
        .zip(&sol.dv)
        .map(|(&v, &dv)| energy_density(v, dv))
        .collect()
}

/// Largest forward increment `H(s_{j+1}) - H(s_j)`.
pub fn max_energy_increment(h: &[f64]) -> f64 {
    h.windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `sup_r |u_{ρ+δ}(r) - u_ρ(r)|` over a uniform unit-ball grid.
pub fn continuity_probe(params: &ProblemParams, delta: f64, tol: &Tolerances) -> Result<f64> {
    if delta == 0.0 {
        return Ok(0.0);
    }
    let base = solve_radial(params, tol)?;
    let shifted = solve_radial(
        &ProblemParams::new(params.dimension, params.rho + delta)?,
        tol,
    )?;
    let m = STORAGE_INTERVALS;
    (0..=m).try_fold(0.0f64, |acc, j| {
        let r = j as f64 / m as f64;
        Ok(acc.max((shifted.u_at(r)?.0 - base.u_at(r)?.0).abs()))
    })
}

/// Sup-distance on the outer grid nodes between `v` and the solution of the
/// linear equation `y'' + (N-1)y'/s + y = 0` through `(p_R, 0, v'(p_R))`,
/// integrated with fixed-step classical RK4.
pub fn outer_linear_residual(sol: &RadialSolution) -> f64 {
    let nm1 = sol.dimension() as f64 - 1.0;
    let f = |s: f64, y: [f64; 2]| [y[1], -nm1 * y[1] / s - y[0]];
    let rk4 = |s: f64, y: [f64; 2], h: f64| {
        let k1 = f(s, y);
        let k2 = f(
            s + h / 2.0,
            [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]],
        );
        let k3 = f(
            s + h / 2.0,
            [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]],
        );
        let k4 = f(s + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ]
    };
    const SUBSTEPS: usize = 16;
    let p = sol.p_index;
    let mut s = sol.grid[p];
    let mut y = [0.0, sol.dv[p]];
    let mut worst = 0.0f64;
    for j in p + 1..sol.grid.len() {
        let h = (sol.grid[j] - s) / SUBSTEPS as f64;
        for _ in 0..SUBSTEPS {
            y = rk4(s, y, h);
            s += h;
        }
        s = sol.grid[j];
        worst = worst.max((y[0] - sol.v[j]).abs());
    }
    worst
}

/// Finite-difference weights for the first derivative at 0 on the given
/// offsets (Fornberg's recursion).
fn first_derivative_weights(offsets: &[f64]) -> Vec<f64> {
    let n = offsets.len();
    let mut c = vec![[0.0f64; 2]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = offsets[0];
    for i in 1..n {
        let mn = i.min(1);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = offsets[i];
        for j in 0..i {
            let c3 = offsets[i] - offsets[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|w| w[1]).collect()
}

/// Sup-norm residual of the radial equation on the uniform nodes, with `v''`
/// taken as a sixth-order finite difference of the stored `v'`. Stencils
/// never straddle the interior zero, where `(v⁺)³` loses smoothness.
pub fn ode_residual(sol: &RadialSolution) -> f64 {
    const WIDTH: usize = 7;
    let p_r = sol.p_r();
    let uniform: Vec<usize> = if sol.grid.len() == STORAGE_INTERVALS + 2 {
        (0..sol.grid.len()).filter(|&i| i != sol.p_index).collect()
    } else {
        (0..sol.grid.len()).collect()
    };
    let h = sol.radius() / STORAGE_INTERVALS as f64;
    let nm1 = sol.dimension() as f64 - 1.0;
    let last = uniform.len() - 1;
    let mut worst = 0.0f64;
    for (k, &i) in uniform.iter().enumerate().skip(1) {
        let s = sol.grid[i];
        if s == p_r {
            continue;
        }
        let same_side = |q: usize| (sol.grid[uniform[q]] - p_r) * (s - p_r) >= 0.0;
        let start = (k.saturating_sub(WIDTH - 1)..=k.min(last + 1 - WIDTH))
            .filter(|&st| (st..st + WIDTH).all(same_side))
            .min_by_key(|&st| (st + WIDTH / 2).abs_diff(k));
        let Some(start) = start else { continue };
        let offsets: Vec<f64> = (start..start + WIDTH)
            .map(|q| (sol.grid[uniform[q]] - s) / h)
            .collect();
        let weights = first_derivative_weights(&offsets);
        let d2: f64 = (start..start + WIDTH)
            .zip(&weights)
            .map(|(q, w)| w * sol.dv[uniform[q]])
            .sum::<f64>()
            / h;
        let v = sol.v[i];
        let res = d2 + nm1 * sol.dv[i] / s + v - v.max(0.0).powi(3);
        worst = worst.max(res.abs());
    }
    worst
}

/// Quintic Hermite interpolation from values, first and second derivatives;
/// returns `(y, y')`.
fn hermite5(x0: f64, x1: f64, a: [f64; 3], b: [f64; 3], x: f64) -> (f64, f64) {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let t5 = t4 * t;
    let h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    let h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    let h2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
    let h5 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    let h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    let h3 = 0.5 * (t3 - 2.0 * t4 + t5);
    let d0 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
    let d1 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
    let d2 = 0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4);
    let d5 = 30.0 * t2 - 60.0 * t3 + 30.0 * t4;
    let d4 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
    let d3 = 0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4);
    let y = h0 * a[0]
        + h * h1 * a[1]
        + h * h * h2 * a[2]
        + h5 * b[0]
        + h * h4 * b[1]
        + h * h * h3 * b[2];
    let dy = (d0 * a[0] + d5 * b[0]) / h + d1 * a[1] + d4 * b[1] + h * (d2 * a[2] + d3 * b[2]);
    (y, dy)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite5_is_exact_for_quintics() {
        let p = |x: f64| 1.0 - 2.0 * x + 0.5 * x.powi(3) + 0.25 * x.powi(5);
        let dp = |x: f64| -2.0 + 1.5 * x * x + 1.25 * x.powi(4);
        let d2p = |x: f64| 3.0 * x + 5.0 * x.powi(3);
        let (x0, x1) = (0.3, 1.1);
        for &x in &[0.3, 0.5, 0.77, 1.1] {
            let (y, dy) = hermite5(
                x0,
                x1,
                [p(x0), dp(x0), d2p(x0)],
                [p(x1), dp(x1), d2p(x1)],
                x,
            );
            assert!((y - p(x)).abs() < 1e-14 && (dy - dp(x)).abs() < 1e-13);
        }
    }

    #[test]
    fn fornberg_weights() {
        let w = first_derivative_weights(&[-1.0, 0.0, 1.0]);
        assert!((w[0] + 0.5).abs() < 1e-15 && w[1].abs() < 1e-15 && (w[2] - 0.5).abs() < 1e-15);
        let w = first_derivative_weights(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert!((w[0] + 49.0 / 20.0).abs() < 1e-12 && (w[6] + 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn limit_profile_values() {
        assert_eq!(limit_profile(0.0).unwrap(), 0.0);
        assert!(limit_profile(std::f64::consts::PI).unwrap().abs() < 1e-16);
        assert!(limit_profile(3.2).is_err());
        let h = 1e-7;
        let left = (limit_profile(0.0).unwrap() - limit_profile(-h).unwrap()) / h;
        let right = (limit_profile(h).unwrap() - limit_profile(0.0).unwrap()) / h;
        let slope = -std::f64::consts::FRAC_1_SQRT_2;
        assert!((left - slope).abs() < 1e-6 && (right - slope).abs() < 1e-6);
    }

    #[test]
    fn energy_of_zero_trajectory_vanishes() {
        assert_eq!(energy_density(0.0, 0.0), 0.0);
    }

    #[test]
    fn admissible_interval() {
        let limit = lambda_bar_2_inv(3).unwrap();
        assert!((limit - 1.0 / (4.0 * std::f64::consts::PI.powi(2))).abs() < 1e-14);
        assert!(matches!(
            ProblemParams::new(3, 1.1 * limit),
            Err(Error::NoSolution { .. })
        ));
        assert!(ProblemParams::new(3, -1.0).is_err());
        let p = ProblemParams::from_radius(3, 30.0).unwrap();
        assert!((p.radius() - 30.0).abs() < 1e-12);
    }

    #[test]
    fn moderate_solution_has_expected_structure() {
        let params = ProblemParams::from_fraction(3, 0.5).unwrap();
        let sol = solve_radial(&params, &Tolerances::default()).unwrap();
        assert!(sol.boundary_residual() <= 1e-10);
        assert!(sol.c_rho() > 0.0);
        assert!(sol.sup_abs() < 1.0);
        assert!(ode_residual(&sol) < 1e-8, "{}", ode_residual(&sol));
        assert!(outer_linear_residual(&sol) < 1e-6);
        assert!(max_energy_increment(&energy(&sol)) <= 1e-8 * energy(&sol)[0]);
        let (u, du) = sol.u_at(1.0).unwrap();
        assert!(u.abs() < 1e-10 && (du - sol.c_rho()).abs() < 1e-9);
        assert_eq!(recentered_profile(&sol, 0.0).unwrap(), 0.0);
    }
}
