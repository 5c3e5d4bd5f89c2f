//! Channel-wise spectrum of the linearized Dirichlet operator
//! `L = -ρΔ - 1 + 3(u_ρ⁺)²` on the unit ball.
//!
//! On a harmonic of Laplace–Beltrami eigenvalue `γ`, `L` reduces to the
//! Sturm–Liouville operator
//! `-f'' - (N-1)f'/s + γ f/s² - f + P(s) f` on `[0, R]` (rescaled radius),
//! with `P = 3(v⁺)²`. Eigenvalues come from shooting with zero counting and
//! are cross-checked against a finite-volume discretization.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ode::{Control, Dopri5};
use crate::quadrature::{integrate, integrate_on_breaks};
use crate::radial_solver::{
    lambda_bar_2_inv, limit_profile, ProblemParams, RadialSolution, RadialSource,
};
use crate::roots::find_zero;
use crate::special_functions::check_dimension;
use crate::symmetry_groups::{check_condition_g, SymmetryGroup};
use crate::tridiag::kth_eigenvalue;

/// Sample intervals on `[0, 1]` for eigenfunctions and channel factors.
pub const MODE_INTERVALS: usize = 2048;
/// Finite-difference grid of the oracle; Richardson uses this and twice it.
pub const ORACLE_INTERVALS: usize = 4096;
/// Relative agreement required between shooting and the oracle.
pub const ORACLE_RELATIVE_TOL: f64 = 1e-4;
/// Eigenvalue magnitude below which the oracle check becomes absolute.
pub const ORACLE_FLOOR: f64 = 1e-2;

const START_FRACTION: f64 = 1e-4;

/// The zero-order coefficient of the channel operator.
#[derive(Debug, Clone)]
pub enum Potential {
    Zero,
    /// `3(u_ρ⁺)²` from a radial solution.
    Radial(Arc<RadialSolution>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralTolerances {
    /// Relative tolerance of the channel integrations.
    pub ode: f64,
    /// Bracket width for eigenvalues.
    pub eig: f64,
}

impl Default for SpectralTolerances {
    fn default() -> Self {
        Self {
            ode: 1e-11,
            eig: 1e-12,
        }
    }
}

/// The operator `L` restricted to one channel.
#[derive(Debug, Clone)]
pub struct ModeOperator {
    dimension: u32,
    rho: f64,
    gamma: f64,
    potential: Potential,
}

/// A radial factor sampled on `[0, 1]`, interpolated by cubic Hermite.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialFunction {
    pub r: Vec<f64>,
    pub f: Vec<f64>,
    pub df: Vec<f64>,
}

impl RadialFunction {
    /// Sample a closure returning `(f, f')` at `intervals + 1` uniform nodes
    /// plus any extra nodes.
    pub fn from_fn<F: Fn(f64) -> (f64, f64)>(func: F, intervals: usize, extra: &[f64]) -> Self {
        let mut r: Vec<f64> = (0..=intervals)
            .map(|j| j as f64 / intervals as f64)
            .collect();
        r.extend(extra.iter().copied().filter(|&x| x > 0.0 && x < 1.0));
        r.sort_by(|a, b| a.total_cmp(b));
        r.dedup();
        let (f, df) = r.iter().map(|&x| func(x)).unzip();
        Self { r, f, df }
    }

    pub fn eval(&self, x: f64) -> (f64, f64) {
        let j = self
            .r
            .partition_point(|&t| t <= x)
            .clamp(1, self.r.len() - 1)
            - 1;
        let (x0, x1) = (self.r[j], self.r[j + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let (f0, f1, d0, d1) = (self.f[j], self.f[j + 1], self.df[j] * h, self.df[j + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let value = (2.0 * t3 - 3.0 * t2 + 1.0) * f0
            + (t3 - 2.0 * t2 + t) * d0
            + (-2.0 * t3 + 3.0 * t2) * f1
            + (t3 - t2) * d1;
        let slope = ((6.0 * t2 - 6.0 * t) * f0
            + (3.0 * t2 - 4.0 * t + 1.0) * d0
            + (-6.0 * t2 + 6.0 * t) * f1
            + (3.0 * t2 - 2.0 * t) * d1)
            / h;
        (value, slope)
    }

    pub fn boundary_value(&self) -> f64 {
        self.f[self.f.len() - 1]
    }

    pub fn boundary_slope(&self) -> f64 {
        self.df[self.df.len() - 1]
    }

    pub fn scale(&mut self, c: f64) {
        self.f.iter_mut().for_each(|x| *x *= c);
        self.df.iter_mut().for_each(|x| *x *= c);
    }

    /// `∫₀¹ g(r, f, f') dr` with one Gauss–Legendre panel per sample interval.
    pub fn integrate<G: Fn(f64, f64, f64) -> f64>(&self, g: G) -> f64 {
        integrate_on_breaks(
            |x| {
                let (f, df) = self.eval(x);
                g(x, f, df)
            },
            &self.r,
        )
    }
}

struct ModeShot {
    zeros: usize,
    end: [f64; 2],
}

impl ModeOperator {
    /// `L` linearized at `sol`, on the channel with eigenvalue `gamma`.
    pub fn linearized(sol: Arc<RadialSolution>, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self {
            dimension: sol.dimension(),
            rho: sol.rho(),
            gamma,
            potential: Potential::Radial(sol),
        })
    }

    /// `-ρΔ - 1` on the channel, for any `ρ > 0`.
    pub fn free(dimension: u32, rho: f64, gamma: f64) -> Result<Self> {
        check_dimension(dimension)?;
        check_gamma(gamma)?;
        if !(rho > 0.0) {
            return Err(Error::Domain {
                what: "rho must be positive",
                value: rho,
            });
        }
        Ok(Self {
            dimension,
            rho,
            gamma,
            potential: Potential::Zero,
        })
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self {
            gamma,
            ..self.clone()
        })
    }

    /// The same channel without the potential.
    pub fn without_potential(&self) -> Self {
        Self {
            potential: Potential::Zero,
            ..self.clone()
        }
    }

    pub fn radius(&self) -> f64 {
        self.rho.sqrt().recip()
    }

    /// Frobenius exponent at the origin, `i` for `γ = i(i+N-2)`.
    pub fn kappa(&self) -> f64 {
        let b = self.dimension as f64 - 2.0;
        0.5 * (-b + (b * b + 4.0 * self.gamma).sqrt())
    }

    fn split(&self) -> Option<f64> {
        match &self.potential {
            Potential::Zero => None,
            Potential::Radial(sol) => Some(sol.p_r()),
        }
    }

    /// Potential in rescaled coordinates.
    pub fn potential_at(&self, s: f64) -> f64 {
        match &self.potential {
            Potential::Zero => 0.0,
            Potential::Radial(sol) => {
                if s >= sol.p_r() {
                    0.0
                } else {
                    let v = sol.value_at(s).map(|x| x.0).unwrap_or(0.0);
                    3.0 * v.max(0.0).powi(2)
                }
            }
        }
    }

    /// `3(u⁺)²` at unit-ball radius `r`.
    pub fn potential_unit(&self, r: f64) -> f64 {
        self.potential_at(r * self.radius())
    }

    fn rhs(&self, mu: f64) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] + '_ {
        let nm1 = self.dimension as f64 - 1.0;
        move |s, y| {
            let q = self.gamma / (s * s) + self.potential_at(s) - 1.0 - mu;
            [y[1], -nm1 * y[1] / s + q * y[0]]
        }
    }

    fn start(&self, mu: f64) -> (f64, [f64; 2]) {
        let s0 = START_FRACTION * self.radius();
        let k = self.kappa();
        let c = (self.potential_at(0.0) - 1.0 - mu) / (4.0 * k + 2.0 * self.dimension as f64);
        let f = 1.0 + c * s0 * s0;
        (s0, [f, k / s0 * f + 2.0 * c * s0])
    }

    fn integrator(&self, mu: f64, rtol: f64) -> Dopri5 {
        let h_max = 0.25 / (1.0 + mu.max(0.0)).sqrt();
        Dopri5::new(rtol, 1e-200).with_h_max(h_max)
    }

    fn shoot(&self, mu: f64, rtol: f64) -> Result<ModeShot> {
        let solver = self.integrator(mu, rtol);
        let radius = self.radius();
        let (s0, y0) = self.start(mu);
        let legs: Vec<(f64, f64)> = match self.split().filter(|&p| p > s0 && p < radius) {
            Some(p) => vec![(s0, p), (p, radius)],
            None => vec![(s0, radius)],
        };
        let mut zeros = 0;
        let mut y = y0;
        for (from, to) in legs {
            y = solver
                .integrate_observed(self.rhs(mu), from, y, to, |step| {
                    if step.y0[0] * step.y1[0] < 0.0 {
                        zeros += 1;
                    }
                    Control::Continue
                })?
                .y;
        }
        Ok(ModeShot { zeros, end: y })
    }

    /// Number of eigenvalues below `mu`.
    pub fn count_below(&self, mu: f64, tol: &SpectralTolerances) -> Result<usize> {
        Ok(self.shoot(mu, tol.ode)?.zeros)
    }

    /// Normalized `f(R)` of the regular solution at spectral parameter `mu`.
    fn boundary_angle(&self, mu: f64, rtol: f64) -> f64 {
        match self.shoot(mu, rtol) {
            Ok(s) => s.end[0] / s.end[0].hypot(s.end[1]),
            Err(_) => f64::NAN,
        }
    }

    /// Regular solution at spectral parameter `mu`, sampled in unit-ball
    /// coordinates on [`MODE_INTERVALS`] uniform nodes (plus `p_ρ`).
    pub fn sample(&self, mu: f64, rtol: f64) -> Result<RadialFunction> {
        let radius = self.radius();
        let mut r: Vec<f64> = (0..=MODE_INTERVALS)
            .map(|j| j as f64 / MODE_INTERVALS as f64)
            .collect();
        if let Some(p) = self.split() {
            let pr = p / radius;
            if !r.contains(&pr) {
                let k = r.partition_point(|&x| x < pr);
                r.insert(k, pr);
            }
        }
        let (s0, mut y) = self.start(mu);
        let k = self.kappa();
        let origin = [
            if k == 0.0 { 1.0 } else { 0.0 },
            if (k - 1.0).abs() < 1e-15 {
                1.0 / s0
            } else {
                0.0
            },
        ];
        let mut f = vec![origin[0]];
        let mut df = vec![origin[1] * radius];
        let solver = self.integrator(mu, rtol);
        let mut t = s0;
        let mut h: Option<f64> = None;
        for &x in &r[1..] {
            let s = x * radius;
            let stepper = h.map_or(solver, |h| solver.with_h_init(h));
            let out = stepper.integrate(self.rhs(mu), t, y, s)?;
            h = Some(out.last_h);
            y = out.y;
            t = s;
            f.push(y[0]);
            df.push(y[1] * radius);
        }
        Ok(RadialFunction { r, f, df })
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::Domain {
            what: "gamma must be finite and nonnegative",
            value: gamma,
        });
    }
    Ok(())
}

/// The lowest `count` eigenvalues by shooting with zero counting, refined by
/// Brent on the boundary value.
pub fn shooting_eigenvalues(
    op: &ModeOperator,
    count: usize,
    tol: &SpectralTolerances,
) -> Result<Vec<f64>> {
    let zeros = |mu: f64| op.count_below(mu, tol);
    let lower = -1.0 - tol.eig;
    if zeros(lower)? != 0 {
        return Err(Error::ConvergenceFailure {
            index: 1,
            reason: "eigenvalue below the lower bound -1".into(),
        });
    }
    let mut out: Vec<f64> = Vec::with_capacity(count);
    for k in 1..=count {
        let mut lo = out.last().copied().unwrap_or(lower);
        let mut hi = lo.max(0.0) + 1.0;
        let mut n_hi = zeros(hi)?;
        while n_hi < k {
            lo = hi;
            hi = 2.0 * hi + 1.0;
            n_hi = zeros(hi)?;
            if hi > 1e8 {
                return Err(Error::ConvergenceFailure {
                    index: k,
                    reason: "no upper bracket".into(),
                });
            }
        }
        let mut n_lo = zeros(lo)?;
        let mut iterations = 0;
        while !(n_lo == k - 1 && n_hi == k) {
            let mid = 0.5 * (lo + hi);
            let n_mid = zeros(mid)?;
            if n_mid >= k {
                hi = mid;
                n_hi = n_mid;
            } else {
                lo = mid;
                n_lo = n_mid;
            }
            iterations += 1;
            if iterations > 200 {
                return Err(Error::ConvergenceFailure {
                    index: k,
                    reason: "could not isolate eigenvalue".into(),
                });
            }
        }
        let mu = find_zero(|m| op.boundary_angle(m, tol.ode), (lo, hi), tol.eig).map_err(|e| {
            Error::ConvergenceFailure {
                index: k,
                reason: e.to_string(),
            }
        })?;
        out.push(mu);
    }
    Ok(out)
}

/// Lowest `count` eigenvalues of a finite-volume discretization with
/// `intervals` cells on `[0, R]`.
pub fn fd_eigenvalues(op: &ModeOperator, count: usize, intervals: usize) -> Vec<f64> {
    let n = op.dimension as f64;
    let radius = op.radius();
    let h = radius / intervals as f64;
    let pow = |s: f64, e: f64| if s == 0.0 { 0.0 } else { s.powf(e) };
    let first = if op.gamma > 0.0 { 1 } else { 0 };
    let mut diag = Vec::with_capacity(intervals);
    let mut weight = Vec::with_capacity(intervals);
    let mut coupling = Vec::with_capacity(intervals);
    for j in first..intervals {
        let s = j as f64 * h;
        let a = (s - 0.5 * h).max(0.0);
        let b = s + 0.5 * h;
        let w = (b.powf(n) - a.powf(n)) / n;
        let g = if op.gamma > 0.0 {
            if op.dimension == 2 {
                (b / a).ln()
            } else {
                (b.powf(n - 2.0) - a.powf(n - 2.0)) / (n - 2.0)
            }
        } else {
            0.0
        };
        let flux_right = b.powf(n - 1.0) / h;
        let flux_left = pow(a, n - 1.0) / h;
        let q = op.potential_at(s) - 1.0;
        diag.push(flux_left + flux_right + op.gamma * g + q * w);
        weight.push(w);
        coupling.push(-flux_right);
    }
    let m = diag.len();
    let d: Vec<f64> = (0..m).map(|i| diag[i] / weight[i]).collect();
    let e: Vec<f64> = (0..m - 1)
        .map(|i| coupling[i] / (weight[i] * weight[i + 1]).sqrt())
        .collect();
    (0..count).map(|k| kth_eigenvalue(&d, &e, k)).collect()
}

/// Richardson-extrapolated finite-difference eigenvalues.
pub fn oracle_eigenvalues(op: &ModeOperator, count: usize) -> Vec<f64> {
    let (coarse, fine) = rayon::join(
        || fd_eigenvalues(op, count, ORACLE_INTERVALS),
        || fd_eigenvalues(op, count, 2 * ORACLE_INTERVALS),
    );
    coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (4.0 * f - c) / 3.0)
        .collect()
}

/// Whether shooting and oracle values agree.
pub fn oracle_agrees(shooting: f64, oracle: f64) -> bool {
    (shooting - oracle).abs() <= ORACLE_RELATIVE_TOL * shooting.abs().max(ORACLE_FLOOR)
}

/// The lowest `count` eigenvalues, ascending, cross-checked against the
/// finite-difference oracle.
pub fn mode_eigenvalues(
    op: &ModeOperator,
    count: usize,
    tol: &SpectralTolerances,
) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::Domain {
            what: "eigenvalue count must be positive",
            value: 0.0,
        });
    }
    let (shot, oracle) = rayon::join(
        || shooting_eigenvalues(op, count, tol),
        || oracle_eigenvalues(op, count),
    );
    let shot = shot?;
    for (k, (s, o)) in shot.iter().zip(&oracle).enumerate() {
        if !oracle_agrees(*s, *o) {
            return Err(Error::ConvergenceFailure {
                index: k + 1,
                reason: format!("shooting {s} and finite-difference {o} disagree"),
            });
        }
    }
    Ok(shot)
}

/// Eigenfunction of `mu`, normalized to `∫ f² r^{N-1} dr = 1`.
pub fn eigenfunction(
    op: &ModeOperator,
    mu: f64,
    tol: &SpectralTolerances,
) -> Result<RadialFunction> {
    let mut f = op.sample(mu, tol.ode)?;
    let nm1 = op.dimension as i32 - 1;
    let norm = f.integrate(|r, v, _| v * v * r.powi(nm1)).sqrt();
    f.scale(1.0 / norm);
    Ok(f)
}

/// `∫₀¹ (ρf'² - f² + 3(u⁺)²f²) r^{N-1} dr + ργ ∫₀¹ f² r^{N-3} dr`.
pub fn dirichlet_form(op: &ModeOperator, f: &RadialFunction) -> f64 {
    let nm1 = op.dimension as i32 - 1;
    let (rho, gamma) = (op.rho, op.gamma);
    f.integrate(|r, v, dv| {
        if r == 0.0 {
            return 0.0;
        }
        let bulk = (rho * dv * dv - v * v + op.potential_unit(r) * v * v) * r.powi(nm1);
        let angular = if gamma > 0.0 {
            rho * gamma * v * v * r.powi(nm1 - 2)
        } else {
            0.0
        };
        bulk + angular
    })
}

/// The two lowest radial eigenvalues with the sign pattern `μ̄₁ < 0 < μ̄₂`.
pub fn morse_check(sol: Arc<RadialSolution>, tol: &SpectralTolerances) -> Result<(f64, f64)> {
    let op = ModeOperator::linearized(sol, 0.0)?;
    let mu = mode_eigenvalues(&op, 2, tol)?;
    if !(mu[0] < 0.0 && mu[1] > 0.0) {
        return Err(Error::PropertyViolation(format!(
            "radial eigenvalues {} and {} violate mu1 < 0 < mu2",
            mu[0], mu[1]
        )));
    }
    Ok((mu[0], mu[1]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub rho: f64,
    pub group: SymmetryGroup,
    pub mu_bar_1: f64,
    pub mu_bar_2: f64,
    /// First eigenvalue of the first invariant channel.
    pub mu_mode1: f64,
    pub mu2_g: f64,
    /// `(γ, first eigenvalue)` of the next invariant channels.
    pub higher_channels: Vec<(f64, f64)>,
}

/// The G-symmetric second eigenvalue `μ₂ = min(μ̄₂, μ_{γ₁})`.
pub fn mu2_g(
    sol: Arc<RadialSolution>,
    group: &SymmetryGroup,
    tol: &SpectralTolerances,
) -> Result<SpectrumReport> {
    if group.dimension() != sol.dimension() {
        return Err(Error::Precondition(format!(
            "group {group} acts in dimension {}, solution has N = {}",
            group.dimension(),
            sol.dimension()
        )));
    }
    let channels = group.invariant_channels(3)?;
    let radial = ModeOperator::linearized(sol.clone(), 0.0)?;
    let ops: Vec<ModeOperator> = channels
        .iter()
        .map(|c| ModeOperator::linearized(sol.clone(), c.gamma))
        .collect::<Result<_>>()?;
    let (radial_mu, channel_mu) = rayon::join(
        || mode_eigenvalues(&radial, 2, tol),
        || {
            ops.par_iter()
                .map(|op| mode_eigenvalues(op, 1, tol).map(|m| m[0]))
                .collect::<Result<Vec<f64>>>()
        },
    );
    let (radial_mu, channel_mu) = (radial_mu?, channel_mu?);
    let mu_mode1 = channel_mu[0];
    if let Some((c, m)) = channels
        .iter()
        .zip(&channel_mu)
        .skip(1)
        .find(|(_, m)| **m < mu_mode1)
    {
        return Err(Error::PropertyViolation(format!(
            "channel gamma = {} has first eigenvalue {m} below the first invariant channel ({mu_mode1})",
            c.gamma
        )));
    }
    Ok(SpectrumReport {
        rho: sol.rho(),
        group: *group,
        mu_bar_1: radial_mu[0],
        mu_bar_2: radial_mu[1],
        mu_mode1,
        mu2_g: radial_mu[1].min(mu_mode1),
        higher_channels: channels
            .iter()
            .zip(&channel_mu)
            .skip(1)
            .map(|(c, m)| (c.gamma, *m))
            .collect(),
    })
}

/// Result of locating a sign change of a sampled quantity in `ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalValue {
    /// Midpoint of the final bracket.
    pub value: f64,
    pub bracket: (f64, f64),
    /// Quantity at the bracket ends.
    pub values_at_bracket: (f64, f64),
    /// Coarse samples `(ρ, value)`.
    pub samples: Vec<(f64, f64)>,
    /// Parameters whose radial solve or spectrum failed.
    pub failed: Vec<f64>,
    /// Number of sign changes seen on the coarse sweep.
    pub sign_changes: usize,
}

impl CriticalValue {
    pub fn width(&self) -> f64 {
        self.bracket.1 - self.bracket.0
    }
}

/// Coarse sweep points for the search of `ρ₀`, as fractions of `λ̄₂⁻¹`.
pub const RHO0_SWEEP: (f64, f64, usize) = (0.02, 0.99, 32);

pub(crate) fn require_condition_g(group: &SymmetryGroup) -> Result<()> {
    let report = check_condition_g(group)?;
    if !report.passes {
        return Err(Error::Precondition(format!(
            "group {group} fails condition (G)"
        )));
    }
    Ok(())
}

/// `μ₂(ρ)` through a radial source.
pub fn mu2_at(
    source: &dyn RadialSource,
    group: &SymmetryGroup,
    rho: f64,
    tol: &SpectralTolerances,
) -> Result<f64> {
    let params = ProblemParams::new(group.dimension(), rho)?;
    Ok(mu2_g(source.solve(&params)?, group, tol)?.mu2_g)
}

/// Locate a sign change of `value(ρ)` from `≤ 0` to `> 0`, keeping the last
/// change on the coarse sweep, then bisect down to `tol`.
pub(crate) fn locate_sign_change<F>(
    what: &'static str,
    points: &[f64],
    value: F,
    tol: f64,
) -> Result<CriticalValue>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let evaluated: Vec<(f64, Result<f64>)> =
        points.par_iter().map(|&rho| (rho, value(rho))).collect();
    let mut samples = Vec::new();
    let mut failed = Vec::new();
    for (rho, v) in evaluated {
        match v {
            Ok(v) => samples.push((rho, v)),
            Err(_) => failed.push(rho),
        }
    }
    let changes: Vec<usize> = samples
        .windows(2)
        .enumerate()
        .filter(|(_, w)| (w[0].1 <= 0.0) != (w[1].1 <= 0.0))
        .map(|(k, _)| k)
        .collect();
    let Some(&k) = changes.iter().rev().find(|&&k| samples[k].1 <= 0.0) else {
        return Err(Error::NoSignChange { what, samples });
    };
    let (mut lo, mut hi) = (samples[k].0, samples[k + 1].0);
    let (mut v_lo, mut v_hi) = (samples[k].1, samples[k + 1].1);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = value(mid)?;
        if v <= 0.0 {
            lo = mid;
            v_lo = v;
        } else {
            hi = mid;
            v_hi = v;
        }
    }
    Ok(CriticalValue {
        value: 0.5 * (lo + hi),
        bracket: (lo, hi),
        values_at_bracket: (v_lo, v_hi),
        samples,
        failed,
        sign_changes: changes.len(),
    })
}

/// `ρ₀ = sup{ρ : μ₂(ρ) ≤ 0}`, bracketed to width `tol`.
pub fn find_rho0(
    source: &dyn RadialSource,
    group: &SymmetryGroup,
    tol: f64,
    spectral: &SpectralTolerances,
) -> Result<CriticalValue> {
    require_condition_g(group)?;
    let limit = lambda_bar_2_inv(group.dimension())?;
    let (lo, hi, n) = RHO0_SWEEP;
    let points: Vec<f64> = (0..n)
        .map(|k| limit * (lo + (hi - lo) * k as f64 / (n - 1) as f64))
        .collect();
    locate_sign_change(
        "mu2",
        &points,
        |rho| mu2_at(source, group, rho, spectral),
        tol,
    )
}

/// `Q̂_D(ξ) = ∫_{-T}^{π} ξ'² - ξ² + 3(ṽ₀⁺)²ξ² dr`, where `xi` returns
/// `(ξ, ξ')`.
pub fn limit_form_value<F: Fn(f64) -> (f64, f64)>(xi: F, truncation: f64) -> Result<f64> {
    if !(truncation >= 20.0) {
        return Err(Error::Domain {
            what: "truncation must be at least 20",
            value: truncation,
        });
    }
    let integrand = |r: f64| {
        let (x, dx) = xi(r);
        let v = limit_profile(r).unwrap_or(0.0).max(0.0);
        dx * dx - x * x + 3.0 * v * v * x * x
    };
    let left = integrate(integrand, -truncation, 0.0, 400);
    let right = integrate(integrand, 0.0, std::f64::consts::PI, 100);
    Ok(left + right)
}

/// `exp(-1/(1-x²))` with `x = (r-c)/w`, and its derivative.
pub fn bump(center: f64, width: f64) -> impl Fn(f64) -> (f64, f64) {
    move |r| {
        let x = (r - center) / width;
        if x.abs() >= 1.0 {
            return (0.0, 0.0);
        }
        let q = 1.0 - x * x;
        let value = (-1.0 / q).exp();
        (value, value * (-2.0 * x / (q * q)) / width)
    }
}

/// Scan smooth bumps supported in `(-T, π)` and return the most negative
/// `(center, width, Q̂_D)`.
pub fn negative_bump_witness(truncation: f64) -> Result<(f64, f64, f64)> {
    let mut best = (0.0, 0.0, f64::INFINITY);
    for ci in 0..=30 {
        let center = -1.5 + 0.1 * ci as f64;
        for wi in 0..=22 {
            let width = 0.5 + 0.25 * wi as f64;
            if center + width > std::f64::consts::PI || center - width < -truncation {
                continue;
            }
            let q = limit_form_value(bump(center, width), truncation)?;
            if q < best.2 {
                best = (center, width, q);
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn free_radial_channel_in_three_dimensions() {
        let op = ModeOperator::free(3, 1.0, 0.0).unwrap();
        let tol = SpectralTolerances::default();
        let mu = mode_eigenvalues(&op, 3, &tol).unwrap();
        for (j, m) in mu.iter().enumerate() {
            let exact = ((j + 1) as f64 * PI).powi(2) - 1.0;
            assert!((m - exact).abs() < 1e-8 * exact, "{m} vs {exact}");
        }
    }

    #[test]
    fn free_channel_matches_bessel_zero() {
        let tol = SpectralTolerances::default();
        for n in [2u32, 4] {
            let rho = 0.3;
            let op = ModeOperator::free(n, rho, 0.0).unwrap();
            let (l1, _) = crate::radial_solver::lambda_bar(n).unwrap();
            let mu = shooting_eigenvalues(&op, 1, &tol).unwrap()[0];
            assert!((mu - (rho * l1 - 1.0)).abs() < 1e-8);
        }
    }

    #[test]
    fn oracle_converges_on_free_problem() {
        let op = ModeOperator::free(2, 0.5, 4.0).unwrap();
        let shot = shooting_eigenvalues(&op, 3, &SpectralTolerances::default()).unwrap();
        let oracle = oracle_eigenvalues(&op, 3);
        for (s, o) in shot.iter().zip(&oracle) {
            assert!(oracle_agrees(*s, *o), "{s} vs {o}");
        }
    }

    #[test]
    fn limit_form_of_sine_vanishes() {
        let xi = |r: f64| {
            if r <= 0.0 {
                (0.0, 0.0)
            } else {
                (r.sin(), r.cos())
            }
        };
        assert!(limit_form_value(xi, 20.0).unwrap().abs() < 1e-8);
        assert_eq!(limit_form_value(|_| (0.0, 0.0), 20.0).unwrap(), 0.0);
        assert!(limit_form_value(xi, 5.0).is_err());
    }

    #[test]
    fn some_bump_is_negative() {
        let (_, _, q) = negative_bump_witness(20.0).unwrap();
        assert!(q < 0.0);
    }

    #[test]
    fn hermite_sampling_reproduces_cubics() {
        let f = RadialFunction::from_fn(|x| (x * x * x - x, 3.0 * x * x - 1.0), 8, &[0.37]);
        let (v, d) = f.eval(0.61);
        assert!((v - (0.61f64.powi(3) - 0.61)).abs() < 1e-14);
        assert!((d - (3.0 * 0.61 * 0.61 - 1.0)).abs() < 1e-13);
    }
}
