//! The linearized Dirichlet-to-Neumann operator `H_ρ(w) = ∂_ν ψ_w + (N-1) w`
//! channel by channel, its first eigenvalue `τ₁`, the critical value `ρ*`
//! and the bifurcation report.
//!
//! On a harmonic channel `γ > 0`, `ψ_w = f(r) ϑ(θ)` where `f` is the regular
//! solution of `L f = 0` scaled to `f(1) = 1`, and `H_ρ` acts as
//! multiplication by `τ = f'(1) + (N-1)`.

use std::sync::Arc;

use rayon::prelude::*;

use crate::dirichlet_spectrum::{
    dirichlet_form, find_rho0, locate_sign_change, require_condition_g, CriticalValue,
    ModeOperator, RadialFunction, SpectralTolerances,
};
use crate::error::{Error, Result};
use crate::radial_solver::{lambda_bar_2_inv, ProblemParams, RadialSolution, RadialSource};
use crate::symmetry_groups::{ModeSpec, SymmetryGroup};

/// Relative threshold on `|f(1)| / max|f|` below which a channel counts as
/// Dirichlet-degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-10;
/// Default number of invariant channels tested.
pub const DEFAULT_CHANNEL_BUDGET: usize = 4;
/// Number of ladder points for the search of `ρ*`.
pub const RHO_STAR_LADDER: usize = 24;
/// Distance kept from the ends of `(ρ₀, λ̄₂⁻¹)`, as a fraction of `λ̄₂⁻¹`.
pub const MARGIN_FRACTION: f64 = 1e-3;

/// `H_ρ` on one channel.
#[derive(Debug, Clone)]
pub struct SteklovChannel {
    pub gamma: f64,
    pub rho: f64,
    /// Radial factor on `[0, 1]`, scaled to `f(1) = 1`.
    pub f: RadialFunction,
    /// `f'(1) + (N-1)`.
    pub tau: f64,
    /// `Q_ρᵏ(f)` by quadrature; equals `ρτ` when the identity holds.
    pub form_value: f64,
}

impl SteklovChannel {
    /// Multiplier in the normalization of the quadratic form, `Q/f(1)²`.
    pub fn eta(&self) -> f64 {
        self.form_value
    }

    /// `|Q - ρτ| / |ρτ|`.
    pub fn duality_residual(&self) -> f64 {
        let expected = self.rho * self.tau;
        (self.form_value - expected).abs() / expected.abs().max(f64::MIN_POSITIVE)
    }
}

/// Eigenvalue of `H_ρ` on the channel `gamma > 0`.
pub fn steklov_value(
    sol: Arc<RadialSolution>,
    gamma: f64,
    tol: &SpectralTolerances,
) -> Result<SteklovChannel> {
    if !(gamma > 0.0) {
        return Err(Error::Precondition(
            "the radial channel is excluded from H_rho (boundary data have zero mean)".into(),
        ));
    }
    let n = sol.dimension();
    let rho = sol.rho();
    let op = ModeOperator::linearized(sol.clone(), gamma)?;
    let mut f = op.sample(0.0, tol.ode)?;
    let peak = f.f.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let boundary = f.boundary_value() / peak;
    if !(boundary.abs() >= DEGENERACY_THRESHOLD) {
        return Err(Error::ChannelDegenerate {
            gamma,
            boundary_value: boundary,
        });
    }
    f.scale(1.0 / f.boundary_value());
    let tau = f.boundary_slope() + (n as f64 - 1.0);
    let form_value = quadratic_form_qk(&f, &sol, gamma)?;
    Ok(SteklovChannel {
        gamma,
        rho,
        f,
        tau,
        form_value,
    })
}

/// `Q_ρᵏ(f) = ∫(ρf'² - f² + 3(u⁺)²f²) r^{N-1} + ργ ∫ f² r^{N-3} + ρ(N-1) f(1)²`.
pub fn quadratic_form_qk(f: &RadialFunction, sol: &Arc<RadialSolution>, gamma: f64) -> Result<f64> {
    let op = ModeOperator::linearized(sol.clone(), gamma)?;
    let boundary = f.boundary_value();
    Ok(dirichlet_form(&op, f) + sol.rho() * (sol.dimension() as f64 - 1.0) * boundary * boundary)
}

/// One tested channel of `τ₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelValue {
    pub mode: ModeSpec,
    pub tau: f64,
    pub duality_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tau1 {
    pub rho: f64,
    pub tau1: f64,
    pub channels: Vec<ChannelValue>,
}

impl Tau1 {
    /// Number of negative eigenvalues of `H_ρ` over the tested channels,
    /// counted with invariant multiplicity.
    pub fn negative_count(&self) -> u32 {
        self.channels
            .iter()
            .filter(|c| c.tau < 0.0)
            .map(|c| c.mode.multiplicity)
            .sum()
    }
}

/// `τ₁(H_ρ)` over the first `channel_budget` invariant channels. Fails with
/// `MonotonicityViolation` unless `τ` strictly increases along them.
pub fn tau1(
    sol: Arc<RadialSolution>,
    group: &SymmetryGroup,
    channel_budget: usize,
    tol: &SpectralTolerances,
) -> Result<Tau1> {
    if group.dimension() != sol.dimension() {
        return Err(Error::Precondition(format!(
            "group {group} does not act in dimension {}",
            sol.dimension()
        )));
    }
    let modes = group.invariant_channels(channel_budget.max(1))?;
    let channels = modes
        .par_iter()
        .map(|m| {
            let c = steklov_value(sol.clone(), m.gamma, tol)?;
            Ok(ChannelValue {
                mode: *m,
                tau: c.tau,
                duality_residual: c.duality_residual(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let tau_first = channels[0].tau;
    for w in channels.windows(2) {
        if !(w[1].tau > w[0].tau) {
            return Err(Error::MonotonicityViolation {
                gamma: w[1].mode.gamma,
                tau: w[1].tau,
                tau_first,
            });
        }
    }
    Ok(Tau1 {
        rho: sol.rho(),
        tau1: tau_first,
        channels,
    })
}

/// `τ₁` at `rho` through a radial source.
pub fn tau1_at(
    source: &dyn RadialSource,
    group: &SymmetryGroup,
    rho: f64,
    channel_budget: usize,
    tol: &SpectralTolerances,
) -> Result<Tau1> {
    let params = ProblemParams::new(group.dimension(), rho)?;
    tau1(source.solve(&params)?, group, channel_budget, tol)
}

/// `(ρ₀ + margin, λ̄₂⁻¹ - margin)`.
pub fn rho_star_range(group: &SymmetryGroup, rho0: f64) -> Result<(f64, f64)> {
    let limit = lambda_bar_2_inv(group.dimension())?;
    let margin = MARGIN_FRACTION * limit;
    Ok((rho0 + margin, limit - margin))
}

/// Evenly spaced points including both ends.
pub fn ladder(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n.max(2) - 1) as f64)
        .collect()
}

/// Critical value `ρ*` where `τ₁` turns positive, searched on a
/// [`RHO_STAR_LADDER`]-point ladder above `rho0` and bisected to `tol`.
/// More than one sign change on the ladder is a `PropertyViolation`.
pub fn find_rho_star(
    source: &dyn RadialSource,
    group: &SymmetryGroup,
    rho0: f64,
    tol: f64,
    spectral: &SpectralTolerances,
) -> Result<CriticalValue> {
    require_condition_g(group)?;
    let (lo, hi) = rho_star_range(group, rho0)?;
    if !(lo < hi) {
        return Err(Error::Precondition(format!(
            "empty search interval above rho0 = {rho0}"
        )));
    }
    let points = ladder(lo, hi, RHO_STAR_LADDER);
    let found = locate_sign_change(
        "tau1",
        &points,
        |rho| Ok(tau1_at(source, group, rho, 1, spectral)?.tau1),
        tol,
    )?;
    if found.sign_changes != 1 {
        return Err(Error::PropertyViolation(format!(
            "tau1 changes sign {} times on the ladder over ({lo}, {hi})",
            found.sign_changes
        )));
    }
    Ok(found)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReportStatus {
    Complete,
    /// Stage that failed and the error message.
    Incomplete {
        stage: &'static str,
        error: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationReport {
    pub dimension: u32,
    pub group: SymmetryGroup,
    pub lambda_bar_2_inv: f64,
    pub rho0: Option<CriticalValue>,
    pub rho_star: Option<CriticalValue>,
    /// `τ` on every tested channel over `(ρ₀, λ̄₂⁻¹)`.
    pub samples: Vec<Tau1>,
    pub channels: Vec<ModeSpec>,
    pub kernel_multiplicity: u32,
    pub index_below: Option<u32>,
    pub index_above: Option<u32>,
    /// `c_ρ` at the lower end of the `ρ*` bracket.
    pub c_rho_at_star: Option<f64>,
    pub status: ReportStatus,
}

impl BifurcationReport {
    pub fn is_complete(&self) -> bool {
        self.status == ReportStatus::Complete
    }

    /// `(ρ, τ₁)` pairs of the sweep.
    pub fn tau_curve(&self) -> Vec<(f64, f64)> {
        self.samples.iter().map(|t| (t.rho, t.tau1)).collect()
    }

    /// `|index_below - index_above|`, when both are known.
    pub fn index_jump(&self) -> Option<u32> {
        Some(self.index_below?.abs_diff(self.index_above?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BifurcationSettings {
    /// Bracket width for `ρ₀` and `ρ*`.
    pub bracket_tol: f64,
    pub channel_budget: usize,
    /// Number of `τ₁` samples in the report.
    pub sweep: usize,
    pub spectral: SpectralTolerances,
}

impl BifurcationSettings {
    pub fn for_dimension(dimension: u32) -> Result<Self> {
        Ok(Self {
            bracket_tol: 1e-6 * lambda_bar_2_inv(dimension)?,
            channel_budget: DEFAULT_CHANNEL_BUDGET,
            sweep: RHO_STAR_LADDER,
            spectral: SpectralTolerances::default(),
        })
    }
}

/// Assemble `ρ₀`, `ρ*`, the `τ₁` curve and the index on both sides of `ρ*`.
/// Failing stages leave their fields empty and mark the report incomplete.
pub fn bifurcation_report(
    source: &dyn RadialSource,
    group: &SymmetryGroup,
    settings: &BifurcationSettings,
) -> Result<BifurcationReport> {
    require_condition_g(group)?;
    let dimension = group.dimension();
    let channels = group.invariant_channels(settings.channel_budget)?;
    let mut report = BifurcationReport {
        dimension,
        group: *group,
        lambda_bar_2_inv: lambda_bar_2_inv(dimension)?,
        rho0: None,
        rho_star: None,
        samples: Vec::new(),
        kernel_multiplicity: channels[0].multiplicity,
        channels: channels.clone(),
        index_below: None,
        index_above: None,
        c_rho_at_star: None,
        status: ReportStatus::Complete,
    };
    let fail = |mut report: BifurcationReport, stage: &'static str, e: Error| {
        report.status = ReportStatus::Incomplete {
            stage,
            error: e.to_string(),
        };
        Ok(report)
    };
    let spectral = &settings.spectral;

    let rho0 = match find_rho0(source, group, settings.bracket_tol, spectral) {
        Ok(v) => v,
        Err(e) => return fail(report, "rho0", e),
    };
    let rho0_hi = rho0.bracket.1;
    report.rho0 = Some(rho0);

    let (lo, hi) = rho_star_range(group, rho0_hi)?;
    let curve: Vec<Result<Tau1>> = ladder(lo, hi, settings.sweep)
        .par_iter()
        .map(|&rho| tau1_at(source, group, rho, settings.channel_budget, spectral))
        .collect();
    for t in curve {
        match t {
            Ok(t) => report.samples.push(t),
            Err(e) => return fail(report, "tau curve", e),
        }
    }

    let star = match find_rho_star(source, group, rho0_hi, settings.bracket_tol, spectral) {
        Ok(v) => v,
        Err(e) => return fail(report, "rho_star", e),
    };
    let (below, above) = star.bracket;
    report.rho_star = Some(star);
    let sides = rayon::join(
        || tau1_at(source, group, below, settings.channel_budget, spectral),
        || tau1_at(source, group, above, settings.channel_budget, spectral),
    );
    match sides {
        (Ok(b), Ok(a)) => {
            report.index_below = Some(b.negative_count());
            report.index_above = Some(a.negative_count());
        }
        (Err(e), _) | (_, Err(e)) => return fail(report, "index", e),
    }
    match ProblemParams::new(dimension, below).and_then(|p| source.solve(&p)) {
        Ok(sol) => report.c_rho_at_star = Some(sol.c_rho()),
        Err(e) => return fail(report, "c_rho", e),
    }
    Ok(report)
}
