//! Bessel functions of the first kind for integer and half-integer orders,
//! the radial Helmholtz profiles built from them, and their zeros.
//!
//! Evaluation uses the ascending series for small arguments and Miller's
//! backward recurrence otherwise. Integer orders are normalized with
//! `J_0 + 2 Σ J_2k = 1`; half-integer orders go through the spherical Bessel
//! functions and are normalized against the closed forms of `j_0` / `j_1`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::roots::{find_zero, scan_sign_changes};

/// Bessel order stored as `2α`, so integer and half-integer orders are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BesselOrder {
    twice_order: u32,
}

impl BesselOrder {
    pub const fn from_twice(twice_order: u32) -> Self {
        Self { twice_order }
    }

    pub const fn integer(n: u32) -> Self {
        Self { twice_order: 2 * n }
    }

    /// The order `l + 1/2`.
    pub const fn half_integer(l: u32) -> Self {
        Self {
            twice_order: 2 * l + 1,
        }
    }

    /// Order `N/2 - 1 + i` of the degree-`i` Helmholtz profile in dimension `N`.
    pub fn for_profile(dimension: u32, degree: u32) -> Self {
        Self {
            twice_order: dimension - 2 + 2 * degree,
        }
    }

    pub const fn twice_order(self) -> u32 {
        self.twice_order
    }

    pub fn alpha(self) -> f64 {
        self.twice_order as f64 / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.twice_order.is_multiple_of(2)
    }

    fn succ(self) -> Self {
        Self {
            twice_order: self.twice_order + 2,
        }
    }
}

/// First zeros of the radial Helmholtz profiles in one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroTable {
    pub dimension: u32,
    /// Second positive zero of `r^{1-N/2} J_{N/2-1}(r)`.
    pub r2: f64,
    /// `(i, s_i)` with `s_i` the first positive zero of the derivative of the
    /// degree-`i` profile.
    pub rows: Vec<(u32, f64)>,
}

/// `J_α(x)` for `x ≥ 0`.
pub fn bessel_j(order: BesselOrder, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            what: "Bessel argument must be finite and nonnegative",
            value: x,
        });
    }
    if x == 0.0 {
        return Ok(if order.twice_order == 0 { 1.0 } else { 0.0 });
    }
    if x <= 1.0 {
        return Ok(series(order, x));
    }
    Ok(if order.is_integer() {
        miller_integer(order.twice_order / 2, x)
    } else {
        let l = order.twice_order / 2;
        (2.0 * x / PI).sqrt() * miller_spherical(l, x)
    })
}

/// `d/dx J_α(x)` for `x > 0`.
pub fn bessel_j_prime(order: BesselOrder, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            what: "Bessel derivative needs a positive argument",
            value: x,
        });
    }
    // J'_α = (α/x) J_α - J_{α+1}
    let alpha = order.alpha();
    let j = if alpha == 0.0 {
        0.0
    } else {
        bessel_j(order, x)?
    };
    Ok(alpha / x * j - bessel_j(order.succ(), x)?)
}

/// The degree-`i` radial Helmholtz profile `f(x) = x^{1-N/2} J_{N/2-1+i}(x)`
/// and its derivative. `f` solves `-f'' - (N-1) f'/x + γ f/x² = f` with
/// `γ = i(i+N-2)`.
pub fn helmholtz_profile(dimension: u32, degree: u32, x: f64) -> Result<(f64, f64)> {
    check_dimension(dimension)?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            what: "profile argument must be positive",
            value: x,
        });
    }
    let order = BesselOrder::for_profile(dimension, degree);
    let j = bessel_j(order, x)?;
    let j_next = bessel_j(order.succ(), x)?;
    let scale = x.powf(1.0 - dimension as f64 / 2.0);
    // d/dx [x^{-β} J_{β+i}] = x^{-β} ((i/x) J_{β+i} - J_{β+i+1})
    Ok((scale * j, scale * (degree as f64 / x * j - j_next)))
}

/// `k`-th positive zero (1-based) of the degree-0 profile, i.e. of
/// `J_{N/2-1}`. Its square is the `k`-th radial Dirichlet eigenvalue of the
/// unit ball.
pub fn radial_profile_zero(dimension: u32, k: usize) -> Result<f64> {
    check_dimension(dimension)?;
    if k == 0 {
        return Err(Error::Domain {
            what: "zero index is 1-based",
            value: 0.0,
        });
    }
    let order = BesselOrder::for_profile(dimension, 0);
    let f = |x: f64| bessel_j(order, x).unwrap_or(f64::NAN);
    let mut end = 10.0;
    loop {
        let brackets = scan_sign_changes(f, SCAN_START, end, SCAN_STEP);
        if brackets.len() >= k {
            return find_zero(f, brackets[k - 1], ZERO_TOL);
        }
        end *= 2.0;
        if end > 1e4 {
            return Err(Error::Domain {
                what: "zero index too large",
                value: k as f64,
            });
        }
    }
}

/// `λ̄_k = (k-th zero of J_{N/2-1})²`: radial Dirichlet eigenvalues of `-Δ`
/// on the unit ball.
pub fn radial_dirichlet_eigenvalue(dimension: u32, k: usize) -> Result<f64> {
    Ok(radial_profile_zero(dimension, k)?.powi(2))
}

/// First positive zero of the derivative of the degree-`i` profile (`i ≥ 1`).
pub fn first_profile_derivative_zero(dimension: u32, degree: u32) -> Result<f64> {
    check_dimension(dimension)?;
    if degree == 0 {
        return Err(Error::Domain {
            what: "derivative zeros are tabulated for degree >= 1",
            value: 0.0,
        });
    }
    let fp = |x: f64| {
        helmholtz_profile(dimension, degree, x)
            .map(|(_, d)| d)
            .unwrap_or(f64::NAN)
    };
    let end = 2.0 * (degree as f64 + dimension as f64) + 10.0;
    let brackets = scan_sign_changes(fp, SCAN_START, end, SCAN_STEP);
    let first = *brackets.first().ok_or(Error::Bracket {
        lo: SCAN_START,
        hi: end,
        f_lo: fp(SCAN_START),
        f_hi: fp(end),
    })?;
    find_zero(fp, first, ZERO_TOL)
}

/// Recompute the zero table for dimension `N ∈ {2, 3, 4}` and degrees
/// `1..=i_max`.
pub fn derivative_zero_table(dimension: u32, i_max: u32) -> Result<ZeroTable> {
    if !(2..=4).contains(&dimension) {
        return Err(Error::Domain {
            what: "zero tables are defined for N in {2, 3, 4}",
            value: dimension as f64,
        });
    }
    if i_max == 0 {
        return Err(Error::Domain {
            what: "i_max must be at least 1",
            value: 0.0,
        });
    }
    let r2 = radial_profile_zero(dimension, 2)?;
    let rows = (1..=i_max)
        .map(|i| first_profile_derivative_zero(dimension, i).map(|z| (i, z)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ZeroTable {
        dimension,
        r2,
        rows,
    })
}

/// Six-significant-digit zero tables, used as golden values.
pub fn reference_zero_table(dimension: u32) -> Option<ZeroTable> {
    let (r2, rows): (f64, &[f64]) = match dimension {
        2 => (5.52008, &[1.84118, 3.05424, 4.20119, 5.31755, 6.41562]),
        3 => (2.0 * PI, &[2.08158, 3.34209, 4.51410, 5.64670, 6.75646]),
        4 => (
            7.01559,
            &[2.29991, 3.61126, 4.81128, 5.96235, 7.08548, 8.19039],
        ),
        _ => return None,
    };
    Some(ZeroTable {
        dimension,
        r2,
        rows: rows
            .iter()
            .enumerate()
            .map(|(k, &z)| (k as u32 + 1, z))
            .collect(),
    })
}

pub(crate) fn check_dimension(dimension: u32) -> Result<()> {
    if dimension < 2 {
        return Err(Error::Domain {
            what: "dimension must be at least 2",
            value: dimension as f64,
        });
    }
    Ok(())
}

const SCAN_START: f64 = 0.1;
const SCAN_STEP: f64 = 0.1;
const ZERO_TOL: f64 = 1e-12;
const RESCALE: f64 = 1e250;

fn gamma_of_order_plus_one(order: BesselOrder) -> f64 {
    // Γ(α + 1) for α = n or α = l + 1/2.
    let mut g = if order.is_integer() {
        1.0
    } else {
        PI.sqrt() / 2.0
    };
    let mut a = if order.is_integer() { 1.0 } else { 1.5 };
    while a < order.alpha() + 0.75 {
        g *= a;
        a += 1.0;
    }
    g
}

fn series(order: BesselOrder, x: f64) -> f64 {
    let alpha = order.alpha();
    let half = 0.5 * x;
    let q = -half * half;
    let mut term = half.powf(alpha) / gamma_of_order_plus_one(order);
    let mut sum = term;
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * (kf + alpha));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn start_order(n: u32, x: f64) -> u32 {
    let top = (n as f64).max(x);
    let m = (top + 25.0 + (40.0 * top).sqrt()) as u32 + n.min(1);
    m + m % 2 + 2
}

fn miller_integer(n: u32, x: f64) -> f64 {
    let m = start_order(n, x).max(n + 20);
    let m = m + m % 2;
    let mut j_above = 0.0;
    let mut j = 1e-30;
    let mut sum = 2.0 * j; // m is even
    let mut result = 0.0;
    for k in (1..=m).rev() {
        let j_below = 2.0 * k as f64 / x * j - j_above;
        j_above = j;
        j = j_below;
        let order = k - 1;
        if order == n {
            result = j;
        }
        if order > 0 && order % 2 == 0 {
            sum += 2.0 * j;
        }
        if j.abs() > RESCALE {
            j /= RESCALE;
            j_above /= RESCALE;
            sum /= RESCALE;
            result /= RESCALE;
        }
    }
    sum += j;
    result / sum
}

/// Spherical Bessel `j_l(x)` by backward recurrence.
fn miller_spherical(l: u32, x: f64) -> f64 {
    let m = start_order(l, x).max(l + 20);
    let mut j_above = 0.0;
    let mut j = 1e-30;
    let mut result = 0.0;
    let mut j1 = 0.0;
    for k in (1..=m).rev() {
        let j_below = (2 * k + 1) as f64 / x * j - j_above;
        j_above = j;
        j = j_below;
        let order = k - 1;
        if order == l {
            result = j;
        }
        if order == 1 {
            j1 = j;
        }
        if j.abs() > RESCALE {
            j /= RESCALE;
            j_above /= RESCALE;
            result /= RESCALE;
            j1 /= RESCALE;
        }
    }
    let exact0 = x.sin() / x;
    let exact1 = x.sin() / (x * x) - x.cos() / x;
    if exact0.abs() >= exact1.abs() {
        result * exact0 / j
    } else {
        result * exact1 / j1
    }
}
