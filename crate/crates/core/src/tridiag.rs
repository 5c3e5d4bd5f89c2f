//! Sturm-sequence bisection for symmetric tridiagonal eigenvalues.

/// Number of eigenvalues strictly below `lambda`.
pub fn sturm_count(diag: &[f64], off: &[f64], lambda: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        q = if i == 0 {
            diag[0] - lambda
        } else {
            // Zero pivot: nudge it so the recurrence stays finite.
            let pivot = if q == 0.0 {
                f64::MIN_POSITIVE.sqrt()
            } else {
                q
            };
            diag[i] - lambda - off[i - 1] * off[i - 1] / pivot
        };
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin interval containing the whole spectrum.
pub fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    (lo, hi)
}

/// The `k`-th smallest eigenvalue (0-based).
pub fn kth_eigenvalue(diag: &[f64], off: &[f64], k: usize) -> f64 {
    let (mut lo, mut hi) = gershgorin(diag, off);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        // [[1, -1], [-1, 3]] has eigenvalues 2 ± sqrt(2).
        let d = [1.0, 3.0];
        let e = [-1.0];
        assert_eq!(sturm_count(&d, &e, 0.0), 0);
        assert_eq!(sturm_count(&d, &e, 1.0), 1);
        assert_eq!(sturm_count(&d, &e, 4.0), 2);
        assert!((kth_eigenvalue(&d, &e, 0) - (2.0 - 2f64.sqrt())).abs() < 1e-14);
        assert!((kth_eigenvalue(&d, &e, 1) - (2.0 + 2f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn discrete_laplacian() {
        let n = 100;
        let d = vec![2.0; n];
        let e = vec![-1.0; n - 1];
        for k in 0..5 {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((kth_eigenvalue(&d, &e, k) - exact).abs() < 1e-13);
        }
    }
}
