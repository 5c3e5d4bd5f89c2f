//! Adaptive Dormand–Prince 5(4) integrator with per-step dense output.
//!
//! Every accepted step is handed to an observer as a [`Step`], which carries
//! both endpoint states and slopes and can therefore be interpolated with a
//! cubic Hermite polynomial. Event location (zero crossings) is done by the
//! callers on top of that interpolant.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Difference between the 5th- and 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// One accepted integration step `[t0, t1]`.
#[derive(Debug, Clone, Copy)]
pub struct Step<const D: usize> {
    pub t0: f64,
    pub t1: f64,
    pub y0: [f64; D],
    pub y1: [f64; D],
    pub f0: [f64; D],
    pub f1: [f64; D],
}

impl<const D: usize> Step<D> {
    /// Cubic Hermite interpolant of the state at `t ∈ [t0, t1]`.
    pub fn interpolate(&self, t: f64) -> [f64; D] {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        std::array::from_fn(|i| {
            h00 * self.y0[i] + h10 * h * self.f0[i] + h01 * self.y1[i] + h11 * h * self.f1[i]
        })
    }
}

/// What the observer wants the integrator to do after a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

/// Final state of an integration.
#[derive(Debug, Clone, Copy)]
pub struct Outcome<const D: usize> {
    pub t: f64,
    pub y: [f64; D],
    /// True when the observer requested the stop before `t_end`.
    pub stopped: bool,
    pub steps: usize,
    /// Last accepted step size; a good initial guess for a continuation.
    pub last_h: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub h_init: Option<f64>,
    pub max_steps: usize,
}

impl Dopri5 {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            h_max: f64::INFINITY,
            h_init: None,
            max_steps: 2_000_000,
        }
    }

    pub fn with_h_max(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        self
    }

    pub fn with_h_init(mut self, h: f64) -> Self {
        self.h_init = Some(h);
        self
    }

    /// Integrate from `(t0, y0)` to `t_end` (forward or backward).
    pub fn integrate<const D: usize, F>(
        &self,
        rhs: F,
        t0: f64,
        y0: [f64; D],
        t_end: f64,
    ) -> Result<Outcome<D>>
    where
        F: FnMut(f64, &[f64; D]) -> [f64; D],
    {
        self.integrate_observed(rhs, t0, y0, t_end, |_| Control::Continue)
    }

    /// Integrate and report every accepted step to `observer`.
    pub fn integrate_observed<const D: usize, F, O>(
        &self,
        mut rhs: F,
        t0: f64,
        y0: [f64; D],
        t_end: f64,
        mut observer: O,
    ) -> Result<Outcome<D>>
    where
        F: FnMut(f64, &[f64; D]) -> [f64; D],
        O: FnMut(&Step<D>) -> Control,
    {
        let span = t_end - t0;
        if span == 0.0 {
            return Ok(Outcome {
                t: t0,
                y: y0,
                stopped: false,
                steps: 0,
                last_h: 0.0,
            });
        }
        let dir = span.signum();
        let mut t = t0;
        let mut y = y0;
        let mut k1 = rhs(t, &y);
        let mut h = match self.h_init {
            Some(h) => h.abs().min(span.abs()),
            None => self.initial_step(&mut rhs, t, &y, &k1, span.abs()),
        }
        .min(self.h_max);
        let mut steps = 0usize;

        loop {
            if steps >= self.max_steps {
                return Err(Error::Integrator {
                    t,
                    reason: "maximum number of steps exceeded",
                });
            }
            let remaining = (t_end - t) * dir;
            let last = h >= remaining * (1.0 - 1e-12);
            let h_step = if last { remaining } else { h };
            let hs = dir * h_step;

            let k2 = rhs(t + C2 * hs, &combine(&y, hs, &[(A21, &k1)]));
            let k3 = rhs(t + C3 * hs, &combine(&y, hs, &[(A31, &k1), (A32, &k2)]));
            let k4 = rhs(
                t + C4 * hs,
                &combine(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
            );
            let k5 = rhs(
                t + C5 * hs,
                &combine(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = rhs(
                t + hs,
                &combine(
                    &y,
                    hs,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                ),
            );
            let y_new = combine(
                &y,
                hs,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            let t_new = if last { t_end } else { t + hs };
            let k7 = rhs(t_new, &y_new);

            let mut err_sq = 0.0;
            for i in 0..D {
                let e = hs
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                err_sq += (e / sc) * (e / sc);
            }
            let err = (err_sq / D as f64).sqrt();
            if !err.is_finite() {
                h *= 0.1;
                if h < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::Integrator {
                        t,
                        reason: "non-finite state",
                    });
                }
                continue;
            }

            if err <= 1.0 {
                steps += 1;
                let step = Step {
                    t0: t,
                    t1: t_new,
                    y0: y,
                    y1: y_new,
                    f0: k1,
                    f1: k7,
                };
                t = t_new;
                y = y_new;
                k1 = k7;
                if observer(&step) == Control::Stop {
                    return Ok(Outcome {
                        t,
                        y,
                        stopped: true,
                        steps,
                        last_h: h_step,
                    });
                }
                if last {
                    return Ok(Outcome {
                        t,
                        y,
                        stopped: false,
                        steps,
                        last_h: h_step,
                    });
                }
                let fac = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                h = (h_step * fac).min(self.h_max);
            } else {
                let fac = (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
                h = h_step * fac;
                if h < 1e-15 * t.abs().max(1e-300) {
                    return Err(Error::Integrator {
                        t,
                        reason: "step size underflow",
                    });
                }
            }
        }
    }

    fn initial_step<const D: usize, F>(
        &self,
        rhs: &mut F,
        t: f64,
        y: &[f64; D],
        f0: &[f64; D],
        span: f64,
    ) -> f64
    where
        F: FnMut(f64, &[f64; D]) -> [f64; D],
    {
        // Hairer–Wanner heuristic.
        let mut d0 = 0.0;
        let mut d1 = 0.0;
        for i in 0..D {
            let sc = self.atol + self.rtol * y[i].abs();
            d0 += (y[i] / sc).powi(2);
            d1 += (f0[i] / sc).powi(2);
        }
        let d0 = (d0 / D as f64).sqrt();
        let d1 = (d1 / D as f64).sqrt();
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        }
        .min(span);
        let dir = 1.0_f64.copysign(span);
        let y1: [f64; D] = std::array::from_fn(|i| y[i] + dir * h0 * f0[i]);
        let f1 = rhs(t + dir * h0, &y1);
        let mut d2 = 0.0;
        for i in 0..D {
            let sc = self.atol + self.rtol * y[i].abs();
            d2 += ((f1[i] - f0[i]) / sc).powi(2);
        }
        let d2 = (d2 / D as f64).sqrt() / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(span)
    }
}

fn combine<const D: usize>(y: &[f64; D], h: f64, terms: &[(f64, &[f64; D])]) -> [f64; D] {
    std::array::from_fn(|i| {
        let mut acc = 0.0;
        for (a, k) in terms {
            acc += a * k[i];
        }
        y[i] + h * acc
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let out = Dopri5::new(1e-12, 1e-14)
            .integrate(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 2.0)
            .unwrap();
        assert!((out.y[0] - 2f64.exp()).abs() < 1e-10);
        assert_eq!(out.t, 2.0);
    }

    #[test]
    fn harmonic_oscillator_backward() {
        let out = Dopri5::new(1e-12, 1e-14)
            .integrate(
                |_, y: &[f64; 2]| [y[1], -y[0]],
                3.0,
                [3f64.sin(), 3f64.cos()],
                0.5,
            )
            .unwrap();
        assert!((out.y[0] - 0.5f64.sin()).abs() < 1e-10);
        assert!((out.y[1] - 0.5f64.cos()).abs() < 1e-10);
    }

    #[test]
    fn dense_output_tracks_solution() {
        let mut worst: f64 = 0.0;
        Dopri5::new(1e-11, 1e-13)
            .integrate_observed(
                |_, y: &[f64; 2]| [y[1], -y[0]],
                0.0,
                [0.0, 1.0],
                10.0,
                |step| {
                    for k in 1..4 {
                        let t = step.t0 + (step.t1 - step.t0) * k as f64 / 4.0;
                        worst = worst.max((step.interpolate(t)[0] - t.sin()).abs());
                    }
                    Control::Continue
                },
            )
            .unwrap();
        assert!(worst < 1e-8, "interpolation error {worst}");
    }

    #[test]
    fn observer_stop_is_honoured() {
        let out = Dopri5::new(1e-10, 1e-12)
            .integrate_observed(
                |_, y: &[f64; 1]| [y[0]],
                0.0,
                [1.0],
                10.0,
                |step| {
                    if step.y1[0] > 5.0 {
                        Control::Stop
                    } else {
                        Control::Continue
                    }
                },
            )
            .unwrap();
        assert!(out.stopped);
        assert!(out.t < 10.0 && out.y[0] > 5.0);
    }
}
