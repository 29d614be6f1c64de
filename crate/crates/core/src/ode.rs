//! Dormand–Prince 5(4) integrator for complex-valued linear ODE systems.
//!
//! Steps are clamped so that every requested output time is hit exactly;
//! no interpolation is involved.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper bound on accepted plus rejected steps for one integration.
    pub max_steps: usize,
    /// Optional cap on the step size (s); zero means none.
    pub max_step: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 1e-13, max_steps: 50_000_000, max_step: 0.0 }
    }
}

impl IntegratorOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::param("rel_tol", format!("must lie in (0, 1), got {}", self.rel_tol)));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::param("abs_tol", format!("must be positive, got {}", self.abs_tol)));
        }
        if self.max_steps == 0 {
            return Err(Error::param("max_steps", "must be positive"));
        }
        if !(self.max_step >= 0.0 && self.max_step.is_finite()) {
            return Err(Error::param("max_step", "must be non-negative and finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evaluations: usize,
}

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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates y' = f(t, y) from `t0` through each time in `outputs`, calling
/// `observe(k, t_k, y)` at every one. `outputs` must be non-decreasing and ≥ t0;
/// samples equal to t0 are reported without stepping.
pub fn integrate<F, O>(mut rhs: F, t0: f64, y: &mut [Complex64], outputs: &[f64], opts: &IntegratorOptions, mut observe: O) -> Result<StepStats>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
    O: FnMut(usize, f64, &[Complex64]) -> Result<()>,
{
    opts.validate()?;
    let n = y.len();
    let mut stats = StepStats::default();
    let mut k1 = vec![Complex64::default(); n];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut k5 = k1.clone();
    let mut k6 = k1.clone();
    let mut k7 = k1.clone();
    let mut stage = k1.clone();
    let mut y_new = k1.clone();

    let mut t = t0;
    rhs(t, y, &mut k1);
    stats.rhs_evaluations += 1;
    let mut h = initial_step(&mut rhs, t, y, &k1, opts, &mut stats);
    let mut steps = 0usize;

    for (k, &target) in outputs.iter().enumerate() {
        if !(target >= t) {
            return Err(Error::InvalidTimeGrid);
        }
        while t < target {
            if steps >= opts.max_steps {
                return Err(Error::TooManySteps { t, max_steps: opts.max_steps });
            }
            steps += 1;
            if opts.max_step > 0.0 {
                h = h.min(opts.max_step);
            }
            let remaining = target - t;
            let last = h >= remaining;
            // Avoid leaving a sliver shorter than a hundredth of a step.
            let h_try = if last || remaining < 1.01 * h { remaining } else { h };
            let min_step = 16.0 * f64::EPSILON * t.abs().max(target.abs());
            if h_try < min_step && !last {
                return Err(Error::StepSizeUnderflow { t, h: h_try });
            }

            combine(&mut stage, y, h_try, &[(A21, &k1)]);
            rhs(t + C2 * h_try, &stage, &mut k2);
            combine(&mut stage, y, h_try, &[(A31, &k1), (A32, &k2)]);
            rhs(t + C3 * h_try, &stage, &mut k3);
            combine(&mut stage, y, h_try, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
            rhs(t + C4 * h_try, &stage, &mut k4);
            combine(&mut stage, y, h_try, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
            rhs(t + C5 * h_try, &stage, &mut k5);
            combine(&mut stage, y, h_try, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
            rhs(t + h_try, &stage, &mut k6);
            combine(&mut y_new, y, h_try, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
            rhs(t + h_try, &y_new, &mut k7);
            stats.rhs_evaluations += 6;

            let mut acc = 0.0;
            for i in 0..n {
                let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h_try;
                let scale = opts.abs_tol + opts.rel_tol * y[i].norm().max(y_new[i].norm());
                acc += e.norm_sqr() / (scale * scale);
            }
            let err = (acc / n as f64).sqrt();
            if !err.is_finite() {
                return Err(Error::StepSizeUnderflow { t, h: h_try });
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                stats.accepted += 1;
                t = if h_try == remaining { target } else { t + h_try };
                y.copy_from_slice(&y_new);
                std::mem::swap(&mut k1, &mut k7);
                // Do not let a short clamped step shrink the next proposal.
                h = if h_try == remaining && h_try < h { h } else { h_try * factor };
            } else {
                stats.rejected += 1;
                h = h_try * factor.min(1.0);
            }
        }
        observe(k, target, y)?;
    }
    Ok(stats)
}

fn combine(out: &mut [Complex64], y: &[Complex64], h: f64, terms: &[(f64, &Vec<Complex64>)]) {
    out.copy_from_slice(y);
    for &(a, k) in terms {
        let ha = h * a;
        for (o, ki) in out.iter_mut().zip(k.iter()) {
            *o += *ki * ha;
        }
    }
}

// Starting step from the local scale of y and y' (Hairer, Nørsett & Wanner).
fn initial_step<F>(rhs: &mut F, t: f64, y: &[Complex64], f0: &[Complex64], opts: &IntegratorOptions, stats: &mut StepStats) -> f64
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let n = y.len() as f64;
    let sc = |v: Complex64| opts.abs_tol + opts.rel_tol * v.norm();
    let d0 = (y.iter().map(|&v| (v.norm() / sc(v)).powi(2)).sum::<f64>() / n).sqrt();
    let d1 = (y.iter().zip(f0).map(|(&v, f)| (f.norm() / sc(v)).powi(2)).sum::<f64>() / n).sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1: Vec<Complex64> = y.iter().zip(f0).map(|(&v, &f)| v + f * h0).collect();
    let mut f1 = vec![Complex64::default(); y.len()];
    rhs(t + h0, &y1, &mut f1);
    stats.rhs_evaluations += 1;
    let d2 = (y.iter().zip(f0.iter().zip(&f1)).map(|(&v, (a, b))| ((b - a).norm() / sc(v)).powi(2)).sum::<f64>() / n).sqrt() / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    (100.0 * h0).min(h1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_and_rotation() {
        let lambda = Complex64::new(-0.3, 2.0);
        let mut y = vec![Complex64::new(1.0, 0.0)];
        let outputs: Vec<f64> = (0..=20).map(|k| 0.5 * k as f64).collect();
        let mut worst = 0.0f64;
        integrate(
            |_, y, dy| dy[0] = lambda * y[0],
            0.0,
            &mut y,
            &outputs,
            &IntegratorOptions::default(),
            |_, t, y| {
                worst = worst.max((y[0] - (lambda * t).exp()).norm());
                Ok(())
            },
        )
        .unwrap();
        assert!(worst < 1e-8, "{worst}");
    }

    #[test]
    fn outputs_hit_exactly_and_zero_time_is_reported() {
        let mut seen = Vec::new();
        let mut y = vec![Complex64::new(1.0, 0.0)];
        integrate(
            |_, _, dy| dy[0] = Complex64::new(1.0, 0.0),
            0.0,
            &mut y,
            &[0.0, 0.1, 0.3],
            &IntegratorOptions::default(),
            |_, t, y| {
                seen.push((t, y[0].re));
                Ok(())
            },
        )
        .unwrap();
        assert_eq!(seen[0], (0.0, 1.0));
        assert_eq!(seen[2].0, 0.3);
        assert!((seen[2].1 - 1.3).abs() < 1e-14);
    }

    #[test]
    fn decreasing_grid_rejected() {
        let mut y = vec![Complex64::new(1.0, 0.0)];
        let r = integrate(|_, _, _| {}, 0.0, &mut y, &[1.0, 0.5], &IntegratorOptions::default(), |_, _, _| Ok(()));
        assert_eq!(r, Err(Error::InvalidTimeGrid));
    }

    #[test]
    fn step_budget_is_enforced() {
        let mut y = vec![Complex64::new(1.0, 0.0)];
        let opts = IntegratorOptions { max_steps: 3, ..Default::default() };
        let r = integrate(|_, y, dy| dy[0] = Complex64::new(0.0, 50.0) * y[0], 0.0, &mut y, &[100.0], &opts, |_, _, _| Ok(()));
        assert!(matches!(r, Err(Error::TooManySteps { .. })));
    }
}
