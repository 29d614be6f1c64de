//! Closed-form collapse and revival under the EffSum interaction from |α, ↑, g⟩.
//!
//! Each Fock component n evolves in the two-level block {|n,↑,g⟩, |n+1,↓,e⟩}
//! at Rabi frequency Ω_n = G√(n+1):
//!
//! |ψ(t)⟩ = Σ_n c_n [cos(Ω_n t)|n,↑,g⟩ − i sin(Ω_n t)|n+1,↓,e⟩].
//!
//! With p_n = |c_n|², X = Σ p_n cos 2Ω_n t and
//! Y = Σ_{n≥1} |c_{n−1} c_n| cos(Ω_n t) sin(Ω_{n−1} t), the ASQ–SCQ reduction
//! has the single coherence ∓iY between |↑g⟩ and |↓e⟩ (the phase of α drops out).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::coherent_amplitudes;

/// Collapse window in units of Gt used for reports and acceptance checks.
pub const COLLAPSE_WINDOW: (f64, f64) = (5.0, 20.0);
/// Part of the collapse window where |X| < 0.04 holds for α = 4. The revival
/// already lifts |X| to about 0.11 by Gt = 20.
pub const FLAT_WINDOW: (f64, f64) = (5.0, 18.0);
/// Allowed Poisson weight beyond the last retained term.
pub const POISSON_TAIL: f64 = 1e-12;
/// Slack tolerated in δ² ≤ 1 before the series is declared unphysical.
pub const DELTA_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Truncation {
    /// Poisson weights for n < n_terms.
    Poisson { n_terms: usize },
    /// Mirrors a numerical run with magnon cutoff N: weights renormalized over
    /// n < N and the top level |N−1, ↑, g⟩ frozen, since its partner |N, ↓, e⟩
    /// is outside the truncated space.
    FockMatched { cutoff: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapseRevivalParams {
    pub alpha: Complex64,
    /// Three-body coupling G (rad/s).
    pub g: f64,
    pub truncation: Truncation,
}

impl CollapseRevivalParams {
    /// Poisson truncation at n̄ + 10√n̄ (at least 10 terms), extended until the tail is below 1e-12.
    pub fn poisson(alpha: Complex64, g: f64) -> Result<Self> {
        let nbar = alpha.norm_sqr();
        let mut n_terms = ((nbar + 10.0 * nbar.sqrt()).ceil() as usize).max(10);
        while poisson_tail(nbar, n_terms) > POISSON_TAIL {
            n_terms += 1;
        }
        let p = Self { alpha, g, truncation: Truncation::Poisson { n_terms } };
        p.validate()?;
        Ok(p)
    }

    pub fn fock_matched(alpha: Complex64, g: f64, cutoff: usize) -> Result<Self> {
        let p = Self { alpha, g, truncation: Truncation::FockMatched { cutoff } };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.re.is_finite() && self.alpha.im.is_finite()) {
            return Err(Error::param("alpha", "must be finite"));
        }
        if !(self.g.is_finite() && self.g > 0.0) {
            return Err(Error::param("g", format!("must be positive, got {}", self.g)));
        }
        match self.truncation {
            Truncation::Poisson { n_terms } => {
                let tail = poisson_tail(self.alpha.norm_sqr(), n_terms);
                if tail > POISSON_TAIL {
                    return Err(Error::param("n_terms", format!("Poisson tail {tail:e} exceeds {POISSON_TAIL:e}")));
                }
            }
            Truncation::FockMatched { cutoff } if cutoff < 2 => {
                return Err(Error::param("cutoff", "must be at least 2"));
            }
            Truncation::FockMatched { .. } => {}
        }
        Ok(())
    }

    fn terms(&self) -> Series {
        let (len, frozen_top) = match self.truncation {
            Truncation::Poisson { n_terms } => (n_terms, false),
            Truncation::FockMatched { cutoff } => (cutoff, true),
        };
        let amps: Vec<f64> = coherent_amplitudes(Complex64::new(self.alpha.norm(), 0.0), len).iter().map(|c| c.re).collect();
        let rabi = (0..len).map(|n| if frozen_top && n == len - 1 { 0.0 } else { self.g * ((n + 1) as f64).sqrt() }).collect();
        Series { amps, rabi }
    }
}

// Σ_{n ≥ k} e^{−λ}λⁿ/n!, summed directly to avoid cancellation in 1 − CDF.
fn poisson_tail(lambda: f64, k: usize) -> f64 {
    if lambda == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let log_term = |n: usize| -lambda + n as f64 * lambda.ln() - ln_factorial(n);
    let mut sum = 0.0;
    let mut n = k;
    loop {
        let term = log_term(n).exp();
        sum += term;
        if n as f64 > lambda && term < 1e-30 * sum.max(1e-300) {
            break;
        }
        n += 1;
        if n > k + 100_000 {
            break;
        }
    }
    sum
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

struct Series {
    amps: Vec<f64>,
    rabi: Vec<f64>,
}

/// X(t) = Σ p_n cos 2Ω_n t.
pub fn series_x(t: f64, p: &CollapseRevivalParams) -> f64 {
    let s = p.terms();
    s.amps.iter().zip(&s.rabi).map(|(a, w)| a * a * (2.0 * w * t).cos()).sum()
}

/// Y(t) = Σ_{n≥1} |c_{n−1} c_n| cos(Ω_n t) sin(Ω_{n−1} t).
pub fn series_y(t: f64, p: &CollapseRevivalParams) -> f64 {
    let s = p.terms();
    (1..s.amps.len()).map(|n| s.amps[n - 1] * s.amps[n] * (s.rabi[n] * t).cos() * (s.rabi[n - 1] * t).sin()).sum()
}

/// (P_↑, P_e) = ((1 + X)/2, (1 − X)/2).
pub fn analytic_populations(t: f64, p: &CollapseRevivalParams) -> (f64, f64) {
    let x = series_x(t, p);
    (0.5 + 0.5 * x, 0.5 - 0.5 * x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticEntanglement {
    pub x: f64,
    pub y: f64,
    /// δ = √(X² + 4Y²); eigenvalues of ρ_AS are (1 ± δ)/2.
    pub delta: f64,
    /// Entropy of ρ_M, equal to that of ρ_AS (bits).
    pub s_m_as: f64,
    /// Entropy of ρ_A (bits).
    pub s_a_ms: f64,
    /// Concurrence of ρ_AS, 2|Y|.
    pub c_a_s: f64,
}

fn binary_entropy(p: f64) -> f64 {
    [p, 1.0 - p].iter().filter(|&&x| x > 1e-12).map(|&x| -x * x.log2()).sum()
}

pub fn analytic_entanglement(t: f64, p: &CollapseRevivalParams) -> Result<AnalyticEntanglement> {
    let x = series_x(t, p);
    let y = series_y(t, p);
    let delta_sq = x * x + 4.0 * y * y;
    if delta_sq > 1.0 + DELTA_SLACK {
        return Err(Error::UnphysicalSeries { t, delta_sq });
    }
    let delta = delta_sq.min(1.0).sqrt();
    Ok(AnalyticEntanglement {
        x,
        y,
        delta,
        s_m_as: binary_entropy(0.5 * (1.0 + delta)),
        s_a_ms: binary_entropy((0.5 + 0.5 * x).clamp(0.0, 1.0)),
        c_a_s: (2.0 * y.abs()).min(1.0),
    })
}
