//! Stray dipole field of the YIG sphere and the flux it threads through the SQUID loop.
//!
//! The loop lies in the yz plane, spans y ∈ [−l, l] and z ∈ [0, 2l], and the sphere
//! sits at (R_K, 0, −d). Only the x component of the magnon moment contributes.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::constants::{FLUX_QUANTUM, GYROMAGNETIC_RATIO, HBAR, MU_0, YIG_SPIN_DENSITY};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_2d, QuadratureOptions};

/// Above this value of π|Φ_YIG|/Φ₀ the small-phase expansion of the couplings breaks.
pub const SMALL_PHASE_WARN: f64 = 0.05;

/// Required relative accuracy of the flux integral.
pub const FLUX_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceGeometry {
    /// Sphere radius R_K (m).
    pub radius: f64,
    /// Half side l of the square loop (m).
    pub half_side: f64,
    /// Vertical offset d of the sphere below the loop edge (m).
    pub offset: f64,
    /// Spin density ρ_s (m⁻³).
    pub spin_density: f64,
}

impl DeviceGeometry {
    /// l = R_K, d = 0 and the YIG spin density.
    pub fn with_radius(radius: f64) -> Self {
        Self { radius, half_side: radius, offset: 0.0, spin_density: YIG_SPIN_DENSITY }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::param(name, format!("must be positive and finite, got {v}")))
            }
        };
        positive("radius", self.radius)?;
        positive("half_side", self.half_side)?;
        positive("spin_density", self.spin_density)?;
        if !(self.offset.is_finite() && self.offset >= 0.0) {
            return Err(Error::param("offset", format!("must be non-negative and finite, got {}", self.offset)));
        }
        Ok(())
    }

    /// N_S = ρ_s · 4πR_K³/3.
    pub fn spin_count(&self) -> f64 {
        self.spin_density * 4.0 * std::f64::consts::PI * self.radius.powi(3) / 3.0
    }

    /// ħγ₀√(N_S/2): zero-point magnitude of the transverse moment (A·m²).
    pub fn moment_scale(&self) -> f64 {
        HBAR * GYROMAGNETIC_RATIO * (self.spin_count() / 2.0).sqrt()
    }
}

impl Default for DeviceGeometry {
    fn default() -> Self {
        Self::with_radius(30e-6)
    }
}

/// B(r) = μ₀/(4πr³) [3r(µ·r)/r² − µ].
pub fn dipole_field(moment: &Vector3<f64>, r: &Vector3<f64>) -> Result<Vector3<f64>> {
    let r2 = r.norm_squared();
    if r2 == 0.0 {
        return Err(Error::ZeroPosition);
    }
    let r3 = r2 * r2.sqrt();
    let prefactor = MU_0 / (4.0 * std::f64::consts::PI * r3);
    Ok((r * (3.0 * moment.dot(r) / r2) - moment) * prefactor)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FluxResult {
    /// Φ_YIG (Wb).
    pub phi: f64,
    /// Quadrature error estimate on Φ_YIG (Wb).
    pub error: f64,
    pub evaluations: usize,
    pub warnings: Vec<String>,
}

impl FluxResult {
    pub fn flux_ratio(&self) -> f64 {
        self.phi / FLUX_QUANTUM
    }

    pub fn relative_error(&self) -> f64 {
        self.error / self.phi.abs()
    }
}

// Dimensionless integrand with lengths in units of R_K.
fn kernel(u: f64, v: f64) -> f64 {
    let s = 1.0 + u * u + v * v;
    let inv = 1.0 / s;
    let inv_r3 = inv * inv.sqrt();
    inv_r3 * (3.0 * inv - 1.0)
}

/// Φ_YIG at the default accuracy.
pub fn phi_yig(geom: &DeviceGeometry) -> Result<FluxResult> {
    phi_yig_with(geom, &QuadratureOptions { rel_tol: 1e-10, ..QuadratureOptions::default() })
}

pub fn phi_yig_with(geom: &DeviceGeometry, opts: &QuadratureOptions) -> Result<FluxResult> {
    geom.validate()?;
    let l = geom.half_side / geom.radius;
    let d = geom.offset / geom.radius;
    let est = integrate_2d(kernel, -l, l, |_| d, |_| d + 2.0 * l, opts);
    let required = opts.rel_tol.max(FLUX_REL_TOL);
    if !est.value.is_finite() || est.relative_error() > required {
        return Err(Error::QuadratureNonConvergent { achieved: est.relative_error(), requested: required });
    }
    let scale = MU_0 * geom.moment_scale() / (4.0 * std::f64::consts::PI * geom.radius);
    let phi = scale * est.value;
    let mut warnings = Vec::new();
    let phase = std::f64::consts::PI * phi.abs() / FLUX_QUANTUM;
    if phase > SMALL_PHASE_WARN {
        let msg = format!("π|Φ_YIG|/Φ₀ = {phase:.3e} exceeds {SMALL_PHASE_WARN}; linearized couplings are unreliable");
        log::warn!("{msg}");
        warnings.push(msg);
    }
    Ok(FluxResult { phi, error: scale.abs() * est.error, evaluations: est.evaluations, warnings })
}

/// ∬ 3R_K·y/(R_K²+y²+z̃²)^{5/2} over the loop, relative to the retained integral.
/// Vanishes by the y ↦ −y symmetry of the loop.
pub fn odd_term_ratio(geom: &DeviceGeometry) -> Result<f64> {
    geom.validate()?;
    let l = geom.half_side / geom.radius;
    let d = geom.offset / geom.radius;
    let opts = QuadratureOptions { rel_tol: 1e-12, abs_tol: 1e-300, ..QuadratureOptions::default() };
    let odd = |u: f64, v: f64| {
        let s = 1.0 + u * u + v * v;
        3.0 * u / (s * s * s.sqrt())
    };
    // Integrate over y in the outer loop so both halves are sampled at mirrored nodes.
    let odd_value = integrate_2d(|v, u| odd(u, v), d, d + 2.0 * l, |_| -l, |_| l, &opts).value;
    let even = integrate_2d(kernel, -l, l, |_| d, |_| d + 2.0 * l, &opts).value;
    Ok((odd_value / even).abs())
}

/// Scans d on a uniform grid over [0, d_max] and returns the offset maximizing |Φ_YIG|.
pub fn optimal_offset(geom: &DeviceGeometry, d_max: f64, samples: usize) -> Result<(f64, FluxResult)> {
    if samples < 2 || !(d_max > 0.0) {
        return Err(Error::param("samples", "need at least two samples over a positive range"));
    }
    let mut best: Option<(f64, FluxResult)> = None;
    for i in 0..samples {
        let d = d_max * i as f64 / (samples - 1) as f64;
        let r = phi_yig(&DeviceGeometry { offset: d, ..*geom })?;
        if best.as_ref().is_none_or(|(_, b)| r.phi.abs() > b.phi.abs()) {
            best = Some((d, r));
        }
    }
    Ok(best.expect("samples ≥ 2"))
}
