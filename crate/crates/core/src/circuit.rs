//! Circuit parameters to mode frequencies and coupling strengths.
//!
//! Every energy is stored as an angular frequency (E/ħ, rad/s). The external
//! flux enters only through the ratio Φ_ext/Φ₀, and the SQUID phase is
//! φ_ext = π Φ_ext/Φ₀. Trigonometric functions of φ_ext are evaluated with
//! exact argument reduction so that, e.g., sin 2φ_ext vanishes exactly at
//! half-integer flux ratios.

use serde::{Deserialize, Serialize};

use crate::constants::{ASQ_LANDE_FACTOR, BOHR_MAGNETON, FLUX_QUANTUM, GYROMAGNETIC_RATIO, HBAR, MU_0};
use crate::error::{Error, Result};

/// Below this value of E_J^sum·S/E_C the two-level transmon picture is rejected.
pub const TRANSMON_RATIO_ERROR: f64 = 5.0;
/// Below this value of E_J^sum·S/E_C a warning is emitted.
pub const TRANSMON_RATIO_WARN: f64 = 20.0;
/// Minimum ħω_a/E_SO for the two-level ASQ reduction.
pub const ZEEMAN_DOMINANCE_WARN: f64 = 10.0;

/// sin(πx) with exact zeros at integers and exact ±1 at half-integers.
pub fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    if r == 0.0 || r.abs() == 1.0 {
        0.0
    } else if r == 0.5 {
        1.0
    } else if r == -0.5 {
        -1.0
    } else {
        (std::f64::consts::PI * r).sin()
    }
}

/// cos(πx) with exact zeros at half-integers.
pub fn cos_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    if r.abs() == 0.5 {
        0.0
    } else if r == 0.0 {
        1.0
    } else if r.abs() == 1.0 {
        -1.0
    } else {
        (std::f64::consts::PI * r).cos()
    }
}

/// How the ASQ transition frequency is obtained from the Zeeman energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum AsqFrequency {
    /// ω_a = E_Z/ħ.
    #[default]
    LeadingOrder,
    /// Splitting of the full 2×2 junction Hamiltonian at junction phase φ₁.
    Exact { junction_phase: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    /// Spin-orbit energy E_SO/ħ, rad/s.
    pub e_so: f64,
    /// Total Josephson energy (E_J + E_0)/ħ, rad/s.
    pub e_j_sum: f64,
    /// Junction asymmetry a = (E_J − E_0)/E_J^sum.
    pub asymmetry: f64,
    /// Charging energy E_C/ħ, rad/s.
    pub e_c: f64,
    /// Φ_ext/Φ₀.
    pub phi_ext_ratio: f64,
    /// Zeeman field on the junction, T.
    pub b_z: f64,
    /// Bias field on the YIG sphere, T.
    pub b_k: f64,
    pub g_lande: f64,
    /// Angle between Zeeman field and spin polarization, rad.
    pub theta: f64,
    #[serde(default)]
    pub asq_frequency: AsqFrequency,
}

impl Default for CircuitParams {
    /// E_SO/h = 600 MHz, E_J^sum/h = 10 GHz, E_C/h = 200 MHz, a = 0.3,
    /// Φ_ext/Φ₀ = 0.35, ω_a/2π ≈ 10 GHz and ω_m = ω_a − ω_s.
    fn default() -> Self {
        let two_pi = 2.0 * std::f64::consts::PI;
        let mut params = Self {
            e_so: two_pi * 600e6,
            e_j_sum: two_pi * 10e9,
            asymmetry: 0.3,
            e_c: two_pi * 200e6,
            phi_ext_ratio: 0.35,
            b_z: 0.0,
            b_k: 0.0,
            g_lande: ASQ_LANDE_FACTOR,
            theta: std::f64::consts::FRAC_PI_2,
            asq_frequency: AsqFrequency::LeadingOrder,
        };
        params.b_z = zeeman_field_for(two_pi * 10e9, params.g_lande);
        let omega_s = qubit_frequency(&params).unwrap_or(0.0);
        params.b_k = (two_pi * 10e9 - omega_s) / GYROMAGNETIC_RATIO;
        params
    }
}

impl CircuitParams {
    /// Checks the parameter invariants. Returns human-readable warnings for
    /// soft violations and an error for hard ones.
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        for (name, value) in [("e_so", self.e_so), ("e_j_sum", self.e_j_sum), ("e_c", self.e_c)] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::param(name, format!("must be positive and finite, got {value}")));
            }
        }
        if !(self.asymmetry.abs() < 1.0) {
            return Err(Error::param("asymmetry", format!("|a| must be < 1, got {}", self.asymmetry)));
        }
        for (name, value) in
            [("phi_ext_ratio", self.phi_ext_ratio), ("b_z", self.b_z), ("b_k", self.b_k), ("g_lande", self.g_lande), ("theta", self.theta)]
        {
            if !value.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
        }
        let ratio = self.transmon_ratio();
        if ratio < TRANSMON_RATIO_ERROR {
            return Err(Error::NonPhysical(format!("E_J^sum·S/E_C = {ratio:.3} is below {TRANSMON_RATIO_ERROR}; not a transmon")));
        }
        if ratio < TRANSMON_RATIO_WARN {
            warnings.push(format!("E_J^sum·S/E_C = {ratio:.3} < {TRANSMON_RATIO_WARN}: weak transmon regime"));
        }
        let zeeman = zeeman_frequency(self).abs() / self.e_so;
        if zeeman < ZEEMAN_DOMINANCE_WARN {
            warnings.push(format!("ħω_a/E_SO = {zeeman:.3} < {ZEEMAN_DOMINANCE_WARN}: two-level ASQ reduction is marginal"));
        }
        Ok(warnings)
    }

    pub fn squid_factor(&self) -> f64 {
        squid_factor(self.phi_ext_ratio, self.asymmetry)
    }

    /// E_J^sum · S(φ_ext) / E_C.
    pub fn transmon_ratio(&self) -> f64 {
        self.e_j_sum * self.squid_factor() / self.e_c
    }
}

/// S(φ_ext) = √(cos²φ_ext + a² sin²φ_ext) with φ_ext = π Φ_ext/Φ₀.
pub fn squid_factor(phi_ext_ratio: f64, asymmetry: f64) -> f64 {
    let c = cos_pi(phi_ext_ratio);
    let s = sin_pi(phi_ext_ratio);
    (c * c + asymmetry * asymmetry * s * s).sqrt()
}

/// Magnetic field (T) giving a leading-order ASQ frequency `omega_a` (rad/s).
pub fn zeeman_field_for(omega_a: f64, g_lande: f64) -> f64 {
    omega_a * HBAR / (g_lande * BOHR_MAGNETON)
}

/// Bias field (T) giving a Kittel frequency `omega_m` (rad/s).
pub fn kittel_field_for(omega_m: f64) -> f64 {
    omega_m / GYROMAGNETIC_RATIO
}

fn zeeman_frequency(params: &CircuitParams) -> f64 {
    params.g_lande * BOHR_MAGNETON * params.b_z / HBAR
}

fn qubit_frequency(params: &CircuitParams) -> Result<f64> {
    let radicand = 8.0 * params.e_c * params.e_j_sum * params.squid_factor();
    if !(radicand >= 0.0) {
        return Err(Error::NonPhysical(format!("negative transmon radicand {radicand:e}")));
    }
    Ok(radicand.sqrt() - params.e_c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeFrequencies {
    pub omega_m: f64,
    pub omega_a: f64,
    pub omega_s: f64,
}

/// Kittel, ASQ and transmon angular frequencies.
pub fn mode_frequencies(params: &CircuitParams) -> Result<ModeFrequencies> {
    let omega_s = qubit_frequency(params)?;
    let e_z = zeeman_frequency(params);
    let omega_a = match params.asq_frequency {
        AsqFrequency::LeadingOrder => e_z,
        AsqFrequency::Exact { junction_phase } => {
            let so = params.e_so * junction_phase.sin();
            let radicand = e_z * e_z - 4.0 * e_z * so * params.theta.cos() + 4.0 * so * so;
            if radicand < 0.0 {
                return Err(Error::NonPhysical(format!("negative ASQ radicand {radicand:e}")));
            }
            radicand.sqrt()
        }
    };
    Ok(ModeFrequencies { omega_m: GYROMAGNETIC_RATIO * params.b_k, omega_a, omega_s })
}

/// Mode frequencies and every coupling constant of the full Hamiltonian,
/// all in rad/s and signed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct CouplingSet {
    pub omega_m: f64,
    pub omega_a: f64,
    pub omega_s: f64,
    /// Three-body coupling (σ_s⁺ + σ_s⁻)(m + m†)σ_aˣ.
    pub g: f64,
    /// Conditional three-body coupling σ_s⁺σ_s⁻(m + m†)σ_aˣ.
    pub j: f64,
    /// Magnon–ASQ exchange.
    pub g1: f64,
    /// ASQ–SCQ exchange.
    pub g2: f64,
    /// ASQ–SCQ radiation-pressure term.
    pub g2_bar: f64,
    /// Magnon–SCQ exchange.
    pub g3: f64,
    /// Magnon–SCQ radiation-pressure term.
    pub g3_bar: f64,
}

impl CouplingSet {
    pub fn is_finite(&self) -> bool {
        [self.omega_m, self.omega_a, self.omega_s, self.g, self.j, self.g1, self.g2, self.g2_bar, self.g3, self.g3_bar].iter().all(|v| v.is_finite())
    }

    /// A set with only the three frequencies and the two three-body couplings.
    pub fn three_body(omega_m: f64, omega_a: f64, omega_s: f64, g: f64, j: f64) -> Self {
        Self { omega_m, omega_a, omega_s, g, j, ..Default::default() }
    }

    /// Multiplies the three mode frequencies by `1/factor`, leaving couplings unchanged.
    pub fn with_frequencies_scaled_down(mut self, factor: f64) -> Self {
        self.omega_m /= factor;
        self.omega_a /= factor;
        self.omega_s /= factor;
        self
    }
}

/// Evaluates all couplings for a given dipole flux amplitude `phi_yig` (Wb).
pub fn coupling_strengths(params: &CircuitParams, phi_yig: f64) -> Result<CouplingSet> {
    if !phi_yig.is_finite() {
        return Err(Error::param("phi_yig", "must be finite"));
    }
    params.validate()?;
    let freqs = mode_frequencies(params)?;

    let a = params.asymmetry;
    let x = params.phi_ext_ratio;
    let s = params.squid_factor();
    let sin_2phi = sin_pi(2.0 * x);
    let cos_sq = cos_pi(x).powi(2);
    let sin_sq = sin_pi(x).powi(2);
    // (a sin²φ − cos²φ)
    let mixed = a * sin_sq - cos_sq;
    // Zero-point fluctuation ratio 2E_C/E_J^sum.
    let zpf = 2.0 * params.e_c / params.e_j_sum;
    let flux_phase = std::f64::consts::PI * phi_yig / FLUX_QUANTUM;
    let e_so = params.e_so;

    let g = e_so * sin_2phi * (1.0 + a) * flux_phase / (2.0 * s.powf(1.25)) * zpf.powf(0.25);
    let j = e_so * mixed * flux_phase / s.powf(1.5) * zpf.sqrt();
    let g1 = -e_so * mixed * flux_phase / s * (1.0 - 0.5 * (zpf / s).sqrt());
    let g2 = e_so * mixed / s.powf(1.25) * zpf.powf(0.25);
    let g2_bar = e_so * (1.0 + a) * sin_2phi / (2.0 * s.powf(1.5)) * zpf.sqrt();
    let g3 = -a * params.e_j_sum.powf(0.75) * (2.0 * params.e_c).powf(0.25) * flux_phase / s.powf(1.25);
    let g3_bar = -(1.0 - a * a) * sin_2phi * params.e_j_sum.sqrt() * (2.0 * params.e_c).sqrt() * flux_phase / (2.0 * s.powf(1.5));

    let set = CouplingSet { omega_m: freqs.omega_m, omega_a: freqs.omega_a, omega_s: freqs.omega_s, g, j, g1, g2, g2_bar, g3, g3_bar };
    if !set.is_finite() {
        return Err(Error::NonPhysical("non-finite coupling strength".into()));
    }
    Ok(set)
}

/// Magnon Kerr nonlinearity and microwave drive used for parametric
/// enhancement of the three-body coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnhancementParams {
    /// First-order anisotropy constant, J/m³.
    pub k_an: f64,
    /// Saturation magnetization, A/m.
    pub m_s: f64,
    /// Sphere volume, m³.
    pub v_k: f64,
    /// Drive strength Ω_d, rad/s. Recorded only; the mean field is supplied directly.
    pub drive_amplitude: f64,
    /// Drive frequency ω_d, rad/s.
    pub drive_frequency: f64,
    /// Real mean magnon amplitude ⟨m⟩ under the drive.
    pub mean_field: f64,
}

impl EnhancementParams {
    /// Kerr coefficient K = μ₀γ₀²K_an/(M_s²V_K).
    pub fn kerr(&self) -> f64 {
        MU_0 * GYROMAGNETIC_RATIO * GYROMAGNETIC_RATIO * self.k_an / (self.m_s * self.m_s * self.v_k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Enhancement {
    pub kerr: f64,
    /// Drive-enhanced Kerr coefficient K_d = 2K⟨m⟩².
    pub k_d: f64,
    /// Linearized magnon detuning Δ̃_m = Δ_m − K − 4K⟨m⟩².
    pub delta_m_tilde: f64,
    pub squeeze_r: f64,
    pub g_eff: f64,
    pub j_eff: f64,
    /// Δ_m^eff = Δ̃_m / cosh 2r.
    pub delta_m_eff: f64,
}

/// r = ½ artanh(K_d/Δ̃_m).
pub fn squeeze_parameter(k_d: f64, delta_m_tilde: f64) -> Result<f64> {
    let ratio = k_d / delta_m_tilde;
    if !(ratio.abs() < 1.0) {
        return Err(Error::EnhancementDivergence { ratio: ratio.abs() });
    }
    Ok(0.5 * ratio.atanh())
}

/// Coupling after the Bogoliubov transformation with squeeze parameter `r`.
pub fn squeezed_coupling(coupling: f64, r: f64) -> f64 {
    coupling * r.cosh()
}

/// Squeezing-enhanced couplings for the driven Kerr magnon.
pub fn enhanced_coupling(couplings: &CouplingSet, enh: &EnhancementParams) -> Result<Enhancement> {
    let kerr = enh.kerr();
    let mean_sq = enh.mean_field * enh.mean_field;
    let k_d = 2.0 * kerr * mean_sq;
    let delta_m = couplings.omega_m - enh.drive_frequency;
    let delta_m_tilde = delta_m - kerr - 4.0 * kerr * mean_sq;
    enhanced_from_detuning(couplings.g, couplings.j, k_d, delta_m_tilde, kerr)
}

/// Enhancement from an already linearized detuning and pump strength.
pub fn enhanced_from_detuning(g: f64, j: f64, k_d: f64, delta_m_tilde: f64, kerr: f64) -> Result<Enhancement> {
    let r = squeeze_parameter(k_d, delta_m_tilde)?;
    Ok(Enhancement {
        kerr,
        k_d,
        delta_m_tilde,
        squeeze_r: r,
        g_eff: squeezed_coupling(g, r),
        j_eff: squeezed_coupling(j, r),
        delta_m_eff: delta_m_tilde / (2.0 * r).cosh(),
    })
}
