//! Scenario files: TOML with a `schema_version` field.
//!
//! Frequencies are given as ordinary frequencies (MHz or GHz, per key name),
//! lengths in µm. Everything is converted to rad/s and SI on resolution.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use triad_core::circuit::{kittel_field_for, zeeman_field_for};
use triad_core::constants::angular;
use triad_core::hilbert::SqueezeDrive;
use triad_core::{
    AsqFrequency, CircuitParams, CouplingSet, DephasingConvention, DeviceGeometry, DissipationRates, EvolveOptions, Frame, HamiltonianKind, SpaceSpec,
};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circuit: Option<CircuitConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub couplings: Option<CouplingsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometryConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<HamiltonianConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialConfig>,
    #[serde(default)]
    pub dissipation: DissipationConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeConfig>,
    #[serde(default)]
    pub outputs: OutputsConfig,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlay: Option<OverlayConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MagnonResonance {
    /// ω_m = ω_a − ω_s.
    #[default]
    Sum,
    /// ω_m = ω_a + ω_s.
    Diff,
    /// ω_m = ω_a.
    Switch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AsqModel {
    #[default]
    LeadingOrder,
    Exact,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct CircuitConfig {
    pub e_so_mhz: Option<f64>,
    pub e_j_sum_ghz: Option<f64>,
    pub e_c_mhz: Option<f64>,
    pub asymmetry: Option<f64>,
    pub phi_ext_ratio: Option<f64>,
    /// ASQ frequency; alternative to `b_z_tesla`.
    pub omega_a_ghz: Option<f64>,
    pub b_z_tesla: Option<f64>,
    /// Kittel frequency; alternative to `b_k_tesla` and `magnon_resonance`.
    pub omega_m_ghz: Option<f64>,
    pub b_k_tesla: Option<f64>,
    pub magnon_resonance: Option<MagnonResonance>,
    pub g_lande: Option<f64>,
    pub theta_rad: Option<f64>,
    pub asq_model: Option<AsqModel>,
    pub junction_phase_rad: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct CouplingsConfig {
    pub omega_m_mhz: f64,
    pub omega_a_mhz: f64,
    pub omega_s_mhz: f64,
    pub g_mhz: f64,
    pub j_mhz: f64,
    pub g1_mhz: f64,
    pub g2_mhz: f64,
    pub g2_bar_mhz: f64,
    pub g3_mhz: f64,
    pub g3_bar_mhz: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub radius_um: Option<f64>,
    /// Defaults to the radius.
    pub half_side_um: Option<f64>,
    pub offset_um: Option<f64>,
    pub spin_density_m3: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindName {
    Total,
    EffSum,
    EffDiff,
    EffSwitch,
    JcComparison,
    SqueezedEff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameName {
    Lab,
    Rotating,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SqueezeConfig {
    pub delta_m_tilde_mhz: f64,
    #[serde(default)]
    pub delta_a_mhz: f64,
    #[serde(default)]
    pub delta_s_mhz: f64,
    pub k_d_mhz: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianConfig {
    pub kind: KindName,
    /// Lab for `total`, rotating otherwise.
    pub frame: Option<FrameName>,
    pub fock_cutoff: usize,
    /// Mode frequencies are divided by this factor; couplings are untouched.
    #[serde(default = "one")]
    pub frequency_scale: f64,
    /// Replaces the three-body coupling G.
    pub g_mhz: Option<f64>,
    /// Replaces the conditional coupling J.
    pub j_mhz: Option<f64>,
    pub squeeze: Option<SqueezeConfig>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MagnonState {
    Coherent,
    Fock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QubitState {
    Up,
    Down,
    G,
    E,
    Plus,
    Minus,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub magnon: MagnonState,
    pub alpha_re: Option<f64>,
    pub alpha_im: Option<f64>,
    pub fock_n: Option<usize>,
    pub asq: QubitState,
    pub scq: QubitState,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct DissipationConfig {
    pub kappa_m_mhz: f64,
    pub kappa_a_mhz: f64,
    pub kappa_s_mhz: f64,
    pub gamma_a_mhz: f64,
    pub gamma_s_mhz: f64,
    pub dephasing: DephasingConvention,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeUnit {
    /// Dimensionless G·t (J·t for `eff_switch`).
    Gt,
    Us,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub unit: TimeUnit,
    pub end: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AnalyticTruncation {
    #[default]
    FockMatched,
    Poisson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisConfig {
    pub n: usize,
    pub asq: QubitState,
    pub scq: QubitState,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputsConfig {
    pub populations: bool,
    pub entanglement: bool,
    pub analytic: bool,
    pub analytic_truncation: AnalyticTruncation,
    pub basis: Vec<BasisConfig>,
}

impl Default for OutputsConfig {
    fn default() -> Self {
        Self { populations: true, entanglement: false, analytic: false, analytic_truncation: AnalyticTruncation::default(), basis: Vec::new() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    pub check_positivity: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        let d = EvolveOptions::default();
        Self {
            rel_tol: d.integrator.rel_tol,
            abs_tol: d.integrator.abs_tol,
            max_steps: d.integrator.max_steps,
            check_positivity: d.invariants.check_positivity,
        }
    }
}

/// A second Hamiltonian run on the same grid and initial state, written side by side.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverlayConfig {
    pub kind: KindName,
    pub frame: Option<FrameName>,
    #[serde(default = "one")]
    pub frequency_scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKey {
    PhiExtRatio,
    Asymmetry,
    ESoMhz,
    #[serde(rename = "e_c_mhz")]
    EcMhz,
    #[serde(rename = "e_j_sum_ghz")]
    EjSumGhz,
    #[serde(rename = "e_j_over_e_c")]
    EjOverEc,
    RadiusUm,
    HalfSideUm,
    OffsetUm,
    SqueezeR,
}

impl SweepKey {
    pub fn column(self) -> &'static str {
        match self {
            SweepKey::PhiExtRatio => "phi_ext_ratio",
            SweepKey::Asymmetry => "asymmetry",
            SweepKey::ESoMhz => "e_so_mhz",
            SweepKey::EcMhz => "e_c_mhz",
            SweepKey::EjSumGhz => "e_j_sum_ghz",
            SweepKey::EjOverEc => "e_j_over_e_c",
            SweepKey::RadiusUm => "radius_um",
            SweepKey::HalfSideUm => "half_side_um",
            SweepKey::OffsetUm => "offset_um",
            SweepKey::SqueezeR => "squeeze_r",
        }
    }

    pub fn touches_geometry(self) -> bool {
        matches!(self, SweepKey::RadiusUm | SweepKey::HalfSideUm | SweepKey::OffsetUm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Record {
    OmegaMMhz,
    OmegaAMhz,
    OmegaSMhz,
    GMhz,
    JMhz,
    G1Mhz,
    G2Mhz,
    G2BarMhz,
    G3Mhz,
    G3BarMhz,
    PhiYigWb,
    FluxRatio,
    GEffMhz,
    JEffMhz,
    GEffOverG,
}

impl Record {
    pub const COUPLINGS: [Record; 10] = [
        Record::OmegaMMhz,
        Record::OmegaAMhz,
        Record::OmegaSMhz,
        Record::GMhz,
        Record::JMhz,
        Record::G1Mhz,
        Record::G2Mhz,
        Record::G2BarMhz,
        Record::G3Mhz,
        Record::G3BarMhz,
    ];

    pub fn column(self) -> &'static str {
        match self {
            Record::OmegaMMhz => "omega_m_mhz",
            Record::OmegaAMhz => "omega_a_mhz",
            Record::OmegaSMhz => "omega_s_mhz",
            Record::GMhz => "g_mhz",
            Record::JMhz => "j_mhz",
            Record::G1Mhz => "g1_mhz",
            Record::G2Mhz => "g2_mhz",
            Record::G2BarMhz => "g2_bar_mhz",
            Record::G3Mhz => "g3_mhz",
            Record::G3BarMhz => "g3_bar_mhz",
            Record::PhiYigWb => "phi_yig_wb",
            Record::FluxRatio => "flux_ratio",
            Record::GEffMhz => "g_eff_mhz",
            Record::JEffMhz => "j_eff_mhz",
            Record::GEffOverG => "g_eff_over_g",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub key: SweepKey,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub key: SweepKey,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    #[serde(default)]
    pub record: Vec<Record>,
    /// Slow axis; the primary key varies fastest.
    pub second: Option<AxisConfig>,
}

impl AxisConfig {
    /// Points start + k·step up to stop (inclusive within a 1e-9 step fraction).
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|k| self.start + k as f64 * self.step).collect()
    }

    fn validate(&self, path: &str) -> Result<(), CliError> {
        for (k, v) in [("start", self.start), ("stop", self.stop), ("step", self.step)] {
            if !v.is_finite() {
                return Err(CliError::config(format!("{path}.{k}"), "must be finite"));
            }
        }
        if !(self.step > 0.0) {
            return Err(CliError::config(format!("{path}.step"), format!("must be positive, got {}", self.step)));
        }
        if self.stop < self.start {
            return Err(CliError::config(format!("{path}.stop"), "range is empty (stop < start)"));
        }
        if (self.stop - self.start) / self.step > 1e6 {
            return Err(CliError::config(format!("{path}.step"), "more than a million points"));
        }
        Ok(())
    }
}

impl SweepConfig {
    pub fn primary(&self) -> AxisConfig {
        AxisConfig { key: self.key, start: self.start, stop: self.stop, step: self.step }
    }

    pub fn records(&self) -> Vec<Record> {
        if self.record.is_empty() {
            Record::COUPLINGS.to_vec()
        } else {
            self.record.clone()
        }
    }
}

/// Parses a config file, reporting errors with the offending key path.
pub fn load(path: &Path) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<Config, CliError> {
    let de = toml::de::Deserializer::parse(text).map_err(|e| CliError::Config(format!("malformed TOML: {e}")))?;
    let config: Config = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::config(path, e.into_inner().message().trim().to_string())
    })?;
    config.validate()?;
    Ok(config)
}

fn finite(path: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(CliError::config(path, format!("must be finite, got {v}")))
    }
}

fn positive(path: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::config(path, format!("must be positive, got {v}")))
    }
}

fn non_negative(path: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(CliError::config(path, format!("must be non-negative, got {v}")))
    }
}

impl Config {
    /// Checks everything that can be checked without running physics.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::config("schema_version", format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version)));
        }
        if self.circuit.is_some() && self.couplings.is_some() {
            return Err(CliError::config("couplings", "give either [circuit] or [couplings], not both"));
        }
        if let Some(c) = &self.circuit {
            for (k, v) in [
                ("e_so_mhz", c.e_so_mhz),
                ("e_j_sum_ghz", c.e_j_sum_ghz),
                ("e_c_mhz", c.e_c_mhz),
                ("omega_a_ghz", c.omega_a_ghz),
                ("omega_m_ghz", c.omega_m_ghz),
                ("g_lande", c.g_lande),
            ] {
                if let Some(v) = v {
                    positive(&format!("circuit.{k}"), v)?;
                }
            }
            for (k, v) in [
                ("asymmetry", c.asymmetry),
                ("phi_ext_ratio", c.phi_ext_ratio),
                ("b_z_tesla", c.b_z_tesla),
                ("b_k_tesla", c.b_k_tesla),
                ("theta_rad", c.theta_rad),
                ("junction_phase_rad", c.junction_phase_rad),
            ] {
                if let Some(v) = v {
                    finite(&format!("circuit.{k}"), v)?;
                }
            }
            if let Some(a) = c.asymmetry {
                if a.abs() >= 1.0 {
                    return Err(CliError::config("circuit.asymmetry", format!("|a| must be < 1, got {a}")));
                }
            }
            if c.omega_a_ghz.is_some() && c.b_z_tesla.is_some() {
                return Err(CliError::config("circuit.b_z_tesla", "give either omega_a_ghz or b_z_tesla"));
            }
            let magnon = [c.omega_m_ghz.is_some(), c.b_k_tesla.is_some(), c.magnon_resonance.is_some()];
            if magnon.iter().filter(|&&b| b).count() > 1 {
                return Err(CliError::config("circuit.omega_m_ghz", "give at most one of omega_m_ghz, b_k_tesla, magnon_resonance"));
            }
            if c.junction_phase_rad.is_some() && c.asq_model != Some(AsqModel::Exact) {
                return Err(CliError::config("circuit.junction_phase_rad", "only used with asq_model = \"exact\""));
            }
        }
        if let Some(c) = &self.couplings {
            let v = [c.omega_m_mhz, c.omega_a_mhz, c.omega_s_mhz, c.g_mhz, c.j_mhz, c.g1_mhz, c.g2_mhz, c.g2_bar_mhz, c.g3_mhz, c.g3_bar_mhz];
            let names = ["omega_m_mhz", "omega_a_mhz", "omega_s_mhz", "g_mhz", "j_mhz", "g1_mhz", "g2_mhz", "g2_bar_mhz", "g3_mhz", "g3_bar_mhz"];
            for (k, x) in names.iter().zip(v) {
                finite(&format!("couplings.{k}"), x)?;
            }
        }
        if let Some(g) = &self.geometry {
            for (k, v) in [("radius_um", g.radius_um), ("half_side_um", g.half_side_um), ("spin_density_m3", g.spin_density_m3)] {
                if let Some(v) = v {
                    positive(&format!("geometry.{k}"), v)?;
                }
            }
            if let Some(d) = g.offset_um {
                non_negative("geometry.offset_um", d)?;
            }
        }
        if let Some(h) = &self.hamiltonian {
            SpaceSpec::new(h.fock_cutoff).map_err(|e| CliError::config("hamiltonian.fock_cutoff", e.to_string()))?;
            positive("hamiltonian.frequency_scale", h.frequency_scale)?;
            for (k, v) in [("g_mhz", h.g_mhz), ("j_mhz", h.j_mhz)] {
                if let Some(v) = v {
                    finite(&format!("hamiltonian.{k}"), v)?;
                }
            }
            match (h.kind, &h.squeeze) {
                (KindName::SqueezedEff, None) => return Err(CliError::config("hamiltonian.squeeze", "required for kind = \"squeezed_eff\"")),
                (KindName::SqueezedEff, Some(s)) => {
                    for (k, v) in [
                        ("delta_m_tilde_mhz", s.delta_m_tilde_mhz),
                        ("delta_a_mhz", s.delta_a_mhz),
                        ("delta_s_mhz", s.delta_s_mhz),
                        ("k_d_mhz", s.k_d_mhz),
                    ] {
                        finite(&format!("hamiltonian.squeeze.{k}"), v)?;
                    }
                }
                (_, Some(_)) => return Err(CliError::config("hamiltonian.squeeze", "only used with kind = \"squeezed_eff\"")),
                _ => {}
            }
            if h.kind == KindName::Total && h.frame == Some(FrameName::Rotating) {
                return Err(CliError::config("hamiltonian.frame", "the total Hamiltonian is only available in the lab frame"));
            }
        }
        if let Some(i) = &self.initial {
            match i.magnon {
                MagnonState::Coherent => {
                    if i.fock_n.is_some() {
                        return Err(CliError::config("initial.fock_n", "not used for a coherent magnon"));
                    }
                    finite("initial.alpha_re", i.alpha_re.unwrap_or(0.0))?;
                    finite("initial.alpha_im", i.alpha_im.unwrap_or(0.0))?;
                }
                MagnonState::Fock => {
                    if i.alpha_re.is_some() || i.alpha_im.is_some() {
                        return Err(CliError::config("initial.alpha_re", "not used for a Fock magnon"));
                    }
                    if let (Some(n), Some(h)) = (i.fock_n, &self.hamiltonian) {
                        if n >= h.fock_cutoff {
                            return Err(CliError::config("initial.fock_n", format!("{n} is outside the cutoff {}", h.fock_cutoff)));
                        }
                    }
                }
            }
            asq_amplitudes(i.asq).map_err(|m| CliError::config("initial.asq", m))?;
            scq_amplitudes(i.scq).map_err(|m| CliError::config("initial.scq", m))?;
        }
        let d = &self.dissipation;
        for (k, v) in [
            ("kappa_m_mhz", d.kappa_m_mhz),
            ("kappa_a_mhz", d.kappa_a_mhz),
            ("kappa_s_mhz", d.kappa_s_mhz),
            ("gamma_a_mhz", d.gamma_a_mhz),
            ("gamma_s_mhz", d.gamma_s_mhz),
        ] {
            non_negative(&format!("dissipation.{k}"), v)?;
        }
        if let Some(t) = &self.time {
            positive("time.end", t.end)?;
            if t.samples < 2 {
                return Err(CliError::config("time.samples", "need at least 2 samples"));
            }
        }
        for (k, b) in self.outputs.basis.iter().enumerate() {
            asq_index(b.asq).map_err(|m| CliError::config(format!("outputs.basis[{k}].asq"), m))?;
            scq_index(b.scq).map_err(|m| CliError::config(format!("outputs.basis[{k}].scq"), m))?;
            if let Some(h) = &self.hamiltonian {
                if b.n >= h.fock_cutoff {
                    return Err(CliError::config(format!("outputs.basis[{k}].n"), format!("{} is outside the cutoff {}", b.n, h.fock_cutoff)));
                }
            }
        }
        let i = &self.integrator;
        if !(i.rel_tol > 0.0 && i.rel_tol < 1.0) {
            return Err(CliError::config("integrator.rel_tol", format!("must lie in (0, 1), got {}", i.rel_tol)));
        }
        positive("integrator.abs_tol", i.abs_tol)?;
        if i.max_steps == 0 {
            return Err(CliError::config("integrator.max_steps", "must be positive"));
        }
        if let Some(o) = &self.overlay {
            positive("overlay.frequency_scale", o.frequency_scale)?;
            if o.kind == KindName::SqueezedEff {
                return Err(CliError::config("overlay.kind", "squeezed_eff cannot be used as an overlay"));
            }
            if o.kind == KindName::Total && o.frame == Some(FrameName::Rotating) {
                return Err(CliError::config("overlay.frame", "the total Hamiltonian is only available in the lab frame"));
            }
        }
        if let Some(s) = &self.sweep {
            s.primary().validate("sweep")?;
            if let Some(second) = &s.second {
                second.validate("sweep.second")?;
                if second.key == s.key {
                    return Err(CliError::config("sweep.second.key", "must differ from sweep.key"));
                }
            }
            if self.couplings.is_some() {
                return Err(CliError::config("sweep", "sweeps need [circuit] parameters, not direct [couplings]"));
            }
        }
        Ok(())
    }

    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| "run".into())
    }
}

pub fn asq_amplitudes(q: QubitState) -> Result<[Complex64; 2], String> {
    qubit_amplitudes(q, QubitState::Down, QubitState::Up).ok_or_else(|| format!("ASQ state must be up, down, plus or minus, got {q:?}"))
}

pub fn scq_amplitudes(q: QubitState) -> Result<[Complex64; 2], String> {
    qubit_amplitudes(q, QubitState::G, QubitState::E).ok_or_else(|| format!("SCQ state must be g, e, plus or minus, got {q:?}"))
}

fn qubit_amplitudes(q: QubitState, low: QubitState, high: QubitState) -> Option<[Complex64; 2]> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::default();
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    match q {
        q if q == low => Some([one, zero]),
        q if q == high => Some([zero, one]),
        QubitState::Plus => Some([h, h]),
        QubitState::Minus => Some([h, -h]),
        _ => None,
    }
}

pub fn asq_index(q: QubitState) -> Result<usize, String> {
    match q {
        QubitState::Down => Ok(0),
        QubitState::Up => Ok(1),
        _ => Err(format!("basis ASQ state must be up or down, got {q:?}")),
    }
}

pub fn scq_index(q: QubitState) -> Result<usize, String> {
    match q {
        QubitState::G => Ok(0),
        QubitState::E => Ok(1),
        _ => Err(format!("basis SCQ state must be g or e, got {q:?}")),
    }
}

impl CircuitConfig {
    /// Resolves to core parameters; unset keys take the library defaults and the
    /// magnon bias is chosen from the requested resonance.
    pub fn resolve(&self) -> Result<CircuitParams, CliError> {
        let d = CircuitParams::default();
        let mut p = CircuitParams {
            e_so: self.e_so_mhz.map(|v| angular(v * 1e6)).unwrap_or(d.e_so),
            e_j_sum: self.e_j_sum_ghz.map(|v| angular(v * 1e9)).unwrap_or(d.e_j_sum),
            e_c: self.e_c_mhz.map(|v| angular(v * 1e6)).unwrap_or(d.e_c),
            asymmetry: self.asymmetry.unwrap_or(d.asymmetry),
            phi_ext_ratio: self.phi_ext_ratio.unwrap_or(d.phi_ext_ratio),
            b_z: d.b_z,
            b_k: 0.0,
            g_lande: self.g_lande.unwrap_or(d.g_lande),
            theta: self.theta_rad.unwrap_or(d.theta),
            asq_frequency: match self.asq_model.unwrap_or_default() {
                AsqModel::LeadingOrder => AsqFrequency::LeadingOrder,
                AsqModel::Exact => AsqFrequency::Exact { junction_phase: self.junction_phase_rad.unwrap_or(0.0) },
            },
        };
        if let Some(b) = self.b_z_tesla {
            p.b_z = b;
        } else if let Some(w) = self.omega_a_ghz {
            p.b_z = zeeman_field_for(angular(w * 1e9), p.g_lande);
        } else {
            p.b_z = zeeman_field_for(angular(10e9), p.g_lande);
        }
        p.b_k = if let Some(b) = self.b_k_tesla {
            b
        } else if let Some(w) = self.omega_m_ghz {
            kittel_field_for(angular(w * 1e9))
        } else {
            let f = triad_core::mode_frequencies(&p).map_err(|e| CliError::from_core("circuit", e))?;
            let omega_m = match self.magnon_resonance.unwrap_or_default() {
                MagnonResonance::Sum => f.omega_a - f.omega_s,
                MagnonResonance::Diff => f.omega_a + f.omega_s,
                MagnonResonance::Switch => f.omega_a,
            };
            kittel_field_for(omega_m)
        };
        Ok(p)
    }
}

impl CouplingsConfig {
    pub fn resolve(&self) -> CouplingSet {
        let w = |mhz: f64| angular(mhz * 1e6);
        CouplingSet {
            omega_m: w(self.omega_m_mhz),
            omega_a: w(self.omega_a_mhz),
            omega_s: w(self.omega_s_mhz),
            g: w(self.g_mhz),
            j: w(self.j_mhz),
            g1: w(self.g1_mhz),
            g2: w(self.g2_mhz),
            g2_bar: w(self.g2_bar_mhz),
            g3: w(self.g3_mhz),
            g3_bar: w(self.g3_bar_mhz),
        }
    }
}

impl GeometryConfig {
    pub fn resolve(&self) -> DeviceGeometry {
        let d = DeviceGeometry::default();
        let radius = self.radius_um.map(|v| v * 1e-6).unwrap_or(d.radius);
        DeviceGeometry {
            radius,
            half_side: self.half_side_um.map(|v| v * 1e-6).unwrap_or(radius),
            offset: self.offset_um.map(|v| v * 1e-6).unwrap_or(0.0),
            spin_density: self.spin_density_m3.unwrap_or(d.spin_density),
        }
    }
}

pub fn frame_of(kind: KindName, frame: Option<FrameName>) -> Frame {
    match (kind, frame) {
        (_, Some(FrameName::Lab)) | (KindName::Total, None) => Frame::Lab,
        _ => Frame::Rotating,
    }
}

pub fn kind_of(kind: KindName, squeeze: Option<&SqueezeConfig>) -> HamiltonianKind {
    let w = |mhz: f64| angular(mhz * 1e6);
    match kind {
        KindName::Total => HamiltonianKind::Total,
        KindName::EffSum => HamiltonianKind::EffSum,
        KindName::EffDiff => HamiltonianKind::EffDiff,
        KindName::EffSwitch => HamiltonianKind::EffSwitch,
        KindName::JcComparison => HamiltonianKind::JcComparison,
        KindName::SqueezedEff => {
            let s = squeeze.expect("validated: squeeze present");
            HamiltonianKind::SqueezedEff(SqueezeDrive {
                delta_m_tilde: w(s.delta_m_tilde_mhz),
                delta_a: w(s.delta_a_mhz),
                delta_s: w(s.delta_s_mhz),
                k_d: w(s.k_d_mhz),
            })
        }
    }
}

impl DissipationConfig {
    pub fn resolve(&self) -> DissipationRates {
        let w = |mhz: f64| angular(mhz * 1e6);
        DissipationRates {
            kappa_m: w(self.kappa_m_mhz),
            kappa_a: w(self.kappa_a_mhz),
            kappa_s: w(self.kappa_s_mhz),
            gamma_a: w(self.gamma_a_mhz),
            gamma_s: w(self.gamma_s_mhz),
        }
    }
}

impl IntegratorConfig {
    pub fn resolve(&self) -> EvolveOptions {
        let mut o = EvolveOptions::default();
        o.integrator.rel_tol = self.rel_tol;
        o.integrator.abs_tol = self.abs_tol;
        o.integrator.max_steps = self.max_steps;
        o.invariants.check_positivity = self.check_positivity;
        o
    }
}
