//! Operators, Hamiltonians and states on (magnon Fock space) ⊗ ASQ ⊗ SCQ.
//!
//! The tensor ordering (magnon, ASQ, SCQ) is a crate-wide contract: the basis
//! index of |n, a, s⟩ is `4n + 2a + s`. Qubit level 0 is ↓ (ASQ) or g (SCQ),
//! level 1 is ↑ or e; σ⁺ = |1⟩⟨0| and σᶻ = |1⟩⟨1| − |0⟩⟨0|.
//!
//! Hamiltonians are stored as H/ħ in rad/s.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::CouplingSet;
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest total dimension for which dense operators are built.
pub const MAX_DENSE_DIM: usize = 2048;
/// Relative mismatch tolerated in a kind's resonance condition before warning.
pub const RESONANCE_REL_TOL: f64 = 1e-6;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subsystem {
    Magnon,
    Asq,
    Scq,
}

impl Subsystem {
    pub const ALL: [Subsystem; 3] = [Subsystem::Magnon, Subsystem::Asq, Subsystem::Scq];

    pub fn label(self) -> &'static str {
        match self {
            Subsystem::Magnon => "M",
            Subsystem::Asq => "A",
            Subsystem::Scq => "S",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceSpec {
    /// Number of magnon Fock levels N (states 0..N−1).
    pub fock_cutoff: usize,
}

impl SpaceSpec {
    pub fn new(fock_cutoff: usize) -> Result<Self> {
        let spec = Self { fock_cutoff };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.fock_cutoff < 2 {
            return Err(Error::param("fock_cutoff", format!("must be at least 2, got {}", self.fock_cutoff)));
        }
        if self.dim() > MAX_DENSE_DIM {
            return Err(Error::DimensionOverflow { dim: self.dim(), limit: MAX_DENSE_DIM });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        4 * self.fock_cutoff
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.fock_cutoff, 2, 2]
    }

    /// Basis index of |n, asq, scq⟩.
    pub fn index(&self, n: usize, asq: usize, scq: usize) -> usize {
        debug_assert!(n < self.fock_cutoff && asq < 2 && scq < 2);
        4 * n + 2 * asq + scq
    }

    /// Smallest cutoff recommended for a coherent state of amplitude |α|.
    pub fn recommended_cutoff(alpha_abs: f64) -> usize {
        let nbar = alpha_abs * alpha_abs;
        (nbar + 6.0 * alpha_abs).ceil() as usize
    }
}

/// Embedded single-subsystem operators on the full space.
#[derive(Debug, Clone)]
pub struct Operators {
    pub spec: SpaceSpec,
    pub identity: CMatrix,
    pub m: CMatrix,
    pub m_dag: CMatrix,
    pub n: CMatrix,
    pub sa_plus: CMatrix,
    pub sa_minus: CMatrix,
    pub sa_z: CMatrix,
    pub sa_x: CMatrix,
    pub ss_plus: CMatrix,
    pub ss_minus: CMatrix,
    pub ss_z: CMatrix,
    pub ss_x: CMatrix,
}

impl Operators {
    /// σₐ⁺σₐ⁻, the projector onto |↑⟩.
    pub fn asq_up(&self) -> CMatrix {
        &self.sa_plus * &self.sa_minus
    }

    /// σₛ⁺σₛ⁻, the projector onto |e⟩.
    pub fn scq_excited(&self) -> CMatrix {
        &self.ss_plus * &self.ss_minus
    }
}

fn qubit_ops() -> (CMatrix, CMatrix, CMatrix, CMatrix) {
    let plus = CMatrix::from_row_slice(2, 2, &[ZERO, ZERO, ONE, ZERO]);
    let minus = plus.adjoint();
    let z = CMatrix::from_diagonal(&CVector::from_vec(vec![-ONE, ONE]));
    let x = &plus + &minus;
    (plus, minus, z, x)
}

// Magnon annihilation operator on `levels` Fock states.
fn lowering(levels: usize) -> CMatrix {
    let mut lower = CMatrix::zeros(levels, levels);
    for k in 1..levels {
        lower[(k - 1, k)] = Complex64::new((k as f64).sqrt(), 0.0);
    }
    lower
}

fn embed(magnon: &CMatrix, asq: &CMatrix, scq: &CMatrix) -> CMatrix {
    magnon.kronecker(asq).kronecker(scq)
}

pub fn build_operators(spec: SpaceSpec) -> Result<Operators> {
    spec.validate()?;
    let n_levels = spec.fock_cutoff;
    let lower = lowering(n_levels);
    let id_m = CMatrix::identity(n_levels, n_levels);
    let id_q = CMatrix::identity(2, 2);
    let (plus, minus, z, x) = qubit_ops();
    let m = embed(&lower, &id_q, &id_q);
    let m_dag = m.adjoint();
    let n = &m_dag * &m;
    Ok(Operators {
        spec,
        identity: CMatrix::identity(spec.dim(), spec.dim()),
        m,
        m_dag,
        n,
        sa_plus: embed(&id_m, &plus, &id_q),
        sa_minus: embed(&id_m, &minus, &id_q),
        sa_z: embed(&id_m, &z, &id_q),
        sa_x: embed(&id_m, &x, &id_q),
        ss_plus: embed(&id_m, &id_q, &plus),
        ss_minus: embed(&id_m, &id_q, &minus),
        ss_z: embed(&id_m, &id_q, &z),
        ss_x: embed(&id_m, &id_q, &x),
    })
}

/// Parameters of the linearized Kerr-squeezed model, already in the drive frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SqueezeDrive {
    /// Shifted magnon detuning Δ̃_m (rad/s).
    pub delta_m_tilde: f64,
    /// ASQ detuning Δ_a (rad/s).
    pub delta_a: f64,
    /// SCQ detuning Δ_s (rad/s).
    pub delta_s: f64,
    /// Enhanced two-magnon drive K_d (rad/s).
    pub k_d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HamiltonianKind {
    /// Free terms, both three-body terms and every two-body term, no RWA.
    Total,
    /// G(m†σₛ⁺σₐ⁻ + h.c.) for ω_a = ω_m + ω_s.
    EffSum,
    /// G(mσₛ⁺σₐ⁺ + h.c.) for ω_m = ω_a + ω_s.
    EffDiff,
    /// J(σₛ⁺σₛ⁻ − 1)(mσₐ⁺ + h.c.) for ω_m = ω_a.
    EffSwitch,
    /// Two independent Jaynes–Cummings couplings g(m†σₐ⁻ + h.c.) + g(m†σₛ⁻ + h.c.),
    /// with g taken from the coupling set's G.
    JcComparison,
    /// Δ̃_m m†m + Δ_a σₐᶻ/2 + Δ_s σₛᶻ/2 + G(mσₛ⁺σₐ⁺ + h.c.) − K_d(m†² + m²)/2.
    SqueezedEff(SqueezeDrive),
}

impl HamiltonianKind {
    pub fn name(&self) -> &'static str {
        match self {
            HamiltonianKind::Total => "total",
            HamiltonianKind::EffSum => "eff_sum",
            HamiltonianKind::EffDiff => "eff_diff",
            HamiltonianKind::EffSwitch => "eff_switch",
            HamiltonianKind::JcComparison => "jc_comparison",
            HamiltonianKind::SqueezedEff(_) => "squeezed_eff",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    /// Full free Hamiltonian retained.
    #[default]
    Lab,
    /// Interaction frame at the kind's resonance; only residual detunings remain.
    Rotating,
}

#[derive(Debug, Clone)]
pub struct Hamiltonian {
    pub matrix: CMatrix,
    pub kind: HamiltonianKind,
    pub frame: Frame,
    pub warnings: Vec<String>,
}

fn scaled(op: &CMatrix, c: f64) -> CMatrix {
    op * Complex64::new(c, 0.0)
}

fn check_resonance(label: &str, lhs: f64, rhs: f64, warnings: &mut Vec<String>) {
    let scale = lhs.abs().max(rhs.abs());
    if scale > 0.0 && (lhs - rhs).abs() > RESONANCE_REL_TOL * scale {
        let msg = format!("resonance {label} violated: {lhs:.9e} vs {rhs:.9e} rad/s");
        log::warn!("{msg}");
        warnings.push(msg);
    }
}

/// Builds H/ħ for `kind`.
pub fn build_hamiltonian(kind: HamiltonianKind, c: &CouplingSet, spec: SpaceSpec, frame: Frame) -> Result<Hamiltonian> {
    spec.validate()?;
    if !c.is_finite() {
        return Err(Error::param("couplings", "non-finite value"));
    }
    // Every term is a product of single-factor operators, so it is assembled
    // as one Kronecker product instead of dense products on the full space.
    let levels = spec.fock_cutoff;
    let b = lowering(levels);
    let bd = b.adjoint();
    let x_b = &b + &bd;
    let id_m = CMatrix::identity(levels, levels);
    let (plus, minus, z, x) = qubit_ops();
    let id_q = CMatrix::identity(2, 2);
    let proj = &plus * &minus;
    let term = |m: &CMatrix, a: &CMatrix, s: &CMatrix, coef: f64| scaled(&embed(m, a, s), coef);
    let hc = |h: CMatrix| &h + h.adjoint();
    let mut warnings = Vec::new();
    let h_free_lab =
        || term(&(&bd * &b), &id_q, &id_q, c.omega_m) + term(&id_m, &z, &id_q, 0.5 * c.omega_a) + term(&id_m, &id_q, &z, 0.5 * c.omega_s);

    let matrix = match kind {
        HamiltonianKind::Total => {
            if frame == Frame::Rotating {
                return Err(Error::param("frame", "the full Hamiltonian has no rotating frame; use lab"));
            }
            let three = term(&x_b, &x, &x, c.g) + term(&x_b, &x, &proj, c.j);
            let two1 = hc(term(&b, &plus, &id_q, c.g1));
            let two2 = hc(term(&id_m, &plus, &minus, c.g2)) + term(&id_m, &x, &proj, c.g2_bar);
            let two3 = hc(term(&b, &id_q, &plus, c.g3)) + term(&x_b, &id_q, &proj, c.g3_bar);
            h_free_lab() + three + two1 + two2 + two3
        }
        HamiltonianKind::EffSum => {
            check_resonance("ω_a = ω_m + ω_s", c.omega_a, c.omega_m + c.omega_s, &mut warnings);
            let int = hc(term(&bd, &minus, &plus, c.g));
            match frame {
                Frame::Lab => h_free_lab() + int,
                Frame::Rotating => term(&id_m, &proj, &id_q, c.omega_a - c.omega_m - c.omega_s) + int,
            }
        }
        HamiltonianKind::EffDiff => {
            check_resonance("ω_m = ω_a + ω_s", c.omega_m, c.omega_a + c.omega_s, &mut warnings);
            let int = hc(term(&b, &plus, &plus, c.g));
            match frame {
                Frame::Lab => h_free_lab() + int,
                Frame::Rotating => term(&(&bd * &b), &id_q, &id_q, c.omega_m - c.omega_a - c.omega_s) + int,
            }
        }
        HamiltonianKind::EffSwitch => {
            check_resonance("ω_m = ω_a", c.omega_m, c.omega_a, &mut warnings);
            let int = hc(term(&b, &plus, &(&proj - &id_q), c.j));
            match frame {
                Frame::Lab => h_free_lab() + int,
                Frame::Rotating => term(&(&bd * &b), &id_q, &id_q, c.omega_m - c.omega_a) + int,
            }
        }
        HamiltonianKind::JcComparison => {
            let int = hc(term(&bd, &minus, &id_q, c.g) + term(&bd, &id_q, &minus, c.g));
            match frame {
                Frame::Lab => h_free_lab() + int,
                Frame::Rotating => term(&id_m, &proj, &id_q, c.omega_a - c.omega_m) + term(&id_m, &id_q, &proj, c.omega_s - c.omega_m) + int,
            }
        }
        HamiltonianKind::SqueezedEff(d) => {
            for (name, v) in [("delta_m_tilde", d.delta_m_tilde), ("delta_a", d.delta_a), ("delta_s", d.delta_s), ("k_d", d.k_d)] {
                if !v.is_finite() {
                    return Err(Error::param(name, "must be finite"));
                }
            }
            term(&(&bd * &b), &id_q, &id_q, d.delta_m_tilde)
                + term(&id_m, &z, &id_q, 0.5 * d.delta_a)
                + term(&id_m, &id_q, &z, 0.5 * d.delta_s)
                + hc(term(&b, &plus, &plus, c.g))
                - hc(term(&(&bd * &bd), &id_q, &id_q, 0.5 * d.k_d))
        }
    };
    Ok(Hamiltonian { matrix, kind, frame, warnings })
}

/// ‖A − A†‖_F / max(‖A‖_F, 1).
pub fn hermiticity_error(a: &CMatrix) -> f64 {
    (a - a.adjoint()).norm() / a.norm().max(1.0)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Truncated, renormalized coherent-state amplitudes e^{−|α|²/2} αⁿ/√n!, n < N.
pub fn coherent_amplitudes(alpha: Complex64, levels: usize) -> CVector {
    let r = alpha.norm();
    let phase = alpha.arg();
    let mut out = CVector::zeros(levels);
    if r == 0.0 {
        out[0] = ONE;
        return out;
    }
    let mut log_fact = 0.0;
    for n in 0..levels {
        if n > 0 {
            log_fact += (n as f64).ln();
        }
        let log_mag = -0.5 * r * r + n as f64 * r.ln() - 0.5 * log_fact;
        out[n] = Complex64::from_polar(log_mag.exp(), n as f64 * phase);
    }
    let norm = out.norm();
    out / Complex64::new(norm, 0.0)
}

/// Magnon coherent state |α⟩ on the truncated Fock space.
pub fn coherent_state(alpha: Complex64, spec: SpaceSpec) -> CVector {
    let need = alpha.norm_sqr() + 6.0 * alpha.norm();
    if need > spec.fock_cutoff as f64 {
        log::warn!("Fock cutoff {} is below |α|² + 6|α| = {need:.1}; truncation error may be visible", spec.fock_cutoff);
    }
    coherent_amplitudes(alpha, spec.fock_cutoff)
}

/// Single-qubit amplitudes (c₀, c₁); normalized on use.
pub type QubitAmplitudes = [Complex64; 2];

pub const QUBIT_LOW: QubitAmplitudes = [ONE, ZERO];
pub const QUBIT_HIGH: QubitAmplitudes = [ZERO, ONE];

/// |ψ_M⟩ ⊗ |ψ_A⟩ ⊗ |ψ_S⟩, normalized.
pub fn product_state(magnon: &CVector, asq: QubitAmplitudes, scq: QubitAmplitudes) -> Result<CVector> {
    let a = CVector::from_row_slice(&asq);
    let s = CVector::from_row_slice(&scq);
    let psi = magnon.kronecker(&a).kronecker(&s);
    let norm = psi.norm();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::InvalidState("product state has zero or non-finite norm".into()));
    }
    Ok(psi / Complex64::new(norm, 0.0))
}

/// |n, asq, scq⟩.
pub fn basis_state(spec: SpaceSpec, n: usize, asq: usize, scq: usize) -> Result<CVector> {
    if n >= spec.fock_cutoff || asq > 1 || scq > 1 {
        return Err(Error::InvalidState(format!("|{n},{asq},{scq}⟩ is outside the truncated space")));
    }
    let mut psi = CVector::zeros(spec.dim());
    psi[spec.index(n, asq, scq)] = ONE;
    Ok(psi)
}

/// A density matrix together with the subsystems it lives on, in tensor order.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub matrix: CMatrix,
    pub subsystems: Vec<Subsystem>,
    pub dims: Vec<usize>,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix, subsystems: Vec<Subsystem>, dims: Vec<usize>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if subsystems.len() != dims.len() || subsystems.is_empty() {
            return Err(Error::InvalidState("subsystem labels and dimensions disagree".into()));
        }
        if matrix.nrows() != total || matrix.ncols() != total {
            return Err(Error::DimensionMismatch { expected: total, got: matrix.nrows() });
        }
        Ok(Self { matrix, subsystems, dims })
    }

    /// The full tripartite state.
    pub fn tripartite(matrix: CMatrix, spec: SpaceSpec) -> Result<Self> {
        Self::new(matrix, Subsystem::ALL.to_vec(), spec.dims().to_vec())
    }

    pub fn from_pure(psi: &CVector, spec: SpaceSpec) -> Result<Self> {
        Self::tripartite(psi * psi.adjoint(), spec)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        // tr ρ² = Σ|ρ_ij|² for Hermitian ρ.
        self.matrix.norm_squared()
    }

    pub fn position(&self, s: Subsystem) -> Option<usize> {
        self.subsystems.iter().position(|&x| x == s)
    }
}
