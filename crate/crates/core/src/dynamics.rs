//! Lindblad and Schrödinger time evolution on the tripartite space.
//!
//! The master equation is dρ/dt = −i[H, ρ] + Σ_k γ_k (L_k ρ L_k† − ½{L_k†L_k, ρ}),
//! with H/ħ in rad/s and t in seconds. Closed systems started from a pure state
//! are propagated as state vectors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{CMatrix, CVector, Operators, SpaceSpec};
use crate::linalg::hermitian_eigenvalues;
use crate::ode::{self, IntegratorOptions, StepStats};
use crate::sparse::Csr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DephasingConvention {
    /// Collapse operator σᶻ with the quoted rate γ.
    #[default]
    Literal,
    /// Collapse operator σᶻ with rate γ/2, i.e. σᶻ/√2 at rate γ.
    Halved,
}

/// Decay and dephasing rates in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DissipationRates {
    pub kappa_m: f64,
    pub kappa_a: f64,
    pub kappa_s: f64,
    pub gamma_a: f64,
    pub gamma_s: f64,
}

impl DissipationRates {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in
            [("kappa_m", self.kappa_m), ("kappa_a", self.kappa_a), ("kappa_s", self.kappa_s), ("gamma_a", self.gamma_a), ("gamma_s", self.gamma_s)]
        {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::param(name, format!("rate must be non-negative and finite, got {v}")));
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        [self.kappa_m, self.kappa_a, self.kappa_s, self.gamma_a, self.gamma_s].iter().all(|&v| v == 0.0)
    }
}

#[derive(Debug, Clone)]
pub struct Channel {
    pub label: &'static str,
    pub operator: CMatrix,
    pub rate: f64,
}

#[derive(Debug, Clone)]
pub struct LindbladModel {
    pub hamiltonian: CMatrix,
    pub channels: Vec<Channel>,
}

impl LindbladModel {
    pub fn closed(hamiltonian: CMatrix) -> Self {
        Self { hamiltonian, channels: Vec::new() }
    }

    pub fn new(hamiltonian: CMatrix, channels: Vec<Channel>) -> Result<Self> {
        let d = hamiltonian.nrows();
        if hamiltonian.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: hamiltonian.ncols() });
        }
        for ch in &channels {
            if !(ch.rate >= 0.0 && ch.rate.is_finite()) {
                return Err(Error::param("rate", format!("channel {} has rate {}", ch.label, ch.rate)));
            }
            if ch.operator.nrows() != d || ch.operator.ncols() != d {
                return Err(Error::DimensionMismatch { expected: d, got: ch.operator.nrows() });
            }
        }
        Ok(Self { hamiltonian, channels })
    }

    /// Channels m, σₐ⁻, σₛ⁻, σₐᶻ, σₛᶻ with the given rates; zero-rate channels are omitted.
    pub fn with_rates(hamiltonian: CMatrix, ops: &Operators, rates: &DissipationRates, convention: DephasingConvention) -> Result<Self> {
        rates.validate()?;
        let dephasing = match convention {
            DephasingConvention::Literal => 1.0,
            DephasingConvention::Halved => 0.5,
        };
        let all = [
            ("kappa_m", &ops.m, rates.kappa_m),
            ("kappa_a", &ops.sa_minus, rates.kappa_a),
            ("kappa_s", &ops.ss_minus, rates.kappa_s),
            ("gamma_a", &ops.sa_z, rates.gamma_a * dephasing),
            ("gamma_s", &ops.ss_z, rates.gamma_s * dephasing),
        ];
        let channels = all.into_iter().filter(|(_, _, r)| *r > 0.0).map(|(label, op, rate)| Channel { label, operator: op.clone(), rate }).collect();
        Self::new(hamiltonian, channels)
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    pub fn is_closed(&self) -> bool {
        self.channels.iter().all(|c| c.rate == 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Pure(CVector),
    Mixed(CMatrix),
}

impl State {
    pub fn dim(&self) -> usize {
        match self {
            State::Pure(v) => v.len(),
            State::Mixed(m) => m.nrows(),
        }
    }

    pub fn density(&self) -> CMatrix {
        match self {
            State::Pure(v) => v * v.adjoint(),
            State::Mixed(m) => m.clone(),
        }
    }

    /// Diagonal of the density matrix in the product basis.
    pub fn diagonal(&self) -> Vec<f64> {
        match self {
            State::Pure(v) => v.iter().map(|c| c.norm_sqr()).collect(),
            State::Mixed(m) => (0..m.nrows()).map(|i| m[(i, i)].re).collect(),
        }
    }

    /// tr(ρ A).
    pub fn expectation(&self, a: &CMatrix) -> Complex64 {
        match self {
            State::Pure(v) => (v.adjoint() * a * v)[(0, 0)],
            State::Mixed(m) => (m * a).trace(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    /// Non-negative, finite, strictly increasing sample times (s).
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times.iter().any(|t| !t.is_finite() || *t < 0.0) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidTimeGrid);
        }
        Ok(Self { times })
    }

    /// `samples` equally spaced points on [0, t_end], both ends included.
    pub fn uniform(t_end: f64, samples: usize) -> Result<Self> {
        if samples < 2 || !(t_end > 0.0) || !t_end.is_finite() {
            return Err(Error::InvalidTimeGrid);
        }
        let step = t_end / (samples - 1) as f64;
        let mut times: Vec<f64> = (0..samples).map(|k| k as f64 * step).collect();
        times[samples - 1] = t_end;
        Self::new(times)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InvariantTolerances {
    pub trace: f64,
    pub hermiticity: f64,
    pub positivity: f64,
    /// Whether to diagonalize every sample to check positivity.
    pub check_positivity: bool,
}

impl Default for InvariantTolerances {
    fn default() -> Self {
        Self { trace: 1e-8, hermiticity: 1e-9, positivity: 1e-8, check_positivity: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolveOptions {
    pub integrator: IntegratorOptions,
    pub invariants: InvariantTolerances,
}

/// Worst invariant deviations seen over a run.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct InvariantReport {
    pub max_trace_error: f64,
    pub max_hermiticity_error: f64,
    /// Most negative eigenvalue seen (0 for pure-state runs).
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetadata {
    pub dim: usize,
    pub pure_state_propagation: bool,
    pub options: EvolveOptions,
    pub steps: StepStats,
    pub invariants: InvariantReport,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub metadata: RunMetadata,
}

fn check_initial(state: &State, dim: usize) -> Result<()> {
    if state.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: state.dim() });
    }
    match state {
        State::Pure(v) => {
            let norm = v.norm_squared();
            if (norm - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidState(format!("state vector has squared norm {norm}")));
            }
        }
        State::Mixed(m) => {
            let tr = m.trace();
            if (tr - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
                return Err(Error::InvalidState(format!("trace is {tr}")));
            }
            let herm = (m - m.adjoint()).norm();
            if herm > 1e-10 {
                return Err(Error::InvalidState(format!("not Hermitian: ‖ρ − ρ†‖ = {herm:e}")));
            }
            let min = min_eigenvalue(m)?;
            if min < -1e-10 {
                return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
            }
        }
    }
    Ok(())
}

fn min_eigenvalue(m: &CMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?.first().copied().unwrap_or(0.0))
}

fn check_sample(state: &State, t: f64, tol: &InvariantTolerances, report: &mut InvariantReport) -> Result<()> {
    match state {
        State::Pure(v) => {
            let err = (v.norm_squared() - 1.0).abs();
            report.max_trace_error = report.max_trace_error.max(err);
            if err > tol.trace {
                return Err(Error::InvariantViolation { t, what: format!("norm drift {err:e}") });
            }
        }
        State::Mixed(m) => {
            let err = (m.trace() - Complex64::new(1.0, 0.0)).norm();
            report.max_trace_error = report.max_trace_error.max(err);
            if err > tol.trace {
                return Err(Error::InvariantViolation { t, what: format!("trace drift {err:e}") });
            }
            let herm = (m - m.adjoint()).norm();
            report.max_hermiticity_error = report.max_hermiticity_error.max(herm);
            if herm > tol.hermiticity {
                return Err(Error::InvariantViolation { t, what: format!("‖ρ − ρ†‖ = {herm:e}") });
            }
            if tol.check_positivity {
                let min = min_eigenvalue(m)?;
                report.min_eigenvalue = report.min_eigenvalue.min(min);
                if min < -tol.positivity {
                    return Err(Error::InvariantViolation { t, what: format!("eigenvalue {min:e}") });
                }
            }
        }
    }
    Ok(())
}

/// Evolves `state0` (taken at t = 0) and hands each sample to `observe`.
pub fn evolve_with<O>(state0: &State, model: &LindbladModel, grid: &TimeGrid, opts: &EvolveOptions, mut observe: O) -> Result<RunMetadata>
where
    O: FnMut(usize, f64, &State) -> Result<()>,
{
    let dim = model.dim();
    check_initial(state0, dim)?;
    let mut report = InvariantReport::default();
    let tol = opts.invariants;

    if let (State::Pure(psi), true) = (state0, model.is_closed()) {
        let mut gen = Csr::from_dense(&model.hamiltonian);
        gen.scale(Complex64::new(0.0, -1.0));
        let mut y: Vec<Complex64> = psi.iter().copied().collect();
        let steps = ode::integrate(
            |_, y, dy| gen.mul_vec(y, dy),
            0.0,
            &mut y,
            grid.times(),
            &opts.integrator,
            |k, t, y| {
                let s = State::Pure(CVector::from_column_slice(y));
                check_sample(&s, t, &tol, &mut report)?;
                observe(k, t, &s)
            },
        )?;
        return Ok(RunMetadata { dim, pure_state_propagation: true, options: *opts, steps, invariants: report });
    }

    // K = −iH − ½ Σ γ L†L, so that dρ = Kρ + (Kρ)† + Σ γ L ρ L†.
    let mut k_dense = &model.hamiltonian * Complex64::new(0.0, -1.0);
    let mut jumps = Vec::new();
    for ch in model.channels.iter().filter(|c| c.rate > 0.0) {
        k_dense -= ch.operator.adjoint() * &ch.operator * Complex64::new(0.5 * ch.rate, 0.0);
        jumps.push((Csr::from_dense(&ch.operator), ch.rate));
    }
    let k_op = Csr::from_dense(&k_dense);
    let n2 = dim * dim;
    let mut w = vec![Complex64::default(); n2];
    let mut u = vec![Complex64::default(); n2];
    let mut v = vec![Complex64::default(); n2];
    let rhs = |_: f64, rho: &[Complex64], drho: &mut [Complex64]| {
        k_op.mul_mat(rho, &mut w);
        // Column-major: element (i, j) lives at i + j·dim.
        for j in 0..dim {
            for i in 0..dim {
                drho[i + j * dim] = w[i + j * dim] + w[j + i * dim].conj();
            }
        }
        for (l, rate) in &jumps {
            l.mul_mat(rho, &mut u);
            for j in 0..dim {
                for i in 0..dim {
                    v[i + j * dim] = u[j + i * dim].conj();
                }
            }
            l.mul_mat(&v, &mut w);
            // Symmetrized so every stage, and hence ρ, stays Hermitian to the bit.
            let half = 0.5 * rate;
            for j in 0..dim {
                for i in 0..dim {
                    drho[i + j * dim] += (w[i + j * dim] + w[j + i * dim].conj()) * half;
                }
            }
        }
    };
    let rho0 = state0.density();
    let rho0 = (&rho0 + rho0.adjoint()) * Complex64::new(0.5, 0.0);
    let mut y: Vec<Complex64> = rho0.as_slice().to_vec();
    let steps = ode::integrate(rhs, 0.0, &mut y, grid.times(), &opts.integrator, |k, t, y| {
        let s = State::Mixed(CMatrix::from_column_slice(dim, dim, y));
        check_sample(&s, t, &tol, &mut report)?;
        observe(k, t, &s)
    })?;
    Ok(RunMetadata { dim, pure_state_propagation: false, options: *opts, steps, invariants: report })
}

/// Evolves and keeps every sample.
pub fn evolve(state0: &State, model: &LindbladModel, grid: &TimeGrid, opts: &EvolveOptions) -> Result<Trajectory> {
    let mut states = Vec::with_capacity(grid.len());
    let metadata = evolve_with(state0, model, grid, opts, |_, _, s| {
        states.push(s.clone());
        Ok(())
    })?;
    Ok(Trajectory { times: grid.times().to_vec(), states, metadata })
}

/// A product-basis state |n, asq, scq⟩ whose population is to be reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisLabel {
    pub n: usize,
    pub asq: usize,
    pub scq: usize,
}

impl BasisLabel {
    pub fn new(n: usize, asq: usize, scq: usize) -> Self {
        Self { n, asq, scq }
    }

    /// CSV column name, e.g. `P_1_dn_e`.
    pub fn column(&self) -> String {
        let a = if self.asq == 1 { "up" } else { "dn" };
        let s = if self.scq == 1 { "e" } else { "g" };
        format!("P_{}_{}_{}", self.n, a, s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PopulationRecord {
    pub t: f64,
    pub p_up: f64,
    pub p_e: f64,
    pub n_mag: f64,
    pub basis: Vec<f64>,
}

/// Values within this margin outside [0, 1] are integration noise; larger ones are errors.
pub const POPULATION_MARGIN: f64 = 1e-8;

impl PopulationRecord {
    /// Probabilities clamped to [0, 1]; ⟨n⟩ clamped to ≥ 0.
    pub fn clamped(&self) -> Self {
        let c = |p: f64| p.clamp(0.0, 1.0);
        Self { t: self.t, p_up: c(self.p_up), p_e: c(self.p_e), n_mag: self.n_mag.max(0.0), basis: self.basis.iter().map(|&p| c(p)).collect() }
    }

    pub fn within_bounds(&self) -> bool {
        let ok = |p: f64| (-POPULATION_MARGIN..=1.0 + POPULATION_MARGIN).contains(&p);
        ok(self.p_up) && ok(self.p_e) && self.basis.iter().all(|&p| ok(p))
    }
}

/// P_↑ = tr ρσₐ⁺σₐ⁻, P_e = tr ρσₛ⁺σₛ⁻, ⟨n⟩ and the requested basis populations.
pub fn populations(t: f64, state: &State, spec: SpaceSpec, basis: &[BasisLabel]) -> Result<PopulationRecord> {
    if state.dim() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), got: state.dim() });
    }
    let diag = state.diagonal();
    let (mut p_up, mut p_e, mut n_mag) = (0.0, 0.0, 0.0);
    for n in 0..spec.fock_cutoff {
        for a in 0..2 {
            for s in 0..2 {
                let p = diag[spec.index(n, a, s)];
                if a == 1 {
                    p_up += p;
                }
                if s == 1 {
                    p_e += p;
                }
                n_mag += n as f64 * p;
            }
        }
    }
    let basis = basis
        .iter()
        .map(|b| {
            if b.n >= spec.fock_cutoff || b.asq > 1 || b.scq > 1 {
                Err(Error::InvalidState(format!("basis state {} outside the truncated space", b.column())))
            } else {
                Ok(diag[spec.index(b.n, b.asq, b.scq)])
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PopulationRecord { t, p_up, p_e, n_mag, basis })
}
