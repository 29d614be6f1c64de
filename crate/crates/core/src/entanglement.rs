//! Entanglement measures on the tripartite state and its two-party reductions.
//!
//! All logarithms are base 2. The partially transposed subsystem of a cut is
//! always the first one named (M for M|AS, A for A|S, ...).

use nalgebra::SVD;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::State;
use crate::error::{Error, Result};
use crate::hilbert::{CMatrix, CVector, DensityMatrix, SpaceSpec, Subsystem};
use crate::linalg::{hermitian_eigen, hermitian_eigenvalues};

/// Eigenvalues below this magnitude are treated as exact zeros.
pub const EIGEN_FLOOR: f64 = 1e-12;
/// Residuals this far below zero are attributed to round-off and clamped.
pub const RESIDUAL_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Bipartition {
    /// M|AS
    MagnonRest,
    /// A|MS
    AsqRest,
    /// S|MA
    ScqRest,
    /// M|A within ρ_MA
    MagnonAsq,
    /// M|S within ρ_MS
    MagnonScq,
    /// A|S within ρ_AS
    AsqScq,
}

impl Bipartition {
    pub const ALL: [Bipartition; 6] =
        [Bipartition::MagnonRest, Bipartition::AsqRest, Bipartition::ScqRest, Bipartition::MagnonAsq, Bipartition::MagnonScq, Bipartition::AsqScq];

    /// The subsystem whose indices are transposed.
    pub fn first(self) -> Subsystem {
        match self {
            Bipartition::MagnonRest | Bipartition::MagnonAsq | Bipartition::MagnonScq => Subsystem::Magnon,
            Bipartition::AsqRest | Bipartition::AsqScq => Subsystem::Asq,
            Bipartition::ScqRest => Subsystem::Scq,
        }
    }

    /// Subsystems the state is reduced to before transposing; `None` for one-vs-rest cuts.
    pub fn pair(self) -> Option<[Subsystem; 2]> {
        match self {
            Bipartition::MagnonAsq => Some([Subsystem::Magnon, Subsystem::Asq]),
            Bipartition::MagnonScq => Some([Subsystem::Magnon, Subsystem::Scq]),
            Bipartition::AsqScq => Some([Subsystem::Asq, Subsystem::Scq]),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Bipartition::MagnonRest => "M|AS",
            Bipartition::AsqRest => "A|MS",
            Bipartition::ScqRest => "S|MA",
            Bipartition::MagnonAsq => "M|A",
            Bipartition::MagnonScq => "M|S",
            Bipartition::AsqScq => "A|S",
        }
    }
}

// Mixed-radix digits of a flat index, most significant first.
fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    out
}

fn compose(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&d, &n)| acc * n + d)
}

/// Reduced state on `keep`, in tensor order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[Subsystem]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::EmptySelection);
    }
    let mut kept_pos = Vec::new();
    for &s in keep {
        kept_pos.push(rho.position(s).ok_or(Error::MissingSubsystem(s.label()))?);
    }
    kept_pos.sort_unstable();
    kept_pos.dedup();
    let traced_pos: Vec<usize> = (0..rho.dims.len()).filter(|p| !kept_pos.contains(p)).collect();
    let kept_dims: Vec<usize> = kept_pos.iter().map(|&p| rho.dims[p]).collect();
    let traced_dims: Vec<usize> = traced_pos.iter().map(|&p| rho.dims[p]).collect();
    let dk: usize = kept_dims.iter().product();
    let dt: usize = traced_dims.iter().product();

    // full[a * dt + t] = flat index of (kept digits a, traced digits t).
    let mut full = vec![0usize; dk * dt];
    let mut scratch = vec![0usize; rho.dims.len()];
    for a in 0..dk {
        let ad = digits(a, &kept_dims);
        for t in 0..dt {
            let td = digits(t, &traced_dims);
            for (k, &p) in kept_pos.iter().enumerate() {
                scratch[p] = ad[k];
            }
            for (k, &p) in traced_pos.iter().enumerate() {
                scratch[p] = td[k];
            }
            full[a * dt + t] = compose(&scratch, &rho.dims);
        }
    }
    let mut out = CMatrix::zeros(dk, dk);
    for b in 0..dk {
        for a in 0..dk {
            let mut acc = Complex64::default();
            for t in 0..dt {
                acc += rho.matrix[(full[a * dt + t], full[b * dt + t])];
            }
            out[(a, b)] = acc;
        }
    }
    let subsystems = kept_pos.iter().map(|&p| rho.subsystems[p]).collect();
    DensityMatrix::new(out, subsystems, kept_dims)
}

/// ρ^{T_s}: transpose of the indices of subsystem `s`.
pub fn partial_transpose(rho: &DensityMatrix, s: Subsystem) -> Result<CMatrix> {
    let pos = rho.position(s).ok_or(Error::MissingSubsystem(s.label()))?;
    let stride: usize = rho.dims[pos + 1..].iter().product();
    let d = rho.dims[pos];
    let digit = |i: usize| (i / stride) % d;
    let n = rho.dim();
    let mut out = CMatrix::zeros(n, n);
    for j in 0..n {
        let dj = digit(j);
        for i in 0..n {
            let di = digit(i);
            let ni = i - di * stride + dj * stride;
            let nj = j - dj * stride + di * stride;
            out[(ni, nj)] = rho.matrix[(i, j)];
        }
    }
    Ok(out)
}

fn trace_norm(eigenvalues: &[f64]) -> f64 {
    eigenvalues.iter().filter(|l| l.abs() >= EIGEN_FLOOR).map(|l| l.abs()).sum()
}

/// 𝓔 = log₂‖ρ^{T}‖₁ for the given cut.
pub fn log_negativity(rho: &DensityMatrix, cut: Bipartition) -> Result<f64> {
    let reduced;
    let target = match cut.pair() {
        Some(pair) if rho.subsystems.len() > 2 => {
            reduced = partial_trace(rho, &pair)?;
            &reduced
        }
        _ => rho,
    };
    let pt = partial_transpose(target, cut.first())?;
    Ok(trace_norm(&hermitian_eigenvalues(&pt)?).log2().max(0.0))
}

/// −tr ρ log₂ ρ.
pub fn von_neumann_entropy(rho: &CMatrix) -> Result<f64> {
    Ok(entropy_of(&hermitian_eigenvalues(rho)?))
}

fn entropy_of(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > EIGEN_FLOOR).map(|&x| -x * x.log2()).sum::<f64>().max(0.0)
}

// Eigenvalues within round-off of zero are dropped: their square roots would
// otherwise be of order √ε.
fn sqrt_psd(a: &CMatrix) -> Result<CMatrix> {
    let (values, vectors) = hermitian_eigen(a)?;
    let floor = 64.0 * f64::EPSILON * values.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let roots = CVector::from_iterator(values.len(), values.iter().map(|&l| Complex64::new(if l > floor { l.sqrt() } else { 0.0 }, 0.0)));
    Ok(&vectors * CMatrix::from_diagonal(&roots) * vectors.adjoint())
}

/// Wootters concurrence of a two-qubit state.
pub fn concurrence(rho: &CMatrix) -> Result<f64> {
    if rho.nrows() != 4 || rho.ncols() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: rho.nrows() });
    }
    // σʸ ⊗ σʸ is real in this basis: antidiagonal (−1, 1, 1, −1).
    let mut yy = CMatrix::zeros(4, 4);
    for (i, s) in [-1.0, 1.0, 1.0, -1.0].into_iter().enumerate() {
        yy[(i, 3 - i)] = Complex64::new(s, 0.0);
    }
    // λ_i are the singular values of √ρ √ρ̃, with √ρ̃ = (σʸ⊗σʸ) √ρ* (σʸ⊗σʸ).
    let root = sqrt_psd(rho)?;
    let root_tilde = &yy * root.conjugate() * &yy;
    let mut lambdas: Vec<f64> = SVD::new(&root * root_tilde, false, false).singular_values.iter().copied().collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    pub r_m_as: f64,
    pub r_a_ms: f64,
    pub r_s_ma: f64,
    pub r_min: f64,
    /// True if any residual was within the round-off floor below zero and clamped.
    pub clamped: bool,
}

fn residuals_from(e: &PairwiseNegativities) -> Residuals {
    let mut clamped = false;
    let mut fix = |r: f64| {
        if (-RESIDUAL_FLOOR..0.0).contains(&r) {
            clamped = true;
            0.0
        } else {
            r
        }
    };
    let r_m_as = fix(e.m_as.powi(2) - e.m_a.powi(2) - e.m_s.powi(2));
    let r_a_ms = fix(e.a_ms.powi(2) - e.m_a.powi(2) - e.a_s.powi(2));
    let r_s_ma = fix(e.s_ma.powi(2) - e.m_s.powi(2) - e.a_s.powi(2));
    if clamped {
        log::debug!("clamped residual entanglement within -{RESIDUAL_FLOOR:e}");
    }
    Residuals { r_m_as, r_a_ms, r_s_ma, r_min: r_m_as.min(r_a_ms).min(r_s_ma), clamped }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
struct PairwiseNegativities {
    m_as: f64,
    a_ms: f64,
    s_ma: f64,
    m_a: f64,
    m_s: f64,
    a_s: f64,
}

fn negativities(rho: &DensityMatrix) -> Result<PairwiseNegativities> {
    Ok(PairwiseNegativities {
        m_as: log_negativity(rho, Bipartition::MagnonRest)?,
        a_ms: log_negativity(rho, Bipartition::AsqRest)?,
        s_ma: log_negativity(rho, Bipartition::ScqRest)?,
        m_a: log_negativity(rho, Bipartition::MagnonAsq)?,
        m_s: log_negativity(rho, Bipartition::MagnonScq)?,
        a_s: log_negativity(rho, Bipartition::AsqScq)?,
    })
}

/// R_{i|jk} = 𝓔²_{i|jk} − 𝓔²_{i|j} − 𝓔²_{i|k} for all three splits.
pub fn residual_entanglement(rho: &DensityMatrix) -> Result<Residuals> {
    Ok(residuals_from(&negativities(rho)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntanglementReport {
    pub t: f64,
    pub e_m_as: f64,
    pub e_a_ms: f64,
    pub e_s_ma: f64,
    pub e_m_a: f64,
    pub e_m_s: f64,
    pub e_a_s: f64,
    pub r_m_as: f64,
    pub r_a_ms: f64,
    pub r_s_ma: f64,
    pub r_min: f64,
    /// One-vs-rest entropies, defined for pure global states only.
    pub s_m_as: Option<f64>,
    pub s_a_ms: Option<f64>,
    pub s_s_ma: Option<f64>,
    pub c_a_s: f64,
    /// Entropy of ρ_AS.
    pub s_two_qubit: f64,
}

impl EntanglementReport {
    /// 𝓔²_{i|jk} − 𝓔²_{i|j} − 𝓔²_{i|k} before clamping, smallest over i.
    pub fn monogamy_slack(&self) -> f64 {
        let a = self.e_m_as.powi(2) - self.e_m_a.powi(2) - self.e_m_s.powi(2);
        let b = self.e_a_ms.powi(2) - self.e_m_a.powi(2) - self.e_a_s.powi(2);
        let c = self.e_s_ma.powi(2) - self.e_m_s.powi(2) - self.e_a_s.powi(2);
        a.min(b).min(c)
    }
}

// Schmidt coefficients² of a pure state across subsystem `pos` vs the rest.
fn schmidt_weights(psi: &CVector, dims: &[usize], pos: usize) -> Vec<f64> {
    let d = dims[pos];
    let rest = psi.len() / d;
    let mut m = CMatrix::zeros(d, rest);
    for i in 0..psi.len() {
        let dg = digits(i, dims);
        let mut r = 0;
        for (k, (&x, &n)) in dg.iter().zip(dims).enumerate() {
            if k != pos {
                r = r * n + x;
            }
        }
        m[(dg[pos], r)] = psi[i];
    }
    SVD::new(m, false, false).singular_values.iter().map(|s| s * s).collect()
}

/// Full report for one sample. Pure states use the Schmidt decomposition for the
/// one-vs-rest cuts, where ‖ρ^{T}‖₁ = (Σ_k √p_k)² holds exactly.
pub fn entanglement_report(t: f64, state: &State, spec: SpaceSpec) -> Result<EntanglementReport> {
    if state.dim() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), got: state.dim() });
    }
    let rho = DensityMatrix::tripartite(state.density(), spec)?;
    let dims = spec.dims();
    let (one_vs_rest, entropies) = match state {
        State::Pure(psi) => {
            let mut e = [0.0; 3];
            let mut s = [0.0; 3];
            for pos in 0..3 {
                let p = schmidt_weights(psi, &dims, pos);
                let root_sum: f64 = p.iter().map(|x| x.max(0.0).sqrt()).sum();
                e[pos] = (2.0 * root_sum.log2()).max(0.0);
                s[pos] = entropy_of(&p);
            }
            (e, Some(s))
        }
        State::Mixed(_) => (
            [
                log_negativity(&rho, Bipartition::MagnonRest)?,
                log_negativity(&rho, Bipartition::AsqRest)?,
                log_negativity(&rho, Bipartition::ScqRest)?,
            ],
            None,
        ),
    };
    let rho_ma = partial_trace(&rho, &[Subsystem::Magnon, Subsystem::Asq])?;
    let rho_ms = partial_trace(&rho, &[Subsystem::Magnon, Subsystem::Scq])?;
    let rho_as = partial_trace(&rho, &[Subsystem::Asq, Subsystem::Scq])?;
    let neg = PairwiseNegativities {
        m_as: one_vs_rest[0],
        a_ms: one_vs_rest[1],
        s_ma: one_vs_rest[2],
        m_a: log_negativity(&rho_ma, Bipartition::MagnonAsq)?,
        m_s: log_negativity(&rho_ms, Bipartition::MagnonScq)?,
        a_s: log_negativity(&rho_as, Bipartition::AsqScq)?,
    };
    let res = residuals_from(&neg);
    Ok(EntanglementReport {
        t,
        e_m_as: neg.m_as,
        e_a_ms: neg.a_ms,
        e_s_ma: neg.s_ma,
        e_m_a: neg.m_a,
        e_m_s: neg.m_s,
        e_a_s: neg.a_s,
        r_m_as: res.r_m_as,
        r_a_ms: res.r_a_ms,
        r_s_ma: res.r_s_ma,
        r_min: res.r_min,
        s_m_as: entropies.map(|s| s[0]),
        s_a_ms: entropies.map(|s| s[1]),
        s_s_ma: entropies.map(|s| s[2]),
        c_a_s: concurrence(&rho_as.matrix)?,
        s_two_qubit: von_neumann_entropy(&rho_as.matrix)?,
    })
}

/// Reports for many samples on the current rayon pool; output order follows input order.
pub fn entanglement_reports(samples: &[(f64, State)], spec: SpaceSpec) -> Vec<Result<EntanglementReport>> {
    samples.par_iter().map(|(t, s)| entanglement_report(*t, s, spec)).collect()
}

/// Sample Pearson correlation coefficient; `None` if either series is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len().min(y.len());
    if n < 2 {
        return None;
    }
    let mx = x[..n].iter().sum::<f64>() / n as f64;
    let my = y[..n].iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (dx, dy) = (x[i] - mx, y[i] - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}
