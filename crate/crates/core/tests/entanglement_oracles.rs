use nalgebra::DMatrix;
use num_complex::Complex64;
use triad_core::hilbert::{basis_state, coherent_state, product_state, QUBIT_HIGH, QUBIT_LOW};
use triad_core::*;

fn ket3(bits: &[(usize, usize, usize, f64)]) -> CVector {
    let spec = SpaceSpec::new(2).unwrap();
    let mut v = CVector::zeros(8);
    for &(n, a, s, c) in bits {
        v += basis_state(spec, n, a, s).unwrap() * Complex64::new(c, 0.0);
    }
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

// Brute force: transpose bit `k` (0 = most significant) of an n-qubit matrix.
fn brute_pt(rho: &CMatrix, qubits: usize, k: usize) -> CMatrix {
    let d = 1 << qubits;
    let shift = qubits - 1 - k;
    DMatrix::from_fn(d, d, |i, j| {
        let (bi, bj) = ((i >> shift) & 1, (j >> shift) & 1);
        let i2 = (i & !(1 << shift)) | (bj << shift);
        let j2 = (j & !(1 << shift)) | (bi << shift);
        rho[(i2, j2)]
    })
}

fn brute_log_neg(m: &CMatrix) -> f64 {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().map(|l| l.abs()).sum::<f64>().log2()
}

// Brute-force trace over qubit `k` of an n-qubit matrix.
fn brute_trace_out(rho: &CMatrix, qubits: usize, k: usize) -> CMatrix {
    let shift = qubits - 1 - k;
    let d = 1 << (qubits - 1);
    let expand = |r: usize, b: usize| {
        let high = (r >> shift) << (shift + 1);
        let low = r & ((1 << shift) - 1);
        high | (b << shift) | low
    };
    DMatrix::from_fn(d, d, |i, j| (0..2).map(|b| rho[(expand(i, b), expand(j, b))]).sum())
}

#[test]
fn ghz_against_brute_force() {
    let spec = SpaceSpec::new(2).unwrap();
    let psi = ket3(&[(0, 0, 0, 1.0), (1, 1, 1, 1.0)]);
    let rho = DensityMatrix::from_pure(&psi, spec).unwrap();
    for (k, cut) in [Bipartition::MagnonRest, Bipartition::AsqRest, Bipartition::ScqRest].into_iter().enumerate() {
        let ours = log_negativity(&rho, cut).unwrap();
        let oracle = brute_log_neg(&brute_pt(&rho.matrix, 3, k));
        assert!((ours - oracle).abs() < 1e-10 && (ours - 1.0).abs() < 1e-10);
    }
    let pairs = [
        (Bipartition::AsqScq, [Subsystem::Asq, Subsystem::Scq], 0),
        (Bipartition::MagnonScq, [Subsystem::Magnon, Subsystem::Scq], 1),
        (Bipartition::MagnonAsq, [Subsystem::Magnon, Subsystem::Asq], 2),
    ];
    for (cut, keep, traced) in pairs {
        let reduced = partial_trace(&rho, &keep).unwrap();
        let oracle_rho = brute_trace_out(&rho.matrix, 3, traced);
        assert!((&reduced.matrix - &oracle_rho).norm() < 1e-12);
        let ours = log_negativity(&reduced, cut).unwrap();
        let oracle = brute_log_neg(&brute_pt(&oracle_rho, 2, 0));
        assert!((ours - oracle).abs() < 1e-10 && ours.abs() < 1e-10);
    }
    let r = residual_entanglement(&rho).unwrap();
    for v in [r.r_m_as, r.r_a_ms, r.r_s_ma, r.r_min] {
        assert!((v - 1.0).abs() < 1e-10);
    }
    let report = entanglement_report(0.0, &State::Pure(psi), spec).unwrap();
    assert!((report.e_m_as - 1.0).abs() < 1e-10 && report.e_a_s.abs() < 1e-10 && report.c_a_s.abs() < 1e-10);
}

#[test]
fn w_state_against_brute_force() {
    // Genuinely tripartite with nonzero pairwise entanglement.
    let spec = SpaceSpec::new(2).unwrap();
    let psi = ket3(&[(1, 0, 0, 1.0), (0, 1, 0, 1.0), (0, 0, 1, 1.0)]);
    let rho = DensityMatrix::from_pure(&psi, spec).unwrap();
    for (k, cut) in [Bipartition::MagnonRest, Bipartition::AsqRest, Bipartition::ScqRest].into_iter().enumerate() {
        let oracle = brute_log_neg(&brute_pt(&rho.matrix, 3, k));
        assert!((log_negativity(&rho, cut).unwrap() - oracle).abs() < 1e-10);
    }
    let ras = partial_trace(&rho, &[Subsystem::Asq, Subsystem::Scq]).unwrap();
    let oracle = brute_log_neg(&brute_pt(&brute_trace_out(&rho.matrix, 3, 0), 2, 0));
    assert!(oracle > 0.1);
    assert!((log_negativity(&ras, Bipartition::AsqScq).unwrap() - oracle).abs() < 1e-10);
    // Pure two-qubit W reduction: concurrence 2/3.
    assert!((concurrence(&ras.matrix).unwrap() - 2.0 / 3.0).abs() < 1e-10);
    let report = entanglement_report(0.0, &State::Pure(psi), spec).unwrap();
    assert!(report.monogamy_slack() > -1e-6);
}

#[test]
fn bell_and_product() {
    let spec = SpaceSpec::new(2).unwrap();
    let bell = ket3(&[(0, 0, 0, 1.0), (0, 1, 1, 1.0)]);
    let report = entanglement_report(0.0, &State::Pure(bell), spec).unwrap();
    assert!((report.e_a_s - 1.0).abs() < 1e-10 && (report.c_a_s - 1.0).abs() < 1e-10);
    assert!(report.e_m_as.abs() < 1e-10);
    let product = ket3(&[(1, 1, 0, 1.0)]);
    let report = entanglement_report(0.0, &State::Pure(product), spec).unwrap();
    for v in [report.e_m_as, report.e_a_ms, report.e_s_ma, report.e_m_a, report.e_m_s, report.e_a_s, report.r_min, report.c_a_s] {
        assert!(v.abs() < 1e-10);
    }
}

fn eff_sum_samples(spec: SpaceSpec, alpha: f64, t_end: f64, samples: usize) -> Vec<(f64, State)> {
    let c = CouplingSet::three_body(3.0, 5.0, 2.0, 1.0, 0.0);
    let h = build_hamiltonian(HamiltonianKind::EffSum, &c, spec, Frame::Rotating).unwrap();
    let psi = product_state(&coherent_state(Complex64::new(alpha, 0.0), spec), QUBIT_HIGH, QUBIT_LOW).unwrap();
    let traj =
        evolve(&State::Pure(psi), &LindbladModel::closed(h.matrix), &TimeGrid::uniform(t_end, samples).unwrap(), &EvolveOptions::default()).unwrap();
    traj.times.into_iter().zip(traj.states).collect()
}

#[test]
fn reduced_coherence_matches_amplitude_sum() {
    let spec = SpaceSpec::new(30).unwrap();
    let samples = eff_sum_samples(spec, 2.5, 7.3, 2);
    let State::Pure(psi) = &samples[1].1 else { unreachable!() };
    // ⟨↓e|ρ_AS|↑g⟩ = Σ_n C_{n,↓,e} C*_{n,↑,g}.
    let symbolic: Complex64 = (0..spec.fock_cutoff).map(|n| psi[spec.index(n, 0, 1)] * psi[spec.index(n, 1, 0)].conj()).sum();
    let rho = DensityMatrix::from_pure(psi, spec).unwrap();
    let ras = partial_trace(&rho, &[Subsystem::Asq, Subsystem::Scq]).unwrap();
    // Two-qubit index 2a + s.
    assert!((ras.matrix[(1, 2)] - symbolic).norm() < 1e-12);
    assert!(symbolic.norm() > 0.1);
    for (i, j) in [(0, 1), (0, 2), (0, 3), (1, 3), (2, 3)] {
        assert!(ras.matrix[(i, j)].norm() < 1e-12);
    }
}

#[test]
fn eff_sum_structure_along_trajectory() {
    let spec = SpaceSpec::new(30).unwrap();
    let samples = eff_sum_samples(spec, 2.5, 20.0, 81);
    for r in entanglement_reports(&samples, spec) {
        let r = r.unwrap();
        assert!(r.e_m_a < 1e-8 && r.e_m_s < 1e-8, "t = {}", r.t);
        assert!(r.monogamy_slack() > -1e-6);
        assert!((r.r_m_as - r.e_m_as.powi(2)).abs() < 1e-6);
        assert!((r.e_a_s.powi(2) + r.r_a_ms - r.e_a_ms.powi(2)).abs() < 1e-6);
        assert!(r.r_a_ms <= r.r_m_as + 1e-6);
        assert!(r.r_min <= r.r_m_as.min(r.r_a_ms).min(r.r_s_ma) + 1e-15);
    }
}

#[test]
fn mixed_and_pure_paths_agree() {
    let spec = SpaceSpec::new(12).unwrap();
    let samples = eff_sum_samples(spec, 1.5, 4.0, 3);
    let (t, s) = &samples[2];
    let pure = entanglement_report(*t, s, spec).unwrap();
    let mixed = entanglement_report(*t, &State::Mixed(s.density()), spec).unwrap();
    for (a, b) in [(pure.e_m_as, mixed.e_m_as), (pure.e_a_ms, mixed.e_a_ms), (pure.e_s_ma, mixed.e_s_ma), (pure.r_min, mixed.r_min)] {
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
    assert!(mixed.s_m_as.is_none() && pure.s_m_as.is_some());
}

#[test]
fn paths_agree_on_wide_range_coherent_state() {
    // Fock amplitudes spanning ~20 decades used to break the dense eigensolver.
    let spec = SpaceSpec::new(50).unwrap();
    let samples = eff_sum_samples(spec, 4.0, 7.0, 2);
    let (t, s) = &samples[1];
    let pure = entanglement_report(*t, s, spec).unwrap();
    let mixed = entanglement_report(*t, &State::Mixed(s.density()), spec).unwrap();
    for (a, b) in [(pure.e_m_as, mixed.e_m_as), (pure.e_a_ms, mixed.e_a_ms), (pure.e_m_a, mixed.e_m_a), (pure.r_min, mixed.r_min)] {
        assert!(a.is_finite() && (a - b).abs() < 1e-9, "{a} vs {b}");
    }
    assert!(pure.e_m_as > 0.1);
}
