use num_complex::Complex64;
use proptest::prelude::*;
use triad_core::circuit::enhanced_from_detuning;
use triad_core::hilbert::{coherent_amplitudes, hermiticity_error, SqueezeDrive};
use triad_core::*;

const PHI: f64 = 2.4592e-18;

fn params(phi_ext_ratio: f64, asymmetry: f64) -> CircuitParams {
    CircuitParams { phi_ext_ratio, asymmetry, ..Default::default() }
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

fn random_state(re: &[f64], im: &[f64]) -> CVector {
    let v = CVector::from_iterator(re.len(), re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)));
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn couplings_periodic_in_flux(x in 0.0f64..1.0, a in 0.2f64..0.9, sign in prop::bool::ANY) {
        // |a| ≥ 0.2 keeps E_J^sum·S/E_C ≥ 10 at the sweet spot.
        let a = if sign { a } else { -a };
        let c0 = coupling_strengths(&params(x, a), PHI).unwrap();
        let c1 = coupling_strengths(&params(x + 1.0, a), PHI).unwrap();
        prop_assert!(close(c0.g, c1.g, 1e-12) && close(c0.j, c1.j, 1e-12) && close(c0.g3_bar, c1.g3_bar, 1e-12));
    }

    #[test]
    fn spin_orbit_couplings_linear_in_e_so(x in 0.05f64..0.45, k in 0.1f64..10.0) {
        let base = params(x, 0.3);
        let scaled = CircuitParams { e_so: base.e_so * k, ..base.clone() };
        let c0 = coupling_strengths(&base, PHI).unwrap();
        let c1 = coupling_strengths(&scaled, PHI).unwrap();
        for (u, v) in [(c0.g, c1.g), (c0.j, c1.j), (c0.g1, c1.g1), (c0.g2, c1.g2), (c0.g2_bar, c1.g2_bar)] {
            prop_assert!(close(v, k * u, 1e-12));
        }
        prop_assert_eq!(c0.g3, c1.g3);
        prop_assert_eq!(c0.g3_bar, c1.g3_bar);
    }

    #[test]
    fn charging_energy_scaling(x in 0.05f64..0.45, k in 0.5f64..2.0) {
        let base = params(x, 0.3);
        let scaled = CircuitParams { e_c: base.e_c * k, ..base.clone() };
        let c0 = coupling_strengths(&base, PHI).unwrap();
        let c1 = coupling_strengths(&scaled, PHI).unwrap();
        prop_assert!(close(c1.g, c0.g * k.powf(0.25), 1e-12));
        prop_assert!(close(c1.j, c0.j * k.sqrt(), 1e-12));
    }

    #[test]
    fn squeezing_scales_by_cosh(g in -1e7f64..1e7, ratio in -0.99f64..0.99, delta in 1e5f64..1e8) {
        let e = enhanced_from_detuning(g, 0.5 * g, ratio * delta, delta, 1.0).unwrap();
        prop_assert!(close(e.g_eff, g * e.squeeze_r.cosh(), 1e-14));
        prop_assert!(close((2.0 * e.squeeze_r).tanh(), ratio, 1e-12));
    }

    #[test]
    fn hamiltonians_are_hermitian(
        w in prop::array::uniform3(0.1f64..10.0),
        c in prop::array::uniform8(-2.0f64..2.0),
        cutoff in 2usize..6,
    ) {
        let set = CouplingSet {
            omega_m: w[0], omega_a: w[1], omega_s: w[2],
            g: c[0], j: c[1], g1: c[2], g2: c[3], g2_bar: c[4], g3: c[5], g3_bar: c[6],
        };
        let spec = SpaceSpec::new(cutoff).unwrap();
        let drive = SqueezeDrive { delta_m_tilde: c[7], delta_a: c[0], delta_s: c[1], k_d: 0.3 * c[2] };
        for kind in [
            HamiltonianKind::Total,
            HamiltonianKind::EffSum,
            HamiltonianKind::EffDiff,
            HamiltonianKind::EffSwitch,
            HamiltonianKind::JcComparison,
            HamiltonianKind::SqueezedEff(drive),
        ] {
            for frame in [Frame::Lab, Frame::Rotating] {
                if let Ok(h) = build_hamiltonian(kind, &set, spec, frame) {
                    prop_assert!(hermiticity_error(&h.matrix) < 1e-14, "{}", kind.name());
                }
            }
        }
    }

    #[test]
    fn coherent_amplitudes_normalized(r in 0.0f64..6.0, phase in 0.0f64..6.3, levels in 1usize..80) {
        let c = coherent_amplitudes(Complex64::from_polar(r, phase), levels);
        prop_assert!((c.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn measures_on_random_pure_states(
        re in prop::collection::vec(-1.0f64..1.0, 12),
        im in prop::collection::vec(-1.0f64..1.0, 12),
    ) {
        prop_assume!(re.iter().chain(&im).map(|v| v * v).sum::<f64>() > 1e-3);
        let spec = SpaceSpec::new(3).unwrap();
        let psi = random_state(&re, &im);
        let rho = DensityMatrix::from_pure(&psi, spec).unwrap();
        let pure = entanglement_report(0.0, &State::Pure(psi.clone()), spec).unwrap();
        for (cut, e) in [(Bipartition::MagnonRest, pure.e_m_as), (Bipartition::AsqRest, pure.e_a_ms), (Bipartition::ScqRest, pure.e_s_ma)] {
            let pt = log_negativity(&rho, cut).unwrap();
            prop_assert!(pt >= 0.0 && (pt - e).abs() < 1e-9);
        }
        for keep in [&[Subsystem::Asq][..], &[Subsystem::Magnon, Subsystem::Scq], &[Subsystem::Asq, Subsystem::Scq]] {
            let r = partial_trace(&rho, keep).unwrap();
            prop_assert!((r.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
        prop_assert!((0.0..=1.0 + 1e-12).contains(&pure.c_a_s));
        // Entropy of either side of a pure cut agrees.
        let ra = partial_trace(&rho, &[Subsystem::Asq]).unwrap();
        let rms = partial_trace(&rho, &[Subsystem::Magnon, Subsystem::Scq]).unwrap();
        prop_assert!((von_neumann_entropy(&ra.matrix).unwrap() - von_neumann_entropy(&rms.matrix).unwrap()).abs() < 1e-9);
        prop_assert!(pure.r_min <= pure.r_m_as.min(pure.r_a_ms).min(pure.r_s_ma));
    }

    #[test]
    fn partial_transpose_is_an_involution(
        re in prop::collection::vec(-1.0f64..1.0, 8),
        im in prop::collection::vec(-1.0f64..1.0, 8),
    ) {
        prop_assume!(re.iter().chain(&im).map(|v| v * v).sum::<f64>() > 1e-3);
        let spec = SpaceSpec::new(2).unwrap();
        let rho = DensityMatrix::from_pure(&random_state(&re, &im), spec).unwrap();
        for s in Subsystem::ALL {
            let once = DensityMatrix::new(partial_transpose(&rho, s).unwrap(), rho.subsystems.clone(), rho.dims.clone()).unwrap();
            let twice = partial_transpose(&once, s).unwrap();
            prop_assert!((&twice - &rho.matrix).norm() < 1e-15);
        }
    }
}

#[test]
fn zero_coupling_flux_points() {
    for x in [0.0, 0.5, 1.0] {
        for a in [0.1, 0.3, 0.7] {
            assert_eq!(coupling_strengths(&params(x, a), PHI).unwrap().g, 0.0);
        }
    }
}
