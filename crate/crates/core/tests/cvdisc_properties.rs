use cv2design::cvdisc::{discretize_pure, lemma31_check, DiscretizationConfig, QuadratureOperators, Wavefunction};
use cv2design::opalg::ComplexMatrix;
use cv2design::C64;

fn test_states() -> Vec<Wavefunction> {
    vec![
        Wavefunction::vacuum(),
        Wavefunction::fock(1),
        Wavefunction::fock(2),
        Wavefunction::coherent(C64::new(0.6, 0.8)),
    ]
}

#[test]
fn conjugate_basis_is_orthonormal() {
    for d in [2usize, 3, 7, 16] {
        let cfg = DiscretizationConfig::for_dimension(d).unwrap();
        let ops = QuadratureOperators::new(&cfg);
        let gram = &ops.f_dft.adjoint() * &ops.f_dft;
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(d)) < 1e-12, "d = {d}");
    }
}

#[test]
fn lemma_bound_and_leakage_hold() {
    for d in [32usize, 64, 128] {
        let cfg = DiscretizationConfig::for_dimension(d).unwrap();
        for psi in test_states() {
            let r = lemma31_check(&cfg, &psi).unwrap();
            assert!(r.measured_distance <= r.bound, "{} d={d}: {} > {}", r.label, r.measured_distance, r.bound);
            assert!(r.leakage <= r.leakage_bound, "{} d={d}: leakage {} > {}", r.label, r.leakage, r.leakage_bound);
            assert!(r.quadrature_drift < 1e-6);
        }
    }
}

#[test]
fn discretised_states_are_normalised_densities() {
    let cfg = DiscretizationConfig::for_dimension(48).unwrap();
    for psi in test_states() {
        let disc = discretize_pure(&cfg, &psi).unwrap();
        let norm: f64 = disc.state.iter().map(|a| a.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        disc.density().validate_density().unwrap();
    }
}
