use cv2design::cvdisc::DiscretizationConfig;
use cv2design::opalg::ComplexMatrix;
use cv2design::ue::{
    avg_ciphertext, decrypt, delta_bound, encrypt, plaintext_state, sample_key, AverageMode, SignDistIndex,
};
use proptest::prelude::*;

fn sorted_spectrum(m: &ComplexMatrix) -> Vec<f64> {
    let mut ev = m.hermitian_eigenvalues().unwrap();
    ev.sort_by(f64::total_cmp);
    ev
}

#[test]
fn sign_dist_round_trip() {
    for d in [2usize, 4, 8, 16] {
        let cfg = DiscretizationConfig::for_dimension(d).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for j in cfg.labels() {
            let s = SignDistIndex::from_label(j);
            assert!(s.dist < d / 2);
            assert_eq!(s.to_label(), j);
            assert!(seen.insert((s.sign, s.dist)));
        }
        assert_eq!(seen.len(), d);
    }
}

#[test]
fn exact_key_average_is_maximally_mixed() {
    for d in [2usize, 4, 6, 8] {
        let cfg = DiscretizationConfig::for_dimension(d).unwrap();
        let target = ComplexMatrix::identity(d).scale_real(1.0 / d as f64);
        for ell in 1..=3 {
            for x in 0..=1 {
                let avg = avg_ciphertext(&cfg, x, ell, AverageMode::Exact).unwrap();
                assert!(avg.max_abs_diff(&target) < 1e-12, "d={d} ell={ell} x={x}");
            }
        }
    }
}

#[test]
fn delta_decreases_in_d_for_large_ell() {
    let ell = 8;
    let values: Vec<f64> = (4..=20).map(|k| delta_bound(2f64.powi(k), ell).unwrap()).collect();
    assert!(values.windows(2).all(|w| w[1] < w[0]), "{values:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decryption_inverts_encryption(half in 1usize..=5, ell in 1u32..=3, x in 0u8..=1, seed in any::<u64>()) {
        let cfg = DiscretizationConfig::for_dimension(2 * half).unwrap();
        let key = sample_key(&cfg, ell, seed).unwrap();
        prop_assert_eq!(key.params.len(), 6 * ell as usize);
        let out = decrypt(&cfg, &encrypt(&cfg, x, &key).unwrap(), &key).unwrap();
        prop_assert_eq!(out.x_hat, x);
        prop_assert!(!out.ambiguous);
        prop_assert!(out.confidence > 1.0 - 1e-9);
    }

    #[test]
    fn ciphertext_spectrum_is_key_independent(half in 1usize..=4, ell in 1u32..=2, x in 0u8..=1, seed in any::<u64>()) {
        let cfg = DiscretizationConfig::for_dimension(2 * half).unwrap();
        let c = encrypt(&cfg, x, &sample_key(&cfg, ell, seed).unwrap()).unwrap();
        c.matrix.validate_density().unwrap();
        let want = sorted_spectrum(&plaintext_state(&cfg, x).unwrap());
        let got = sorted_spectrum(&c.matrix);
        for (a, b) in want.iter().zip(&got) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }
}
