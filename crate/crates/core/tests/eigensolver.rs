mod common;

use common::{jacobi_eigenvalues, random_symmetric, rng};
use dicke_core::{eigh, eigvalsh, SymmetricMatrix};
use proptest::prelude::*;
use rand::RngExt;

#[test]
fn random_matrices_satisfy_decomposition_invariants() {
    let mut r = rng(0x5eed);
    for case in 0..50 {
        let dim = if case < 5 {
            [1, 2, 3, 500, 499][case]
        } else {
            r.random_range(1..=300)
        };
        let m = random_symmetric(&mut r, dim);
        let spectrum = eigh(&m).unwrap();
        let check = spectrum.check_against(&m);
        assert!(check.passes(), "case {case} (dim {dim}): {check:?}");
        assert!(spectrum.energies().windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn eigenvalues_match_jacobi_oracle() {
    let mut r = rng(17);
    for dim in [1, 2, 5, 12, 30] {
        let m = random_symmetric(&mut r, dim);
        let ours = eigvalsh(&m).unwrap();
        let oracle = jacobi_eigenvalues(&m);
        for (a, b) in ours.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-11, "dim {dim}: {a} vs {b}");
        }
    }
}

#[test]
fn eigenvalues_only_match_vectors_path() {
    let mut r = rng(3);
    let m = random_symmetric(&mut r, 80);
    let full = eigh(&m).unwrap();
    for (a, b) in full.energies().iter().zip(eigvalsh(&m).unwrap()) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn degenerate_identity_block() {
    let m = SymmetricMatrix::from_upper_fn(6, |i, j| if i == j { 2.0 } else { 0.0 });
    let s = eigh(&m).unwrap();
    assert!(s.energies().iter().all(|&e| (e - 2.0).abs() < 1e-15));
    assert!(s.check_against(&m).passes());
}

#[test]
fn non_finite_input_is_rejected() {
    let m = SymmetricMatrix::from_upper_fn(3, |i, j| if (i, j) == (0, 2) { f64::NAN } else { 1.0 });
    assert!(eigh(&m).is_err());
    assert!(eigvalsh(&m).is_err());
}

#[test]
fn repeated_runs_are_bit_identical() {
    let m = random_symmetric(&mut rng(99), 120);
    let a = eigh(&m).unwrap();
    let b = eigh(&m).unwrap();
    assert_eq!(a.energies(), b.energies());
    assert!(a.vectors().zip(b.vectors()).all(|(x, y)| x == y));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn diagonal_matrix_spectrum_is_sorted_diagonal(d in prop::collection::vec(-50.0f64..50.0, 1..40)) {
        let m = SymmetricMatrix::from_upper_fn(d.len(), |i, j| if i == j { d[i] } else { 0.0 });
        let mut sorted = d.clone();
        sorted.sort_by(f64::total_cmp);
        let e = eigvalsh(&m).unwrap();
        for (a, b) in e.iter().zip(&sorted) {
            prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn shift_and_scale_covariance(seed in any::<u64>(), shift in -10.0f64..10.0, scale in 0.1f64..10.0) {
        let m = random_symmetric(&mut rng(seed), 25);
        let t = SymmetricMatrix::from_upper_fn(25, |i, j| scale * m.get(i, j) + if i == j { shift } else { 0.0 });
        let e = eigvalsh(&m).unwrap();
        let f = eigvalsh(&t).unwrap();
        for (a, b) in e.iter().zip(&f) {
            prop_assert!((scale * a + shift - b).abs() < 1e-10 * (1.0 + shift.abs() + scale));
        }
    }
}
