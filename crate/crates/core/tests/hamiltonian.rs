#![allow(clippy::needless_range_loop)]

mod common;

use dicke_core::basis::parity_of;
use dicke_core::hamiltonian::{build_hamiltonian, build_spinspace_hamiltonian, SpinProductSpace};
use dicke_core::{eigh, eigvalsh, Basis, DickeSystem, ModelParams, Parity};
use proptest::prelude::*;

/// Dense H from explicit operator matrices: a on the Fock factor, J± and Jz
/// on the Dicke factor, combined with Kronecker products.
fn kronecker_oracle(p: &ModelParams) -> Vec<Vec<f64>> {
    let nb = p.n_max + 1;
    let ns = p.n_atoms + 1;
    let j = p.n_atoms as f64 / 2.0;
    let mut a = vec![vec![0.0; nb]; nb];
    for n in 1..nb {
        a[n - 1][n] = (n as f64).sqrt();
    }
    let mut jp = vec![vec![0.0; ns]; ns];
    for k in 0..ns - 1 {
        let m = k as f64 - j;
        jp[k + 1][k] = (j * (j + 1.0) - m * (m + 1.0)).sqrt();
    }
    let t = |x: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
        (0..x[0].len())
            .map(|c| (0..x.len()).map(|r| x[r][c]).collect())
            .collect()
    };
    let ad = t(&a);
    let jm = t(&jp);
    let kron = |x: &Vec<Vec<f64>>, y: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
        let (rx, ry) = (x.len(), y.len());
        let mut out = vec![vec![0.0; rx * ry]; rx * ry];
        for i1 in 0..rx {
            for j1 in 0..rx {
                for i2 in 0..ry {
                    for j2 in 0..ry {
                        out[i1 * ry + i2][j1 * ry + j2] = x[i1][j1] * y[i2][j2];
                    }
                }
            }
        }
        out
    };
    let dim = nb * ns;
    let c = 1.0 / (2.0 * j).sqrt();
    let terms = [
        (p.g1 * c, kron(&ad, &jm)),
        (p.g1 * c, kron(&a, &jp)),
        (p.g2 * c, kron(&ad, &jp)),
        (p.g2 * c, kron(&a, &jm)),
    ];
    let mut h = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        let (n, k) = (i / ns, i % ns);
        h[i][i] = p.omega * n as f64 + p.omega0 * (k as f64 - j);
    }
    for (coef, m) in &terms {
        for i in 0..dim {
            for k in 0..dim {
                h[i][k] += coef * m[i][k];
            }
        }
    }
    h
}

#[test]
fn matches_kronecker_construction() {
    for (g1, g2, n_atoms, n_max) in [(0.7, 0.3, 2, 3), (1.3, 0.4, 4, 5), (0.2, 1.9, 6, 4)] {
        let p = ModelParams {
            omega: 1.3,
            omega0: 0.8,
            ..ModelParams::resonant(g1, g2, n_atoms, n_max)
        };
        let h = build_hamiltonian(&p, &Basis::new(p).unwrap()).unwrap();
        let oracle = kronecker_oracle(&p);
        for i in 0..h.dim() {
            for k in 0..h.dim() {
                assert!((h.get(i, k) - oracle[i][k]).abs() < 1e-14, "({i},{k})");
            }
        }
    }
}

#[test]
fn decoupled_spectrum_is_exact() {
    let p = ModelParams::resonant(0.0, 0.0, 6, 4);
    let e = eigvalsh(&build_hamiltonian(&p, &Basis::new(p).unwrap()).unwrap()).unwrap();
    let mut oracle: Vec<f64> = (0..=4)
        .flat_map(|n| (-3..=3).map(move |m| n as f64 + m as f64))
        .collect();
    oracle.sort_by(f64::total_cmp);
    assert_eq!(e.len(), oracle.len());
    for (a, b) in e.iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
}

#[test]
fn eigenvectors_are_parity_pure() {
    let p = ModelParams::resonant(0.9, 0.6, 6, 8);
    let basis = Basis::new(p).unwrap();
    let h = build_hamiltonian(&p, &basis).unwrap();
    for i in 0..h.dim() {
        for k in 0..h.dim() {
            if h.get(i, k) != 0.0 {
                assert_eq!(basis.parity_at(i), basis.parity_at(k), "H couples sectors at ({i},{k})");
            }
        }
    }
    let s = eigh(&h).unwrap();
    let e = s.energies();
    for (k, v) in s.vectors().enumerate() {
        let degenerate = (k > 0 && e[k] - e[k - 1] < 1e-10) || (k + 1 < e.len() && e[k + 1] - e[k] < 1e-10);
        if degenerate {
            continue;
        }
        let sectors: std::collections::BTreeSet<Parity> = v
            .iter()
            .enumerate()
            .filter(|(_, x)| x.abs() > 1e-8)
            .map(|(i, _)| basis.parity_at(i))
            .collect();
        assert_eq!(sectors.len(), 1, "eigenvector {k} spans both sectors");
    }
}

#[test]
fn sector_resolved_spectrum_matches_dense_and_labels() {
    let p = ModelParams::resonant(1.1, 0.4, 6, 8);
    let system = DickeSystem::new(p).unwrap();
    let resolved = system.diagonalize().unwrap();
    let dense = eigvalsh(&system.dense_hamiltonian()).unwrap();
    for (a, b) in resolved.spectrum.energies().iter().zip(&dense) {
        assert!((a - b).abs() < 1e-10);
    }
    assert!(resolved.spectrum.check_against(&system.dense_hamiltonian()).passes());
    for (k, v) in resolved.spectrum.vectors().enumerate() {
        for (i, x) in v.iter().enumerate() {
            if *x != 0.0 {
                assert_eq!(parity_of(system.basis().state_at(i)), resolved.parities[k]);
            }
        }
    }
}

fn contained(sub: &[f64], full: &[f64]) -> bool {
    sub.iter().all(|e| full.iter().any(|f| (e - f).abs() < 1e-10))
}

#[test]
fn symmetric_spectrum_embeds_in_spin_space() {
    for (g1, g2, n_atoms, n_max) in [(0.8, 0.5, 2, 0), (0.8, 0.5, 2, 4), (1.4, 0.3, 4, 3)] {
        let p = ModelParams::resonant(g1, g2, n_atoms, n_max);
        let sym = eigvalsh(&build_hamiltonian(&p, &Basis::new(p).unwrap()).unwrap()).unwrap();
        let full = eigvalsh(&build_spinspace_hamiltonian(&p).unwrap()).unwrap();
        assert_eq!(full.len(), (n_max + 1) << n_atoms);
        assert!(contained(&sym, &full), "N={n_atoms} n_max={n_max}");
    }
}

#[test]
fn spin_space_hamiltonian_is_permutation_symmetric() {
    let p = ModelParams::resonant(0.9, 0.35, 4, 3);
    let space = SpinProductSpace::new(&p).unwrap();
    let h = build_spinspace_hamiltonian(&p).unwrap();
    for (a, b) in [(1, 2), (2, 4), (1, 3)] {
        let (ma, mb) = (space.spin_mask(a), space.spin_mask(b));
        let swap = |i: usize| {
            let (x, y) = (i & ma != 0, i & mb != 0);
            if x == y {
                i
            } else {
                i ^ ma ^ mb
            }
        };
        for i in 0..h.dim() {
            for k in 0..h.dim() {
                assert_eq!(h.get(i, k), h.get(swap(i), swap(k)));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn assembled_matrix_is_exactly_symmetric(g1 in 0.0f64..3.0, g2 in 0.0f64..3.0, half in 1usize..5, n_max in 0usize..8) {
        let p = ModelParams::resonant(g1, g2, 2 * half, n_max);
        let basis = Basis::new(p).unwrap();
        let h = build_hamiltonian(&p, &basis).unwrap();
        prop_assert!(h.is_symmetric());
        let sectors = basis.parity_sector(Parity::Even).len() + basis.parity_sector(Parity::Odd).len();
        prop_assert_eq!(sectors, basis.dim());
    }
}
