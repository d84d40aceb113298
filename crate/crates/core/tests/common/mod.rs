#![allow(dead_code, clippy::needless_range_loop)]

use dicke_core::thermal::DensityMatrix;
use dicke_core::SymmetricMatrix;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, dim: usize) -> SymmetricMatrix {
    SymmetricMatrix::from_upper_fn(dim, |_, _| rng.random_range(-1.0..1.0))
}

pub fn random_unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    v
}

/// Eigenvalues by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(m: &SymmetricMatrix) -> Vec<f64> {
    let n = m.dim();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| m.get(i, j)).collect()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut e: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    e.sort_by(f64::total_cmp);
    e
}

/// Σ_k w_k |v_k⟩⟨v_k| for random unit vectors and random weights.
pub fn random_density(seed: u64, dim: usize, terms: usize) -> DensityMatrix {
    let mut r = rng(seed);
    let weights: Vec<f64> = (0..terms).map(|_| r.random_range(0.0..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut data = vec![0.0; dim * dim];
    for w in weights {
        let v = random_unit_vector(&mut r, dim);
        for i in 0..dim {
            for j in 0..dim {
                data[i * dim + j] += w / total * v[i] * v[j];
            }
        }
    }
    DensityMatrix::new(dim, data).unwrap()
}

/// Reduced state by explicit summation over all multi-indices.
pub fn partial_trace_oracle(rho: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Vec<f64> {
    let total: usize = dims.iter().product();
    let digits = |mut k: usize| {
        let mut d = vec![0; dims.len()];
        for f in (0..dims.len()).rev() {
            d[f] = k % dims[f];
            k /= dims[f];
        }
        d
    };
    let kept_index = |d: &[usize]| keep.iter().fold(0, |acc, &f| acc * dims[f] + d[f]);
    let kept_dim: usize = keep.iter().map(|&f| dims[f]).product();
    let mut out = vec![0.0; kept_dim * kept_dim];
    for a in 0..total {
        let da = digits(a);
        for b in 0..total {
            let db = digits(b);
            let traced_equal = (0..dims.len()).filter(|f| !keep.contains(f)).all(|f| da[f] == db[f]);
            if traced_equal {
                out[kept_index(&da) * kept_dim + kept_index(&db)] += rho.get(a, b);
            }
        }
    }
    out
}
