//! Matrix assembly for the anisotropic Dicke Hamiltonian
//!
//! H = ω a†a + ω0 Jz + g1/√(2j) (a†J− + aJ+) + g2/√(2j) (a†J+ + aJ−)
//!
//! in the symmetric Dicke subspace and in the full spin product space.
//! Every coupling term raises the boson number by one, so assembly only
//! visits `(n, ·) → (n + 1, ·)` transitions and stores the upper triangle;
//! the Hermitian conjugate terms are the mirror image.

use crate::basis::{Basis, ModelParams, Parity};
use crate::error::{Error, Result};

/// Largest spin-product-space dimension accepted by
/// [`build_spinspace_hamiltonian`].
pub const SPIN_SPACE_DIM_LIMIT: usize = 1 << 16;

/// Dense real symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(dim: usize) -> Self {
        SymmetricMatrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    /// Builds the matrix from its upper triangle; `f(i, j)` is only called for `i <= j`.
    pub fn from_upper_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j);
                m.data[i * dim + j] = v;
                m.data[j * dim + i] = v;
            }
        }
        m
    }

    /// Wraps a row-major buffer, rejecting it unless it is exactly symmetric.
    pub fn from_row_major(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        let m = SymmetricMatrix { dim, data };
        if !m.is_symmetric() {
            return Err(Error::InvalidArgument("matrix is not symmetric".into()));
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Adds `v` at (i, j) and its mirror (i, j) ≠ (j, i).
    fn add_symmetric(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] += v;
        if i != j {
            self.data[j * self.dim + i] += v;
        }
    }

    pub fn row_major(&self) -> &[f64] {
        &self.data
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (i + 1..self.dim).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        self.data
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Upper-triangle triplets of a sparse real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymmetric {
    dim: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SparseSymmetric {
    fn new(dim: usize) -> Self {
        SparseSymmetric {
            dim,
            entries: Vec::new(),
        }
    }

    fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row <= col && col < self.dim);
        if value != 0.0 {
            self.entries.push((row, col, value));
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Upper-triangle entries `(row, col, value)` with `row <= col`.
    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn to_dense(&self) -> SymmetricMatrix {
        let mut m = SymmetricMatrix::zeros(self.dim);
        for &(i, j, v) in &self.entries {
            m.add_symmetric(i, j, v);
        }
        m
    }

    /// Principal submatrix on `indices` (ascending), e.g. one parity sector.
    pub fn block(&self, indices: &[usize]) -> SymmetricMatrix {
        let mut position = vec![usize::MAX; self.dim];
        for (k, &i) in indices.iter().enumerate() {
            position[i] = k;
        }
        let mut m = SymmetricMatrix::zeros(indices.len());
        for &(i, j, v) in &self.entries {
            let (pi, pj) = (position[i], position[j]);
            if pi != usize::MAX && pj != usize::MAX {
                m.add_symmetric(pi.min(pj), pi.max(pj), v);
            }
        }
        m
    }

    /// Number of stored nonzeros in each full row (both triangles counted).
    pub fn row_nonzeros(&self) -> Vec<usize> {
        let mut counts = vec![0; self.dim];
        for &(i, j, _) in &self.entries {
            counts[i] += 1;
            if i != j {
                counts[j] += 1;
            }
        }
        counts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Raise,
    Lower,
}

/// Matrix element of J± between Dicke states: √(j(j+1) − m(m ± 1)).
///
/// Exactly zero at the edges (raise at m = j, lower at m = −j).
pub fn ladder_coefficient(j: f64, m: f64, direction: Ladder) -> f64 {
    let shifted = match direction {
        Ladder::Raise => m * (m + 1.0),
        Ladder::Lower => m * (m - 1.0),
    };
    (j * (j + 1.0) - shifted).max(0.0).sqrt()
}

fn check_basis(params: &ModelParams, basis: &Basis) -> Result<()> {
    params.validate()?;
    let expected = params.dimension();
    let b = basis.params();
    if b.n_atoms != params.n_atoms || b.n_max != params.n_max {
        return Err(Error::DimensionMismatch {
            expected,
            found: basis.dim(),
        });
    }
    Ok(())
}

/// Sparse Hamiltonian in the symmetric-subspace basis.
pub fn hamiltonian_sparse(params: &ModelParams, basis: &Basis) -> Result<SparseSymmetric> {
    check_basis(params, basis)?;
    let j = basis.j();
    let jf = j as f64;
    let scale = 1.0 / (2.0 * jf).sqrt();
    let mut h = SparseSymmetric::new(basis.dim());
    for (src, state) in basis.states().iter().enumerate() {
        let m = state.m(j);
        let mf = m as f64;
        h.push(src, src, params.omega * state.n as f64 + params.omega0 * mf);
        if state.n == params.n_max {
            // hard Fock cutoff
            continue;
        }
        let boson = ((state.n + 1) as f64).sqrt();
        let n1 = state.n + 1;
        if m > -(j as i64) {
            let amp = params.g1 * scale * boson * ladder_coefficient(jf, mf, Ladder::Lower);
            let dst = n1 * basis.spin_dim() + state.m_offset() - 1;
            h.push(src, dst, amp);
        }
        if m < j as i64 {
            let amp = params.g2 * scale * boson * ladder_coefficient(jf, mf, Ladder::Raise);
            let dst = n1 * basis.spin_dim() + state.m_offset() + 1;
            h.push(src, dst, amp);
        }
    }
    Ok(h)
}

pub fn build_hamiltonian(params: &ModelParams, basis: &Basis) -> Result<SymmetricMatrix> {
    Ok(hamiltonian_sparse(params, basis)?.to_dense())
}

/// H0 = ω a†a + ω0 Jz.
pub fn build_decoupled(params: &ModelParams, basis: &Basis) -> Result<SymmetricMatrix> {
    build_hamiltonian(&params.with_couplings(0.0, 0.0), basis)
}

/// `|n⟩ ⊗ |s_1 … s_N⟩` with s_i ∈ {down, up}.
///
/// Flat index is `n · 2^N + bits`, where spin 1 is the most significant bit
/// and a set bit means "up". Read as a row-major tensor the factor order is
/// `[boson, spin 1, …, spin N]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpinProductSpace {
    pub n_atoms: usize,
    pub n_max: usize,
}

impl SpinProductSpace {
    pub fn new(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let space = SpinProductSpace {
            n_atoms: params.n_atoms,
            n_max: params.n_max,
        };
        let dim = (params.n_max + 1)
            .checked_shl(params.n_atoms as u32)
            .filter(|_| params.n_atoms < usize::BITS as usize)
            .unwrap_or(usize::MAX);
        if dim > SPIN_SPACE_DIM_LIMIT {
            return Err(Error::DimensionGuard {
                dim,
                limit: SPIN_SPACE_DIM_LIMIT,
            });
        }
        Ok(space)
    }

    pub fn spin_states(&self) -> usize {
        1 << self.n_atoms
    }

    pub fn dim(&self) -> usize {
        (self.n_max + 1) * self.spin_states()
    }

    /// Tensor factor dimensions `[n_max + 1, 2, …, 2]`.
    pub fn factor_dims(&self) -> Vec<usize> {
        std::iter::once(self.n_max + 1)
            .chain(std::iter::repeat_n(2, self.n_atoms))
            .collect()
    }

    /// Bit mask of spin `site` (1-based).
    pub fn spin_mask(&self, site: usize) -> usize {
        debug_assert!((1..=self.n_atoms).contains(&site));
        1 << (self.n_atoms - site)
    }

    pub fn parity_at(&self, index: usize) -> Parity {
        let n = index / self.spin_states();
        let ups = (index % self.spin_states()).count_ones() as usize;
        Parity::from_exponent(n + ups)
    }

    pub fn parity_sector(&self, parity: Parity) -> Vec<usize> {
        (0..self.dim()).filter(|&k| self.parity_at(k) == parity).collect()
    }
}

/// Sparse Hamiltonian on the spin product space with collective
/// J± = Σ_i σ±^(i) and Jz = Σ_i σz^(i)/2.
pub fn spinspace_hamiltonian_sparse(params: &ModelParams) -> Result<(SpinProductSpace, SparseSymmetric)> {
    let space = SpinProductSpace::new(params)?;
    let half_n = params.n_atoms as f64 / 2.0;
    let scale = 1.0 / (params.n_atoms as f64).sqrt();
    let spins = space.spin_states();
    let mut h = SparseSymmetric::new(space.dim());
    for n in 0..=params.n_max {
        for bits in 0..spins {
            let src = n * spins + bits;
            let jz = bits.count_ones() as f64 - half_n;
            h.push(src, src, params.omega * n as f64 + params.omega0 * jz);
            if n == params.n_max {
                continue;
            }
            let boson = ((n + 1) as f64).sqrt();
            for site in 1..=params.n_atoms {
                let mask = space.spin_mask(site);
                let dst_bits = bits ^ mask;
                // up → down is a†σ−, down → up is a†σ+
                let g = if bits & mask != 0 { params.g1 } else { params.g2 };
                h.push(src, (n + 1) * spins + dst_bits, g * scale * boson);
            }
        }
    }
    Ok((space, h))
}

pub fn build_spinspace_hamiltonian(params: &ModelParams) -> Result<SymmetricMatrix> {
    Ok(spinspace_hamiltonian_sparse(params)?.1.to_dense())
}
