//! Dense symmetric eigendecomposition.
//!
//! The kernel is faer's self-adjoint EVD (Householder tridiagonalization
//! followed by a divide-and-conquer/QR tridiagonal solve), run sequentially
//! so that identical input gives bit-identical output. Eigenvectors are
//! sign-fixed: the first component with magnitude above [`SIGN_THRESHOLD`]
//! is positive.

use faer::{Mat, MatRef, Side};

use crate::basis::Parity;
use crate::error::{Error, Result};
use crate::hamiltonian::{SparseSymmetric, SymmetricMatrix};

pub const SIGN_THRESHOLD: f64 = 1e-8;

/// Ascending eigenvalues with orthonormal eigenvectors stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    energies: Vec<f64>,
    vectors: Vec<f64>,
    basis_dim: usize,
}

impl Spectrum {
    /// Assembles a spectrum from raw parts; `vectors` holds one column of
    /// length `basis_dim` per energy.
    pub fn from_parts(energies: Vec<f64>, vectors: Vec<f64>, basis_dim: usize) -> Result<Self> {
        if vectors.len() != energies.len() * basis_dim {
            return Err(Error::DimensionMismatch {
                expected: energies.len() * basis_dim,
                found: vectors.len(),
            });
        }
        if energies.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidArgument("energies must be ascending".into()));
        }
        Ok(Spectrum {
            energies,
            vectors,
            basis_dim,
        })
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn basis_dim(&self) -> usize {
        self.basis_dim
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn energy(&self, k: usize) -> f64 {
        self.energies[k]
    }

    pub fn vector(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.basis_dim..(k + 1) * self.basis_dim]
    }

    pub fn vectors(&self) -> impl Iterator<Item = &[f64]> {
        self.vectors.chunks_exact(self.basis_dim)
    }

    /// Overlaps ⟨k|ψ⟩ for every eigenvector.
    pub fn project(&self, psi: &[f64]) -> Vec<f64> {
        assert_eq!(psi.len(), self.basis_dim);
        self.vectors().map(|v| dot(v, psi)).collect()
    }

    /// Σ_k c_k |k⟩.
    pub fn expand(&self, coefficients: &[f64]) -> Vec<f64> {
        assert_eq!(coefficients.len(), self.len());
        let mut out = vec![0.0; self.basis_dim];
        for (v, &c) in self.vectors().zip(coefficients) {
            if c != 0.0 {
                out.iter_mut().zip(v).for_each(|(o, x)| *o += c * x);
            }
        }
        out
    }

    /// Accuracy diagnostics against the matrix this spectrum came from.
    pub fn check_against(&self, matrix: &SymmetricMatrix) -> SpectrumCheck {
        let n = matrix.dim();
        assert_eq!(n, self.basis_dim);
        let a = Mat::<f64>::from_fn(n, n, |i, j| matrix.get(i, j));
        let v = Mat::<f64>::from_fn(n, self.len(), |i, k| self.vectors[k * n + i]);
        let gram = v.transpose() * &v;
        let mut orth = 0.0f64;
        for i in 0..gram.nrows() {
            for j in 0..gram.ncols() {
                let target = if i == j { 1.0 } else { 0.0 };
                orth = orth.max((gram[(i, j)] - target).abs());
            }
        }
        let av = &a * &v;
        let mut residual = 0.0f64;
        for k in 0..self.len() {
            let e = self.energies[k];
            let r: f64 = (0..n).map(|i| (av[(i, k)] - e * v[(i, k)]).powi(2)).sum::<f64>().sqrt();
            residual = residual.max(r / e.abs().max(1.0));
        }
        let trace = matrix.trace();
        let sum: f64 = self.energies.iter().sum();
        let fro = matrix.frobenius_norm_sq();
        let sum_sq: f64 = self.energies.iter().map(|e| e * e).sum();
        SpectrumCheck {
            orthonormality: orth,
            residual,
            trace_relative: (sum - trace).abs() / trace.abs().max(fro.sqrt()).max(f64::MIN_POSITIVE),
            frobenius_relative: (sum_sq - fro).abs() / fro.max(f64::MIN_POSITIVE),
        }
    }
}

/// Worst-case errors of a decomposition.
///
/// `residual` is max_k ‖A v_k − E_k v_k‖₂ / max(1, |E_k|). The trace error is
/// taken relative to max(|tr A|, ‖A‖_F) so that traceless matrices are not
/// divided by zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumCheck {
    pub orthonormality: f64,
    pub residual: f64,
    pub trace_relative: f64,
    pub frobenius_relative: f64,
}

impl SpectrumCheck {
    pub fn passes(&self) -> bool {
        self.orthonormality <= 1e-10
            && self.residual <= 1e-8
            && self.trace_relative <= 1e-10
            && self.frobenius_relative <= 1e-10
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn to_faer(matrix: &SymmetricMatrix) -> Result<Mat<f64>> {
    let n = matrix.dim();
    for (k, x) in matrix.row_major().iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::NonFinite {
                row: k / n.max(1),
                col: k % n.max(1),
            });
        }
    }
    Ok(Mat::from_fn(n, n, |i, j| matrix.get(i, j)))
}

fn fix_sign(column: &mut [f64]) {
    if let Some(&lead) = column.iter().find(|x| x.abs() > SIGN_THRESHOLD) {
        if lead < 0.0 {
            column.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

fn column_major(u: MatRef<'_, f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(u.nrows() * u.ncols());
    for k in 0..u.ncols() {
        let start = out.len();
        out.extend(u.col(k).iter().copied());
        fix_sign(&mut out[start..]);
    }
    out
}

/// Full eigendecomposition of a dense symmetric matrix.
pub fn eigh(matrix: &SymmetricMatrix) -> Result<Spectrum> {
    let n = matrix.dim();
    if n == 0 {
        return Ok(Spectrum {
            energies: Vec::new(),
            vectors: Vec::new(),
            basis_dim: 0,
        });
    }
    let a = to_faer(matrix)?;
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::NoConvergence { dim: n })?;
    let s = evd.S();
    let energies: Vec<f64> = (0..n).map(|k| s[k]).collect();
    Ok(Spectrum {
        energies,
        vectors: column_major(evd.U()),
        basis_dim: n,
    })
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(matrix: &SymmetricMatrix) -> Result<Vec<f64>> {
    let n = matrix.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    to_faer(matrix)?
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::NoConvergence { dim: n })
}

/// Spectrum assembled from independent diagonalizations of the two parity
/// blocks. Vectors are embedded back into the full basis, so each one has
/// support in exactly one sector even inside (near-)degenerate multiplets.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedSpectrum {
    pub spectrum: Spectrum,
    pub parities: Vec<Parity>,
}

impl ResolvedSpectrum {
    /// Energies of one sector, ascending.
    pub fn sector_energies(&self, parity: Parity) -> Vec<f64> {
        self.spectrum
            .energies()
            .iter()
            .zip(&self.parities)
            .filter(|(_, &p)| p == parity)
            .map(|(&e, _)| e)
            .collect()
    }

    /// Positions (in the merged spectrum) of one sector's eigenpairs.
    pub fn sector_positions(&self, parity: Parity) -> Vec<usize> {
        (0..self.parities.len())
            .filter(|&k| self.parities[k] == parity)
            .collect()
    }
}

/// A parity block: its label and the ascending basis indices it occupies.
pub type Sector = (Parity, Vec<usize>);

fn merge_order(labelled: &[(f64, Parity)]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..labelled.len()).collect();
    order.sort_by(|&a, &b| {
        labelled[a]
            .0
            .total_cmp(&labelled[b].0)
            .then(labelled[a].1.cmp(&labelled[b].1))
    });
    order
}

pub fn eigh_by_sectors(matrix: &SparseSymmetric, sectors: &[Sector]) -> Result<ResolvedSpectrum> {
    check_partition(matrix.dim(), sectors)?;
    let dim = matrix.dim();
    let mut labelled = Vec::with_capacity(dim);
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(dim);
    for (parity, indices) in sectors {
        let block = eigh(&matrix.block(indices))?;
        for (k, v) in block.vectors().enumerate() {
            let mut full = vec![0.0; dim];
            for (&i, &x) in indices.iter().zip(v) {
                full[i] = x;
            }
            labelled.push((block.energy(k), *parity));
            columns.push(full);
        }
    }
    let order = merge_order(&labelled);
    let energies = order.iter().map(|&k| labelled[k].0).collect();
    let parities = order.iter().map(|&k| labelled[k].1).collect();
    let mut vectors = Vec::with_capacity(dim * dim);
    for &k in &order {
        vectors.extend_from_slice(&columns[k]);
    }
    Ok(ResolvedSpectrum {
        spectrum: Spectrum {
            energies,
            vectors,
            basis_dim: dim,
        },
        parities,
    })
}

/// Sector-labelled eigenvalues, merged in ascending order.
pub fn eigvals_by_sectors(matrix: &SparseSymmetric, sectors: &[Sector]) -> Result<Vec<(f64, Parity)>> {
    check_partition(matrix.dim(), sectors)?;
    let mut labelled = Vec::with_capacity(matrix.dim());
    for (parity, indices) in sectors {
        labelled.extend(eigvalsh(&matrix.block(indices))?.into_iter().map(|e| (e, *parity)));
    }
    Ok(merge_order(&labelled).into_iter().map(|k| labelled[k]).collect())
}

fn check_partition(dim: usize, sectors: &[Sector]) -> Result<()> {
    let mut seen = vec![false; dim];
    for (_, indices) in sectors {
        for &i in indices {
            if i >= dim || seen[i] {
                return Err(Error::InvalidArgument("sectors must partition the basis".into()));
            }
            seen[i] = true;
        }
    }
    if seen.iter().any(|&s| !s) {
        return Err(Error::InvalidArgument("sectors must partition the basis".into()));
    }
    Ok(())
}
