//! A parameter point with its basis and assembled Hamiltonian, plus the
//! parity-resolved diagonalizations the analyses are built on.

use crate::basis::{Basis, ModelParams, Parity};
use crate::eigensolve::{eigh, eigh_by_sectors, eigvals_by_sectors, eigvalsh, ResolvedSpectrum, Sector};
use crate::error::Result;
use crate::hamiltonian::{hamiltonian_sparse, SparseSymmetric, SymmetricMatrix};

#[derive(Debug, Clone)]
pub struct DickeSystem {
    basis: Basis,
    hamiltonian: SparseSymmetric,
}

impl DickeSystem {
    pub fn new(params: ModelParams) -> Result<Self> {
        let basis = Basis::new(params)?;
        let hamiltonian = hamiltonian_sparse(&params, &basis)?;
        Ok(DickeSystem { basis, hamiltonian })
    }

    pub fn params(&self) -> &ModelParams {
        self.basis.params()
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn hamiltonian(&self) -> &SparseSymmetric {
        &self.hamiltonian
    }

    pub fn dense_hamiltonian(&self) -> SymmetricMatrix {
        self.hamiltonian.to_dense()
    }

    fn sectors(&self) -> Vec<Sector> {
        [Parity::Even, Parity::Odd]
            .into_iter()
            .map(|p| (p, self.basis.parity_sector(p)))
            .collect()
    }

    /// Full spectrum with parity-pure eigenvectors.
    pub fn diagonalize(&self) -> Result<ResolvedSpectrum> {
        eigh_by_sectors(&self.hamiltonian, &self.sectors())
    }

    /// Parity-labelled energies without eigenvectors.
    pub fn energies(&self) -> Result<Vec<(f64, Parity)>> {
        eigvals_by_sectors(&self.hamiltonian, &self.sectors())
    }

    /// Lowest energy over both parity sectors.
    pub fn ground_energy(&self) -> Result<f64> {
        Ok(self.energies()?[0].0)
    }

    /// Ground state without the full set of eigenvectors: eigenvalues of
    /// both sectors, then vectors of the lower one only. Ties go to the even
    /// sector, as in [`DickeSystem::diagonalize`].
    pub fn ground_state(&self) -> Result<GroundState> {
        let sectors = self.sectors();
        let mut best: Option<(f64, usize)> = None;
        for (s, (_, indices)) in sectors.iter().enumerate() {
            if indices.is_empty() {
                continue;
            }
            let e0 = eigvalsh(&self.hamiltonian.block(indices))?[0];
            if best.is_none_or(|(b, _)| e0 < b) {
                best = Some((e0, s));
            }
        }
        let (_, s) = best.expect("basis is never empty");
        let (parity, indices) = &sectors[s];
        let spectrum = eigh(&self.hamiltonian.block(indices))?;
        let mut vector = vec![0.0; self.basis.dim()];
        for (&i, &x) in indices.iter().zip(spectrum.vector(0)) {
            vector[i] = x;
        }
        Ok(GroundState {
            energy: spectrum.energy(0),
            parity: *parity,
            vector,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub energy: f64,
    pub parity: Parity,
    pub vector: Vec<f64>,
}
