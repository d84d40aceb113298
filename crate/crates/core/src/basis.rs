//! Truncated product basis `|n⟩ ⊗ |j, m⟩` of the symmetric (j = N/2) subspace.
//!
//! States are stored n-major with m ascending inside each boson block, so the
//! flat index of `(n, m)` is `n * (N + 1) + (m + j)`. A coefficient vector
//! reshaped row-major is then an `(n_max + 1) × (N + 1)` matrix with rows
//! labelled by the boson number, which is what the Schmidt decomposition in
//! [`crate::observables`] relies on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Couplings and truncation of the anisotropic Dicke model.
///
/// `n_atoms` is the atom number N (even); the pseudospin length is j = N/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub omega: f64,
    pub omega0: f64,
    pub g1: f64,
    pub g2: f64,
    pub n_atoms: usize,
    pub n_max: usize,
}

impl ModelParams {
    /// Resonant parameters (ω = ω0 = 1).
    pub fn resonant(g1: f64, g2: f64, n_atoms: usize, n_max: usize) -> Self {
        ModelParams {
            omega: 1.0,
            omega0: 1.0,
            g1,
            g2,
            n_atoms,
            n_max,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_atoms < 2 || !self.n_atoms.is_multiple_of(2) {
            return Err(Error::InvalidParams(format!(
                "atom number must be even and >= 2, got {}",
                self.n_atoms
            )));
        }
        let positive = |name: &str, x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParams(format!("{name} must be positive, got {x}")))
            }
        };
        let non_negative = |name: &str, x: f64| {
            if x.is_finite() && x >= 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParams(format!("{name} must be non-negative, got {x}")))
            }
        };
        positive("omega", self.omega)?;
        positive("omega0", self.omega0)?;
        non_negative("g1", self.g1)?;
        non_negative("g2", self.g2)?;
        Ok(())
    }

    /// Pseudospin length j = N/2 as an integer (N is even).
    pub fn j(&self) -> usize {
        self.n_atoms / 2
    }

    pub fn j_f64(&self) -> f64 {
        self.n_atoms as f64 / 2.0
    }

    /// (n_max + 1)(N + 1).
    pub fn dimension(&self) -> usize {
        (self.n_max + 1) * (self.n_atoms + 1)
    }

    /// Coupling on the ground-state critical line, g1 + g2 = √(ω ω0).
    pub fn critical_coupling(&self) -> f64 {
        (self.omega * self.omega0).sqrt()
    }

    pub fn with_couplings(&self, g1: f64, g2: f64) -> Self {
        ModelParams { g1, g2, ..*self }
    }

    pub fn with_cutoff(&self, n_max: usize) -> Self {
        ModelParams { n_max, ..*self }
    }
}

/// One product state `|n⟩ ⊗ |j, m⟩`.
///
/// `m` is kept as the non-negative offset `m + j`; [`BasisState::m`] exposes
/// the signed quantum number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisState {
    pub n: usize,
    m_offset: usize,
}

impl BasisState {
    pub fn new(n: usize, m: i64, j: usize) -> Option<Self> {
        let offset = m + j as i64;
        if offset < 0 || offset > 2 * j as i64 {
            return None;
        }
        Some(BasisState {
            n,
            m_offset: offset as usize,
        })
    }

    pub fn m(&self, j: usize) -> i64 {
        self.m_offset as i64 - j as i64
    }

    /// m + j, the number of raised atoms.
    pub fn m_offset(&self) -> usize {
        self.m_offset
    }
}

/// Eigenvalue of the parity operator exp(iπ[a†a + Jz + j]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_exponent(k: usize) -> Self {
        if k.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn sign(self) -> i32 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }
}

/// Parity (−1)^(n + m + j) of a basis state.
///
/// For even N both j and m are integers and m + j is the stored offset, so the
/// exponent is the integer n + (m + j) and no half-integer arithmetic occurs.
pub fn parity_of(state: BasisState) -> Parity {
    Parity::from_exponent(state.n + state.m_offset)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    params: ModelParams,
    states: Vec<BasisState>,
}

impl Basis {
    pub fn new(params: ModelParams) -> Result<Self> {
        params.validate()?;
        let spin_dim = params.n_atoms + 1;
        let states = (0..=params.n_max)
            .flat_map(|n| (0..spin_dim).map(move |m_offset| BasisState { n, m_offset }))
            .collect();
        Ok(Basis { params, states })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn j(&self) -> usize {
        self.params.j()
    }

    /// Number of Dicke states, N + 1 (columns of the reshaped coefficient matrix).
    pub fn spin_dim(&self) -> usize {
        self.params.n_atoms + 1
    }

    /// Number of Fock states, n_max + 1 (rows of the reshaped coefficient matrix).
    pub fn boson_dim(&self) -> usize {
        self.params.n_max + 1
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn state_at(&self, index: usize) -> BasisState {
        self.states[index]
    }

    /// Position of a state, or `None` when it lies outside the truncated space.
    pub fn index_of(&self, state: BasisState) -> Option<usize> {
        if state.n > self.params.n_max || state.m_offset > self.params.n_atoms {
            return None;
        }
        Some(state.n * self.spin_dim() + state.m_offset)
    }

    pub fn parity_at(&self, index: usize) -> Parity {
        parity_of(self.states[index])
    }

    /// Indices of all states in the given parity sector, in basis order.
    pub fn parity_sector(&self, parity: Parity) -> Vec<usize> {
        (0..self.dim()).filter(|&k| self.parity_at(k) == parity).collect()
    }
}
