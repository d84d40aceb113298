//! Quench from the middle eigenstate of H0 = ω a†a + ω0 Jz into the full
//! Hamiltonian, tracking the participation ratio of |ψ(t)⟩ in the product
//! basis.
//!
//! Amplitudes are carried as separate real and imaginary vectors; the
//! propagator is applied spectrally, C(t) = Σ_k e^{−iE_k t} ⟨k|ψ⟩ |k⟩.

use crate::basis::Basis;
use crate::eigensolve::Spectrum;
use crate::error::{Error, Result};
use crate::observables::{participation_ratio_from_probabilities, NORM_TOLERANCE};

/// Sample times (units of 1/ω0) of the standard quench snapshots.
pub const SNAPSHOT_TIMES: [f64; 4] = [0.01, 0.2, 1.0, 1000.0];

/// Basis index of the middle eigenstate of H0.
///
/// States are ranked by ω n + ω0 m with ties kept in canonical basis order
/// (n ascending, then m), and the state at rank ⌊N_D/2⌋ is returned.
pub fn middle_decoupled_state(basis: &Basis) -> usize {
    let params = basis.params();
    let j = basis.j();
    let energy = |k: usize| {
        let s = basis.state_at(k);
        params.omega * s.n as f64 + params.omega0 * s.m(j) as f64
    };
    let mut order: Vec<usize> = (0..basis.dim()).collect();
    // stable sort keeps canonical order among degenerate states
    order.sort_by(|&a, &b| energy(a).total_cmp(&energy(b)));
    order[basis.dim() / 2]
}

/// Complex state as (real, imaginary) parts.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexState {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl ComplexState {
    pub fn probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        self.re.iter().zip(&self.im).map(|(a, b)| a * a + b * b)
    }

    pub fn norm(&self) -> f64 {
        self.probabilities().sum::<f64>().sqrt()
    }

    pub fn participation_ratio(&self) -> f64 {
        participation_ratio_from_probabilities(self.probabilities())
    }
}

/// Spectral propagator for one initial state.
#[derive(Debug, Clone)]
pub struct Propagator<'a> {
    spectrum: &'a Spectrum,
    initial: Vec<f64>,
    overlaps: Vec<f64>,
}

impl<'a> Propagator<'a> {
    pub fn new(spectrum: &'a Spectrum, psi_in: &[f64]) -> Result<Self> {
        if psi_in.len() != spectrum.basis_dim() {
            return Err(Error::DimensionMismatch {
                expected: spectrum.basis_dim(),
                found: psi_in.len(),
            });
        }
        let norm = psi_in.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Propagator {
            spectrum,
            initial: psi_in.to_vec(),
            overlaps: spectrum.project(psi_in),
        })
    }

    /// ⟨k|ψ_in⟩ for every eigenstate.
    pub fn overlaps(&self) -> &[f64] {
        &self.overlaps
    }

    /// e^{−iHt}|ψ_in⟩.
    pub fn state_at(&self, t: f64) -> ComplexState {
        let dim = self.spectrum.basis_dim();
        if t == 0.0 {
            return ComplexState {
                re: self.initial.clone(),
                im: vec![0.0; dim],
            };
        }
        let mut re = vec![0.0; dim];
        let mut im = vec![0.0; dim];
        for (k, v) in self.spectrum.vectors().enumerate() {
            let c = self.overlaps[k];
            if c == 0.0 {
                continue;
            }
            let (sin, cos) = (self.spectrum.energy(k) * t).sin_cos();
            let (a, b) = (c * cos, -c * sin);
            for ((r, i), x) in re.iter_mut().zip(im.iter_mut()).zip(v) {
                *r += a * x;
                *i += b * x;
            }
        }
        ComplexState { re, im }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuenchResult {
    pub times: Vec<f64>,
    pub pr_t: Vec<f64>,
    /// ‖ψ(t)‖ at every sample.
    pub norms: Vec<f64>,
    pub initial_index: Option<usize>,
}

pub fn evolve_pr(spectrum: &Spectrum, psi_in: &[f64], times: &[f64]) -> Result<QuenchResult> {
    let propagator = Propagator::new(spectrum, psi_in)?;
    let (pr_t, norms) = times
        .iter()
        .map(|&t| {
            let state = propagator.state_at(t);
            (state.participation_ratio(), state.norm())
        })
        .unzip();
    Ok(QuenchResult {
        times: times.to_vec(),
        pr_t,
        norms,
        initial_index: None,
    })
}

/// Quench of the middle H0 eigenstate; `spectrum` must be the full spectrum
/// of H on `basis`.
pub fn middle_state_quench(spectrum: &Spectrum, basis: &Basis, times: &[f64]) -> Result<QuenchResult> {
    let start = middle_decoupled_state(basis);
    let mut psi = vec![0.0; basis.dim()];
    psi[start] = 1.0;
    let mut result = evolve_pr(spectrum, &psi, times)?;
    result.initial_index = Some(start);
    Ok(result)
}
