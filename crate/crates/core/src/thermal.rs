//! Thermal transition: the closed-form critical temperature and its saddle
//! point machinery, Gibbs states on the spin product space, partial traces
//! and the mutual information between two atoms.

use faer::Mat;
use rayon::prelude::*;

use crate::basis::{ModelParams, Parity};
use crate::eigensolve::{eigh, eigh_by_sectors, eigvalsh, ResolvedSpectrum, Spectrum};
use crate::error::{Error, Result};
use crate::hamiltonian::{spinspace_hamiltonian_sparse, SparseSymmetric, SpinProductSpace, SymmetricMatrix};
use crate::observables::entropy_of_weights;

/// Largest atom number accepted on the spin product space.
pub const MAX_THERMAL_ATOMS: usize = 12;

/// Grids whose finest spacing exceeds this are flagged as coarse.
pub const COARSE_GRID_SPACING: f64 = 0.1;

pub const MIN_TEMPERATURE_POINTS: usize = 20;

/// T_c = (ω0 / 2ω) / artanh(ω ω0 / (g1 + g2)²), or `None` when
/// (g1 + g2)² ≤ ω ω0 and no transition exists.
pub fn analytic_tc(params: &ModelParams) -> Option<f64> {
    let sum = params.g1 + params.g2;
    let x = params.omega * params.omega0 / (sum * sum);
    (x < 1.0).then(|| (params.omega0 / (2.0 * params.omega)) / x.atanh())
}

/// ln(2 cosh x) without overflow.
fn ln_2cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p()
}

/// Saddle-point function of the large-N partition function in reduced units
/// ε = ω0/ω, λ_i = g_i/ω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleProblem {
    pub epsilon: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl SaddleProblem {
    pub fn new(params: &ModelParams) -> Self {
        SaddleProblem {
            epsilon: params.omega0 / params.omega,
            lambda1: params.g1 / params.omega,
            lambda2: params.g2 / params.omega,
        }
    }

    fn lambda_sq(&self) -> f64 {
        (self.lambda1 + self.lambda2).powi(2)
    }

    /// η = √(1 + 4(λ1+λ2)² y / ε²).
    pub fn eta(&self, y: f64) -> f64 {
        (1.0 + 4.0 * self.lambda_sq() * y / (self.epsilon * self.epsilon)).sqrt()
    }

    /// φ(y) = −βy + ln(2 cosh(βεη/2)).
    pub fn phi(&self, y: f64, beta: f64) -> f64 {
        -beta * y + ln_2cosh(0.5 * beta * self.epsilon * self.eta(y))
    }

    /// φ′(y) = −β + β(λ1+λ2)²/(εη) · tanh(βεη/2).
    pub fn phi_prime(&self, y: f64, beta: f64) -> f64 {
        let eta = self.eta(y);
        -beta + beta * self.lambda_sq() / (self.epsilon * eta) * (0.5 * beta * self.epsilon * eta).tanh()
    }

    /// εη/(λ1+λ2)² − tanh(βεη/2); zero at a stationary point of φ.
    pub fn stationarity(&self, eta: f64, beta: f64) -> f64 {
        self.epsilon * eta / self.lambda_sq() - (0.5 * beta * self.epsilon * eta).tanh()
    }

    /// β_c = (2/ε) artanh(ε/(λ1+λ2)²), when (λ1+λ2)² > ε.
    pub fn beta_c(&self) -> Option<f64> {
        let x = self.epsilon / self.lambda_sq();
        (x < 1.0).then(|| 2.0 / self.epsilon * x.atanh())
    }

    /// Root η ≥ 1 of the stationarity condition by bisection.
    ///
    /// The condition is convex in η and vanishes at η = 0, so a root above
    /// η = 1 exists iff the condition is negative at η = 1. Returns `None`
    /// when it is positive there beyond `tol` (only the normal saddle y = 0).
    pub fn solve_eta(&self, beta: f64, tol: f64) -> Option<f64> {
        let f = |eta: f64| self.stationarity(eta, beta);
        let at_one = f(1.0);
        if at_one.abs() <= tol {
            return Some(1.0);
        }
        if at_one > 0.0 {
            return None;
        }
        let (mut lo, mut hi) = (1.0, 2.0);
        while f(hi) < 0.0 {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }

    /// y corresponding to a given η.
    pub fn y_of_eta(&self, eta: f64) -> f64 {
        (eta * eta - 1.0) * self.epsilon * self.epsilon / (4.0 * self.lambda_sq())
    }
}

/// Dominant saddle of φ at inverse temperature β.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleState {
    pub epsilon: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub beta: f64,
    pub y: f64,
    pub eta: f64,
}

impl SaddleState {
    pub fn solve(params: &ModelParams, beta: f64) -> Result<Self> {
        if beta.is_nan() || beta <= 0.0 {
            return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
        }
        let problem = SaddleProblem::new(params);
        let eta = problem.solve_eta(beta, 1e-14).unwrap_or(1.0);
        Ok(SaddleState {
            epsilon: problem.epsilon,
            lambda1: problem.lambda1,
            lambda2: problem.lambda2,
            beta,
            y: problem.y_of_eta(eta).max(0.0),
            eta,
        })
    }
}

/// Real symmetric, unit-trace density matrix (row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl DensityMatrix {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        let rho = DensityMatrix { dim, data };
        let trace = rho.trace();
        if (trace - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!("density matrix trace is {trace}")));
        }
        Ok(rho)
    }

    /// |ψ⟩⟨ψ| for a normalized real vector.
    pub fn pure(psi: &[f64]) -> Result<Self> {
        let dim = psi.len();
        let mut data = vec![0.0; dim * dim];
        for (i, a) in psi.iter().enumerate() {
            for (j, b) in psi.iter().enumerate() {
                data[i * dim + j] = a * b;
            }
        }
        Self::new(dim, data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let sym = SymmetricMatrix::from_upper_fn(self.dim, |i, j| 0.5 * (self.get(i, j) + self.get(j, i)));
        eigvalsh(&sym)
    }

    pub fn entropy(&self) -> Result<f64> {
        Ok(entropy_of_weights(self.eigenvalues()?))
    }

    /// max |[ρ, H]|_ij.
    pub fn commutator_max(&self, h: &SymmetricMatrix) -> f64 {
        let n = self.dim;
        let rho = Mat::<f64>::from_fn(n, n, |i, j| self.get(i, j));
        let hm = Mat::<f64>::from_fn(n, n, |i, j| h.get(i, j));
        let c = &rho * &hm - &hm * &rho;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max(c[(i, j)].abs());
            }
        }
        worst
    }
}

/// Normalized Boltzmann weights e^{−(E_k − E_min)/T} / Z.
pub fn boltzmann_weights(energies: &[f64], temperature: f64) -> Result<Vec<f64>> {
    if temperature <= 0.0 || !temperature.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let mut w: Vec<f64> = energies.iter().map(|e| (-(e - e_min) / temperature).exp()).collect();
    let z: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= z);
    Ok(w)
}

/// Boltzmann weights for T > 0; at T = 0 the uniform mixture over the
/// (numerically) degenerate ground multiplet.
pub fn ensemble_weights(energies: &[f64], temperature: f64) -> Result<Vec<f64>> {
    if temperature == 0.0 {
        let e0 = energies.iter().copied().fold(f64::INFINITY, f64::min);
        let tol = 1e-10 * e0.abs().max(1.0);
        let count = energies.iter().filter(|&&e| e - e0 <= tol).count() as f64;
        return Ok(energies
            .iter()
            .map(|&e| if e - e0 <= tol { 1.0 / count } else { 0.0 })
            .collect());
    }
    boltzmann_weights(energies, temperature)
}

/// ρ = Σ_k w_k |k⟩⟨k|.
pub fn mixed_state(spectrum: &Spectrum, weights: &[f64]) -> Result<DensityMatrix> {
    let n = spectrum.basis_dim();
    let scaled = Mat::<f64>::from_fn(n, spectrum.len(), |i, k| weights[k].sqrt() * spectrum.vector(k)[i]);
    let rho = &scaled * scaled.transpose();
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            data.push(rho[(i, j)]);
        }
    }
    DensityMatrix::new(n, data)
}

pub fn gibbs_from_spectrum(spectrum: &Spectrum, temperature: f64) -> Result<DensityMatrix> {
    let w = boltzmann_weights(spectrum.energies(), temperature)?;
    mixed_state(spectrum, &w)
}

/// ρ = e^{−H/T} / Z.
pub fn gibbs_state(h: &SymmetricMatrix, temperature: f64) -> Result<DensityMatrix> {
    if temperature.is_nan() || temperature <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    gibbs_from_spectrum(&eigh(h)?, temperature)
}

/// Reduced density matrix on the factors `keep` of a row-major tensor
/// product with factor dimensions `dims`. Kept factors stay in their
/// original order.
pub fn partial_trace(rho: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    let total: usize = dims.iter().product();
    if total != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: total,
            found: rho.dim(),
        });
    }
    if keep.is_empty() || keep.iter().any(|&k| k >= dims.len()) || keep.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(format!(
            "kept factors {keep:?} must be non-empty, ascending and below {}",
            dims.len()
        )));
    }
    let mut strides = vec![1; dims.len()];
    for f in (0..dims.len().saturating_sub(1)).rev() {
        strides[f] = strides[f + 1] * dims[f + 1];
    }
    let offsets = |factors: &[usize]| -> Vec<usize> {
        let mut out = vec![0usize];
        for &f in factors {
            let stride = strides[f];
            out = out
                .iter()
                .flat_map(|&base| (0..dims[f]).map(move |x| base + x * stride))
                .collect();
        }
        out
    };
    let traced: Vec<usize> = (0..dims.len()).filter(|f| !keep.contains(f)).collect();
    let kept_offsets = offsets(keep);
    let traced_offsets = offsets(&traced);
    let d = kept_offsets.len();
    let mut data = vec![0.0; d * d];
    for (a, &oa) in kept_offsets.iter().enumerate() {
        for (b, &ob) in kept_offsets.iter().enumerate() {
            data[a * d + b] = traced_offsets.iter().map(|&r| rho.get(oa + r, ob + r)).sum();
        }
    }
    DensityMatrix::new(d, data)
}

/// S1, S2, S12 and I12 = S1 + S2 − S12 for two spin-1/2 subsystems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MutualInformation {
    pub s1: f64,
    pub s2: f64,
    pub s12: f64,
    pub i12: f64,
}

impl MutualInformation {
    pub fn from_pair_state(rho12: &DensityMatrix) -> Result<Self> {
        let rho1 = partial_trace(rho12, &[2, 2], &[0])?;
        let rho2 = partial_trace(rho12, &[2, 2], &[1])?;
        let (s1, s2, s12) = (rho1.entropy()?, rho2.entropy()?, rho12.entropy()?);
        Ok(MutualInformation {
            s1,
            s2,
            s12,
            i12: s1 + s2 - s12,
        })
    }
}

/// Mutual information of atoms 1 and 2 in a state on the spin product
/// space: the boson and the remaining N − 2 atoms are traced out.
pub fn mutual_information_two_spins(rho_full: &DensityMatrix, params: &ModelParams) -> Result<MutualInformation> {
    if params.n_atoms < 2 {
        return Err(Error::InvalidParams("need at least two atoms".into()));
    }
    let space = SpinProductSpace::new(params)?;
    let dims = space.factor_dims();
    let rho12 = partial_trace(rho_full, &dims, &[1, 2])?;
    MutualInformation::from_pair_state(&rho12)
}

/// The model on the spin product space `|n⟩ ⊗ |s_1 … s_N⟩`.
#[derive(Debug, Clone)]
pub struct SpinSystem {
    params: ModelParams,
    space: SpinProductSpace,
    hamiltonian: SparseSymmetric,
}

impl SpinSystem {
    pub fn new(params: ModelParams) -> Result<Self> {
        params.validate()?;
        if params.n_atoms > MAX_THERMAL_ATOMS {
            return Err(Error::InvalidParams(format!(
                "spin product space limited to N <= {MAX_THERMAL_ATOMS}, got {}",
                params.n_atoms
            )));
        }
        let (space, hamiltonian) = spinspace_hamiltonian_sparse(&params)?;
        Ok(SpinSystem {
            params,
            space,
            hamiltonian,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn space(&self) -> &SpinProductSpace {
        &self.space
    }

    pub fn hamiltonian(&self) -> &SparseSymmetric {
        &self.hamiltonian
    }

    /// Full spectrum, diagonalized per parity block (n + number of up spins).
    pub fn diagonalize(&self) -> Result<ResolvedSpectrum> {
        let sectors: Vec<_> = [Parity::Even, Parity::Odd]
            .into_iter()
            .map(|p| (p, self.space.parity_sector(p)))
            .collect();
        eigh_by_sectors(&self.hamiltonian, &sectors)
    }
}

/// Per-eigenstate two-atom reduced states, so that the pair state of any
/// diagonal ensemble Σ_k w_k |k⟩⟨k| costs one weighted sum of 4×4 blocks.
#[derive(Debug, Clone)]
pub struct TwoSpinEnsemble {
    energies: Vec<f64>,
    reduced: Vec<[f64; 16]>,
}

impl TwoSpinEnsemble {
    pub fn new(spectrum: &Spectrum, space: &SpinProductSpace) -> Result<Self> {
        if spectrum.basis_dim() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: spectrum.basis_dim(),
            });
        }
        let spins = space.spin_states();
        // atoms 1 and 2 are the two most significant spin bits
        let rest = spins / 4;
        let reduced = spectrum
            .vectors()
            .map(|v| {
                let mut r = [0.0; 16];
                for block in v.chunks_exact(spins) {
                    for a in 0..4 {
                        let row_a = &block[a * rest..(a + 1) * rest];
                        for b in a..4 {
                            let row_b = &block[b * rest..(b + 1) * rest];
                            let s: f64 = row_a.iter().zip(row_b).map(|(x, y)| x * y).sum();
                            r[a * 4 + b] += s;
                        }
                    }
                }
                for a in 0..4 {
                    for b in 0..a {
                        r[a * 4 + b] = r[b * 4 + a];
                    }
                }
                r
            })
            .collect();
        Ok(TwoSpinEnsemble {
            energies: spectrum.energies().to_vec(),
            reduced,
        })
    }

    pub fn pair_state(&self, weights: &[f64]) -> Result<DensityMatrix> {
        let mut acc = [0.0; 16];
        for (w, r) in weights.iter().zip(&self.reduced) {
            if *w != 0.0 {
                acc.iter_mut().zip(r).for_each(|(a, x)| *a += w * x);
            }
        }
        DensityMatrix::new(4, acc.to_vec())
    }

    /// I12 at temperature `t` (t = 0 selects the ground multiplet).
    pub fn mutual_information(&self, temperature: f64) -> Result<MutualInformation> {
        let w = ensemble_weights(&self.energies, temperature)?;
        MutualInformation::from_pair_state(&self.pair_state(&w)?)
    }
}

/// Indices of strict interior local minima.
pub fn local_minima(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] < values[i - 1] && values[i] <= values[i + 1])
        .collect()
}

/// Derivative by central differences, one-sided at the two ends.
pub fn finite_difference(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            let (a, b) = match i {
                0 => (0, 1.min(n - 1)),
                _ if i == n - 1 => (n - 2, n - 1),
                _ => (i - 1, i + 1),
            };
            (y[b] - y[a]) / (x[b] - x[a])
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiTransition {
    pub temperatures: Vec<f64>,
    pub i12: Vec<f64>,
    pub di12_dt: Vec<f64>,
    /// Temperature of the most negative interior derivative.
    pub t_min_derivative: f64,
    pub analytic_tc: Option<f64>,
    pub coarse_grid: bool,
}

/// I12(T) over a temperature grid and the location of the steepest decrease.
pub fn mi_transition_temperature(
    ensemble: &TwoSpinEnsemble,
    params: &ModelParams,
    temperatures: &[f64],
) -> Result<MiTransition> {
    if temperatures.len() < MIN_TEMPERATURE_POINTS {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_TEMPERATURE_POINTS} temperatures, got {}",
            temperatures.len()
        )));
    }
    if temperatures.windows(2).any(|w| w[1] <= w[0]) || temperatures[0] < 0.0 {
        return Err(Error::InvalidArgument(
            "temperatures must be non-negative and increasing".into(),
        ));
    }
    let i12 = temperatures
        .par_iter()
        .map(|&t| Ok(ensemble.mutual_information(t)?.i12))
        .collect::<Result<Vec<_>>>()?;
    let di12_dt = finite_difference(temperatures, &i12);
    let interior = 1..temperatures.len() - 1;
    let k = interior
        .min_by(|&a, &b| di12_dt[a].total_cmp(&di12_dt[b]))
        .expect("grid has interior points");
    let min_spacing = temperatures
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    Ok(MiTransition {
        temperatures: temperatures.to_vec(),
        i12,
        di12_dt,
        t_min_derivative: temperatures[k],
        analytic_tc: analytic_tc(params),
        coarse_grid: min_spacing > COARSE_GRID_SPACING,
    })
}
