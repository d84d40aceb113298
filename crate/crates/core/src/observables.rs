//! Per-eigenvector diagnostics: participation ratio, multifractal
//! dimensions, mean photon number and the spin–boson entanglement entropy.
//!
//! All entropies use the natural logarithm.

use faer::Mat;

use crate::basis::Basis;
use crate::error::{Error, Result};

/// Allowed deviation of ‖v‖₂ from one.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Schmidt weights / density-matrix eigenvalues below this are dropped
/// before entropy sums.
pub const WEIGHT_CUTOFF: f64 = 1e-14;

/// Probabilities below this contribute nothing to the Shannon entropy.
const PROBABILITY_FLOOR: f64 = 1e-300;

fn check_normalized(v: &[f64]) -> Result<()> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized { norm });
    }
    Ok(())
}

fn check_len(v: &[f64], basis: &Basis) -> Result<()> {
    if v.len() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: v.len(),
        });
    }
    Ok(())
}

/// PR = 1 / Σ_j |ψ_j|⁴.
pub fn participation_ratio(v: &[f64]) -> Result<f64> {
    check_normalized(v)?;
    Ok(participation_ratio_from_probabilities(v.iter().map(|x| x * x)))
}

/// PR of a probability distribution, 1 / Σ p².
pub fn participation_ratio_from_probabilities(p: impl IntoIterator<Item = f64>) -> f64 {
    1.0 / p.into_iter().map(|x| x * x).sum::<f64>()
}

pub fn inverse_participation_ratio(v: &[f64]) -> Result<f64> {
    Ok(1.0 / participation_ratio(v)?)
}

/// D_q = ln(Σ_j |ψ_j|^{2q}) / ((1 − q) ln dim), with the Shannon limit
/// D_1 = −Σ_j |ψ_j|² ln|ψ_j|² / ln dim at q = 1.
pub fn multifractal_dimension(v: &[f64], q: f64, dim: usize) -> Result<f64> {
    if q.is_nan() || q <= 0.0 {
        return Err(Error::InvalidArgument(format!("q must be positive, got {q}")));
    }
    if dim < 2 {
        return Err(Error::InvalidArgument(format!(
            "reference dimension must be at least 2, got {dim}"
        )));
    }
    check_normalized(v)?;
    let ln_dim = (dim as f64).ln();
    let probabilities = v.iter().map(|x| x * x);
    if q == 1.0 {
        let s1: f64 = probabilities
            .filter(|&p| p >= PROBABILITY_FLOOR)
            .map(|p| -p * p.ln())
            .sum();
        Ok(s1 / ln_dim)
    } else {
        let moment: f64 = probabilities.filter(|&p| p > 0.0).map(|p| p.powf(q)).sum();
        Ok(moment.ln() / ((1.0 - q) * ln_dim))
    }
}

/// ⟨a†a⟩ / j.
pub fn mean_photon_number(v: &[f64], basis: &Basis) -> Result<f64> {
    check_len(v, basis)?;
    let occupation: f64 = basis.states().iter().zip(v).map(|(s, x)| s.n as f64 * x * x).sum();
    Ok(occupation / basis.params().j_f64())
}

/// −Σ p ln p over weights above [`WEIGHT_CUTOFF`].
pub fn entropy_of_weights(weights: impl IntoIterator<Item = f64>) -> f64 {
    weights
        .into_iter()
        .filter(|&p| p > WEIGHT_CUTOFF)
        .map(|p| -p * p.ln())
        .sum()
}

/// Coefficients reshaped to (n_max + 1) × (N + 1), rows indexed by n.
fn coefficient_matrix(v: &[f64], basis: &Basis) -> Mat<f64> {
    let cols = basis.spin_dim();
    Mat::from_fn(basis.boson_dim(), cols, |n, m| v[n * cols + m])
}

/// Squared singular values of the reshaped coefficient matrix, descending.
pub fn schmidt_weights(v: &[f64], basis: &Basis) -> Result<Vec<f64>> {
    check_len(v, basis)?;
    check_normalized(v)?;
    let sv = coefficient_matrix(v, basis)
        .singular_values()
        .map_err(|_| Error::NoConvergence { dim: v.len() })?;
    Ok(sv
        .into_iter()
        .map(|s| s * s)
        .map(|p| if p < WEIGHT_CUTOFF { 0.0 } else { p })
        .collect())
}

/// Von Neumann entropy of ρ_spins = Tr_boson |ψ⟩⟨ψ|.
pub fn vnee_spins(v: &[f64], basis: &Basis) -> Result<f64> {
    Ok(entropy_of_weights(schmidt_weights(v, basis)?))
}

/// Von Neumann entropy of ρ_boson = ΨΨᵀ, formed explicitly.
pub fn vnee_bosons(v: &[f64], basis: &Basis) -> Result<f64> {
    check_len(v, basis)?;
    check_normalized(v)?;
    let psi = coefficient_matrix(v, basis);
    let rho = &psi * psi.transpose();
    let eig = rho
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|_| Error::NoConvergence { dim: rho.nrows() })?;
    Ok(entropy_of_weights(eig))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenstateMetrics {
    pub pr: f64,
    pub ipr: f64,
    /// (q, D_q) pairs, reference dimension N_D.
    pub d_q: Vec<(f64, f64)>,
    pub photon_density: f64,
    pub vnee: f64,
}

impl EigenstateMetrics {
    pub fn compute(v: &[f64], basis: &Basis, qs: &[f64]) -> Result<Self> {
        check_len(v, basis)?;
        let pr = participation_ratio(v)?;
        let d_q = qs
            .iter()
            .map(|&q| Ok((q, multifractal_dimension(v, q, basis.dim())?)))
            .collect::<Result<_>>()?;
        Ok(EigenstateMetrics {
            pr,
            ipr: 1.0 / pr,
            d_q,
            photon_density: mean_photon_number(v, basis)?,
            vnee: vnee_spins(v, basis)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{BasisState, ModelParams};

    fn unit(dim: usize, k: usize) -> Vec<f64> {
        let mut v = vec![0.0; dim];
        v[k] = 1.0;
        v
    }

    #[test]
    fn pr_limits() {
        assert_eq!(participation_ratio(&unit(7, 3)).unwrap(), 1.0);
        let d = 16;
        let uniform = vec![1.0 / (d as f64).sqrt(); d];
        assert!((participation_ratio(&uniform).unwrap() - d as f64).abs() < 1e-12);
        assert!(matches!(
            participation_ratio(&[1.0, 1.0]),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn multifractal_limits() {
        let d = 32;
        let uniform = vec![1.0 / (d as f64).sqrt(); d];
        for q in [0.5, 1.0, 2.0, 3.0] {
            assert!((multifractal_dimension(&uniform, q, d).unwrap() - 1.0).abs() < 1e-12);
            assert!(multifractal_dimension(&unit(d, 5), q, d).unwrap().abs() < 1e-15);
        }
        assert!(multifractal_dimension(&uniform, 0.0, d).is_err());
        assert!(multifractal_dimension(&uniform, -1.0, d).is_err());
    }

    #[test]
    fn d2_is_log_pr() {
        let v = [0.6, -0.48, 0.64];
        let d2 = multifractal_dimension(&v, 2.0, 3).unwrap();
        let pr = participation_ratio(&v).unwrap();
        assert!((d2 - pr.ln() / 3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn photon_number_of_bare_vacuum() {
        let basis = Basis::new(ModelParams::resonant(0.0, 0.0, 4, 3)).unwrap();
        let v = unit(basis.dim(), basis.index_of(BasisState::new(0, -2, 2).unwrap()).unwrap());
        assert_eq!(mean_photon_number(&v, &basis).unwrap(), 0.0);
        let v = unit(basis.dim(), basis.index_of(BasisState::new(3, 1, 2).unwrap()).unwrap());
        assert_eq!(mean_photon_number(&v, &basis).unwrap(), 1.5);
    }

    #[test]
    fn product_state_has_no_entanglement() {
        let basis = Basis::new(ModelParams::resonant(0.0, 0.0, 4, 3)).unwrap();
        for k in [0, 7, basis.dim() - 1] {
            assert!(vnee_spins(&unit(basis.dim(), k), &basis).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn bell_like_state_has_ln2() {
        let basis = Basis::new(ModelParams::resonant(0.0, 0.0, 2, 2)).unwrap();
        let mut v = vec![0.0; basis.dim()];
        let r = std::f64::consts::FRAC_1_SQRT_2;
        v[basis.index_of(BasisState::new(0, -1, 1).unwrap()).unwrap()] = r;
        v[basis.index_of(BasisState::new(1, 0, 1).unwrap()).unwrap()] = r;
        let s = vnee_spins(&v, &basis).unwrap();
        assert!((s - std::f64::consts::LN_2).abs() < 1e-14);
        assert!((vnee_bosons(&v, &basis).unwrap() - s).abs() < 1e-12);
    }

    #[test]
    fn metrics_bundle() {
        let basis = Basis::new(ModelParams::resonant(0.0, 0.0, 2, 1)).unwrap();
        let v = unit(basis.dim(), 4);
        let m = EigenstateMetrics::compute(&v, &basis, &[1.0, 2.0]).unwrap();
        assert_eq!(m.pr, 1.0);
        assert_eq!(m.ipr, 1.0);
        assert_eq!(m.d_q.len(), 2);
        assert_eq!(m.photon_density, 1.0);
        assert_eq!(m.vnee, 0.0);
        assert!(EigenstateMetrics::compute(&v[..3], &basis, &[1.0]).is_err());
    }
}
