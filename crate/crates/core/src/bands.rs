//! Whole-spectrum diagnostics for the excited-state and ergodic/non-ergodic
//! transitions: the entanglement profile S(E_n), its jump-weighted
//! characteristic energies, the χ ratios and the central-band level-spacing
//! ratio.

use std::ops::Range;

use crate::basis::{Basis, ModelParams, Parity};
use crate::eigensolve::{ResolvedSpectrum, Spectrum};
use crate::error::{Error, Result};
use crate::model::DickeSystem;
use crate::observables::vnee_spins;

/// Bands with fewer levels than this are flagged as low-statistics.
pub const MIN_BAND_LEVELS: usize = 50;

/// Gaps at or below this fraction of the spectral width count as zero.
pub const ZERO_GAP_RELATIVE: f64 = 1e-12;

/// (E_n, S_n) for every eigenstate, in energy order.
pub fn vnee_profile(spectrum: &Spectrum, basis: &Basis) -> Result<Vec<(f64, f64)>> {
    spectrum
        .vectors()
        .zip(spectrum.energies())
        .map(|(v, &e)| Ok((e, vnee_spins(v, basis)?)))
        .collect()
}

/// Jump-weighted energies of the lower and upper spectral halves; `None`
/// when the half has no entropy jumps at all.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicEnergies {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

/// E_lower = Σ E_n|ΔS_n| / Σ|ΔS_n| over n = 0..=⌊N_D/2⌋, E_upper over
/// n = ⌊N_D/2⌋..=N_D−2, with ΔS_n = S_{n+1} − S_n. The split is by eigenstate
/// index, and the middle index belongs to both halves.
pub fn characteristic_energies(profile: &[(f64, f64)]) -> Result<CharacteristicEnergies> {
    if profile.len() < 4 {
        return Err(Error::TooFewLevels {
            required: 4,
            found: profile.len(),
        });
    }
    let half = profile.len() / 2;
    let last_jump = profile.len() - 2;
    let jump = |n: usize| (profile[n + 1].1 - profile[n].1).abs();
    // weights are normalized before the sum so that a lone jump has weight
    // exactly 1 and its energy comes back bit-for-bit
    let weighted = |range: std::ops::RangeInclusive<usize>| {
        let den: f64 = range.clone().map(jump).sum();
        (den > 0.0).then(|| range.map(|n| profile[n].0 * (jump(n) / den)).sum())
    };
    Ok(CharacteristicEnergies {
        lower: weighted(0..=half),
        upper: weighted(half..=last_jump),
    })
}

/// Reference couplings for E_normal^0: the point itself inside the normal
/// phase, otherwise its radial projection onto g1 + g2 = √(ω ω0).
pub fn normal_reference_couplings(params: &ModelParams) -> (f64, f64) {
    let gc = params.critical_coupling();
    let sum = params.g1 + params.g2;
    if sum <= gc {
        (params.g1, params.g2)
    } else {
        (params.g1 * gc / sum, params.g2 * gc / sum)
    }
}

/// Largest eigenvalue of H0 = ω a†a + ω0 Jz in the truncated space.
pub fn max_decoupled_energy(params: &ModelParams) -> f64 {
    params.omega * params.n_max as f64 + params.omega0 * params.j_f64()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceCutoffs {
    pub e_normal0: f64,
    pub e_max_decoupled: f64,
    pub reference_couplings: (f64, f64),
}

/// E_normal^0 and E^max_{g1,g2=0}.
///
/// `ground_energy_here` is reused when the reference point is the parameter
/// point itself, which saves a diagonalization inside the normal phase.
pub fn reference_cutoffs(params: &ModelParams, ground_energy_here: Option<f64>) -> Result<ReferenceCutoffs> {
    let (g1, g2) = normal_reference_couplings(params);
    let e_normal0 = match ground_energy_here {
        Some(e) if (g1, g2) == (params.g1, params.g2) => e,
        _ => DickeSystem::new(params.with_couplings(g1, g2))?.ground_energy()?,
    };
    Ok(ReferenceCutoffs {
        e_normal0,
        e_max_decoupled: max_decoupled_energy(params),
        reference_couplings: (g1, g2),
    })
}

/// (χ_lower, χ_upper) = (E_lower / E_normal^0, E_upper / E^max).
pub fn chi_values(energies: CharacteristicEnergies, cutoffs: &ReferenceCutoffs) -> (Option<f64>, Option<f64>) {
    (
        energies.lower.map(|e| e / cutoffs.e_normal0),
        energies.upper.map(|e| e / cutoffs.e_max_decoupled),
    )
}

/// Mean consecutive-gap ratio ⟨r⟩ with the number of ratios that touched a
/// zero gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RStatistic {
    pub mean: f64,
    pub samples: usize,
    pub degenerate: usize,
}

/// r_n = min(s_{n−1}, s_n) / max(s_{n−1}, s_n) averaged over the interior.
/// A ratio involving a zero gap is 0 and is counted in `degenerate`.
pub fn r_statistic(energies: &[f64]) -> Result<RStatistic> {
    if energies.len() < 3 {
        return Err(Error::TooFewLevels {
            required: 3,
            found: energies.len(),
        });
    }
    let width = energies[energies.len() - 1] - energies[0];
    let zero = ZERO_GAP_RELATIVE * width;
    let gaps: Vec<f64> = energies.windows(2).map(|w| w[1] - w[0]).collect();
    let mut sum = 0.0;
    let mut degenerate = 0;
    for pair in gaps.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if a <= zero || b <= zero {
            degenerate += 1;
        } else {
            sum += a.min(b) / a.max(b);
        }
    }
    let samples = gaps.len() - 1;
    Ok(RStatistic {
        mean: sum / samples as f64,
        samples,
        degenerate,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentralBand {
    pub r: RStatistic,
    /// Positions within the ascending even-parity energy list.
    pub band_indices: Range<usize>,
    pub low_statistics: bool,
}

/// ⟨r⟩ over even-parity levels inside [E_normal^0, E^max].
pub fn central_band_r(resolved: &ResolvedSpectrum, cutoffs: &ReferenceCutoffs) -> Result<CentralBand> {
    let even = resolved.sector_energies(Parity::Even);
    let start = even.partition_point(|&e| e < cutoffs.e_normal0);
    let end = even.partition_point(|&e| e <= cutoffs.e_max_decoupled);
    let band = &even[start..end.max(start)];
    let r = r_statistic(band)?;
    Ok(CentralBand {
        r,
        band_indices: start..end.max(start),
        low_statistics: band.len() < MIN_BAND_LEVELS,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandAnalysis {
    pub profile: Vec<(f64, f64)>,
    pub e_lower: Option<f64>,
    pub e_upper: Option<f64>,
    pub chi_lower: Option<f64>,
    pub chi_upper: Option<f64>,
    pub cutoffs: ReferenceCutoffs,
    pub central: CentralBand,
}

impl BandAnalysis {
    pub fn r_mean(&self) -> f64 {
        self.central.r.mean
    }
}

pub fn analyze_bands(system: &DickeSystem, resolved: &ResolvedSpectrum) -> Result<BandAnalysis> {
    let profile = vnee_profile(&resolved.spectrum, system.basis())?;
    let energies = characteristic_energies(&profile)?;
    let cutoffs = reference_cutoffs(system.params(), Some(resolved.spectrum.energy(0)))?;
    let (chi_lower, chi_upper) = chi_values(energies, &cutoffs);
    let central = central_band_r(resolved, &cutoffs)?;
    Ok(BandAnalysis {
        profile,
        e_lower: energies.lower,
        e_upper: energies.upper,
        chi_lower,
        chi_upper,
        cutoffs,
        central,
    })
}
