// SPDX-License-Identifier: Apache-2.0

//! Lattice models whose sites are slots in time: tight-binding rings from
//! an s:1 resonance, temporal disorder, secular bands, the phase-space
//! crystal, the driven bouncer and bosons in time-lattice sites.

pub mod bouncer;
pub mod disordered_ring;
pub mod lloyd;
pub mod mott;
pub mod phase_crystal;
pub mod secular;
pub mod tight_binding;

use serde::{Deserialize, Serialize};

use crate::fit::linear_fit;

pub use bouncer::{bouncer_floquet, BouncerReport, BouncerSpec};
pub use disordered_ring::{
    effective_potential, ring_anderson, DisorderedRingSpec, EffectivePotential, RingAndersonReport,
};
pub use lloyd::{
    lloyd_exact_length, lloyd_localization, lyapunov_length, time_profile, LloydReport, LloydSpec,
};
pub use mott::{bose_hubbard_time, BoseHubbardTimeSpec, MottReport};
pub use phase_crystal::{rwa_phase_crystal, PhaseCrystalSpec, PhaseCrystalSpectrum};
pub use secular::{secular_bands, BandStructure, PendulumSpec};
pub use tight_binding::{tb_ring_eigensystem, TightBindingRing};

/// Exponential fit `w(d) ∝ e^{−d/ℓ}` of a profile around its maximum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalizationFit {
    /// Index of the maximum.
    pub center: usize,
    /// `ℓ` in the units of `spacing`.
    pub length: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Fit `ln w` against the ring distance from the maximum.
///
/// Points closer than `skip` samples to the maximum (the core) are left out.
/// Each side is cut at the last point above `floor · max w`; points inside
/// that range are kept even when they dip below the floor, since dropping
/// them one by one would bias the slope towards slow decay. Returns `None`
/// when fewer than four points remain or the profile does not decay.
pub fn localization_fit(
    weights: &[f64],
    spacing: f64,
    skip: usize,
    floor: f64,
) -> Option<LocalizationFit> {
    let n = weights.len();
    let (center, &wmax) = weights
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))?;
    if !(wmax > 0.0) {
        return None;
    }
    let half = n / 2;
    let at = |side: isize, d: usize| {
        weights[(center as isize + side * d as isize).rem_euclid(n as isize) as usize]
    };
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for side in [1isize, -1] {
        // the two sides meet at d = n/2; count that point once
        let reach = if side == -1 && n.is_multiple_of(2) {
            half - 1
        } else {
            half
        };
        let last = (1..=reach)
            .rev()
            .find(|&d| at(side, d) > floor * wmax)
            .unwrap_or(0);
        for d in skip.max(1)..=last {
            let w = at(side, d);
            if w > 0.0 {
                x.push(d as f64 * spacing);
                y.push(w.ln());
            }
        }
    }
    if x.len() < 4 {
        return None;
    }
    let fit = linear_fit(&x, &y).ok()?;
    if !(fit.slope < 0.0) {
        return None;
    }
    Some(LocalizationFit {
        center,
        length: -1.0 / fit.slope,
        r_squared: fit.r_squared,
        points: fit.points,
    })
}

/// A tail fit needs the tail mass to fall at least this far.
pub const MIN_TAIL_DECAY: f64 = 1e-3;

/// Fit the tail mass `T(d) = Σ_{|d'| ≥ d} w` against `d`.
///
/// For `w ∝ e^{−|d|/ℓ}` the tail mass decays with the same `ℓ`; summing
/// removes the nodes and well-to-well steps of continuum profiles, which
/// otherwise dominate the residuals of a pointwise fit. The fit runs from
/// `skip` to the last distance where `T` still exceeds `floor · T(1)`;
/// profiles whose tail mass never drops below [`MIN_TAIL_DECAY`] are not
/// fitted.
pub fn tail_mass_fit(
    weights: &[f64],
    spacing: f64,
    skip: usize,
    floor: f64,
) -> Option<LocalizationFit> {
    let n = weights.len();
    let (center, &wmax) = weights
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))?;
    if !(wmax > 0.0) || n < 8 {
        return None;
    }
    let half = n / 2;
    let at = |side: isize, d: usize| {
        weights[(center as isize + side * d as isize).rem_euclid(n as isize) as usize]
    };
    let mut tail = vec![0.0; half + 1];
    let mut acc = 0.0;
    for d in (1..=half).rev() {
        // the two sides meet at d = n/2 for even n; count that point once
        acc += at(1, d);
        if d < half || n % 2 == 1 {
            acc += at(-1, d);
        }
        tail[d] = acc;
    }
    let last = (1..=half)
        .rev()
        .find(|&d| tail[d] > floor * tail[1])
        .unwrap_or(0);
    // an extended state never sheds most of its weight before the antipode
    if tail[last] > MIN_TAIL_DECAY * tail[1] {
        return None;
    }
    let (x, y): (Vec<f64>, Vec<f64>) = (skip.max(1)..=last)
        .map(|d| (d as f64 * spacing, tail[d].ln()))
        .unzip();
    if x.len() < 4 {
        return None;
    }
    let fit = linear_fit(&x, &y).ok()?;
    if !(fit.slope < 0.0) {
        return None;
    }
    Some(LocalizationFit {
        center,
        length: -1.0 / fit.slope,
        r_squared: fit.r_squared,
        points: fit.points,
    })
}

/// Inverse participation ratio `(Σw)² / Σw²` of a profile.
pub fn participation_ratio(weights: &[f64]) -> f64 {
    let s: f64 = weights.iter().sum();
    let s2: f64 = weights.iter().map(|w| w * w).sum();
    s * s / s2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_exponential() {
        let n = 101;
        let w: Vec<f64> = (0..n)
            .map(|j: usize| {
                let d = j.abs_diff(30).min(n - j.abs_diff(30)) as f64;
                (-d / 2.5).exp()
            })
            .collect();
        let f = localization_fit(&w, 1.0, 1, 1e-30).unwrap();
        assert_eq!(f.center, 30);
        assert!((f.length - 2.5).abs() < 1e-10);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tail_fit_recovers_exponential() {
        let n = 400;
        let w: Vec<f64> = (0..n)
            .map(|j: usize| {
                let d = j.abs_diff(77).min(n - j.abs_diff(77)) as f64;
                (-d / 4.0).exp()
            })
            .collect();
        let f = tail_mass_fit(&w, 0.5, 2, 1e-20).unwrap();
        assert_eq!(f.center, 77);
        // the ring cuts the geometric tail sum short near the floor
        assert!((f.length - 2.0).abs() < 1e-3, "{}", f.length);
        assert!(f.r_squared > 0.999_999);
    }

    #[test]
    fn flat_profile_has_no_fit() {
        assert!(localization_fit(&[1.0; 20], 1.0, 1, 1e-20).is_none());
        assert!(tail_mass_fit(&[1.0; 20], 1.0, 1, 1e-20).is_none());
    }

    #[test]
    fn participation_of_uniform() {
        assert!((participation_ratio(&[0.25; 4]) - 4.0).abs() < 1e-12);
    }
}
