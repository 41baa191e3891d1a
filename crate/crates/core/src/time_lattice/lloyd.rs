// SPDX-License-Identifier: Apache-2.0

//! Anderson localization in time: the Lloyd model on a time-lattice ring.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::tight_binding::{tb_ring_eigensystem, TightBindingRing};
use super::{localization_fit, participation_ratio, LocalizationFit};
use crate::error::{Error, Result};
use crate::floquet_observables::TimeSeries;
use crate::sampling::{unit_draw, Stream};

/// Fits below this coefficient of determination are reported but not used.
pub const MIN_FIT_R2: f64 = 0.8;
/// Relative weight where a profile's fit range ends; well above the
/// eigensolver's noise in the tails.
pub const FIT_FLOOR: f64 = 1e-24;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LloydSpec {
    pub sites: usize,
    pub hopping: f64,
    /// Half width of the Lorentzian on-site distribution.
    pub width: f64,
    #[serde(default = "one")]
    pub period: f64,
    pub seed: u64,
    /// States with `|E| ≤ window` enter the band-centre comparison.
    #[serde(default = "default_window")]
    pub window: f64,
}

fn one() -> f64 {
    1.0
}

fn default_window() -> f64 {
    0.5
}

impl LloydSpec {
    pub fn new(sites: usize, hopping: f64, width: f64, seed: u64) -> Self {
        Self {
            sites,
            hopping,
            width,
            period: 1.0,
            seed,
            window: default_window(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites < 2 {
            return Err(Error::param("Lloyd ring needs at least two sites"));
        }
        if !(self.hopping > 0.0)
            || !(self.width >= 0.0)
            || !(self.period > 0.0)
            || !(self.window > 0.0)
        {
            return Err(Error::param(
                "hopping, period and window must be positive and width non-negative",
            ));
        }
        Ok(())
    }

    /// Lorentzian on-site energies `γ tan(π(u − ½))`.
    pub fn onsite(&self) -> Vec<f64> {
        (0..self.sites as u64)
            .map(|j| self.width * (PI * (unit_draw(self.seed, "lloyd_onsite", j) - 0.5)).tan())
            .collect()
    }

    pub fn ring(&self) -> Result<TightBindingRing> {
        TightBindingRing::new(vec![self.hopping; self.sites], self.onsite(), self.period)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LloydReport {
    pub energies: Vec<f64>,
    pub fits: Vec<Option<LocalizationFit>>,
    pub participation: Vec<f64>,
    /// Harmonic mean of fitted lengths (sites) over reliable fits with
    /// `|E| ≤ window`.
    pub fitted_length: Option<f64>,
    /// Transfer-matrix length (sites) at `E = 0`.
    pub transfer_length: f64,
    /// `fitted_length · T`.
    pub time_length: Option<f64>,
    pub reliable_fits: usize,
}

impl LloydReport {
    pub fn relative_deviation(&self) -> Option<f64> {
        self.fitted_length
            .map(|l| (l - self.transfer_length).abs() / self.transfer_length)
    }
}

/// Steps used for the transfer-matrix estimate.
pub const TRANSFER_STEPS: usize = 400_000;

pub fn lloyd_localization(spec: &LloydSpec) -> Result<LloydReport> {
    spec.validate()?;
    let eig = tb_ring_eigensystem(&spec.ring()?)?;
    let s = spec.sites;
    let mut fits = Vec::with_capacity(s);
    let mut participation = Vec::with_capacity(s);
    let mut central = Vec::new();
    for k in 0..s {
        let w: Vec<f64> = (0..s).map(|j| eig.vectors.get(j, k).norm_sqr()).collect();
        participation.push(participation_ratio(&w));
        let fit = localization_fit(&w, 1.0, 1, FIT_FLOOR).filter(|f| f.length < s as f64 / 2.0);
        if let Some(f) = fit {
            if f.r_squared >= MIN_FIT_R2 && eig.values[k].abs() <= spec.window {
                central.push(f.length);
            }
        }
        fits.push(fit);
    }
    let reliable_fits = fits
        .iter()
        .flatten()
        .filter(|f| f.r_squared >= MIN_FIT_R2)
        .count();
    // slopes (1/ℓ) average linearly; a mean of lengths overweights flat fits
    let fitted_length = if central.is_empty() {
        None
    } else {
        Some(central.len() as f64 / central.iter().map(|l| 1.0 / l).sum::<f64>())
    };
    let transfer_length =
        lyapunov_length(spec.hopping, spec.width, 0.0, TRANSFER_STEPS, spec.seed)?;
    Ok(LloydReport {
        energies: eig.values,
        fits,
        participation,
        fitted_length,
        transfer_length,
        time_length: fitted_length.map(|l| l * spec.period),
        reliable_fits,
    })
}

/// `ℓ = 1/(2λ)` from the Lyapunov exponent of `ψ_{j+1} = ((ε_j − E)/t)ψ_j − ψ_{j−1}`
/// on an independent Lorentzian chain, `t = J/2`, so that `|ψ_j|² ∝ e^{−j/ℓ}`.
pub fn lyapunov_length(
    hopping: f64,
    width: f64,
    energy: f64,
    steps: usize,
    seed: u64,
) -> Result<f64> {
    if steps == 0 || !(hopping > 0.0) {
        return Err(Error::param("transfer matrix needs steps > 0 and J > 0"));
    }
    let t = 0.5 * hopping;
    let mut stream = Stream::new(seed, "lloyd_transfer");
    let (mut prev, mut cur) = (0.0f64, 1.0f64);
    let mut log_growth = 0.0;
    for _ in 0..steps {
        let eps = width * (PI * (stream.unit() - 0.5)).tan();
        let next = (eps - energy) / t * cur - prev;
        prev = cur;
        cur = next;
        let scale = cur.abs().max(prev.abs());
        if !(1e-100..=1e100).contains(&scale) {
            log_growth += scale.ln();
            cur /= scale;
            prev /= scale;
        }
    }
    log_growth += cur.abs().max(prev.abs()).ln();
    let lambda = log_growth / steps as f64;
    Ok(1.0 / (2.0 * lambda))
}

/// Thouless' closed form for the Lloyd model:
/// `cosh λ = [√((2t+E)² + γ²) + √((2t−E)² + γ²)] / (4t)`, `ℓ = 1/(2λ)`.
pub fn lloyd_exact_length(hopping: f64, width: f64, energy: f64) -> f64 {
    let t = 0.5 * hopping;
    let c = (((2.0 * t + energy).powi(2) + width * width).sqrt()
        + ((2.0 * t - energy).powi(2) + width * width).sqrt())
        / (4.0 * t);
    1.0 / (2.0 * c.acosh())
}

/// Lab-frame signal at a fixed position: site `j` is detected in the time
/// slot `[jT, (j+1)T)`, so the profile repeats every `sT`.
pub fn time_profile(weights: &[f64], period: f64, cycles: usize) -> Result<TimeSeries> {
    let s = weights.len();
    TimeSeries::new(period, (0..s * cycles).map(|n| weights[n % s]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transfer_matrix_matches_closed_form() {
        for (w, e) in [(0.5, 0.0), (1.0, 0.0), (0.5, 0.3)] {
            let l = lyapunov_length(1.0, w, e, TRANSFER_STEPS, 3).unwrap();
            let exact = lloyd_exact_length(1.0, w, e);
            assert!((l / exact - 1.0).abs() < 0.02, "γ={w}: {l} vs {exact}");
        }
    }

    #[test]
    fn clean_ring_is_extended() {
        let spec = LloydSpec::new(60, 1.0, 0.0, 1);
        let r = lloyd_localization(&spec).unwrap();
        assert_eq!(r.fitted_length, None);
        let median_pr = {
            let mut p = r.participation.clone();
            p.sort_by(f64::total_cmp);
            p[30]
        };
        assert!(median_pr > 60.0 / 2.0);
    }

    #[test]
    fn disordered_ring_agrees_with_transfer_matrix() {
        let r = lloyd_localization(&LloydSpec::new(200, 1.0, 0.5, 11)).unwrap();
        assert!(
            r.relative_deviation().unwrap() < 0.3,
            "{:?} vs {}",
            r.fitted_length,
            r.transfer_length
        );
        assert_eq!(r.time_length, r.fitted_length);
    }

    #[test]
    fn profile_repeats_every_s_periods() {
        let w = [0.1, 0.5, 0.3, 0.1];
        let ts = time_profile(&w, 0.5, 3).unwrap();
        for n in 0..ts.len() - 4 {
            assert_eq!(ts.values[n], ts.values[n + 4]);
        }
    }

    #[test]
    fn onsite_draws_are_reproducible() {
        let a = LloydSpec::new(10, 1.0, 0.5, 4).onsite();
        assert_eq!(a, LloydSpec::new(10, 1.0, 0.5, 4).onsite());
        assert_ne!(a, LloydSpec::new(10, 1.0, 0.5, 5).onsite());
    }
}
