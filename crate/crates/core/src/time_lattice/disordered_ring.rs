// SPDX-License-Identifier: Apache-2.0

//! Temporal disorder on a resonant ring: in the frame `Θ = θ − ωt` the
//! drive leaves a static random potential `U(Θ)` whose harmonics carry a
//! Gaussian envelope.

use std::f64::consts::{PI, TAU};
use std::path::Path;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{localization_fit, tail_mass_fit, LocalizationFit};
use crate::error::{Error, Result};
use crate::floquet_observables::TimeSeries;
use crate::opalg::{eig_hermitian, ComplexMatrix, HermitianOperator};
use crate::sampling::unit_draw;
use crate::table::write_csv;

/// Fits at or above this R² count as exponentially localized.
pub const LOCALIZED_R2: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderedRingSpec {
    pub amplitude: f64,
    /// Envelope scale: `|c_k| = e^{−k²/(2k0²)}`.
    pub k0: f64,
    /// Largest harmonic kept.
    pub harmonics: usize,
    pub omega: f64,
    pub seed: u64,
}

impl DisorderedRingSpec {
    pub fn validate(&self) -> Result<()> {
        if self.harmonics == 0 {
            return Err(Error::param("need at least one harmonic"));
        }
        if !(self.k0 > 0.0) || !(self.omega > 0.0) || !self.amplitude.is_finite() {
            return Err(Error::param("k0 and ω must be positive and V0 finite"));
        }
        Ok(())
    }

    /// `√2/k0`, the width of the Gaussian autocorrelation.
    pub fn correlation_length(&self) -> f64 {
        2f64.sqrt() / self.k0
    }

    /// A cutoff below `3k0` clips the envelope and shortens the spectrum.
    pub fn truncation_warning(&self) -> bool {
        (self.harmonics as f64) < 3.0 * self.k0
    }

    /// `c_k` for `k = 1 … K`; `c_{−k} = c_k*` and `c_0 = 0`.
    pub fn coefficients(&self) -> Vec<Complex64> {
        (1..=self.harmonics)
            .map(|k| {
                let phase = TAU * unit_draw(self.seed, "ring_phase", k as u64);
                let kk = k as f64 / self.k0;
                Complex64::from_polar((-0.5 * kk * kk).exp(), phase)
            })
            .collect()
    }
}

/// Fourier coefficient of the square-wave modulation, `g_k = i(−1)^k/(πk)`.
pub fn square_wave_harmonic(k: i64) -> Complex64 {
    let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Complex64::new(0.0, sign / (PI * k as f64))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectivePotential {
    pub amplitude: f64,
    pub coefficients: Vec<Complex64>,
    pub values: Vec<f64>,
    /// Largest imaginary part met while synthesizing `values`.
    pub max_imag: f64,
    pub truncation_warning: bool,
}

impl EffectivePotential {
    pub fn points(&self) -> usize {
        self.values.len()
    }

    pub fn spacing(&self) -> f64 {
        TAU / self.points() as f64
    }

    pub fn std_dev(&self) -> f64 {
        let n = self.points() as f64;
        let mean = self.values.iter().sum::<f64>() / n;
        (self.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
    }

    /// Circular autocorrelation `C(Δ)/C(0)` at lags `0 … M−1` grid steps.
    pub fn autocorrelation(&self) -> Vec<f64> {
        circular_correlation(&self.values, &self.values)
    }

    /// Lag where the autocorrelation first drops to `e^{−1/2}`, linearly
    /// interpolated; the Gaussian width of `C`.
    pub fn empirical_correlation_length(&self) -> Option<f64> {
        let c = self.autocorrelation();
        let target = (-0.5f64).exp();
        let k = (1..c.len() / 2).find(|&k| c[k] <= target)?;
        let frac = (c[k - 1] - target) / (c[k - 1] - c[k]);
        Some((k as f64 - 1.0 + frac) * self.spacing())
    }

    /// Largest `|⟨U_a(Θ) U_b(Θ + Δ)⟩| / (σ_a σ_b)` over all lags.
    pub fn cross_correlation_peak(&self, other: &Self) -> Result<f64> {
        if other.points() != self.points() {
            return Err(Error::contract("potentials sampled on different grids"));
        }
        Ok(circular_correlation(&self.values, &other.values)
            .into_iter()
            .fold(0.0, |m, c| m.max(c.abs())))
    }

    /// Harmonic table: `k, |c_k|, arg c_k`, and the drive harmonic
    /// `f_{−k} = c_k / g_k` that realizes it.
    pub fn write_harmonics_csv(&self, path: &Path) -> Result<()> {
        let rows = self.coefficients.iter().enumerate().map(|(i, c)| {
            let k = i as i64 + 1;
            let f = c / square_wave_harmonic(k);
            vec![k as f64, c.norm(), c.arg(), f.re, f.im]
        });
        write_csv(path, &["k", "abs_c", "arg_c", "re_f", "im_f"], rows)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let h = self.spacing();
        let rows = self
            .values
            .iter()
            .enumerate()
            .map(|(j, &u)| vec![j as f64 * h, u]);
        write_csv(path, &["theta", "potential"], rows)
    }
}

/// Normalized circular cross-correlation of two mean-removed signals.
fn circular_correlation(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let centered = |v: &[f64]| {
        let mean = v.iter().sum::<f64>() / n as f64;
        v.iter()
            .map(|x| Complex64::new(x - mean, 0.0))
            .collect::<Vec<_>>()
    };
    let (mut fa, mut fb) = (centered(a), centered(b));
    let norm = (fa.iter().map(|z| z.norm_sqr()).sum::<f64>()
        * fb.iter().map(|z| z.norm_sqr()).sum::<f64>())
    .sqrt();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    let mut prod: Vec<Complex64> = fa.iter().zip(&fb).map(|(x, y)| x.conj() * y).collect();
    planner.plan_fft_inverse(n).process(&mut prod);
    // inverse FFT is unnormalized: Σ_j a_j b_{j+Δ} · n
    prod.iter().map(|z| z.re / (n as f64 * norm)).collect()
}

/// `V0 Σ_{0<|k|≤K} c_k e^{ikΘ}` on `points` equally spaced angles.
pub fn effective_potential(spec: &DisorderedRingSpec, points: usize) -> Result<EffectivePotential> {
    spec.validate()?;
    if points <= 2 * spec.harmonics {
        return Err(Error::param(format!(
            "{points} grid points cannot resolve harmonic {}",
            spec.harmonics
        )));
    }
    let coefficients = spec.coefficients();
    let mut buf = vec![Complex64::new(0.0, 0.0); points];
    for (i, c) in coefficients.iter().enumerate() {
        let k = i + 1;
        buf[k] = spec.amplitude * c;
        buf[points - k] = spec.amplitude * c.conj();
    }
    FftPlanner::new().plan_fft_inverse(points).process(&mut buf);
    let max_imag = buf.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
    Ok(EffectivePotential {
        amplitude: spec.amplitude,
        coefficients,
        values: buf.iter().map(|z| z.re).collect(),
        max_imag,
        truncation_warning: spec.truncation_warning(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RingAndersonReport {
    pub energies: Vec<f64>,
    /// `densities[k][j] = |ψ_k(Θ_j)|² ΔΘ`, summing to one.
    pub densities: Vec<Vec<f64>>,
    /// Tail-mass fits; these decide localization.
    pub fits: Vec<Option<LocalizationFit>>,
    /// Pointwise fits of `ln|ψ|²`, kept for comparison.
    pub profile_fits: Vec<Option<LocalizationFit>>,
    /// Standard deviation of `U` on the grid.
    pub disorder_std: f64,
    pub omega: f64,
    /// Plane-wave cutoff below `4K`.
    pub truncated: bool,
}

impl RingAndersonReport {
    pub fn spacing(&self) -> f64 {
        TAU / self.densities[0].len() as f64
    }

    /// Fraction of states with `E < cut` whose fit reaches [`LOCALIZED_R2`],
    /// and how many states that is out of.
    pub fn localized_fraction(&self, cut: f64) -> (f64, usize) {
        fraction(&self.energies, &self.fits, cut)
    }

    /// Same statistic for the pointwise fits.
    pub fn profile_localized_fraction(&self, cut: f64) -> (f64, usize) {
        fraction(&self.energies, &self.profile_fits, cut)
    }

    /// `|ψ_k(θ0 − ωt)|²` over `cycles` drive periods, sampled so that one
    /// grid step in `Θ` is one time step. `θ0` is rounded to the grid.
    pub fn lab_frame_profile(
        &self,
        state: usize,
        theta0: f64,
        cycles: usize,
    ) -> Result<TimeSeries> {
        let w = self.densities.get(state).ok_or(Error::Index {
            what: "ring eigenstate",
            index: state,
            len: self.densities.len(),
        })?;
        let m = w.len();
        let h = self.spacing();
        let j0 = (theta0.rem_euclid(TAU) / h).round() as usize % m;
        let dt = h / self.omega;
        TimeSeries::new(
            dt,
            (0..m * cycles)
                .map(|n| w[(j0 + m * cycles - n % m) % m] / h)
                .collect(),
        )
    }
}

fn fraction(energies: &[f64], fits: &[Option<LocalizationFit>], cut: f64) -> (f64, usize) {
    let below: Vec<_> = energies
        .iter()
        .zip(fits)
        .filter(|(e, _)| **e < cut)
        .collect();
    if below.is_empty() {
        return (0.0, 0);
    }
    let good = below
        .iter()
        .filter(|(_, f)| f.is_some_and(|f| f.r_squared >= LOCALIZED_R2))
        .count();
    (good as f64 / below.len() as f64, below.len())
}

/// Eigenstates of `P²/2 + U(Θ)` in plane waves `|p| ≤ cutoff`, sampled on
/// `points` angles and fitted for exponential localization.
pub fn ring_anderson(
    spec: &DisorderedRingSpec,
    cutoff: usize,
    points: usize,
) -> Result<RingAndersonReport> {
    let pot = effective_potential(spec, points)?;
    let dim = 2 * cutoff + 1;
    if points < dim {
        return Err(Error::param(format!(
            "{points} grid points cannot resolve {dim} plane waves"
        )));
    }
    let k_max = spec.harmonics as i64;
    let c = cutoff as i64;
    let mut h = ComplexMatrix::zeros(dim, dim)?;
    for a in 0..dim {
        let p = a as i64 - c;
        h.set(a, a, Complex64::new(0.5 * (p * p) as f64, 0.0));
        for b in 0..dim {
            let k = a as i64 - b as i64;
            if k != 0 && k.abs() <= k_max {
                let ck = pot.coefficients[k.unsigned_abs() as usize - 1];
                h.set(a, b, spec.amplitude * if k > 0 { ck } else { ck.conj() });
            }
        }
    }
    let eig = eig_hermitian(&HermitianOperator::new(h)?)?;
    let spacing = TAU / points as f64;
    let skip = (spec.correlation_length() / spacing).ceil() as usize;
    let mut planner = FftPlanner::new();
    let inv = planner.plan_fft_inverse(points);
    let mut densities = Vec::with_capacity(dim);
    let mut fits = Vec::with_capacity(dim);
    let mut profile_fits = Vec::with_capacity(dim);
    for k in 0..dim {
        let mut buf = vec![Complex64::new(0.0, 0.0); points];
        for a in 0..dim {
            let p = a as i64 - c;
            buf[p.rem_euclid(points as i64) as usize] = eig.vectors.get(a, k);
        }
        inv.process(&mut buf);
        let total: f64 = buf.iter().map(|z| z.norm_sqr()).sum();
        let w: Vec<f64> = buf.iter().map(|z| z.norm_sqr() / total).collect();
        fits.push(tail_mass_fit(&w, spacing, skip, FIT_FLOOR).filter(|f| f.length < PI));
        profile_fits.push(localization_fit(&w, spacing, skip, FIT_FLOOR).filter(|f| f.length < PI));
        densities.push(w);
    }
    Ok(RingAndersonReport {
        energies: eig.values,
        densities,
        fits,
        profile_fits,
        disorder_std: pot.std_dev(),
        omega: spec.omega,
        truncated: cutoff < 4 * spec.harmonics,
    })
}

/// Relative weight where a fit range ends. Densities carry rounding noise
/// near `1e−29` of the peak, so the floor stays well clear of it.
pub const FIT_FLOOR: f64 = 1e-20;
