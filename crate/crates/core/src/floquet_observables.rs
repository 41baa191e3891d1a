// SPDX-License-Identifier: Apache-2.0

//! Spectral and stroboscopic diagnostics of Floquet operators.

use std::f64::consts::{PI, TAU};

use faer::Mat;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opalg::pauli::site_mask;
use crate::opalg::{
    wrap_symmetric, ComplexMatrix, HermitianOperator, QuasiSpectrum, StateVector, UnitaryOperator,
};

/// Lower edge of the subharmonic window in cycles per period.
pub const SUBHARMONIC_WINDOW_LO: f64 = 0.45;
/// `2 ln 2 − 1`, the mean gap ratio of uncorrelated levels.
pub const R_POISSON: f64 = 0.386_294_361_119_890_6;

// ---------------------------------------------------------------- level statistics

/// Mean adjacent-gap ratio of a set of levels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapRatio {
    pub mean: f64,
    /// Number of ratios averaged.
    pub count: usize,
    /// Ratios involving an exactly zero gap; each contributes 0.
    pub zero_gaps: usize,
}

fn circular_ratios(sorted: &[f64], zone: f64, out: &mut Vec<f64>) -> Result<usize> {
    let n = sorted.len();
    if n < 3 {
        return Err(Error::param(format!(
            "gap ratio needs at least 3 levels, got {n}"
        )));
    }
    let gaps: Vec<f64> = (0..n)
        .map(|k| {
            if k + 1 < n {
                sorted[k + 1] - sorted[k]
            } else {
                sorted[0] + zone - sorted[n - 1]
            }
        })
        .collect();
    let mut zeros = 0;
    for k in 0..n {
        let (a, b) = (gaps[k], gaps[(k + 1) % n]);
        let hi = a.max(b);
        if a.min(b) <= 0.0 {
            zeros += 1;
            out.push(0.0);
        } else {
            out.push(a.min(b) / hi);
        }
    }
    Ok(zeros)
}

/// Gap ratio `r_n = min(δ_n, δ_{n−1}) / max(δ_n, δ_{n−1})` averaged over the
/// circle of quasi-energies, including the wrap-around gap.
pub fn r_statistic(spectrum: &QuasiSpectrum) -> Result<GapRatio> {
    r_statistic_sectors(std::slice::from_ref(spectrum))
}

/// Gap ratio pooled over independent symmetry sectors; gaps are only taken
/// between levels of the same sector.
pub fn r_statistic_sectors(sectors: &[QuasiSpectrum]) -> Result<GapRatio> {
    if sectors.is_empty() {
        return Err(Error::EmptyInput("spectrum sectors"));
    }
    let mut ratios = Vec::new();
    let mut zeros = 0;
    for s in sectors {
        zeros += circular_ratios(&s.energies, s.zone(), &mut ratios)?;
    }
    Ok(GapRatio {
        mean: ratios.iter().sum::<f64>() / ratios.len() as f64,
        count: ratios.len(),
        zero_gaps: zeros,
    })
}

// ---------------------------------------------------------------- spectral function

/// Frequencies `ω_k = −π/T + (k+1)Δω`, `Δω = (2π/T)/n`, covering `(−π/T, π/T]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub period: f64,
    pub points: usize,
}

impl FrequencyGrid {
    pub fn new(period: f64, points: usize) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::param("grid period must be positive"));
        }
        if points < 4 {
            return Err(Error::param("frequency grid needs at least 4 points"));
        }
        Ok(Self { period, points })
    }

    pub fn zone(&self) -> f64 {
        TAU / self.period
    }

    pub fn step(&self) -> f64 {
        self.zone() / self.points as f64
    }

    pub fn omega(&self, k: usize) -> f64 {
        -PI / self.period + (k + 1) as f64 * self.step()
    }

    pub fn omegas(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.omega(k)).collect()
    }

    /// Index of the grid point nearest to `omega` on the circle.
    pub fn nearest(&self, omega: f64) -> usize {
        let x = (omega + PI / self.period) / self.step() - 1.0;
        (x.round() as i64).rem_euclid(self.points as i64) as usize
    }

    /// Circular distance between two grid indices, in bins.
    pub fn bin_distance(&self, a: usize, b: usize) -> usize {
        let d = a.abs_diff(b);
        d.min(self.points - d)
    }
}

/// Lorentzian of half-width `eta` summed over all copies of the zone
/// (normalized to one over a zone of width `zone`).
pub fn periodic_lorentzian(x: f64, eta: f64, zone: f64) -> f64 {
    let a = TAU * eta / zone;
    let c = (TAU * x / zone).cos();
    // sinh a / (cosh a − cos) rewritten to avoid overflow for wide kernels
    let num = -(-2.0 * a).exp_m1();
    let den = 1.0 + (-2.0 * a).exp() - 2.0 * (-a).exp() * c;
    num / den / zone
}

/// `A(ω) = 2^{−L} Σ_{αβ} |⟨φ_α|σ^+_i|φ_β⟩|² δ(ω − (ε_α − ε_β))` with the
/// deltas broadened into periodic Lorentzians of half-width `eta` and the
/// differences folded into the zone.
pub fn spectral_function(
    spectrum: &QuasiSpectrum,
    sites: usize,
    site: usize,
    eta: f64,
    grid: &FrequencyGrid,
) -> Result<Vec<f64>> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::param(format!(
            "broadening must be positive, got {eta}"
        )));
    }
    if (grid.period - spectrum.period).abs() > 1e-12 * spectrum.period {
        return Err(Error::contract("grid and spectrum periods differ"));
    }
    let v = spectrum
        .vectors
        .as_ref()
        .ok_or_else(|| Error::contract("spectral function needs eigenvectors"))?;
    let dim = v.rows();
    if dim != 1usize << sites || site >= sites {
        return Err(Error::contract(
            "site or chain length does not match the spectrum",
        ));
    }
    let mask = site_mask(sites, site);
    let ups: Vec<usize> = (0..dim).filter(|a| a & mask == 0).collect();
    let vm = v.as_mat();
    // ⟨φ_α|σ^+|φ_β⟩ = Σ_{a up} conj(φ_α(a)) φ_β(a ⊕ mask)
    let up_rows = Mat::from_fn(ups.len(), dim, |r, c| vm[(ups[r], c)]);
    let down_rows = Mat::from_fn(ups.len(), dim, |r, c| vm[(ups[r] ^ mask, c)]);
    let m = up_rows.adjoint() * &down_rows;

    let n = grid.points;
    let step = grid.step();
    let zone = grid.zone();
    let mut binned = vec![0.0f64; n];
    let e = &spectrum.energies;
    for a in 0..dim {
        for b in 0..dim {
            let w = m[(a, b)].norm_sqr();
            if w < 1e-300 {
                continue;
            }
            let omega = wrap_symmetric(e[a] - e[b], zone);
            let x = (omega - grid.omega(0)) / step;
            let k = x.floor();
            let frac = x - k;
            let k = (k as i64).rem_euclid(n as i64) as usize;
            binned[k] += w * (1.0 - frac);
            binned[(k + 1) % n] += w * frac;
        }
    }
    let kernel: Vec<f64> = (0..n)
        .map(|d| periodic_lorentzian(d as f64 * step, eta, zone))
        .collect();
    let norm = 1.0 / dim as f64;
    Ok((0..n)
        .map(|k| {
            let s: f64 = binned
                .iter()
                .enumerate()
                .filter(|(_, &w)| w != 0.0)
                .map(|(j, &w)| w * kernel[(k + n - j) % n])
                .sum();
            s * norm
        })
        .collect())
}

// ---------------------------------------------------------------- time series

/// Stroboscopic samples at `t = nT`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub period: f64,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(period: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::param("time series needs at least 2 samples"));
        }
        Ok(Self { period, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `Re ⟨ψ₀|U^{−n} O U^n O|ψ₀⟩` for `n = 0 … n_periods − 1`.
pub fn magnetization_trace(
    u: &UnitaryOperator,
    psi0: &StateVector,
    op: &HermitianOperator,
    n_periods: usize,
    period: f64,
) -> Result<TimeSeries> {
    if u.dim() != psi0.dim() || op.dim() != psi0.dim() {
        return Err(Error::contract("operator and state dimensions differ"));
    }
    if !psi0.is_normalized() {
        return Err(Error::contract("initial state must be normalized"));
    }
    let mut psi = psi0.amplitudes().to_vec();
    let mut phi = op.matrix().apply(&psi);
    let mut values = Vec::with_capacity(n_periods);
    for n in 0..n_periods {
        if n > 0 {
            psi = u.apply(&psi);
            phi = u.apply(&phi);
        }
        let o_phi = op.matrix().apply(&phi);
        values.push(crate::opalg::inner(&psi, &o_phi).re);
    }
    TimeSeries::new(period, values)
}

/// `⟨ψ_n|O|ψ_n⟩` with `ψ_n = U^n ψ₀`.
pub fn expectation_trace(
    u: &UnitaryOperator,
    psi0: &StateVector,
    op: &HermitianOperator,
    n_periods: usize,
    period: f64,
) -> Result<TimeSeries> {
    if u.dim() != psi0.dim() || op.dim() != psi0.dim() {
        return Err(Error::contract("operator and state dimensions differ"));
    }
    let mut psi = psi0.amplitudes().to_vec();
    let mut values = Vec::with_capacity(n_periods);
    for n in 0..n_periods {
        if n > 0 {
            psi = u.apply(&psi);
        }
        values.push(op.expectation(&psi));
    }
    TimeSeries::new(period, values)
}

// ---------------------------------------------------------------- Fourier analysis

/// One-sided DFT magnitudes `|X_k|/N` at `k/N` cycles per period,
/// `k = 0 … ⌊N/2⌋`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MagnitudeSpectrum {
    pub samples: usize,
    pub frequencies: Vec<f64>,
    pub magnitudes: Vec<f64>,
}

impl MagnitudeSpectrum {
    pub fn bin_width(&self) -> f64 {
        1.0 / self.samples as f64
    }

    /// Index of the global maximum (first one on ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (k, &m) in self.magnitudes.iter().enumerate() {
            if m > self.magnitudes[best] {
                best = k;
            }
        }
        best
    }

    /// `Σ_n |x_n|²` reconstructed from the one-sided magnitudes.
    pub fn parseval_energy(&self) -> f64 {
        let n = self.samples;
        let mut s = 0.0;
        for (k, &m) in self.magnitudes.iter().enumerate() {
            let mult = if k == 0 || (n.is_multiple_of(2) && k == n / 2) {
                1.0
            } else {
                2.0
            };
            s += mult * m * m;
        }
        s * n as f64
    }
}

pub fn dft_series(ts: &TimeSeries) -> Result<MagnitudeSpectrum> {
    let n = ts.values.len();
    if n < 4 {
        return Err(Error::param(format!(
            "DFT needs at least 4 samples, got {n}"
        )));
    }
    let mut buf: Vec<Complex64> = ts.values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let half = n / 2;
    Ok(MagnitudeSpectrum {
        samples: n,
        frequencies: (0..=half).map(|k| k as f64 / n as f64).collect(),
        magnitudes: buf[..=half].iter().map(|z| z.norm() / n as f64).collect(),
    })
}

/// Peak descriptors in the window `[0.45, 0.5]` cycles per period.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubharmonicReport {
    pub peak_height: f64,
    pub peak_center: f64,
    pub peak_variance: f64,
    pub locked: bool,
}

pub fn subharmonic_peak(spectrum: &MagnitudeSpectrum) -> Result<SubharmonicReport> {
    let bin = spectrum.bin_width();
    let window: Vec<(f64, f64)> = spectrum
        .frequencies
        .iter()
        .zip(&spectrum.magnitudes)
        .filter(|(&f, _)| f >= SUBHARMONIC_WINDOW_LO - 1e-12)
        .map(|(&f, &m)| (f, m))
        .collect();
    if window.is_empty() {
        return Err(Error::param("no DFT bins in the subharmonic window"));
    }
    let total: f64 = window.iter().map(|w| w.1).sum();
    let height = window.iter().map(|w| w.1).fold(0.0, f64::max);
    if total <= 0.0 {
        return Ok(SubharmonicReport {
            peak_height: 0.0,
            peak_center: 0.5,
            peak_variance: 0.0,
            locked: false,
        });
    }
    let center = window.iter().map(|(f, m)| f * m).sum::<f64>() / total;
    let variance = window
        .iter()
        .map(|(f, m)| (f - center).powi(2) * m)
        .sum::<f64>()
        / total;
    Ok(SubharmonicReport {
        peak_height: height,
        peak_center: center,
        peak_variance: variance,
        locked: (center - 0.5).abs() <= bin + 1e-12,
    })
}

// ---------------------------------------------------------------- π pairing

/// Fraction of levels matched to a partner at `ε + π/T` (mod `2π/T`)
/// within `tol`, by greedy nearest-partner matching in ascending order.
pub fn pi_pairing(spectrum: &QuasiSpectrum, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::param("pairing tolerance must be positive"));
    }
    let e = &spectrum.energies;
    let n = e.len();
    if n == 0 {
        return Err(Error::EmptyInput("spectrum"));
    }
    let zone = spectrum.zone();
    let half = zone / 2.0;
    let mut matched = vec![false; n];
    let mut count = 0usize;
    for i in 0..n {
        if matched[i] {
            continue;
        }
        let target = crate::opalg::wrap_zone(e[i] + half, zone);
        let pos = e.partition_point(|&x| x < target);
        let mut best: Option<(usize, f64)> = None;
        // scan outwards on the circle until beyond tol
        for dir in [1i64, -1] {
            let mut step = if dir == 1 { 0 } else { 1 };
            loop {
                if step as usize >= n {
                    break;
                }
                let j = (pos as i64 + dir * step).rem_euclid(n as i64) as usize;
                let d = wrap_symmetric(e[j] - target, zone).abs();
                if d > tol {
                    break;
                }
                if j != i && !matched[j] && best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((j, d));
                }
                step += 1;
            }
        }
        if let Some((j, _)) = best {
            matched[i] = true;
            matched[j] = true;
            count += 2;
        }
    }
    Ok(count as f64 / n as f64)
}

// ---------------------------------------------------------------- random matrices

/// Haar-random unitary from the QR decomposition of a complex Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<UnitaryOperator> {
    crate::opalg::check_capacity(n)?;
    let g = Mat::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    let qr = g.qr();
    let q = qr.compute_Q();
    let r = qr.R();
    let phases: Vec<Complex64> = (0..n)
        .map(|k| {
            let d = r[(k, k)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                Complex64::new(1.0, 0.0)
            }
        })
        .collect();
    let u = Mat::from_fn(n, n, |i, j| q[(i, j)] * phases[j]);
    UnitaryOperator::new(ComplexMatrix::from_fn(n, n, |i, j| u[(i, j)])?)
}

/// Circular orthogonal ensemble member `VᵀV` with `V` Haar-random.
pub fn coe_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<UnitaryOperator> {
    let v = haar_unitary(n, rng)?;
    let vt = UnitaryOperator::new(v.matrix().transpose())?;
    vt.then_after(&v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::{eig_unitary, pauli_site, Axis};
    use crate::spin_models::product_rotation;

    fn spectrum(period: f64, e: &[f64]) -> QuasiSpectrum {
        QuasiSpectrum::from_energies(period, e.iter().copied()).unwrap()
    }

    #[test]
    fn picket_fence_ratio_is_one() {
        let e: Vec<f64> = (0..16).map(|k| k as f64 * TAU / 16.0).collect();
        let r = r_statistic(&spectrum(1.0, &e)).unwrap();
        assert!((r.mean - 1.0).abs() < 1e-12);
        assert_eq!(r.count, 16);
    }

    #[test]
    fn ratio_invariant_under_shift() {
        let e = [0.1, 0.5, 1.7, 2.0, 3.9, 5.5];
        let a = r_statistic(&spectrum(1.0, &e)).unwrap().mean;
        let shifted: Vec<f64> = e.iter().map(|x| x + 2.3).collect();
        let b = r_statistic(&spectrum(1.0, &shifted)).unwrap().mean;
        assert!((a - b).abs() < 1e-12);
        // rescaling the levels together with the zone
        let scaled = spectrum(0.5, &e.iter().map(|x| 2.0 * x).collect::<Vec<_>>());
        assert!((r_statistic(&scaled).unwrap().mean - a).abs() < 1e-12);
    }

    #[test]
    fn zero_gaps_flagged() {
        let r = r_statistic(&spectrum(1.0, &[0.0, 0.0, 1.0, 2.0])).unwrap();
        assert_eq!(r.zero_gaps, 2);
        assert!(r_statistic(&spectrum(1.0, &[0.0, 1.0])).is_err());
    }

    #[test]
    fn spectral_function_single_spin_peaks() {
        let phi = 0.6;
        let u = product_rotation(Axis::Z, &[phi]).unwrap();
        let s = eig_unitary(&u, 1.0).unwrap();
        let grid = FrequencyGrid::new(1.0, 628).unwrap();
        let a = spectral_function(&s, 1, 0, 0.02, &grid).unwrap();
        let k = (0..grid.points)
            .max_by(|&i, &j| a[i].total_cmp(&a[j]))
            .unwrap();
        // σ^+ connects |↓⟩ (ε = −φ) to |↑⟩ (ε = φ): ω = 2φ
        assert!(grid.bin_distance(k, grid.nearest(2.0 * phi)) <= 1);
        let sum: f64 = a.iter().sum::<f64>() * grid.step();
        assert!((sum - 0.5).abs() < 0.01);
    }

    #[test]
    fn spectral_sum_rule_random_unitary() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let u = haar_unitary(16, &mut rng).unwrap();
        let s = eig_unitary(&u, 2.0).unwrap();
        let grid = FrequencyGrid::new(2.0, 400).unwrap();
        let a = spectral_function(&s, 4, 2, grid.zone() / 100.0, &grid).unwrap();
        let sum: f64 = a.iter().sum::<f64>() * grid.step();
        assert!((sum - 0.5).abs() < 0.01, "{sum}");
    }

    #[test]
    fn non_positive_broadening_rejected() {
        let u = UnitaryOperator::identity(2).unwrap();
        let s = eig_unitary(&u, 1.0).unwrap();
        let grid = FrequencyGrid::new(1.0, 16).unwrap();
        assert!(matches!(
            spectral_function(&s, 1, 0, 0.0, &grid),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn grid_covers_half_open_zone() {
        let g = FrequencyGrid::new(2.0, 8).unwrap();
        assert!((g.omega(7) - PI / 2.0).abs() < 1e-15);
        assert!(g.omega(0) > -PI / 2.0);
        assert_eq!(g.nearest(-PI / 2.0), 7);
    }

    #[test]
    fn lorentzian_normalized_over_zone() {
        let zone = 3.0;
        let n = 3000;
        let s: f64 = (0..n)
            .map(|k| periodic_lorentzian(k as f64 * zone / n as f64, 0.05, zone))
            .sum::<f64>()
            * zone
            / n as f64;
        assert!((s - 1.0).abs() < 1e-10);
    }

    #[test]
    fn correlator_of_sigma_x_eigenstate_starts_at_one() {
        let x = pauli_site(1, 0, Axis::X).unwrap();
        let plus = StateVector::normalize(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)])
            .unwrap();
        let u = UnitaryOperator::identity(2).unwrap();
        let ts = magnetization_trace(&u, &plus, &x, 3, 1.0).unwrap();
        assert!((ts.values[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn detuned_rotation_correlator_is_cosine() {
        let eps = 0.07;
        let u = product_rotation(Axis::Y, &[FRAC_PI_2 * (1.0 - eps)]).unwrap();
        let x = pauli_site(1, 0, Axis::X).unwrap();
        let plus = StateVector::normalize(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)])
            .unwrap();
        let ts = magnetization_trace(&u, &plus, &x, 40, 1.0).unwrap();
        for (n, v) in ts.values.iter().enumerate() {
            assert!((v - (n as f64 * PI * (1.0 - eps)).cos()).abs() < 1e-12);
        }
    }

    use std::f64::consts::FRAC_PI_2;

    fn series(f: impl Fn(usize) -> f64, n: usize) -> TimeSeries {
        TimeSeries::new(1.0, (0..n).map(f).collect()).unwrap()
    }

    #[test]
    fn dft_constant_and_alternating() {
        let c = dft_series(&series(|_| 2.0, 32)).unwrap();
        assert!((c.magnitudes[0] - 2.0).abs() < 1e-14);
        assert!(c.magnitudes[1..].iter().all(|&m| m < 1e-14));
        let a = dft_series(&series(|n| if n % 2 == 0 { 1.0 } else { -1.0 }, 32)).unwrap();
        assert_eq!(a.argmax(), 16);
        assert!((a.magnitudes[16] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn dft_cosine_bin() {
        let s = dft_series(&series(|n| (TAU * 0.4375 * n as f64).cos(), 64)).unwrap();
        assert_eq!(s.argmax(), 28);
    }

    #[test]
    fn dft_parseval() {
        let ts = series(|n| ((n * n) as f64 * 0.37).sin() + 0.2, 101);
        let s = dft_series(&ts).unwrap();
        let direct: f64 = ts.values.iter().map(|x| x * x).sum();
        assert!((s.parseval_energy() - direct).abs() <= 1e-9 * direct);
    }

    #[test]
    fn alternating_series_is_locked() {
        let s = dft_series(&series(|n| if n % 2 == 0 { 1.0 } else { -1.0 }, 200)).unwrap();
        let r = subharmonic_peak(&s).unwrap();
        assert!(r.locked);
        assert!((r.peak_center - 0.5).abs() < 1e-12);
        assert!(r.peak_variance < 1e-12);
        assert!((r.peak_height - 1.0).abs() < 1e-12);
    }

    #[test]
    fn detuned_cosine_is_unlocked() {
        let eps = 0.05;
        let s = dft_series(&series(|n| (n as f64 * PI * (1.0 - eps)).cos(), 200)).unwrap();
        let r = subharmonic_peak(&s).unwrap();
        assert!(!r.locked);
        assert!((r.peak_center - 0.475).abs() < 0.01);
    }

    #[test]
    fn subharmonic_window_needs_bins() {
        let s = MagnitudeSpectrum {
            samples: 4,
            frequencies: vec![0.0, 0.25],
            magnitudes: vec![1.0, 0.0],
        };
        assert!(subharmonic_peak(&s).is_err());
    }

    #[test]
    fn pairing_exact_and_absent() {
        let half = PI;
        let e = [0.1, 0.1 + half, 0.9, 0.9 + half];
        assert_eq!(pi_pairing(&spectrum(1.0, &e), 1e-9).unwrap(), 1.0);
        let e = [0.1, 0.5, 0.9, 1.3];
        assert_eq!(pi_pairing(&spectrum(1.0, &e), 1e-3).unwrap(), 0.0);
    }

    #[test]
    fn haar_unitary_is_unitary() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let u = haar_unitary(32, &mut rng).unwrap();
        assert!(u.matrix().unitarity_residual() < 1e-12);
        let c = coe_unitary(32, &mut rng).unwrap();
        assert!((c.matrix() - &c.matrix().transpose()).max_abs() < 1e-12);
    }
}
