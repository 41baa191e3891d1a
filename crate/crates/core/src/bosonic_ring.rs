// SPDX-License-Identifier: Apache-2.0

//! Mean-field bosons on a ring of unit length.
//!
//! The Gross–Pitaevskii ground state is found by split-step imaginary-time
//! propagation with the kinetic step applied exactly in Fourier space. The
//! normalization is `Σ|φ_k|²/M = 1`, so a uniform state has `φ ≡ 1`.

use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::write_csv;

/// Uniform grid `x_k = k/M` on the unit ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingGrid {
    points: usize,
}

impl RingGrid {
    pub fn new(points: usize) -> Result<Self> {
        if points < 32 {
            return Err(Error::param(format!(
                "ring grid needs at least 32 points, got {points}"
            )));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.points as f64
    }

    pub fn position(&self, k: usize) -> f64 {
        k as f64 / self.points as f64
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.position(k)).collect()
    }

    /// Angular wavenumbers `2πm` in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let m = self.points as i64;
        (0..m)
            .map(|i| TAU * if i <= m / 2 { i } else { i - m } as f64)
            .collect()
    }

    /// Signed distance from `a` to `b` folded into `[−½, ½)`.
    pub fn ring_distance(a: f64, b: f64) -> f64 {
        (b - a + 0.5).rem_euclid(1.0) - 0.5
    }
}

/// Parameters of the stationary problem `(½(−i∂ − α)² + γ|φ|²)φ = μφ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GpeParams {
    /// `g0 (N − 1)`.
    pub gamma: f64,
    #[serde(default)]
    pub flux: f64,
    /// Initial imaginary-time step; it is refined as the solve proceeds.
    pub step: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl GpeParams {
    pub fn new(gamma: f64) -> Self {
        Self {
            gamma,
            flux: 0.0,
            step: 1e-2,
            tolerance: 1e-8,
            max_iterations: 400_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.gamma.is_finite() || !self.flux.is_finite() {
            return Err(Error::param("interaction and flux must be finite"));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::param("imaginary-time step must be positive"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::param("tolerance must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(Error::param("max_iterations must be positive"));
        }
        Ok(())
    }
}

/// `φ(x_k)` together with the chemical potential it was found at.
#[derive(Clone, Debug, PartialEq)]
pub struct MeanFieldState {
    pub grid: RingGrid,
    pub amplitudes: Vec<Complex64>,
    pub chemical_potential: f64,
}

impl MeanFieldState {
    /// `Σ|φ_k|²/M`.
    pub fn norm(&self) -> f64 {
        discrete_norm(&self.amplitudes)
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `|Σ φ̄_k ψ_k| / M`.
    pub fn overlap(&self, other: &MeanFieldState) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::contract("states live on different grids"));
        }
        let s: Complex64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s.norm() / self.grid.points as f64)
    }

    /// Peak density over mean density; 1 for a uniform state.
    pub fn peak_to_mean(&self) -> f64 {
        let d = self.density();
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        d.iter().cloned().fold(0.0, f64::max) / mean
    }

    /// Circular mean position of the density, in `[0, 1)`.
    pub fn center_of_mass(&self) -> f64 {
        let z: Complex64 = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(k, a)| a.norm_sqr() * Complex64::from_polar(1.0, TAU * self.grid.position(k)))
            .sum();
        (z.arg() / TAU).rem_euclid(1.0)
    }

    /// CSV with header `x,re,im,density`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let rows = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(k, a)| vec![self.grid.position(k), a.re, a.im, a.norm_sqr()]);
        write_csv(path, &["x", "re", "im", "density"], rows)
    }
}

/// Converged solve with its diagnostics.
#[derive(Clone, Debug)]
pub struct GroundState {
    pub state: MeanFieldState,
    pub energy: f64,
    pub residual: f64,
    pub iterations: usize,
    /// Largest energy rise accepted between consecutive steps (rounding
    /// level only; larger rises shrink the step and are retried).
    pub max_energy_rise: f64,
}

fn discrete_norm(phi: &[Complex64]) -> f64 {
    phi.iter().map(|a| a.norm_sqr()).sum::<f64>() / phi.len() as f64
}

fn normalize(phi: &mut [Complex64]) {
    let s = discrete_norm(phi).sqrt();
    for a in phi.iter_mut() {
        *a /= s;
    }
}

struct Spectral {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    kinetic: Vec<f64>,
}

impl Spectral {
    fn new(grid: RingGrid, flux: f64) -> Self {
        let mut planner = FftPlanner::new();
        let kinetic = grid
            .wavenumbers()
            .into_iter()
            .map(|k| 0.5 * (k - flux).powi(2))
            .collect();
        Self {
            forward: planner.plan_fft_forward(grid.points),
            inverse: planner.plan_fft_inverse(grid.points),
            kinetic,
        }
    }

    /// Apply `f(kinetic eigenvalue)` as a Fourier multiplier.
    fn multiply(&self, phi: &mut [Complex64], f: impl Fn(f64) -> f64) {
        let m = phi.len() as f64;
        self.forward.process(phi);
        for (a, &k) in phi.iter_mut().zip(&self.kinetic) {
            *a *= f(k) / m;
        }
        self.inverse.process(phi);
    }

    fn kinetic_apply(&self, phi: &[Complex64]) -> Vec<Complex64> {
        let mut out = phi.to_vec();
        self.multiply(&mut out, |k| k);
        out
    }
}

/// `(μ, E, ‖(H − μ)φ‖)` for a normalized `φ`; the residual uses the same
/// discrete norm as the state.
fn diagnostics(sp: &Spectral, gamma: f64, phi: &[Complex64]) -> (f64, f64, f64) {
    let m = phi.len() as f64;
    let kphi = sp.kinetic_apply(phi);
    let mut kin = 0.0;
    let mut pot = 0.0;
    for (a, ka) in phi.iter().zip(&kphi) {
        kin += (a.conj() * ka).re;
        pot += a.norm_sqr().powi(2);
    }
    kin /= m;
    pot *= gamma / m;
    let mu = kin + pot;
    let energy = kin + 0.5 * pot;
    let res: f64 = phi
        .iter()
        .zip(&kphi)
        .map(|(a, ka)| (ka + a * (gamma * a.norm_sqr()) - a * mu).norm_sqr())
        .sum::<f64>()
        / m;
    (mu, energy, res.sqrt())
}

fn split_step(sp: &Spectral, gamma: f64, dt: f64, phi: &mut [Complex64]) {
    for a in phi.iter_mut() {
        *a *= (-0.5 * dt * gamma * a.norm_sqr()).exp();
    }
    sp.multiply(phi, |k| (-dt * k).exp());
    for a in phi.iter_mut() {
        *a *= (-0.5 * dt * gamma * a.norm_sqr()).exp();
    }
    normalize(phi);
}

/// Default starting point: a uniform state with a weak `cos 2πx` bump, so
/// that a symmetry-broken solution centres on `x = 0`.
pub fn seed_state(grid: RingGrid) -> Vec<Complex64> {
    let mut phi: Vec<Complex64> = (0..grid.points)
        .map(|k| Complex64::new(1.0 + 0.1 * (TAU * grid.position(k)).cos(), 0.0))
        .collect();
    normalize(&mut phi);
    phi
}

pub fn gpe_ground_state(params: &GpeParams, grid: RingGrid) -> Result<GroundState> {
    gpe_ground_state_from(params, grid, seed_state(grid))
}

/// Imaginary-time relaxation from a given initial state.
///
/// Split steps run until the state stops moving at the current step size.
/// Their fixed point is stationary only up to `O(dt²)`, so the last stretch
/// uses Fourier-preconditioned gradient steps `φ ← φ − τ(c + K)⁻¹(H − μ)φ`,
/// whose fixed points are exact. In both stages a step that raises the
/// energy is rejected and retried at half the size.
pub fn gpe_ground_state_from(
    params: &GpeParams,
    grid: RingGrid,
    initial: Vec<Complex64>,
) -> Result<GroundState> {
    params.validate()?;
    if initial.len() != grid.points {
        return Err(Error::contract("initial state does not match the grid"));
    }
    let sp = Spectral::new(grid, params.flux);
    let gamma = params.gamma;
    let m = grid.points as f64;
    let mut phi = initial;
    normalize(&mut phi);
    let (mut mu, mut energy, mut residual) = diagnostics(&sp, gamma, &phi);
    let mut max_rise = 0.0f64;
    let mut trial = phi.clone();
    let mut iterations = 0;
    let mut polishing = false;
    let mut dt = params.step;
    let mut tau = 1.0;
    while residual > params.tolerance {
        if iterations >= params.max_iterations {
            return Err(Error::Convergence {
                iterations,
                residual,
            });
        }
        iterations += 1;
        trial.copy_from_slice(&phi);
        if polishing {
            let shift =
                mu.abs() + gamma.abs() * phi.iter().map(|a| a.norm_sqr()).fold(0.0, f64::max) + 1.0;
            let kphi = sp.kinetic_apply(&phi);
            let mut r: Vec<Complex64> = phi
                .iter()
                .zip(&kphi)
                .map(|(a, ka)| ka + a * (gamma * a.norm_sqr() - mu))
                .collect();
            sp.multiply(&mut r, |k| 1.0 / (shift + k));
            for (t, ri) in trial.iter_mut().zip(&r) {
                *t -= ri * tau;
            }
            normalize(&mut trial);
        } else {
            split_step(&sp, gamma, dt, &mut trial);
        }
        let (mu_t, e, r) = diagnostics(&sp, gamma, &trial);
        let rise = e - energy;
        if rise > 1e-12 * energy.abs().max(1.0) {
            if polishing {
                tau *= 0.5;
            } else {
                dt *= 0.5;
            }
            if dt.min(tau) < 1e-12 {
                return Err(Error::Convergence {
                    iterations,
                    residual,
                });
            }
            continue;
        }
        max_rise = max_rise.max(rise);
        let moved = (trial
            .iter()
            .zip(&phi)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            / m)
            .sqrt();
        std::mem::swap(&mut phi, &mut trial);
        energy = e;
        mu = mu_t;
        residual = r;
        if !polishing && moved < 0.1 * dt * r {
            polishing = true;
        }
    }
    let (mu, energy, residual) = diagnostics(&sp, gamma, &phi);
    Ok(GroundState {
        state: MeanFieldState {
            grid,
            amplitudes: phi,
            chemical_potential: mu,
        },
        energy,
        residual,
        iterations,
        max_energy_rise: max_rise,
    })
}

/// Normalized `sech((γ/2)(x − x_CM))` profile using the ring distance.
pub fn soliton_profile(gamma: f64, center: f64, grid: RingGrid) -> Result<MeanFieldState> {
    if !(gamma < 0.0) || !gamma.is_finite() {
        return Err(Error::param(format!(
            "a bright soliton needs γ < 0, got {gamma}"
        )));
    }
    let kappa = 0.5 * gamma.abs();
    let mut phi: Vec<Complex64> = (0..grid.points)
        .map(|k| {
            let d = RingGrid::ring_distance(center, grid.position(k));
            Complex64::new(1.0 / (kappa * d).cosh(), 0.0)
        })
        .collect();
    normalize(&mut phi);
    let sp = Spectral::new(grid, 0.0);
    let (mu, _, _) = diagnostics(&sp, gamma, &phi);
    Ok(MeanFieldState {
        grid,
        amplitudes: phi,
        chemical_potential: mu,
    })
}

/// Full width at half maximum of the density, by linear interpolation
/// around the peak.
pub fn density_fwhm(state: &MeanFieldState) -> f64 {
    let d = state.density();
    let m = d.len();
    let (peak, &dmax) = d
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty grid");
    let half = 0.5 * dmax;
    let side = |step: isize| -> f64 {
        let mut prev = dmax;
        for s in 1..m as isize {
            let v = d[(peak as isize + step * s).rem_euclid(m as isize) as usize];
            if v <= half {
                let frac = (prev - half) / (prev - v);
                return (s as f64 - 1.0 + frac) / m as f64;
            }
            prev = v;
        }
        0.5
    };
    side(1) + side(-1)
}

/// Bisection for the interaction strength at which the ground state stops
/// being uniform. A state counts as broken when its peak-to-mean density
/// exceeds `1 + threshold`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bifurcation {
    pub gamma: f64,
    pub bracket: (f64, f64),
    pub evaluations: usize,
}

pub fn symmetry_breaking_threshold(
    grid: RingGrid,
    mut broken: f64,
    mut uniform: f64,
    width: f64,
    threshold: f64,
) -> Result<Bifurcation> {
    if !(broken < uniform) {
        return Err(Error::param("bracket must satisfy broken < uniform"));
    }
    let is_broken = |gamma: f64| -> Result<bool> {
        let mut p = GpeParams::new(gamma);
        p.tolerance = 1e-7;
        p.step = 0.05;
        Ok(gpe_ground_state(&p, grid)?.state.peak_to_mean() > 1.0 + threshold)
    };
    let mut evaluations = 2;
    if !is_broken(broken)? || is_broken(uniform)? {
        return Err(Error::param("bracket does not straddle the bifurcation"));
    }
    while uniform - broken > width {
        let mid = 0.5 * (broken + uniform);
        evaluations += 1;
        if is_broken(mid)? {
            broken = mid;
        } else {
            uniform = mid;
        }
    }
    Ok(Bifurcation {
        gamma: 0.5 * (broken + uniform),
        bracket: (broken, uniform),
        evaluations,
    })
}

/// The uniform state loses stability at this `γ`.
pub const UNIFORM_INSTABILITY: f64 = -PI * PI;

/// Centre-of-mass velocity `∂H/∂P_j = 2πj/N − α` of momentum branch `j`.
pub fn cm_current(j: i64, particles: usize, flux: f64) -> Result<f64> {
    if particles == 0 {
        return Err(Error::param("need at least one particle"));
    }
    Ok(TAU * j as f64 / particles as f64 - flux)
}

/// Rotation period `1/(2π − α)` of the symmetry-broken density; infinite
/// when the current vanishes.
pub fn rotation_period(flux: f64) -> f64 {
    let v = TAU - flux;
    if v == 0.0 {
        f64::INFINITY
    } else {
        1.0 / v.abs()
    }
}

/// Free-particle spreading of the centre of mass (mass `N`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spreading {
    pub sigma: f64,
    /// Time at which the width reaches the ring length; zero when it
    /// already exceeds it.
    pub crossing_time: f64,
}

pub fn cm_spreading(sigma0: f64, particles: usize, t: f64) -> Result<Spreading> {
    if !(sigma0 > 0.0) || particles == 0 {
        return Err(Error::param("σ0 > 0 and N ≥ 1 are required"));
    }
    let n = particles as f64;
    let tau = n * sigma0 * sigma0;
    let sigma = sigma0 * (1.0 + (t / tau).powi(2)).sqrt();
    let crossing_time = if sigma0 >= 1.0 {
        0.0
    } else {
        tau * (1.0 / (sigma0 * sigma0) - 1.0).sqrt()
    };
    Ok(Spreading {
        sigma,
        crossing_time,
    })
}
