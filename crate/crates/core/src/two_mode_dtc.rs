// SPDX-License-Identifier: Apache-2.0

//! Two-mode Floquet model of bouncing bosons.
//!
//! States are stored in the fixed-`N` Fock basis of the Floquet modes
//! `(u₁, u₂)`, index `n₁`. The wave-packet modes are `φ± = (u₁ ± u₂)/√2`;
//! cat states live naturally in that basis.

use std::path::Path;

use astro_float::{BigFloat, RoundingMode};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{linear_fit, LinearFit};
use crate::opalg::{
    eig_hermitian, fock_operators, unitary_exp, ComplexMatrix, FockBasis, HermitianOperator,
    StateVector, UnitaryOperator,
};
use crate::table::write_csv;

/// Gaps below this are not resolved by the 256-bit bisection in
/// [`tunneling_gap`] and are left out of fits. A double-precision eigensolve
/// would put the floor near `1e−14`.
pub const GAP_FLOOR: f64 = 1e-60;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoModeParams {
    /// Splitting `J` of the two Floquet modes.
    pub tunneling: f64,
    pub u: f64,
    pub u12: f64,
    pub particles: usize,
    /// Mean-field constant, carried along for bookkeeping only.
    #[serde(default)]
    pub g0n: Option<f64>,
}

impl TwoModeParams {
    pub fn new(tunneling: f64, u: f64, u12: f64, particles: usize) -> Self {
        Self {
            tunneling,
            u,
            u12,
            particles,
            g0n: None,
        }
    }

    /// Parameters with `N(U − 2U₁₂)/J = ratio`, written through `U` alone.
    pub fn with_ratio(tunneling: f64, ratio: f64, particles: usize) -> Self {
        Self::new(
            tunneling,
            ratio * tunneling / particles as f64,
            0.0,
            particles,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.particles < 2 {
            return Err(Error::param("two-mode model needs N ≥ 2"));
        }
        if !(self.tunneling > 0.0) || !self.tunneling.is_finite() {
            return Err(Error::param("tunneling J must be positive"));
        }
        if !self.u.is_finite() || !self.u12.is_finite() {
            return Err(Error::param("interaction integrals must be finite"));
        }
        Ok(())
    }

    /// `U − 2U₁₂`.
    pub fn coupling(&self) -> f64 {
        self.u - 2.0 * self.u12
    }

    /// `N|U − 2U₁₂|/J`; the cat regime starts near 1.
    pub fn ratio(&self) -> f64 {
        self.particles as f64 * self.coupling().abs() / self.tunneling
    }

    /// Same ratio at a different particle number.
    pub fn rescaled(&self, particles: usize) -> Self {
        let f = self.particles as f64 / particles as f64;
        Self {
            u: self.u * f,
            u12: self.u12 * f,
            particles,
            ..*self
        }
    }
}

/// `H = −(J/2)(n₁ − n₂) + ¼(U − 2U₁₂)[(c₁†)²c₂² + (c₂†)²c₁² + 2n₁n₂]`.
pub fn build_two_mode(params: &TwoModeParams) -> Result<HermitianOperator> {
    params.validate()?;
    let basis = FockBasis::new(2, params.particles)?;
    let ops = fock_operators(&basis)?;
    let n = basis.len();
    let g = 0.25 * params.coupling();
    let pairs = &ops.pair_hopping(0, 1)? + &ops.pair_hopping(1, 0)?;
    let mut m = pairs.scale(Complex64::new(g, 0.0));
    for i in 0..n {
        let s = basis.state(i);
        let (n1, n2) = (s[0] as f64, s[1] as f64);
        let d = -0.5 * params.tunneling * (n1 - n2) + 2.0 * g * n1 * n2;
        m.set(i, i, m.get(i, i) + Complex64::new(d, 0.0));
    }
    HermitianOperator::new(m)
}

/// Unitary whose column `n₊` is the wave-packet Fock state `|n₊, N − n₊⟩_φ`
/// written in the `(u₁, u₂)` basis.
///
/// Built as the Fock-space image of the mode rotation by `π/4`, with the
/// phase of `φ₋` fixed so that all columns follow `(c₁† ± c₂†)/√2`.
pub fn wave_packet_transform(particles: usize) -> Result<UnitaryOperator> {
    let basis = FockBasis::new(2, particles)?;
    let ops = fock_operators(&basis)?;
    // G = c₁†c₂ − c₂†c₁; exp(θG) rotates c₁† → cos θ c₁† − sin θ c₂†
    let g = &ops.hopping(0, 1)? - &ops.hopping(1, 0)?;
    let h = HermitianOperator::new(g.scale(Complex64::new(0.0, 1.0)))?;
    // exp(−i t (iG)) = exp(tG)
    let rot = unitary_exp(&h, -std::f64::consts::FRAC_PI_4)?;
    let n = basis.len();
    let mut m = rot.into_matrix();
    for col in 0..n {
        // c₂† ↦ (c₂† − c₁†)/√2 = −φ₋†
        if (particles - col) % 2 == 1 {
            for row in 0..n {
                m.set(row, col, -m.get(row, col));
            }
        }
    }
    UnitaryOperator::new(m)
}

/// `(|N,0⟩_φ + |0,N⟩_φ)/√2` in the `(u₁, u₂)` basis.
pub fn ideal_cat(particles: usize) -> Result<StateVector> {
    let w = wave_packet_transform(particles)?;
    let a = w.matrix().column(particles);
    let b = w.matrix().column(0);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    StateVector::normalized(a.iter().zip(&b).map(|(x, y)| (x + y) * s).collect())
}

/// Probabilities of `n₊ = 0 … N` in the wave-packet basis.
pub fn wave_packet_distribution(state: &StateVector) -> Result<Vec<f64>> {
    let n = state.dim() - 1;
    let w = wave_packet_transform(n)?;
    Ok(w.adjoint()
        .apply(state.amplitudes())
        .iter()
        .map(|a| a.norm_sqr())
        .collect())
}

/// Variance of `n₊ − n₋`.
pub fn number_difference_variance(state: &StateVector) -> Result<f64> {
    let p = wave_packet_distribution(state)?;
    let n = (p.len() - 1) as f64;
    let (mut m1, mut m2) = (0.0, 0.0);
    for (k, pk) in p.iter().enumerate() {
        let d = 2.0 * k as f64 - n;
        m1 += pk * d;
        m2 += pk * d * d;
    }
    Ok(m2 - m1 * m1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroundPhase {
    Condensate,
    Cat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundReport {
    pub phase: GroundPhase,
    /// Within 10% of `N|U − 2U₁₂| = J`.
    pub marginal: bool,
    pub energy: f64,
    /// Variance of `n₊ − n₋` divided by `N²`.
    pub scaled_variance: f64,
    /// `|⟨N,0|ψ₀⟩|²` in the `(u₁, u₂)` basis.
    pub condensate_fidelity: f64,
    /// `(⟨n₊⟩, ⟨n₋⟩)`.
    pub wave_packet_occupations: (f64, f64),
}

/// Scaled variance above which the ground state counts as a cat. An ideal
/// cat gives 1 and a coherent state in `u₁` gives `1/N`.
pub const CAT_VARIANCE: f64 = 0.5;

/// Lowest level of each parity sector, embedded in the full basis, as
/// `[even n₂, odd n₂]`. Deep in the cat regime the two are split by less
/// than the eigensolver's resolution, so they are never diagonalized together.
pub fn sector_ground_states(params: &TwoModeParams) -> Result<Vec<(f64, StateVector)>> {
    let h = build_two_mode(params)?;
    let dim = params.particles + 1;
    let mut out = Vec::with_capacity(2);
    for idx in parity_sectors(params.particles) {
        let block = HermitianOperator::new(h.matrix().principal_submatrix(&idx))?;
        let eig = eig_hermitian(&block)?;
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        for (a, &i) in idx.iter().enumerate() {
            v[i] = eig.vectors.get(a, 0);
        }
        out.push((eig.values[0], StateVector::normalize(v)?));
    }
    Ok(out)
}

/// Ground state with definite parity.
pub fn ground_state(params: &TwoModeParams) -> Result<(f64, StateVector)> {
    let mut s = sector_ground_states(params)?;
    s.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(s.swap_remove(0))
}

pub fn classify_ground(params: &TwoModeParams) -> Result<GroundReport> {
    let (energy, psi) = ground_state(params)?;
    let n = params.particles as f64;
    let p = wave_packet_distribution(&psi)?;
    let plus: f64 = p.iter().enumerate().map(|(k, pk)| k as f64 * pk).sum();
    let scaled_variance = number_difference_variance(&psi)? / (n * n);
    let condensate_fidelity = psi.amplitudes()[params.particles].norm_sqr();
    Ok(GroundReport {
        phase: if scaled_variance >= CAT_VARIANCE {
            GroundPhase::Cat
        } else {
            GroundPhase::Condensate
        },
        marginal: (params.ratio() - 1.0).abs() <= 0.1,
        energy,
        scaled_variance,
        condensate_fidelity,
        wave_packet_occupations: (plus, n - plus),
    })
}

/// Indices with even and with odd `n₂`; the Hamiltonian has no elements
/// between the two sets.
pub fn parity_sectors(particles: usize) -> [Vec<usize>; 2] {
    let (mut even, mut odd) = (Vec::new(), Vec::new());
    for n1 in 0..=particles {
        if (particles - n1).is_multiple_of(2) {
            even.push(n1);
        } else {
            odd.push(n1);
        }
    }
    [even, odd]
}

/// `E₁ − E₀`.
///
/// Each parity sector is a tridiagonal chain in `n₁`. Deep in the cat regime
/// the splitting drops far below `10⁻¹⁶|E|`, so the lowest two levels of
/// each chain are located by Sturm-sequence bisection in 256-bit arithmetic
/// and only the final difference is rounded to `f64`.
pub fn tunneling_gap(params: &TwoModeParams) -> Result<f64> {
    params.validate()?;
    let mut levels = Vec::with_capacity(4);
    for idx in parity_sectors(params.particles) {
        let chain = SectorChain::new(params, &idx);
        for k in 0..idx.len().min(2) {
            levels.push(chain.eigenvalue(k));
        }
    }
    levels.sort_by(|a, b| match a.cmp(b) {
        Some(c) if c < 0 => std::cmp::Ordering::Less,
        Some(c) if c > 0 => std::cmp::Ordering::Greater,
        _ => std::cmp::Ordering::Equal,
    });
    let gap = levels[1].sub(&levels[0], PRECISION, RM);
    gap.to_string()
        .parse::<f64>()
        .map_err(|e| Error::contract(format!("gap conversion: {e}")))
}

const PRECISION: usize = 256;
const RM: RoundingMode = RoundingMode::ToEven;

/// Symmetric tridiagonal block of one parity sector, in high precision.
struct SectorChain {
    diag: Vec<BigFloat>,
    off_sq: Vec<BigFloat>,
    lower: f64,
    upper: f64,
}

impl SectorChain {
    fn new(params: &TwoModeParams, idx: &[usize]) -> Self {
        let n = params.particles as u64;
        let big = |x: f64| BigFloat::from_f64(x, PRECISION);
        let half_j = big(0.5 * params.tunneling);
        let quarter_g = big(0.25 * params.coupling());
        let half_g = big(0.5 * params.coupling());
        let mut diag = Vec::with_capacity(idx.len());
        let mut off_sq = Vec::with_capacity(idx.len());
        let (mut lower, mut upper) = (f64::INFINITY, f64::NEG_INFINITY);
        for (a, &n1) in idx.iter().enumerate() {
            let n1 = n1 as u64;
            let n2 = n - n1;
            // −(J/2)(n₁ − n₂) + ½g n₁n₂
            let d = half_j.mul(&big(n2 as f64 - n1 as f64), PRECISION, RM).add(
                &half_g.mul(&big((n1 * n2) as f64), PRECISION, RM),
                PRECISION,
                RM,
            );
            let d64 = 0.5 * params.tunneling * (n2 as f64 - n1 as f64)
                + 0.5 * params.coupling() * (n1 * n2) as f64;
            let mut radius = 0.0;
            if a + 1 < idx.len() {
                // ⟨n₁+2, n₂−2| ¼g (c₁†)²c₂² |n₁, n₂⟩
                let prod = (n1 + 1) * (n1 + 2) * n2 * (n2 - 1);
                let b_sq =
                    quarter_g
                        .mul(&quarter_g, PRECISION, RM)
                        .mul(&big(prod as f64), PRECISION, RM);
                radius += 0.25 * params.coupling().abs() * (prod as f64).sqrt();
                off_sq.push(b_sq);
            }
            if a > 0 {
                let (m1, m2) = (n1 - 2, n2 + 2);
                radius += 0.25
                    * params.coupling().abs()
                    * (((m1 + 1) * (m1 + 2) * m2 * (m2 - 1)) as f64).sqrt();
            }
            lower = lower.min(d64 - radius);
            upper = upper.max(d64 + radius);
            diag.push(d);
        }
        Self {
            diag,
            off_sq,
            lower: lower - 1.0 - 1e-6 * lower.abs(),
            upper: upper + 1.0 + 1e-6 * upper.abs(),
        }
    }

    /// Number of eigenvalues below `x`.
    fn count_below(&self, x: &BigFloat) -> usize {
        let tiny = BigFloat::from_f64(1e-300, PRECISION);
        let mut count = 0;
        let mut q = BigFloat::from_f64(1.0, PRECISION);
        for (i, d) in self.diag.iter().enumerate() {
            let mut next = d.sub(x, PRECISION, RM);
            if i > 0 {
                next = next.sub(&self.off_sq[i - 1].div(&q, PRECISION, RM), PRECISION, RM);
            }
            if next.is_zero() {
                next = tiny.clone();
            }
            if next.is_negative() {
                count += 1;
            }
            q = next;
        }
        count
    }

    /// `k`-th smallest eigenvalue.
    fn eigenvalue(&self, k: usize) -> BigFloat {
        let mut lo = BigFloat::from_f64(self.lower, PRECISION);
        let mut hi = BigFloat::from_f64(self.upper, PRECISION);
        let two = BigFloat::from_f64(2.0, PRECISION);
        // the bracket shrinks from O(100) to below 2^-240
        for _ in 0..(PRECISION - 8) {
            let mid = lo.add(&hi, PRECISION, RM).div(&two, PRECISION, RM);
            if self.count_below(&mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo.add(&hi, PRECISION, RM).div(&two, PRECISION, RM)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapPoint {
    pub particles: usize,
    pub gap: f64,
    pub log_inv_gap: f64,
    pub underflow: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapScaling {
    pub points: Vec<GapPoint>,
    /// Fit of `ln(1/gap)` against `N` over points above the floor.
    pub fit: LinearFit,
}

impl GapScaling {
    /// CSV with header `N,gap,log_inv_gap`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let rows = self
            .points
            .iter()
            .map(|p| vec![p.particles as f64, p.gap, p.log_inv_gap]);
        write_csv(path, &["N", "gap", "log_inv_gap"], rows)
    }

    pub fn is_monotone_decreasing(&self) -> bool {
        self.points.windows(2).all(|w| w[1].gap < w[0].gap)
    }
}

/// Gap versus `N` at the template's fixed `N(U − 2U₁₂)/J`.
pub fn gap_scaling(template: &TwoModeParams, particles: &[usize]) -> Result<GapScaling> {
    template.validate()?;
    if particles.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("particle numbers must be strictly ascending"));
    }
    let mut points = Vec::with_capacity(particles.len());
    for &n in particles {
        let gap = tunneling_gap(&template.rescaled(n))?;
        points.push(GapPoint {
            particles: n,
            gap,
            log_inv_gap: -gap.ln(),
            underflow: gap < GAP_FLOOR,
        });
    }
    let kept: Vec<&GapPoint> = points.iter().filter(|p| !p.underflow).collect();
    let x: Vec<f64> = kept.iter().map(|p| p.particles as f64).collect();
    let y: Vec<f64> = kept.iter().map(|p| p.log_inv_gap).collect();
    let fit = linear_fit(&x, &y)?;
    Ok(GapScaling { points, fit })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WavePacket {
    Plus,
    Minus,
}

/// Result of detecting one particle in a wave-packet mode.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurement {
    pub probability: f64,
    /// Post-measurement state with `N − 1` particles.
    pub state: StateVector,
}

/// Detect one particle in `φ±`: `ψ ↦ b±ψ/‖b±ψ‖` with probability `⟨b±†b±⟩/N`.
pub fn measure(state: &StateVector, outcome: WavePacket) -> Result<Measurement> {
    let n = state.dim() - 1;
    if n == 0 {
        return Err(Error::contract("no particle left to detect"));
    }
    let ops = fock_operators(&FockBasis::new(2, n)?)?;
    let a1 = ops.annihilation(0)?.expect("N ≥ 1");
    let a2 = ops.annihilation(1)?.expect("N ≥ 1");
    let sign = match outcome {
        WavePacket::Plus => 1.0,
        WavePacket::Minus => -1.0,
    };
    let b: ComplexMatrix = (&a1 + &a2.scale(Complex64::new(sign, 0.0)))
        .scale(Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0));
    let out = b.apply(state.amplitudes());
    let weight: f64 = out.iter().map(|z| z.norm_sqr()).sum();
    let probability = weight / n as f64;
    if probability < 1e-14 {
        return Err(Error::ZeroProbability);
    }
    Ok(Measurement {
        probability,
        state: StateVector::normalize(out)?,
    })
}

/// Weight on the `outcome` side of the wave-packet distribution
/// (`n₊ > n₋` for `Plus`).
pub fn branch_weight(state: &StateVector, outcome: WavePacket) -> Result<f64> {
    let p = wave_packet_distribution(state)?;
    let n = p.len() - 1;
    Ok(p.iter()
        .enumerate()
        .filter(|(k, _)| match outcome {
            WavePacket::Plus => 2 * k > n,
            WavePacket::Minus => 2 * k < n,
        })
        .map(|(_, pk)| pk)
        .sum())
}

#[derive(Clone, Debug, PartialEq)]
pub struct CollapseRun {
    /// Outcome probability of every detection, first one included.
    pub probabilities: Vec<f64>,
    /// Branch weight right after the first detection and after each
    /// later evolution interval.
    pub branch_trace: Vec<f64>,
    pub state: StateVector,
}

/// Detect a particle in `outcome`, then alternate evolution for `interval`
/// with further detections in the same mode, `measurements` detections in
/// total. The model parameters follow the shrinking particle number at a
/// fixed `N(U − 2U₁₂)` product.
pub fn collapse_evolve(
    params: &TwoModeParams,
    state: &StateVector,
    outcome: WavePacket,
    interval: f64,
    measurements: usize,
) -> Result<CollapseRun> {
    params.validate()?;
    if state.dim() != params.particles + 1 {
        return Err(Error::contract("state does not match the particle number"));
    }
    if measurements == 0 || measurements >= params.particles {
        return Err(Error::param("need 1 ≤ measurements < N"));
    }
    if (state.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::contract("state must be normalized"));
    }
    let first = measure(state, outcome)?;
    let mut probabilities = vec![first.probability];
    let mut psi = first.state;
    let mut branch_trace = vec![branch_weight(&psi, outcome)?];
    for _ in 1..measurements {
        let n = psi.dim() - 1;
        let h = build_two_mode(&params.rescaled(n))?;
        let u = unitary_exp(&h, interval)?;
        psi = StateVector::normalize(u.apply(psi.amplitudes()))?;
        branch_trace.push(branch_weight(&psi, outcome)?);
        let m = measure(&psi, outcome)?;
        probabilities.push(m.probability);
        psi = m.state;
    }
    Ok(CollapseRun {
        probabilities,
        branch_trace,
        state: psi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn high_precision_gap_matches_dense_solver() {
        for p in [
            TwoModeParams::new(1.0, -0.1, 0.02, 9),
            TwoModeParams::with_ratio(1.0, -2.0, 12),
        ] {
            let v = crate::opalg::eigvals_hermitian(&build_two_mode(&p).unwrap()).unwrap();
            let g = tunneling_gap(&p).unwrap();
            assert!((g - (v[1] - v[0])).abs() < 1e-10, "{g} vs {}", v[1] - v[0]);
        }
    }

    #[test]
    fn free_spectrum_is_equally_spaced() {
        let h = build_two_mode(&TwoModeParams::new(0.7, 0.0, 0.0, 6)).unwrap();
        let v = crate::opalg::eigvals_hermitian(&h).unwrap();
        for (k, e) in v.iter().enumerate() {
            assert!((e - (-3.0 * 0.7 + 0.7 * k as f64)).abs() < 1e-12);
        }
    }

    #[test]
    fn three_by_three_oracle() {
        let (j, g) = (0.4, -1.2);
        let h = build_two_mode(&TwoModeParams::new(j, g, 0.0, 2)).unwrap();
        let m = h.matrix();
        // basis |0,2⟩, |1,1⟩, |2,0⟩
        assert!((m.get(0, 0) - c(j)).norm() < 1e-15);
        assert!((m.get(1, 1) - c(0.5 * g)).norm() < 1e-15);
        assert!((m.get(2, 2) - c(-j)).norm() < 1e-15);
        assert!((m.get(2, 0) - c(0.5 * g)).norm() < 1e-15);
        assert!((m.get(0, 2) - c(0.5 * g)).norm() < 1e-15);
        assert_eq!(m.get(0, 1), c(0.0));
        assert!(m.hermiticity_residual() <= 1e-12);
    }

    #[test]
    fn parity_sectors_decouple() {
        let p = TwoModeParams::new(1.0, -0.3, 0.05, 9);
        let h = build_two_mode(&p).unwrap();
        let [even, odd] = parity_sectors(9);
        for &i in &even {
            for &k in &odd {
                assert_eq!(h.matrix().get(i, k), c(0.0));
            }
        }
    }

    #[test]
    fn transform_columns_are_binomial() {
        let n = 8;
        let w = wave_packet_transform(n).unwrap();
        let top = w.matrix().column(n);
        let bottom = w.matrix().column(0);
        for k in 0..=n {
            let amp = (binom(n, k) / 2f64.powi(n as i32)).sqrt();
            assert!((top[k] - c(amp)).norm() < 1e-12);
            let sign = if (n - k) % 2 == 0 { 1.0 } else { -1.0 };
            assert!((bottom[k] - c(sign * amp)).norm() < 1e-12);
        }
    }

    fn binom(n: usize, k: usize) -> f64 {
        crate::opalg::binomial(n, k).unwrap() as f64
    }

    #[test]
    fn ideal_cat_variance_is_n_squared() {
        for n in [4, 7, 20] {
            let v = number_difference_variance(&ideal_cat(n).unwrap()).unwrap();
            assert!((v - (n * n) as f64).abs() < 1e-9 * (n * n) as f64);
        }
    }

    #[test]
    fn ideal_cat_outcomes_are_even() {
        let cat = ideal_cat(12).unwrap();
        let plus = measure(&cat, WavePacket::Plus).unwrap();
        let minus = measure(&cat, WavePacket::Minus).unwrap();
        assert!((plus.probability - 0.5).abs() < 1e-12);
        assert!((minus.probability - 0.5).abs() < 1e-12);
        // |N−1, 0⟩_φ
        let expect = wave_packet_transform(11).unwrap().matrix().column(11);
        let overlap: Complex64 = expect
            .iter()
            .zip(plus.state.amplitudes())
            .map(|(a, b)| a.conj() * b)
            .sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn weak_interaction_condenses() {
        let r = classify_ground(&TwoModeParams::with_ratio(1.0, -0.5, 20)).unwrap();
        assert_eq!(r.phase, GroundPhase::Condensate);
        assert!(!r.marginal);
        assert!(r.condensate_fidelity > 0.9);
    }

    #[test]
    fn strong_interaction_forms_cat() {
        let r = classify_ground(&TwoModeParams::with_ratio(1.0, -4.0, 20)).unwrap();
        assert_eq!(r.phase, GroundPhase::Cat);
        let (p, m) = r.wave_packet_occupations;
        assert!((p - m).abs() < 1e-6);
    }

    #[test]
    fn marginal_flag_near_threshold() {
        assert!(
            classify_ground(&TwoModeParams::with_ratio(1.0, -1.05, 20))
                .unwrap()
                .marginal
        );
    }

    #[test]
    fn cat_pair_shares_branch_weight() {
        let p = TwoModeParams::with_ratio(1.0, -4.0, 30);
        let pair = sector_ground_states(&p).unwrap();
        let branch = wave_packet_transform(30).unwrap().matrix().column(30);
        let w = |k: usize| -> f64 {
            let v = pair[k].1.amplitudes();
            branch
                .iter()
                .zip(v)
                .map(|(a, b)| a.conj() * b)
                .sum::<Complex64>()
                .norm_sqr()
        };
        assert!((w(0) - w(1)).abs() < 1e-6);
        assert!(w(0) > 0.1);
    }

    #[test]
    fn free_gap_is_j() {
        for n in [4, 9, 16] {
            let g = tunneling_gap(&TwoModeParams::new(0.3, 0.0, 0.0, n)).unwrap();
            assert!((g - 0.3).abs() < 1e-12);
        }
    }

    #[test]
    fn gap_closes_exponentially_in_cat_regime() {
        let template = TwoModeParams::with_ratio(1.0, -4.0, 10);
        let s = gap_scaling(&template, &[10, 14, 18, 22, 26, 30]).unwrap();
        assert!(s.is_monotone_decreasing());
        assert!(s.fit.slope > 0.0);
        assert!(s.fit.r_squared >= 0.98);
    }

    #[test]
    fn gap_scaling_rejects_unsorted() {
        let template = TwoModeParams::with_ratio(1.0, -4.0, 10);
        assert!(gap_scaling(&template, &[10, 8]).is_err());
    }

    #[test]
    fn collapse_keeps_branch() {
        let p = TwoModeParams::with_ratio(1.0, -4.0, 40);
        let run = collapse_evolve(&p, &ideal_cat(40).unwrap(), WavePacket::Minus, 1.0, 10).unwrap();
        assert!((run.probabilities[0] - 0.5).abs() < 1e-12);
        assert!((run.branch_trace[0] - 1.0).abs() < 1e-12);
        for w in &run.branch_trace {
            assert!(*w >= 0.99, "{:?}", run.branch_trace);
        }
    }

    #[test]
    fn collapse_of_true_ground_state_picks_a_side() {
        let p = TwoModeParams::with_ratio(1.0, -4.0, 40);
        let (_, psi) = ground_state(&p).unwrap();
        let run = collapse_evolve(&p, &psi, WavePacket::Plus, 1.0, 10).unwrap();
        assert!((run.probabilities[0] - 0.5).abs() < 1e-6);
        // the interacting cat has finite-width branches, so the first
        // detection leaves some weight on the far side; later ones purge it
        assert!(run.branch_trace[0] > 0.95);
        assert!(run.branch_trace.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }

    #[test]
    fn measuring_an_empty_mode_fails() {
        // |N,0⟩_φ has nothing in φ₋
        let w = wave_packet_transform(5).unwrap();
        let s = StateVector::normalize(w.matrix().column(5)).unwrap();
        assert!(matches!(
            measure(&s, WavePacket::Minus),
            Err(Error::ZeroProbability)
        ));
    }

    #[test]
    fn gap_csv_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gap.csv");
        let s = gap_scaling(&TwoModeParams::with_ratio(1.0, -4.0, 10), &[10, 12, 14]).unwrap();
        s.write_csv(&path).unwrap();
        assert!(std::fs::read_to_string(&path)
            .unwrap()
            .starts_with("N,gap,log_inv_gap\n"));
    }
}
