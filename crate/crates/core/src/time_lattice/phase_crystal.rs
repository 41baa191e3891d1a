// SPDX-License-Identifier: Apache-2.0

//! Phase-space crystal in the rotating frame:
//! `ĝ = ¼(r̂² + λ − 1)² + (μ/2)[(r̂e^{iθ̂})^s + h.c.]`.
//!
//! With `â = e^{−iθ̂} r̂/√(2λ)` and `r̂² = λ(2n̂ + 1)` the diagonal is
//! `¼(2λ(n+1) − 1)²` and the ladder term couples `n` to `n + s` with
//! `(μ/2) Π_{j=1..s} √(2λ(n+j))`. `ĝ` conserves `n mod s`.
//!
//! For `s > 4` the ladder term outgrows the quartic one at large `r`, so a
//! truncated `ĝ` has spurious low levels pinned to the cutoff. Those are
//! flagged and left out of band statistics.

use std::f64::consts::TAU;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opalg::{eig_hermitian, ComplexMatrix, HermitianOperator, UnitaryOperator};
use crate::table::write_csv;

/// Eigenvectors with more than this weight in the top 5% of the number
/// basis are flagged as truncation sensitive.
pub const TRUNCATION_WEIGHT: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseCrystalSpec {
    pub fold: usize,
    pub mu: f64,
    pub lambda: f64,
    /// Largest oscillator number kept.
    pub n_max: usize,
}

impl PhaseCrystalSpec {
    pub fn validate(&self) -> Result<()> {
        if self.fold == 0 || !(self.lambda > 0.0) || !self.mu.is_finite() {
            return Err(Error::param(
                "phase crystal needs s ≥ 1, λ > 0 and finite μ",
            ));
        }
        if self.n_max < 4 * self.fold {
            return Err(Error::param(format!(
                "n_max = {} is too small for s = {}",
                self.n_max, self.fold
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn diagonal(&self, n: usize) -> f64 {
        let x = 2.0 * self.lambda * (n + 1) as f64 - 1.0;
        0.25 * x * x
    }

    /// `⟨n + s|ĝ|n⟩`.
    pub fn ladder(&self, n: usize) -> f64 {
        let prod: f64 = (1..=self.fold)
            .map(|j| (2.0 * self.lambda * (n + j) as f64).sqrt())
            .product();
        0.5 * self.mu * prod
    }

    pub fn hamiltonian(&self) -> Result<HermitianOperator> {
        self.validate()?;
        let d = self.dim();
        let mut m = ComplexMatrix::zeros(d, d)?;
        for n in 0..d {
            m.set(n, n, Complex64::new(self.diagonal(n), 0.0));
            if n + self.fold < d {
                let v = Complex64::new(self.ladder(n), 0.0);
                m.set(n + self.fold, n, v);
                m.set(n, n + self.fold, v);
            }
        }
        HermitianOperator::new(m)
    }

    /// `e^{−i2πn̂/s}`.
    pub fn symmetry(&self) -> Result<UnitaryOperator> {
        let s = self.fold as f64;
        let phases: Vec<f64> = (0..self.dim()).map(|n| TAU * n as f64 / s).collect();
        UnitaryOperator::from_phases(&phases)
    }

    /// `‖[ĝ, e^{−i2πn̂/s}]‖_max`.
    pub fn commutator_norm(&self) -> Result<f64> {
        self.hamiltonian()?
            .matrix()
            .commutator_norm(self.symmetry()?.matrix())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseCrystalSpectrum {
    /// `levels[m]`: ascending eigenvalues of the sector `n ≡ m (mod s)`.
    pub levels: Vec<Vec<f64>>,
    /// `flagged[m][k]`: level is sensitive to the basis cutoff.
    pub flagged: Vec<Vec<bool>>,
}

impl PhaseCrystalSpectrum {
    pub fn fold(&self) -> usize {
        self.levels.len()
    }

    /// Levels of sector `m` that are not truncation sensitive.
    pub fn resolved_levels(&self, m: usize) -> Vec<f64> {
        self.levels[m]
            .iter()
            .zip(&self.flagged[m])
            .filter(|(_, &f)| !f)
            .map(|(&e, _)| e)
            .collect()
    }

    /// Band `b`: the `b`-th resolved level of every sector.
    pub fn band(&self, b: usize) -> Option<Vec<f64>> {
        (0..self.fold())
            .map(|m| self.resolved_levels(m).get(b).copied())
            .collect()
    }

    pub fn bandwidth(&self, b: usize) -> Option<f64> {
        let band = self.band(b)?;
        Some(max(&band) - min(&band))
    }

    /// Bottom of band `b + 1` minus top of band `b`.
    pub fn gap(&self, b: usize) -> Option<f64> {
        Some(min(&self.band(b + 1)?) - max(&self.band(b)?))
    }

    /// True when the `s` lowest resolved levels are exactly one per sector.
    pub fn lowest_band_is_sector_resolved(&self) -> bool {
        let s = self.fold();
        let mut all: Vec<(f64, usize)> = (0..s)
            .flat_map(|m| self.resolved_levels(m).into_iter().map(move |e| (e, m)))
            .collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut seen = vec![false; s];
        all.iter()
            .take(s)
            .all(|&(_, m)| !std::mem::replace(&mut seen[m], true))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let rows = self.levels.iter().enumerate().flat_map(|(m, l)| {
            l.iter()
                .enumerate()
                .map(move |(k, &g)| vec![m as f64, k as f64, g, self.flagged[m][k] as u8 as f64])
        });
        write_csv(path, &["m", "level", "g", "truncation_flag"], rows)
    }
}

fn max(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn min(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Diagonalize `ĝ` sector by sector. Sector `m` holds `n ≡ m (mod s)`, the
/// eigenspace of the symmetry with eigenvalue `e^{−i2πm/s}`.
pub fn rwa_phase_crystal(spec: &PhaseCrystalSpec) -> Result<PhaseCrystalSpectrum> {
    let g = spec.hamiltonian()?;
    let s = spec.fold;
    let edge = (0.95 * spec.n_max as f64).ceil() as usize;
    let mut levels = Vec::with_capacity(s);
    let mut flagged = Vec::with_capacity(s);
    for m in 0..s {
        let idx: Vec<usize> = (m..spec.dim()).step_by(s).collect();
        let block = HermitianOperator::new(g.matrix().principal_submatrix(&idx))?;
        let eig = eig_hermitian(&block)?;
        let flags = (0..idx.len())
            .map(|k| {
                let tail: f64 = idx
                    .iter()
                    .enumerate()
                    .filter(|(_, &n)| n >= edge)
                    .map(|(r, _)| eig.vectors.get(r, k).norm_sqr())
                    .sum();
                tail > TRUNCATION_WEIGHT
            })
            .collect();
        levels.push(eig.values);
        flagged.push(flags);
    }
    Ok(PhaseCrystalSpectrum { levels, flagged })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn undriven_spectrum_is_diagonal() {
        let spec = PhaseCrystalSpec {
            fold: 3,
            mu: 0.0,
            lambda: 0.1,
            n_max: 30,
        };
        let sp = rwa_phase_crystal(&spec).unwrap();
        for (m, l) in sp.levels.iter().enumerate() {
            let mut expect: Vec<f64> = (m..=30).step_by(3).map(|n| spec.diagonal(n)).collect();
            expect.sort_by(f64::total_cmp);
            assert_eq!(l.len(), expect.len());
            for (a, b) in l.iter().zip(&expect) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ladder_matches_operator_product() {
        // s = 1: (μ/2)√(2λ(n+1)) = (μ/2)√(2λ)⟨n+1|a†|n⟩
        let spec = PhaseCrystalSpec {
            fold: 1,
            mu: 0.3,
            lambda: 0.2,
            n_max: 10,
        };
        assert!((spec.ladder(4) - 0.15 * (0.4f64 * 5.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sectors_commute_with_symmetry() {
        let spec = PhaseCrystalSpec {
            fold: 4,
            mu: 0.01,
            lambda: 0.05,
            n_max: 60,
        };
        assert!(spec.commutator_norm().unwrap() < 1e-12);
        let sp = rwa_phase_crystal(&spec).unwrap();
        let total: usize = sp.levels.iter().map(Vec::len).sum();
        assert_eq!(total, 61);
    }
}
