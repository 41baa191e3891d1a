// SPDX-License-Identifier: Apache-2.0

//! Tight-binding ring of `s` time-lattice sites.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opalg::{eig_hermitian, ComplexMatrix, HermitianEigen, HermitianOperator};

/// `H = Σ ε_j |j⟩⟨j| − ½ Σ_j J_j (|j+1⟩⟨j| + h.c.)` with site `s ≡ 0`.
///
/// The clean ring has the dispersion `−J cos(2πm/s)`. For `s = 2` both bonds
/// join the same pair of sites, so their amplitudes add.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TightBindingRing {
    hoppings: Vec<f64>,
    onsite: Vec<f64>,
    period: f64,
}

impl TightBindingRing {
    pub fn new(hoppings: Vec<f64>, onsite: Vec<f64>, period: f64) -> Result<Self> {
        let s = onsite.len();
        if s < 2 {
            return Err(Error::param("a ring needs at least two sites"));
        }
        if hoppings.len() != s {
            return Err(Error::param(format!(
                "{} hoppings for {s} sites",
                hoppings.len()
            )));
        }
        if hoppings.iter().chain(&onsite).any(|v| !v.is_finite()) {
            return Err(Error::param("ring parameters must be finite"));
        }
        if !(period > 0.0) {
            return Err(Error::param("period must be positive"));
        }
        Ok(Self {
            hoppings,
            onsite,
            period,
        })
    }

    pub fn uniform(sites: usize, hopping: f64, period: f64) -> Result<Self> {
        Self::new(vec![hopping; sites], vec![0.0; sites], period)
    }

    pub fn sites(&self) -> usize {
        self.onsite.len()
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn onsite(&self) -> &[f64] {
        &self.onsite
    }

    pub fn hoppings(&self) -> &[f64] {
        &self.hoppings
    }

    pub fn hamiltonian(&self) -> Result<HermitianOperator> {
        let s = self.sites();
        let mut m = ComplexMatrix::zeros(s, s)?;
        for j in 0..s {
            m.set(j, j, Complex64::new(self.onsite[j], 0.0));
        }
        for j in 0..s {
            let k = (j + 1) % s;
            let t = Complex64::new(-0.5 * self.hoppings[j], 0.0);
            m.set(k, j, m.get(k, j) + t);
            m.set(j, k, m.get(j, k) + t);
        }
        HermitianOperator::new(m)
    }
}

pub fn tb_ring_eigensystem(ring: &TightBindingRing) -> Result<HermitianEigen> {
    eig_hermitian(&ring.hamiltonian()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn clean_ring_dispersion() {
        for s in [2, 3, 7, 12] {
            let e = tb_ring_eigensystem(&TightBindingRing::uniform(s, 0.8, 1.0).unwrap()).unwrap();
            let mut expect: Vec<f64> = (0..s)
                .map(|m| -0.8 * (TAU * m as f64 / s as f64).cos())
                .collect();
            expect.sort_by(f64::total_cmp);
            for (a, b) in e.values.iter().zip(&expect) {
                assert!((a - b).abs() < 1e-12, "s={s}");
            }
        }
    }

    #[test]
    fn two_site_oracle() {
        let (j, d) = (0.6, 0.35);
        let ring = TightBindingRing::new(vec![j, j], vec![d, -d], 1.0).unwrap();
        let e = tb_ring_eigensystem(&ring).unwrap();
        // doubled bond: off-diagonal −J
        let r = (d * d + j * j).sqrt();
        assert!((e.values[0] + r).abs() < 1e-12);
        assert!((e.values[1] - r).abs() < 1e-12);
    }

    #[test]
    fn eigenvectors_orthonormal() {
        let ring = TightBindingRing::new(
            vec![1.0, 0.7, 1.2, 0.9, 1.1],
            vec![0.3, -0.1, 0.0, 0.5, -0.4],
            1.0,
        )
        .unwrap();
        let e = tb_ring_eigensystem(&ring).unwrap();
        let g = e.vectors.adjoint().matmul(&e.vectors).unwrap();
        let i = ComplexMatrix::identity(5).unwrap();
        assert!((&g - &i).max_abs() < 1e-12);
    }

    #[test]
    fn rejects_mismatched_lengths() {
        assert!(TightBindingRing::new(vec![1.0], vec![0.0, 0.0], 1.0).is_err());
        assert!(TightBindingRing::new(vec![1.0], vec![0.0], 1.0).is_err());
    }
}
