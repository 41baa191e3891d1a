// SPDX-License-Identifier: Apache-2.0

//! Pauli operators on a chain of `L` spin-1/2 sites.
//!
//! Basis convention: computational index `b` in `0..2^L`, site 0 is the most
//! significant bit, bit value 0 is `|↑⟩` (σ^z = +1) and 1 is `|↓⟩`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::{check_capacity, ComplexMatrix, HermitianOperator};
use crate::error::{Error, Result};

/// Largest chain handled densely (`2^14` states).
pub const MAX_SITES: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Bit mask selecting `site` in a chain of `sites` spins.
#[inline]
pub fn site_mask(sites: usize, site: usize) -> usize {
    1usize << (sites - 1 - site)
}

/// σ^z eigenvalue (+1 or −1) of `site` in basis state `b`.
#[inline]
pub fn z_value(b: usize, sites: usize, site: usize) -> f64 {
    if b & site_mask(sites, site) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn check_chain(sites: usize) -> Result<usize> {
    if sites == 0 {
        return Err(Error::EmptyInput("spin chain"));
    }
    if sites > MAX_SITES {
        return Err(Error::Capacity {
            requested: 1usize << sites.min(63),
            limit: 1 << MAX_SITES,
        });
    }
    let dim = 1usize << sites;
    check_capacity(dim)?;
    Ok(dim)
}

/// `I ⊗ … ⊗ σ^axis ⊗ … ⊗ I` acting on site `site`.
pub fn pauli_site(sites: usize, site: usize, axis: Axis) -> Result<HermitianOperator> {
    pauli_string(sites, &[(site, axis)])
}

/// Product of single-site Pauli operators on distinct sites.
pub fn pauli_string(sites: usize, factors: &[(usize, Axis)]) -> Result<HermitianOperator> {
    let mut sum = PauliSum::new(sites)?;
    sum.add(factors, 1.0)?;
    sum.build()
}

/// Accumulates a real linear combination of Pauli strings directly into a
/// dense matrix.
#[derive(Clone, Debug)]
pub struct PauliSum {
    sites: usize,
    matrix: ComplexMatrix,
}

impl PauliSum {
    pub fn new(sites: usize) -> Result<Self> {
        let dim = check_chain(sites)?;
        Ok(Self {
            sites,
            matrix: ComplexMatrix::zeros(dim, dim)?,
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Add `coeff · Π σ_site^axis`.
    pub fn add(&mut self, factors: &[(usize, Axis)], coeff: f64) -> Result<&mut Self> {
        let sites = self.sites;
        let mut flip = 0usize;
        for (k, &(site, axis)) in factors.iter().enumerate() {
            if site >= sites {
                return Err(Error::Index {
                    what: "spin chain",
                    index: site,
                    len: sites,
                });
            }
            if factors[..k].iter().any(|&(s, _)| s == site) {
                return Err(Error::contract(format!(
                    "site {site} repeated in Pauli string"
                )));
            }
            if axis != Axis::Z {
                flip |= site_mask(sites, site);
            }
        }
        if coeff == 0.0 {
            return Ok(self);
        }
        for b in 0..self.matrix.rows() {
            let mut amp = Complex64::new(coeff, 0.0);
            for &(site, axis) in factors {
                let up = b & site_mask(sites, site) == 0;
                amp *= match (axis, up) {
                    (Axis::Z, true) | (Axis::X, _) => Complex64::new(1.0, 0.0),
                    (Axis::Z, false) => Complex64::new(-1.0, 0.0),
                    // σ^y|↑⟩ = i|↓⟩, σ^y|↓⟩ = −i|↑⟩
                    (Axis::Y, true) => Complex64::new(0.0, 1.0),
                    (Axis::Y, false) => Complex64::new(0.0, -1.0),
                };
            }
            let old = self.matrix.get(b ^ flip, b);
            self.matrix.set(b ^ flip, b, old + amp);
        }
        Ok(self)
    }

    pub fn build(self) -> Result<HermitianOperator> {
        HermitianOperator::new(self.matrix)
    }
}

/// Ising parity `Π_i σ_i^axis`.
pub fn parity(sites: usize, axis: Axis) -> Result<HermitianOperator> {
    let factors: Vec<(usize, Axis)> = (0..sites).map(|i| (i, axis)).collect();
    pauli_string(sites, &factors)
}

/// Basis indices with even and odd numbers of down spins, i.e. the two
/// eigenspaces of `Π σ^z`.
pub fn z_parity_sectors(sites: usize) -> [Vec<usize>; 2] {
    let dim = 1usize << sites;
    let (even, odd): (Vec<usize>, Vec<usize>) = (0..dim).partition(|b| b.count_ones() % 2 == 0);
    [even, odd]
}
