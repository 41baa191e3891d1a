// SPDX-License-Identifier: Apache-2.0

//! Bosonic Fock spaces at fixed particle number.

use std::collections::HashMap;

use num_complex::Complex64;

use super::matrix::{check_capacity, ComplexMatrix, HermitianOperator};
use crate::error::{Error, Result};

/// Occupation tuples `(n_1, …, n_M)` with `Σ n_i = N`, in ascending
/// lexicographic order. For two modes the index of `|n_1, n_2⟩` is `n_1`.
#[derive(Clone, Debug)]
pub struct FockBasis {
    modes: usize,
    particles: usize,
    states: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

/// `binomial(n, k)` with overflow reported as `None`.
pub fn binomial(n: usize, k: usize) -> Option<usize> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return None;
        }
    }
    Some(acc as usize)
}

impl FockBasis {
    pub fn new(modes: usize, particles: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::param("Fock basis needs at least one mode"));
        }
        let size = binomial(particles + modes - 1, modes - 1).ok_or(Error::Capacity {
            requested: usize::MAX,
            limit: super::matrix::max_dim(),
        })?;
        check_capacity(size)?;
        let mut states = Vec::with_capacity(size);
        let mut cur = vec![0u32; modes];
        enumerate(&mut cur, 0, particles as u32, &mut states);
        debug_assert_eq!(states.len(), size);
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Ok(Self {
            modes,
            particles,
            states,
            index,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> &[u32] {
        &self.states[i]
    }

    pub fn states(&self) -> &[Vec<u32>] {
        &self.states
    }

    pub fn index_of(&self, occupations: &[u32]) -> Option<usize> {
        self.index.get(occupations).copied()
    }
}

fn enumerate(cur: &mut Vec<u32>, mode: usize, left: u32, out: &mut Vec<Vec<u32>>) {
    if mode + 1 == cur.len() {
        cur[mode] = left;
        out.push(cur.clone());
        return;
    }
    for n in 0..=left {
        cur[mode] = n;
        enumerate(cur, mode + 1, left - n, out);
    }
}

/// Ladder operators for a fixed-`N` basis.
///
/// Annihilators map the `N` sector into the `N − 1` sector and are stored as
/// rectangular matrices; number-conserving products are assembled directly
/// on the `N` sector.
#[derive(Clone, Debug)]
pub struct FockOperators {
    basis: FockBasis,
    lower: Option<FockBasis>,
}

pub fn fock_operators(basis: &FockBasis) -> Result<FockOperators> {
    let lower = if basis.particles > 0 {
        Some(FockBasis::new(basis.modes, basis.particles - 1)?)
    } else {
        None
    };
    Ok(FockOperators {
        basis: basis.clone(),
        lower,
    })
}

impl FockOperators {
    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    fn check_mode(&self, j: usize) -> Result<()> {
        if j >= self.basis.modes {
            return Err(Error::Index {
                what: "Fock mode",
                index: j,
                len: self.basis.modes,
            });
        }
        Ok(())
    }

    /// `a_j` from the `N` sector to the `N − 1` sector (`None` when `N = 0`).
    pub fn annihilation(&self, j: usize) -> Result<Option<ComplexMatrix>> {
        self.check_mode(j)?;
        let Some(lower) = &self.lower else {
            return Ok(None);
        };
        let mut m = ComplexMatrix::zeros(lower.len(), self.basis.len())?;
        for (col, s) in self.basis.states.iter().enumerate() {
            if s[j] == 0 {
                continue;
            }
            let mut t = s.clone();
            t[j] -= 1;
            let row = lower.index_of(&t).expect("lowered state lies in N−1 basis");
            m.set(row, col, Complex64::new((s[j] as f64).sqrt(), 0.0));
        }
        Ok(Some(m))
    }

    /// `a_j†` from the `N − 1` sector to the `N` sector.
    pub fn creation(&self, j: usize) -> Result<Option<ComplexMatrix>> {
        Ok(self.annihilation(j)?.map(|a| a.adjoint()))
    }

    /// `a_j† a_j`.
    pub fn number(&self, j: usize) -> Result<HermitianOperator> {
        self.check_mode(j)?;
        let d: Vec<f64> = self.basis.states.iter().map(|s| s[j] as f64).collect();
        HermitianOperator::from_real_diagonal(&d)
    }

    /// Number-conserving product `a_{c1}† … a_{ck}† a_{a1} … a_{ak}` on the
    /// `N` sector (not Hermitian in general).
    pub fn normal_ordered(&self, create: &[usize], annihilate: &[usize]) -> Result<ComplexMatrix> {
        if create.len() != annihilate.len() {
            return Err(Error::contract("operator must conserve particle number"));
        }
        for &j in create.iter().chain(annihilate) {
            self.check_mode(j)?;
        }
        let n = self.basis.len();
        let mut m = ComplexMatrix::zeros(n, n)?;
        for (col, s) in self.basis.states.iter().enumerate() {
            let mut t: Vec<i64> = s.iter().map(|&x| x as i64).collect();
            let mut amp = 1.0f64;
            let mut alive = true;
            for &j in annihilate.iter().rev() {
                if t[j] == 0 {
                    alive = false;
                    break;
                }
                amp *= (t[j] as f64).sqrt();
                t[j] -= 1;
            }
            if !alive {
                continue;
            }
            for &j in create.iter().rev() {
                t[j] += 1;
                amp *= (t[j] as f64).sqrt();
            }
            let key: Vec<u32> = t.iter().map(|&x| x as u32).collect();
            let row = self
                .basis
                .index_of(&key)
                .expect("number-conserving image stays in basis");
            m.set(row, col, m.get(row, col) + Complex64::new(amp, 0.0));
        }
        Ok(m)
    }

    /// `a_i† a_j`.
    pub fn hopping(&self, i: usize, j: usize) -> Result<ComplexMatrix> {
        self.normal_ordered(&[i], &[j])
    }

    /// `(a_i†)² a_j²`.
    pub fn pair_hopping(&self, i: usize, j: usize) -> Result<ComplexMatrix> {
        self.normal_ordered(&[i, i], &[j, j])
    }
}
