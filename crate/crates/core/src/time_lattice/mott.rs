// SPDX-License-Identifier: Apache-2.0

//! Bosons on the `s` sites of a time lattice: Bose-Hubbard ring with
//! effective long-range interactions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opalg::{eig_hermitian, fock_operators, ComplexMatrix, FockBasis, HermitianOperator};

/// `H = −½J Σ_j (a_{j+1}† a_j + h.c.) + ½ Σ_{ij} U_ij a_i† a_j† a_j a_i` on a
/// ring of `s` sites at fixed `N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoseHubbardTimeSpec {
    pub sites: usize,
    pub hopping: f64,
    /// Symmetric `s × s` interaction matrix, row-major.
    pub interactions: Vec<Vec<f64>>,
    pub particles: usize,
}

impl BoseHubbardTimeSpec {
    /// On-site `u` and uniform `u_off` between distinct sites.
    pub fn uniform(sites: usize, hopping: f64, u: f64, u_off: f64, particles: usize) -> Self {
        let interactions = (0..sites)
            .map(|i| (0..sites).map(|j| if i == j { u } else { u_off }).collect())
            .collect();
        Self {
            sites,
            hopping,
            interactions,
            particles,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let s = self.sites;
        if s < 2 {
            return Err(Error::param("time lattice needs at least two sites"));
        }
        if !self.hopping.is_finite() {
            return Err(Error::param("hopping must be finite"));
        }
        if self.interactions.len() != s || self.interactions.iter().any(|r| r.len() != s) {
            return Err(Error::param(format!("interaction matrix must be {s}×{s}")));
        }
        let u = &self.interactions;
        for i in 0..s {
            for j in 0..s {
                if !u[i][j].is_finite() {
                    return Err(Error::param("interactions must be finite"));
                }
                if u[i][j] != u[j][i] {
                    return Err(Error::param(format!(
                        "interaction matrix not symmetric at ({i},{j})"
                    )));
                }
                // equality is allowed so that U = 0 is a valid spec
                if i != j && u[i][j].abs() > u[i][i].abs() {
                    return Err(Error::param(format!(
                        "|U_{i}{j}| exceeds on-site |U_{i}{i}|"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn hamiltonian(&self, basis: &FockBasis) -> Result<HermitianOperator> {
        self.validate()?;
        let ops = fock_operators(basis)?;
        let n = basis.len();
        let s = self.sites;
        let mut m = ComplexMatrix::zeros(n, n)?;
        for (k, occ) in basis.states().iter().enumerate() {
            let mut e = 0.0;
            for i in 0..s {
                let ni = occ[i] as f64;
                e -= 0.5 * self.interactions[i][i] * ni;
                for j in 0..s {
                    e += 0.5 * self.interactions[i][j] * ni * occ[j] as f64;
                }
            }
            m.set(k, k, Complex64::new(e, 0.0));
        }
        let t = Complex64::new(-0.5 * self.hopping, 0.0);
        for j in 0..s {
            let hop = ops.hopping((j + 1) % s, j)?;
            m = &m + &(&hop + &hop.adjoint()).scale(t);
        }
        HermitianOperator::new(m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MottReport {
    pub dimension: usize,
    pub ground_energy: f64,
    /// `E₁ − E₀`.
    pub gap: f64,
    /// `⟨n_i²⟩ − ⟨n_i⟩²` per site.
    pub number_variance: Vec<f64>,
    /// `⟨a_i† a_j⟩` (real for a real Hamiltonian).
    pub coherence: Vec<Vec<f64>>,
    pub ground_state: Vec<Complex64>,
}

impl MottReport {
    pub fn mean_number_variance(&self) -> f64 {
        self.number_variance.iter().sum::<f64>() / self.number_variance.len() as f64
    }

    /// Largest `|⟨a_i† a_j⟩|` with `i ≠ j`.
    pub fn max_off_diagonal_coherence(&self) -> f64 {
        let s = self.coherence.len();
        (0..s)
            .flat_map(|i| (0..s).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| self.coherence[i][j].abs())
            .fold(0.0, f64::max)
    }
}

pub fn bose_hubbard_time(spec: &BoseHubbardTimeSpec) -> Result<MottReport> {
    spec.validate()?;
    let basis = FockBasis::new(spec.sites, spec.particles)?;
    let h = spec.hamiltonian(&basis)?;
    let eig = eig_hermitian(&h)?;
    let psi = eig.vector(0);
    let gap = if eig.values.len() > 1 {
        eig.values[1] - eig.values[0]
    } else {
        f64::INFINITY
    };
    let s = spec.sites;
    let prob: Vec<f64> = psi.iter().map(|a| a.norm_sqr()).collect();
    let number_variance = (0..s)
        .map(|i| {
            let (m1, m2) = basis
                .states()
                .iter()
                .zip(&prob)
                .fold((0.0, 0.0), |(a, b), (occ, p)| {
                    let n = occ[i] as f64;
                    (a + p * n, b + p * n * n)
                });
            m2 - m1 * m1
        })
        .collect();
    let ops = fock_operators(&basis)?;
    let mut coherence = vec![vec![0.0; s]; s];
    for i in 0..s {
        for j in 0..s {
            let hop = ops.hopping(i, j)?;
            let hp = hop.apply(&psi);
            coherence[i][j] = psi
                .iter()
                .zip(&hp)
                .map(|(a, b)| a.conj() * b)
                .sum::<Complex64>()
                .re;
        }
    }
    Ok(MottReport {
        dimension: basis.len(),
        ground_energy: eig.values[0],
        gap,
        number_variance,
        coherence,
        ground_state: psi,
    })
}
