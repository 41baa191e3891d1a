// SPDX-License-Identifier: Apache-2.0

//! Driven quantum bouncer `H = −½∂_z² + z + λ z cos(ωt)`, hard wall at
//! `z = 0`, in the frame oscillating with the mirror.
//!
//! The unperturbed states come from a sine basis on `[0, L]` with `L` well
//! beyond the classical turning point of the highest kept level. The
//! monodromy is a midpoint-rule product over one period in the truncated
//! eigenbasis.

use std::f64::consts::{PI, TAU};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opalg::{
    eig_hermitian, eig_unitary, inner, unitary_exp, ComplexMatrix, HermitianOperator,
    UnitaryOperator,
};
use crate::table::write_csv;

/// Grid and sweeps of the phase search in [`wannier_packets`].
const PHASE_GRID: usize = 360;
const PHASE_SWEEPS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BouncerSpec {
    /// `λ` in `λ z cos(ωt)`.
    pub drive: f64,
    pub omega: f64,
    /// `s` of the `s:1` resonance.
    pub resonance: usize,
    /// Unperturbed levels kept.
    #[serde(default = "default_basis")]
    pub basis: usize,
    #[serde(default = "default_steps")]
    pub steps: usize,
}

fn default_basis() -> usize {
    96
}

fn default_steps() -> usize {
    512
}

impl BouncerSpec {
    pub fn new(drive: f64, omega: f64, resonance: usize) -> Self {
        Self {
            drive,
            omega,
            resonance,
            basis: default_basis(),
            steps: default_steps(),
        }
    }

    pub fn period(&self) -> f64 {
        TAU / self.omega
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0) || !self.drive.is_finite() {
            return Err(Error::param("bouncer needs ω > 0 and finite λ"));
        }
        if self.resonance == 0 {
            return Err(Error::param("resonance order must be at least 1"));
        }
        if self.steps < 256 {
            return Err(Error::param(format!(
                "{} steps per period; at least 256 required",
                self.steps
            )));
        }
        let n = resonant_level_estimate(self.omega / self.resonance as f64).round();
        if (self.basis as f64) < 4.0 * n {
            return Err(Error::param(format!(
                "basis of {} levels is below 4× the resonant level ≈ {n:.0}",
                self.basis
            )));
        }
        Ok(())
    }
}

/// Semiclassical `E_n = (3π(n − ¼)/(2√2))^{2/3}`, `n ≥ 1`.
pub fn wkb_energy(n: f64) -> f64 {
    (3.0 * PI * (n - 0.25) / (2.0 * 2f64.sqrt())).powf(2.0 / 3.0)
}

/// Level whose classical frequency `dE/dn` equals `frequency`.
pub fn resonant_level_estimate(frequency: f64) -> f64 {
    let c = (3.0 * PI / (2.0 * 2f64.sqrt())).powf(2.0 / 3.0);
    (2.0 * c / (3.0 * frequency)).powi(3) + 0.25
}

/// Unperturbed bouncer levels from a sine basis on `[0, L]`.
#[derive(Clone, Debug)]
pub struct BouncerBasis {
    pub length: f64,
    /// Ascending `E_n`, `n = 1 … basis`.
    pub energies: Vec<f64>,
    /// Column `n` holds the sine coefficients of level `n`.
    coefficients: Vec<Vec<f64>>,
    /// `⟨m|z|n⟩` among kept levels.
    pub position: ComplexMatrix,
}

impl BouncerBasis {
    pub fn new(levels: usize) -> Result<Self> {
        if levels == 0 {
            return Err(Error::param("need at least one level"));
        }
        let e_top = wkb_energy(levels as f64);
        let length = 1.6 * e_top + 10.0;
        let sines = (3.0 * length * (2.0 * e_top).sqrt() / PI).ceil() as usize;
        let z = sine_position(sines, length)?;
        let mut h = z.clone();
        for k in 0..sines {
            let q = (k + 1) as f64 * PI / length;
            h.set(k, k, h.get(k, k) + Complex64::new(0.5 * q * q, 0.0));
        }
        let eig = eig_hermitian(&HermitianOperator::new(h)?)?;
        let coefficients: Vec<Vec<f64>> = (0..levels)
            .map(|n| {
                let mut c: Vec<f64> = (0..sines).map(|k| eig.vectors.get(k, n).re).collect();
                // sign convention: positive slope at the wall
                let slope: f64 = c.iter().enumerate().map(|(k, v)| v * (k + 1) as f64).sum();
                if slope < 0.0 {
                    c.iter_mut().for_each(|v| *v = -*v);
                }
                c
            })
            .collect();
        let v = ComplexMatrix::from_fn(sines, levels, |k, n| {
            Complex64::new(coefficients[n][k], 0.0)
        })?;
        let position = v.adjoint().matmul(&z)?.matmul(&v)?;
        Ok(Self {
            length,
            energies: eig.values[..levels].to_vec(),
            coefficients,
            position,
        })
    }

    pub fn levels(&self) -> usize {
        self.energies.len()
    }

    /// `ψ(z)` of a state given in level amplitudes.
    pub fn wavefunction(&self, amplitudes: &[Complex64], z: f64) -> Complex64 {
        let sines = self.coefficients[0].len();
        let norm = (2.0 / self.length).sqrt();
        let basis: Vec<f64> = (0..sines)
            .map(|k| norm * ((k + 1) as f64 * PI * z / self.length).sin())
            .collect();
        amplitudes
            .iter()
            .zip(&self.coefficients)
            .map(|(a, c)| a * c.iter().zip(&basis).map(|(x, y)| x * y).sum::<f64>())
            .sum()
    }
}

/// `⟨k|z|l⟩` for `√(2/L) sin(kπz/L)`, `k, l = 1 … n`.
fn sine_position(n: usize, length: f64) -> Result<ComplexMatrix> {
    ComplexMatrix::from_fn(n, n, |i, j| {
        let (k, l) = ((i + 1) as f64, (j + 1) as f64);
        let v = if i == j {
            length / 2.0
        } else {
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            length / (PI * PI) * (sign - 1.0) * (1.0 / (k - l).powi(2) - 1.0 / (k + l).powi(2))
        };
        Complex64::new(v, 0.0)
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BouncerReport {
    pub spec: BouncerSpec,
    pub unperturbed: Vec<f64>,
    pub quasi_energies: Vec<f64>,
    pub unitarity_residual: f64,
    /// Level `n` (1-based) with `E_{n+1} − E_n` closest to `ω/s`.
    pub resonant_level: usize,
    /// Indices into `quasi_energies` of the resonant Floquet states.
    pub resonant_states: Vec<usize>,
    /// Mean unperturbed level of each resonant state.
    pub mean_levels: Vec<f64>,
    /// Largest deviation of the resonant quasi-energies from an exact
    /// `ω/s` ladder; for `s = 2` the tunneling splitting `J`.
    pub splitting: f64,
    /// Wave packets at `t = 0` in level amplitudes.
    #[serde(skip)]
    pub packets: Vec<Vec<Complex64>>,
    /// `|⟨φ_{j+1}|U φ_j⟩|` for each packet `j` (indices mod `s`).
    pub exchange_overlaps: Vec<f64>,
    /// `⟨z⟩` of each packet at `t = 0`.
    pub packet_positions: Vec<f64>,
    /// `⟨p⟩` of each packet at `t = 0`; packets may share a height and
    /// differ only in the direction of motion.
    pub packet_momenta: Vec<f64>,
    #[serde(skip)]
    basis: Option<BouncerBasis>,
}

impl BouncerReport {
    pub fn min_exchange_overlap(&self) -> f64 {
        self.exchange_overlaps
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Packet densities `|φ_j(z)|²` on `points` heights in `[0, z_max]`.
    pub fn write_packets_csv(&self, path: &Path, z_max: f64, points: usize) -> Result<()> {
        let basis = self
            .basis
            .as_ref()
            .ok_or(Error::contract("report carries no basis"))?;
        let mut header = vec!["z".to_string()];
        header.extend((0..self.packets.len()).map(|j| format!("density_{j}")));
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let rows = (0..points).map(|i| {
            let z = z_max * i as f64 / (points.max(2) - 1) as f64;
            let mut row = vec![z];
            row.extend(
                self.packets
                    .iter()
                    .map(|p| basis.wavefunction(p, z).norm_sqr()),
            );
            row
        });
        write_csv(path, &header, rows)
    }
}

/// Midpoint-rule monodromy `Π_k exp(−i H(t_k) Δt)`, `t_k = (k + ½)Δt`.
pub fn monodromy(spec: &BouncerSpec, basis: &BouncerBasis) -> Result<UnitaryOperator> {
    let n = basis.levels();
    let dt = spec.period() / spec.steps as f64;
    let h0 = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(basis.energies[i], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })?;
    let mut u = UnitaryOperator::identity(n)?;
    for k in 0..spec.steps {
        let t = (k as f64 + 0.5) * dt;
        let f = spec.drive * (spec.omega * t).cos();
        let h = HermitianOperator::new(&h0 + &basis.position.scale(Complex64::new(f, 0.0)))?;
        u = unitary_exp(&h, dt)?.compose_unchecked(&u)?;
    }
    UnitaryOperator::new(u.into_matrix())
}

pub fn bouncer_floquet(spec: &BouncerSpec) -> Result<BouncerReport> {
    spec.validate()?;
    let basis = BouncerBasis::new(spec.basis)?;
    let u = monodromy(spec, &basis)?;
    let unitarity_residual = u.matrix().unitarity_residual();
    let fl = eig_unitary(&u, spec.period())?;
    let vecs = fl.vectors.as_ref().expect("eig_unitary returns vectors");
    let n = basis.levels();
    let s = spec.resonance;
    let step = spec.omega / s as f64;

    let resonant_level = (0..n - 1)
        .min_by(|&a, &b| {
            let da = (basis.energies[a + 1] - basis.energies[a] - step).abs();
            let db = (basis.energies[b + 1] - basis.energies[b] - step).abs();
            da.total_cmp(&db)
        })
        .expect("at least two levels")
        + 1;

    // level distributions of all Floquet states
    let dist: Vec<Vec<f64>> = (0..n)
        .map(|k| (0..n).map(|m| vecs.get(m, k).norm_sqr()).collect())
        .collect();
    let mean: Vec<f64> = dist
        .iter()
        .map(|p| p.iter().enumerate().map(|(m, w)| (m + 1) as f64 * w).sum())
        .collect();
    let group = resonant_group(&fl.energies, &dist, &mean, resonant_level as f64, step, s)
        .ok_or_else(|| {
            Error::Resonance(format!("no {s}-state manifold near level {resonant_level}"))
        })?;

    // ladder order: offsets from the first state along the ω/s ladder
    let zone = spec.omega;
    let e0 = fl.energies[group[0]];
    let mut ordered: Vec<(usize, f64)> = group
        .iter()
        .map(|&k| {
            let d = (fl.energies[k] - e0).rem_euclid(zone) / step;
            (k, d)
        })
        .collect();
    ordered.sort_by(|a, b| a.1.round().total_cmp(&b.1.round()));
    let splitting = ordered
        .iter()
        .map(|&(_, d)| (d - d.round()).abs() * step)
        .fold(0.0, f64::max);
    let states: Vec<Vec<Complex64>> = ordered.iter().map(|&(k, _)| vecs.column(k)).collect();

    // p = i[H₀, z]
    let momentum = ComplexMatrix::from_fn(n, n, |a, b| {
        Complex64::new(0.0, basis.energies[a] - basis.energies[b]) * basis.position.get(a, b)
    })?;
    let packets = wannier_packets(&states, &basis.position, &momentum, step);
    let exchange_overlaps = (0..s)
        .map(|j| inner(&packets[(j + 1) % s], &u.apply(&packets[j])).norm())
        .collect();
    let packet_positions = packets
        .iter()
        .map(|p| inner(p, &basis.position.apply(p)).re)
        .collect();
    let packet_momenta = packets
        .iter()
        .map(|p| inner(p, &momentum.apply(p)).re)
        .collect();
    Ok(BouncerReport {
        spec: *spec,
        unperturbed: basis.energies.clone(),
        quasi_energies: fl.energies.clone(),
        unitarity_residual,
        resonant_level,
        resonant_states: ordered.iter().map(|&(k, _)| k).collect(),
        mean_levels: ordered.iter().map(|&(k, _)| mean[k]).collect(),
        splitting,
        packets,
        exchange_overlaps,
        packet_positions,
        packet_momenta,
        basis: Some(basis),
    })
}

/// `s` Floquet states centred near the resonant level whose quasi-energies
/// form an `ω/s` ladder. Candidates are ranked by how narrow their level
/// distribution is (the island ground band is the most compact). Partners
/// occupy levels shifted by one against the anchor's, so they are matched
/// on mean level and spread rather than level by level.
fn resonant_group(
    energies: &[f64],
    dist: &[Vec<f64>],
    mean: &[f64],
    level: f64,
    step: f64,
    s: usize,
) -> Option<Vec<usize>> {
    let n = energies.len();
    let window = (0.25 * level).max(3.0);
    let spread = |k: usize| {
        dist[k]
            .iter()
            .enumerate()
            .map(|(m, w)| ((m + 1) as f64 - mean[k]).powi(2) * w)
            .sum::<f64>()
            .sqrt()
    };
    let mut candidates: Vec<usize> = (0..n)
        .filter(|&k| (mean[k] - level).abs() <= window)
        .collect();
    candidates.sort_by(|&a, &b| spread(a).total_cmp(&spread(b)));
    if s == 1 {
        return candidates.first().map(|&k| vec![k]);
    }
    for &anchor in &candidates {
        let mut group = vec![anchor];
        for r in 1..s {
            let target = energies[anchor] + r as f64 * step;
            let best = candidates
                .iter()
                .copied()
                .filter(|k| !group.contains(k))
                .filter(|&k| (mean[k] - mean[anchor]).abs() <= 1.0)
                .filter(|&k| (spread(k) / spread(anchor) - 1.0).abs() <= 0.2)
                .map(|k| {
                    let d = (energies[k] - target).rem_euclid(step * s as f64);
                    (k, d.min(step * s as f64 - d))
                })
                .filter(|&(_, d)| d < 0.25 * step)
                .min_by(|a, b| a.1.total_cmp(&b.1));
            match best {
                Some((k, _)) => group.push(k),
                None => break,
            }
        }
        if group.len() == s {
            return Some(group);
        }
    }
    None
}

/// `φ_j = s^{−1/2} Σ_k e^{iχ_k} e^{−2πijk/s} u_k`.
///
/// Any phases `χ_k` give packets that the monodromy maps onto each other;
/// only some give localized ones. The phases are chosen to push the packet
/// centres `(⟨z⟩, ⟨p⟩/Ω)` as far apart as possible, `Ω = ω/s` being the
/// orbit frequency, by coordinate ascent on a grid.
fn wannier_packets(
    states: &[Vec<Complex64>],
    position: &ComplexMatrix,
    momentum: &ComplexMatrix,
    orbit_frequency: f64,
) -> Vec<Vec<Complex64>> {
    let s = states.len();
    let moments = |op: &ComplexMatrix| -> Vec<Vec<Complex64>> {
        let applied: Vec<Vec<Complex64>> = states.iter().map(|u| op.apply(u)).collect();
        states
            .iter()
            .map(|a| applied.iter().map(|b| inner(a, b)).collect())
            .collect()
    };
    let (zm, pm) = (moments(position), moments(momentum));
    let coefficient = |chi: &[f64], j: usize, k: usize| {
        Complex64::from_polar(
            (s as f64).sqrt().recip(),
            chi[k] - TAU * (j * k) as f64 / s as f64,
        )
    };
    let spread = |chi: &[f64]| {
        let centres: Vec<(f64, f64)> = (0..s)
            .map(|j| {
                let (mut z, mut p) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
                for k in 0..s {
                    for l in 0..s {
                        let w = coefficient(chi, j, k).conj() * coefficient(chi, j, l);
                        z += w * zm[k][l];
                        p += w * pm[k][l];
                    }
                }
                (z.re, p.re / orbit_frequency)
            })
            .collect();
        let (zc, pc) = centres.iter().fold((0.0, 0.0), |a, c| {
            (a.0 + c.0 / s as f64, a.1 + c.1 / s as f64)
        });
        centres
            .iter()
            .map(|c| (c.0 - zc).powi(2) + (c.1 - pc).powi(2))
            .sum::<f64>()
    };
    let mut chi = vec![0.0; s];
    for _ in 0..PHASE_SWEEPS {
        for k in 1..s {
            let best = (0..PHASE_GRID)
                .map(|i| TAU * i as f64 / PHASE_GRID as f64)
                .max_by(|&a, &b| {
                    let mut ca = chi.clone();
                    ca[k] = a;
                    let mut cb = chi.clone();
                    cb[k] = b;
                    spread(&ca).total_cmp(&spread(&cb))
                })
                .expect("non-empty grid");
            chi[k] = best;
        }
    }
    (0..s)
        .map(|j| {
            let mut p = vec![Complex64::new(0.0, 0.0); states[0].len()];
            for (k, u) in states.iter().enumerate() {
                let c = coefficient(&chi, j, k);
                for (a, b) in p.iter_mut().zip(u) {
                    *a += c * b;
                }
            }
            p
        })
        .collect()
}
