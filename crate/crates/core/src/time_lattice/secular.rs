// SPDX-License-Identifier: Apache-2.0

//! Bloch bands of the secular pendulum `P²/2m + V0 cos(sΘ)`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opalg::{eigvals_hermitian, ComplexMatrix, HermitianOperator};
use crate::table::write_csv;
use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PendulumSpec {
    pub mass: f64,
    pub amplitude: f64,
    pub fold: usize,
    /// Plane waves `q + s·k` with `|k| ≤ cutoff`.
    pub cutoff: usize,
}

impl PendulumSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0) || !self.amplitude.is_finite() {
            return Err(Error::param("pendulum needs m > 0 and finite V0"));
        }
        if self.fold == 0 || self.cutoff == 0 {
            return Err(Error::param("fold and cutoff must be positive"));
        }
        Ok(())
    }

    /// Width of the reduced zone, equal to `s`.
    pub fn zone(&self) -> f64 {
        self.fold as f64
    }

    /// Sorted band energies at quasi-momentum `q`.
    pub fn bloch_energies(&self, q: f64) -> Result<Vec<f64>> {
        self.validate()?;
        let n = 2 * self.cutoff + 1;
        let s = self.fold as f64;
        let c = self.cutoff as f64;
        let mut h = ComplexMatrix::zeros(n, n)?;
        for i in 0..n {
            let p = q + s * (i as f64 - c);
            h.set(i, i, Complex64::new(p * p / (2.0 * self.mass), 0.0));
            if i + 1 < n {
                let v = Complex64::new(0.5 * self.amplitude, 0.0);
                h.set(i, i + 1, v);
                h.set(i + 1, i, v);
            }
        }
        eigvals_hermitian(&HermitianOperator::new(h)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandStructure {
    /// Quasi-momenta across one reduced zone `[−s/2, s/2]`.
    pub quasi_momenta: Vec<f64>,
    /// `bands[b][i]` is band `b` at `quasi_momenta[i]`.
    pub bands: Vec<Vec<f64>>,
}

impl BandStructure {
    /// `min E_{b+1} − max E_b` over the sampled zone; negative when bands overlap.
    pub fn gap(&self, b: usize) -> Option<f64> {
        let lo = self
            .bands
            .get(b)?
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let hi = self
            .bands
            .get(b + 1)?
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        Some(hi - lo)
    }

    pub fn bandwidth(&self, b: usize) -> Option<f64> {
        let band = self.bands.get(b)?;
        let max = band.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = band.iter().copied().fold(f64::INFINITY, f64::min);
        Some(max - min)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let rows = self.bands.iter().enumerate().flat_map(|(b, band)| {
            self.quasi_momenta
                .iter()
                .zip(band)
                .map(move |(&q, &e)| vec![q, b as f64, e])
        });
        write_csv(path, &["q", "band", "energy"], rows)
    }
}

/// Lowest `bands` bands on `points` quasi-momenta spanning the reduced zone,
/// both edges included.
pub fn secular_bands(spec: &PendulumSpec, bands: usize, points: usize) -> Result<BandStructure> {
    spec.validate()?;
    if points < 2 || bands == 0 || bands > 2 * spec.cutoff + 1 {
        return Err(Error::param("need ≥ 2 points and 1 ≤ bands ≤ basis size"));
    }
    let s = spec.zone();
    let quasi_momenta: Vec<f64> = (0..points)
        .map(|i| -0.5 * s + s * i as f64 / (points - 1) as f64)
        .collect();
    let mut out = vec![Vec::with_capacity(points); bands];
    for &q in &quasi_momenta {
        let e = spec.bloch_energies(q)?;
        for (b, band) in out.iter_mut().enumerate() {
            band.push(e[b]);
        }
    }
    Ok(BandStructure {
        quasi_momenta,
        bands: out,
    })
}
