// SPDX-License-Identifier: Apache-2.0

//! One-period Floquet operators of driven spin-1/2 chains.
//!
//! Conventions shared by all builders: site 0 is the most significant bit of
//! a basis index, bit 0 is `|↑⟩_z`, and the flip deviation `ε` is
//! fractional, so a nominal π rotation becomes a rotation by `π(1 − ε)`.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opalg::pauli::{site_mask, z_parity_sectors, MAX_SITES};
use crate::opalg::{
    kron, unitary_exp, Axis, ComplexMatrix, HermitianOperator, PauliSum, UnitaryOperator,
};
use crate::sampling::{uniform_array, unit_draw, Interval};

/// Largest NV cluster simulated.
pub const NV_MAX_SITES: usize = 12;
/// Attempts per site before minimum-separation sampling gives up.
const POSITION_ATTEMPTS: u64 = 10_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

impl Boundary {
    /// Nearest-neighbour bonds `(i, i+1)`; the periodic chain adds
    /// `(L−1, 0)` as bond `L−1`.
    pub fn bonds(self, sites: usize) -> Vec<(usize, usize)> {
        let mut b: Vec<(usize, usize)> = (0..sites.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        if self == Boundary::Periodic && sites >= 3 {
            b.push((sites - 1, 0));
        }
        b
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Khemani,
    Minimal,
    Else,
    Yao,
    Ion,
    Nv,
}

/// Sampled couplings and fields of one disorder realization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisorderRealization {
    pub model: ModelKind,
    pub seed: u64,
    pub arrays: BTreeMap<String, Vec<f64>>,
}

impl DisorderRealization {
    fn new(model: ModelKind, seed: u64) -> Self {
        Self {
            model,
            seed,
            arrays: BTreeMap::new(),
        }
    }

    fn with(mut self, name: &str, values: Vec<f64>) -> Self {
        self.arrays.insert(name.to_string(), values);
        self
    }

    pub fn array(&self, name: &str) -> Option<&[f64]> {
        self.arrays.get(name).map(Vec::as_slice)
    }

    fn expect_model(&self, model: ModelKind) -> Result<()> {
        if self.model != model {
            return Err(Error::contract(format!(
                "realization for {:?} passed to {:?} builder",
                self.model, model
            )));
        }
        Ok(())
    }

    /// Array `name` with `len` entries, all inside `interval`.
    fn checked(&self, name: &str, len: usize, interval: Option<Interval>) -> Result<&[f64]> {
        let a = self
            .array(name)
            .ok_or_else(|| Error::contract(format!("realization lacks array `{name}`")))?;
        if a.len() != len {
            return Err(Error::contract(format!(
                "array `{name}` has {} entries, expected {len}",
                a.len()
            )));
        }
        if let Some(iv) = interval {
            if let Some(x) = a.iter().find(|&&x| !iv.contains(x)) {
                return Err(Error::contract(format!(
                    "array `{name}` value {x} outside [{}, {}]",
                    iv.lo, iv.hi
                )));
            }
        }
        Ok(a)
    }
}

fn check_sites(sites: usize, min: usize, max: usize) -> Result<()> {
    if sites < min || sites > max {
        return Err(Error::param(format!(
            "sites must lie in {min}..={max}, got {sites}"
        )));
    }
    Ok(())
}

fn check_time(name: &str, t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::param(format!(
            "{name} must be a finite non-negative time, got {t}"
        )));
    }
    Ok(())
}

fn check_finite(name: &str, x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::param(format!("{name} must be finite")));
    }
    Ok(())
}

fn check_epsilon(eps: f64) -> Result<()> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::param(format!(
            "epsilon must lie in [0, 1), got {eps}"
        )));
    }
    Ok(())
}

fn check_period(t: f64) -> Result<()> {
    if !(t > 0.0) {
        return Err(Error::param("drive period must be positive"));
    }
    Ok(())
}

/// `⊗_i exp(−i θ_i σ^axis)`.
pub fn product_rotation(axis: Axis, angles: &[f64]) -> Result<UnitaryOperator> {
    if angles.is_empty() {
        return Err(Error::EmptyInput("rotation angles"));
    }
    if angles.len() > MAX_SITES {
        return Err(Error::Capacity {
            requested: 1usize << angles.len().min(63),
            limit: 1 << MAX_SITES,
        });
    }
    let one = |theta: f64| -> Result<ComplexMatrix> {
        let (c, s) = (theta.cos(), theta.sin());
        let z = Complex64::new(0.0, 0.0);
        let cc = Complex64::new(c, 0.0);
        let data = match axis {
            Axis::X => [cc, Complex64::new(0.0, -s), Complex64::new(0.0, -s), cc],
            Axis::Y => [cc, Complex64::new(-s, 0.0), Complex64::new(s, 0.0), cc],
            Axis::Z => [Complex64::new(c, -s), z, z, Complex64::new(c, s)],
        };
        ComplexMatrix::from_row_major(2, 2, &data)
    };
    let mut m = one(angles[0])?;
    for &a in &angles[1..] {
        m = kron(&m, &one(a)?)?;
    }
    UnitaryOperator::new(m)
}

/// `exp(−i E)` for an operator diagonal in the σ^x product basis with
/// eigenvalue `energy(b)` on `|b⟩_x` (bit 0 = σ^x = +1).
fn exp_x_diagonal(sites: usize, energy: impl Fn(usize) -> f64) -> Result<UnitaryOperator> {
    let dim = 1usize << sites;
    crate::opalg::check_capacity(dim)?;
    let norm = (dim as f64).sqrt().recip();
    let had = Mat::from_fn(dim, dim, |a, b| {
        let sign = if (a & b).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        Complex64::new(sign * norm, 0.0)
    });
    let phases: Vec<Complex64> = (0..dim)
        .map(|c| Complex64::from_polar(1.0, -energy(c)))
        .collect();
    let scaled = Mat::from_fn(dim, dim, |c, b| phases[c] * had[(c, b)]);
    UnitaryOperator::new(ComplexMatrix::from_mat(&had * &scaled))
}

fn diagonal_phases(sites: usize, energy: impl Fn(usize) -> f64) -> Result<UnitaryOperator> {
    let phases: Vec<f64> = (0..1usize << sites).map(|b| -energy(b)).collect();
    UnitaryOperator::from_phases(&phases)
}

#[inline]
fn spin(b: usize, sites: usize, site: usize) -> f64 {
    if b & site_mask(sites, site) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `U·D` with `D` diagonal given by its entries.
fn times_diagonal(u: &UnitaryOperator, d: &[Complex64]) -> Result<UnitaryOperator> {
    let m = u.matrix();
    let n = m.rows();
    let out = ComplexMatrix::from_fn(n, n, |i, j| m.get(i, j) * d[j])?;
    UnitaryOperator::new(out)
}

// ---------------------------------------------------------------- Khemani

/// Binary drive `U = exp(−i t2 H_x) exp(−i t1 H_z)` with
/// `H_z = Σ h_i σ^z_i + J_z Σ σ^z_i σ^z_{i+1}` and
/// `H_x = Σ (J_i σ^x_i σ^x_{i+1} + J_z σ^z_i σ^z_{i+1})`.
/// Disorder is specified through the products `h_i t1` and `J_i t2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KhemaniSpec {
    pub sites: usize,
    pub jz: f64,
    #[serde(default = "one")]
    pub t1: f64,
    #[serde(default = "one")]
    pub t2: f64,
    pub h_t1: Interval,
    pub j_t2: Interval,
    #[serde(default)]
    pub boundary: Boundary,
}

fn one() -> f64 {
    1.0
}

fn half_pi() -> f64 {
    FRAC_PI_2
}

impl KhemaniSpec {
    /// π-spin-glass disorder windows with `t1 = t2 = 1`.
    pub fn pi_spin_glass(sites: usize, jz_t2: f64) -> Self {
        Self {
            sites,
            jz: jz_t2,
            t1: 1.0,
            t2: 1.0,
            h_t1: Interval {
                lo: 1.512,
                hi: 1.551,
            },
            j_t2: Interval {
                lo: 0.393,
                hi: 1.492,
            },
            boundary: Boundary::Open,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_sites(self.sites, 2, MAX_SITES)?;
        check_finite("jz", self.jz)?;
        check_time("t1", self.t1)?;
        check_time("t2", self.t2)?;
        check_period(self.period())?;
        self.h_t1.validate("h_t1")?;
        self.j_t2.validate("j_t2")
    }

    pub fn period(&self) -> f64 {
        self.t1 + self.t2
    }

    pub fn sample(&self, seed: u64) -> Result<DisorderRealization> {
        self.validate()?;
        let nb = self.boundary.bonds(self.sites).len();
        Ok(DisorderRealization::new(ModelKind::Khemani, seed)
            .with("h_t1", uniform_array(seed, "h", self.h_t1, self.sites))
            .with("j_t2", uniform_array(seed, "J", self.j_t2, nb)))
    }
}

/// Floquet operator restricted to the two eigenspaces of `Π σ^z`
/// (even, odd), with the basis indices of each block.
pub fn khemani_parity_blocks(
    spec: &KhemaniSpec,
    r: &DisorderRealization,
) -> Result<Vec<(Vec<usize>, UnitaryOperator)>> {
    spec.validate()?;
    r.expect_model(ModelKind::Khemani)?;
    let l = spec.sites;
    let bonds = spec.boundary.bonds(l);
    let h_t1 = r.checked("h_t1", l, Some(spec.h_t1))?;
    let j_t2 = r.checked("j_t2", bonds.len(), Some(spec.j_t2))?;

    let zz = |b: usize| -> f64 {
        bonds
            .iter()
            .map(|&(i, j)| spin(b, l, i) * spin(b, l, j))
            .sum()
    };
    let mut hx = PauliSum::new(l)?;
    for (k, &(i, j)) in bonds.iter().enumerate() {
        hx.add(&[(i, Axis::X), (j, Axis::X)], j_t2[k])?;
        hx.add(&[(i, Axis::Z), (j, Axis::Z)], spec.jz * spec.t2)?;
    }
    let hx = hx.build()?;
    let mut out = Vec::with_capacity(2);
    for idx in z_parity_sectors(l) {
        // H_x preserves Π σ^z, so each block is exponentiated on its own
        let block = HermitianOperator::new(hx.matrix().principal_submatrix(&idx))?;
        let ux = unitary_exp(&block, 1.0)?;
        let d: Vec<Complex64> = idx
            .iter()
            .map(|&b| {
                let e: f64 = (0..l).map(|i| h_t1[i] * spin(b, l, i)).sum::<f64>()
                    + spec.jz * spec.t1 * zz(b);
                Complex64::from_polar(1.0, -e)
            })
            .collect();
        out.push((idx, times_diagonal(&ux, &d)?));
    }
    Ok(out)
}

pub fn build_floquet_khemani(
    spec: &KhemaniSpec,
    r: &DisorderRealization,
) -> Result<UnitaryOperator> {
    let blocks = khemani_parity_blocks(spec, r)?;
    let dim = 1usize << spec.sites;
    let mut m = ComplexMatrix::zeros(dim, dim)?;
    for (idx, u) in &blocks {
        for (a, &ia) in idx.iter().enumerate() {
            for (b, &ib) in idx.iter().enumerate() {
                m.set(ia, ib, u.matrix().get(a, b));
            }
        }
    }
    UnitaryOperator::new(m)
}

// ---------------------------------------------------------------- minimal

/// `U = exp(−i t2 H_2) exp(−i t1 H_1)` with `H_1 = Σ h_i σ^x_i` and
/// `H_2 = Σ J_i σ^z_i σ^z_{i+1}`, `J_i ∈ [J_z − δJ, J_z + δJ]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinimalSpec {
    pub sites: usize,
    #[serde(default = "one")]
    pub t1: f64,
    #[serde(default = "one")]
    pub t2: f64,
    pub h: Interval,
    pub jz: f64,
    #[serde(default)]
    pub delta_j: f64,
    #[serde(default)]
    pub boundary: Boundary,
}

impl MinimalSpec {
    pub fn j_interval(&self) -> Interval {
        Interval {
            lo: self.jz - self.delta_j,
            hi: self.jz + self.delta_j,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_sites(self.sites, 2, MAX_SITES)?;
        check_time("t1", self.t1)?;
        check_time("t2", self.t2)?;
        check_period(self.period())?;
        check_finite("jz", self.jz)?;
        if !(self.delta_j >= 0.0 && self.delta_j.is_finite()) {
            return Err(Error::param("delta_j must be non-negative"));
        }
        self.h.validate("h")
    }

    pub fn period(&self) -> f64 {
        self.t1 + self.t2
    }

    pub fn sample(&self, seed: u64) -> Result<DisorderRealization> {
        self.validate()?;
        let nb = self.boundary.bonds(self.sites).len();
        Ok(DisorderRealization::new(ModelKind::Minimal, seed)
            .with("h", uniform_array(seed, "h", self.h, self.sites))
            .with("J", uniform_array(seed, "J", self.j_interval(), nb)))
    }
}

pub fn build_floquet_minimal(
    spec: &MinimalSpec,
    r: &DisorderRealization,
) -> Result<UnitaryOperator> {
    spec.validate()?;
    r.expect_model(ModelKind::Minimal)?;
    let l = spec.sites;
    let bonds = spec.boundary.bonds(l);
    let h = r.checked("h", l, Some(spec.h))?;
    let j = r.checked("J", bonds.len(), Some(spec.j_interval()))?;
    let angles: Vec<f64> = h.iter().map(|&x| x * spec.t1).collect();
    let u1 = product_rotation(Axis::X, &angles)?;
    let u2 = diagonal_phases(l, |b| {
        spec.t2
            * bonds
                .iter()
                .zip(j)
                .map(|(&(p, q), &jj)| jj * spin(b, l, p) * spin(b, l, q))
                .sum::<f64>()
    })?;
    u2.then_after(&u1)
}

// ---------------------------------------------------------------- Else

/// `U = U_2 U_1`, `U_1 = exp(+i t1 (1−ε) Σ σ^x_i)`,
/// `U_2 = exp(−i t2 H_MBL)`, `H_MBL = Σ J_i σ^z_i σ^z_{i+1} + h^z_i σ^z_i + h^x_i σ^x_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElseSpec {
    pub sites: usize,
    #[serde(default = "half_pi")]
    pub t1: f64,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default = "one")]
    pub t2: f64,
    pub j: Interval,
    pub hz: Interval,
    pub hx: Interval,
    #[serde(default)]
    pub boundary: Boundary,
}

impl ElseSpec {
    /// `J_i ∈ [J/2, 3J/2]`, `h^z_i ∈ [0, h^z]`, `h^x_i ∈ [0, h]`, `t1 = π/2`, `t2 = 1`.
    pub fn standard(sites: usize, j: f64, hz: f64, h: f64, epsilon: f64) -> Self {
        Self {
            sites,
            t1: FRAC_PI_2,
            epsilon,
            t2: 1.0,
            j: Interval {
                lo: 0.5 * j,
                hi: 1.5 * j,
            },
            hz: Interval { lo: 0.0, hi: hz },
            hx: Interval { lo: 0.0, hi: h },
            boundary: Boundary::Open,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_sites(self.sites, 2, MAX_SITES)?;
        check_time("t1", self.t1)?;
        check_time("t2", self.t2)?;
        check_period(self.period())?;
        check_epsilon(self.epsilon)?;
        self.j.validate("j")?;
        self.hz.validate("hz")?;
        self.hx.validate("hx")
    }

    pub fn period(&self) -> f64 {
        self.t1 + self.t2
    }

    pub fn sample(&self, seed: u64) -> Result<DisorderRealization> {
        self.validate()?;
        let nb = self.boundary.bonds(self.sites).len();
        Ok(DisorderRealization::new(ModelKind::Else, seed)
            .with("J", uniform_array(seed, "J", self.j, nb))
            .with("hz", uniform_array(seed, "hz", self.hz, self.sites))
            .with("hx", uniform_array(seed, "hx", self.hx, self.sites)))
    }
}

/// Global x rotation `exp(+i angle Σ σ^x)`.
fn global_x_flip(sites: usize, angle: f64) -> Result<UnitaryOperator> {
    product_rotation(Axis::X, &vec![-angle; sites])
}

/// `exp(−i t H)` for `H = Σ_pairs c σ^zσ^z + Σ hz σ^z + Σ hx σ^x`.
fn ising_evolution(
    sites: usize,
    pairs: &[(usize, usize, f64)],
    hz: &[f64],
    hx: &[f64],
    t: f64,
) -> Result<UnitaryOperator> {
    let diag = |b: usize| -> f64 {
        let e: f64 = pairs
            .iter()
            .map(|&(i, j, c)| c * spin(b, sites, i) * spin(b, sites, j))
            .sum::<f64>()
            + (0..sites).map(|i| hz[i] * spin(b, sites, i)).sum::<f64>();
        e * t
    };
    if hx.iter().all(|&x| x == 0.0) {
        return diagonal_phases(sites, diag);
    }
    let mut h = PauliSum::new(sites)?;
    for &(i, j, c) in pairs {
        h.add(&[(i, Axis::Z), (j, Axis::Z)], c)?;
    }
    for i in 0..sites {
        h.add(&[(i, Axis::Z)], hz[i])?;
        h.add(&[(i, Axis::X)], hx[i])?;
    }
    unitary_exp(&h.build()?, t)
}

pub fn build_floquet_else(spec: &ElseSpec, r: &DisorderRealization) -> Result<UnitaryOperator> {
    spec.validate()?;
    r.expect_model(ModelKind::Else)?;
    let l = spec.sites;
    let bonds = spec.boundary.bonds(l);
    let j = r.checked("J", bonds.len(), Some(spec.j))?;
    let hz = r.checked("hz", l, Some(spec.hz))?;
    let hx = r.checked("hx", l, Some(spec.hx))?;
    let pairs: Vec<(usize, usize, f64)> =
        bonds.iter().zip(j).map(|(&(a, b), &c)| (a, b, c)).collect();
    let u1 = global_x_flip(l, spec.t1 * (1.0 - spec.epsilon))?;
    let u2 = ising_evolution(l, &pairs, hz, hx, spec.t2)?;
    u2.then_after(&u1)
}

// ---------------------------------------------------------------- Yao

/// Else-type drive with power-law Ising couplings
/// `Σ_{i<j} J_ij / r_ij^α σ^z_i σ^z_j` (each pair counted once).
/// `alpha = None` keeps nearest neighbours only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YaoSpec {
    pub sites: usize,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default = "half_pi")]
    pub t1: f64,
    #[serde(default = "one")]
    pub t2: f64,
    pub jz: f64,
    #[serde(default)]
    pub alpha: Option<f64>,
    /// Defaults to `[0.8 J_z, 1.2 J_z]` when absent.
    #[serde(default)]
    pub j: Option<Interval>,
    pub hz: Interval,
    #[serde(default)]
    pub boundary: Boundary,
}

/// Interacting pair `(i, j)` at chain distance `r`; the draw key `(i, d)`
/// uses the separation `d` along the chain direction with `j = (i + d) mod L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pair {
    pub i: usize,
    pub j: usize,
    pub distance: usize,
    pub key: u64,
}

/// Pairs in draw order. The key of `(i, d)` is `(d − 1)·64 + i`, so the
/// nearest-neighbour keys coincide with bond indices of the Else chain.
pub fn chain_pairs(sites: usize, boundary: Boundary, nearest_only: bool) -> Vec<Pair> {
    let mut out = Vec::new();
    let max_d = if nearest_only { 1 } else { sites - 1 };
    for d in 1..=max_d {
        for i in 0..sites {
            let (j, dist) = match boundary {
                Boundary::Open => {
                    if i + d >= sites {
                        continue;
                    }
                    (i + d, d)
                }
                Boundary::Periodic => {
                    // each unordered pair once: d < L/2, or d == L/2 from the first half
                    if 2 * d > sites || (2 * d == sites && i >= sites / 2) {
                        continue;
                    }
                    ((i + d) % sites, d)
                }
            };
            out.push(Pair {
                i,
                j,
                distance: dist,
                key: (d as u64 - 1) * 64 + i as u64,
            });
        }
    }
    out
}

impl YaoSpec {
    pub fn j_interval(&self) -> Interval {
        self.j.unwrap_or(Interval {
            lo: 0.8 * self.jz,
            hi: 1.2 * self.jz,
        })
    }

    pub fn pairs(&self) -> Vec<Pair> {
        chain_pairs(self.sites, self.boundary, self.alpha.is_none())
    }

    pub fn validate(&self) -> Result<()> {
        check_sites(self.sites, 2, MAX_SITES)?;
        check_epsilon(self.epsilon)?;
        check_time("t1", self.t1)?;
        check_time("t2", self.t2)?;
        check_period(self.period())?;
        check_finite("jz", self.jz)?;
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::param(format!("alpha must be positive, got {a}")));
            }
        }
        self.j_interval().validate("j")?;
        self.hz.validate("hz")
    }

    pub fn period(&self) -> f64 {
        self.t1 + self.t2
    }

    pub fn sample(&self, seed: u64) -> Result<DisorderRealization> {
        self.validate()?;
        let iv = self.j_interval();
        let j: Vec<f64> = self
            .pairs()
            .iter()
            .map(|p| iv.at(unit_draw(seed, "J", p.key)))
            .collect();
        Ok(DisorderRealization::new(ModelKind::Yao, seed)
            .with("J", j)
            .with("hz", uniform_array(seed, "hz", self.hz, self.sites)))
    }
}

pub fn build_floquet_yao(spec: &YaoSpec, r: &DisorderRealization) -> Result<UnitaryOperator> {
    spec.validate()?;
    r.expect_model(ModelKind::Yao)?;
    let l = spec.sites;
    let pairs = spec.pairs();
    let j = r.checked("J", pairs.len(), Some(spec.j_interval()))?;
    let hz = r.checked("hz", l, Some(spec.hz))?;
    let couplings: Vec<(usize, usize, f64)> = pairs
        .iter()
        .zip(j)
        .map(|(p, &c)| {
            let decay = spec.alpha.map_or(1.0, |a| (p.distance as f64).powf(a));
            (p.i, p.j, c / decay)
        })
        .collect();
    let u1 = global_x_flip(l, spec.t1 * (1.0 - spec.epsilon))?;
    let u2 = ising_evolution(l, &couplings, hz, &vec![0.0; l], spec.t2)?;
    u2.then_after(&u1)
}

// ---------------------------------------------------------------- ion chain

/// `U = exp(−i H_3 t_3) exp(−i H_2 t_2) exp(−i H_1 t_1)` with a y rotation
/// by `π(1 − ε)`, `H_2 = Σ_{i<j} J_0/|i−j|^α σ^x_i σ^x_j` and
/// `H_3 = Σ h_i σ^x_i`, `h_i ∈ [0, W]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IonSpec {
    pub sites: usize,
    #[serde(default)]
    pub epsilon: f64,
    pub j0: f64,
    #[serde(default = "ion_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub w: f64,
    #[serde(default = "third")]
    pub t1: f64,
    #[serde(default = "third")]
    pub t2: f64,
    #[serde(default = "third")]
    pub t3: f64,
}

fn ion_alpha() -> f64 {
    1.5
}

fn third() -> f64 {
    1.0 / 3.0
}

impl IonSpec {
    pub fn new(sites: usize, epsilon: f64, j0: f64, w: f64) -> Self {
        Self {
            sites,
            epsilon,
            j0,
            alpha: 1.5,
            w,
            t1: third(),
            t2: third(),
            t3: third(),
        }
    }

    pub fn h_interval(&self) -> Interval {
        Interval {
            lo: 0.0,
            hi: self.w,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_sites(self.sites, 1, MAX_SITES)?;
        check_epsilon(self.epsilon)?;
        check_finite("j0", self.j0)?;
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::param("alpha must be positive"));
        }
        if !(self.w >= 0.0 && self.w.is_finite()) {
            return Err(Error::param("w must be non-negative"));
        }
        check_time("t1", self.t1)?;
        check_time("t2", self.t2)?;
        check_time("t3", self.t3)?;
        check_period(self.period())
    }

    pub fn period(&self) -> f64 {
        self.t1 + self.t2 + self.t3
    }

    pub fn sample(&self, seed: u64) -> Result<DisorderRealization> {
        self.validate()?;
        Ok(DisorderRealization::new(ModelKind::Ion, seed)
            .with("h", uniform_array(seed, "h", self.h_interval(), self.sites)))
    }
}

pub fn build_floquet_ion(spec: &IonSpec, r: &DisorderRealization) -> Result<UnitaryOperator> {
    spec.validate()?;
    r.expect_model(ModelKind::Ion)?;
    let l = spec.sites;
    let h = r.checked("h", l, Some(spec.h_interval()))?;
    // Ω t1 = π/2, so each spin turns by π(1−ε) about y
    let u1 = product_rotation(Axis::Y, &vec![FRAC_PI_2 * (1.0 - spec.epsilon); l])?;
    let pairs = chain_pairs(l, Boundary::Open, false);
    let u23 = exp_x_diagonal(l, |b| {
        let inter: f64 = pairs
            .iter()
            .map(|p| {
                spec.j0 / (p.distance as f64).powf(spec.alpha) * spin(b, l, p.i) * spin(b, l, p.j)
            })
            .sum();
        let field: f64 = (0..l).map(|i| h[i] * spin(b, l, i)).sum();
        spec.t2 * inter + spec.t3 * field
    })?;
    u23.then_after(&u1)
}

// ---------------------------------------------------------------- NV ensemble

/// Piecewise drive `U = exp(−i H_y τ_2) exp(−i H_x τ_1)` where
/// `H_μ = Ω_μ Σ σ^μ_i + Σ Δ_i σ^z_i + Σ_{i<j} (J/r_ij³)(σ^xσ^x + σ^yσ^y − σ^zσ^z)`
/// and spins sit at uniform random points of the unit cube.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NvSpec {
    pub sites: usize,
    pub tau1: f64,
    pub tau2: f64,
    pub omega_x: f64,
    pub omega_y: f64,
    pub delta: Interval,
    pub j: f64,
    #[serde(default = "nv_min_separation")]
    pub min_separation: f64,
}

fn nv_min_separation() -> f64 {
    0.1
}

impl NvSpec {
    /// Rotation angle of the y pulse, `Ω_y τ_2` (the Pauli generator turns a
    /// spin by twice its coefficient, so θ = π means `Ω_y τ_2 = π/2`).
    pub fn theta(&self) -> f64 {
        2.0 * self.omega_y * self.tau2
    }

    pub fn validate(&self) -> Result<()> {
        check_sites(self.sites, 1, NV_MAX_SITES)?;
        if !(self.tau1 > 0.0 && self.tau2 > 0.0 && self.tau1.is_finite() && self.tau2.is_finite()) {
            return Err(Error::param("tau1 and tau2 must be positive"));
        }
        check_finite("omega_x", self.omega_x)?;
        check_finite("omega_y", self.omega_y)?;
        check_finite("j", self.j)?;
        self.delta.validate("delta")?;
        if !(self.min_separation > 0.0 && self.min_separation < 1.0) {
            return Err(Error::param("min_separation must lie in (0, 1)"));
        }
        Ok(())
    }

    pub fn period(&self) -> f64 {
        self.tau1 + self.tau2
    }

    pub fn sample(&self, seed: u64) -> Result<DisorderRealization> {
        self.validate()?;
        let mut pos: Vec<[f64; 3]> = Vec::with_capacity(self.sites);
        for i in 0..self.sites as u64 {
            let mut placed = false;
            for attempt in 0..POSITION_ATTEMPTS {
                let base = (i * POSITION_ATTEMPTS + attempt) * 3;
                let p = [
                    unit_draw(seed, "pos", base),
                    unit_draw(seed, "pos", base + 1),
                    unit_draw(seed, "pos", base + 2),
                ];
                if pos.iter().all(|q| dist(q, &p) >= self.min_separation) {
                    pos.push(p);
                    placed = true;
                    break;
                }
            }
            if !placed {
                return Err(Error::Sampling(format!(
                    "could not place spin {i} at separation ≥ {} after {POSITION_ATTEMPTS} attempts",
                    self.min_separation
                )));
            }
        }
        Ok(DisorderRealization::new(ModelKind::Nv, seed)
            .with(
                "delta",
                uniform_array(seed, "delta", self.delta, self.sites),
            )
            .with("positions", pos.into_iter().flatten().collect()))
    }
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Dipolar couplings `J / r_ij³` for `i < j`, after checking the separations.
pub fn nv_couplings(spec: &NvSpec, r: &DisorderRealization) -> Result<Vec<(usize, usize, f64)>> {
    let l = spec.sites;
    let flat = r.checked("positions", 3 * l, Some(Interval { lo: 0.0, hi: 1.0 }))?;
    let p: Vec<[f64; 3]> = flat.chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
    let mut out = Vec::new();
    for i in 0..l {
        for j in i + 1..l {
            let d = dist(&p[i], &p[j]);
            if d < spec.min_separation {
                return Err(Error::Sampling(format!(
                    "spins {i} and {j} closer than {} ({d})",
                    spec.min_separation
                )));
            }
            out.push((i, j, spec.j / d.powi(3)));
        }
    }
    Ok(out)
}

pub fn build_floquet_nv(spec: &NvSpec, r: &DisorderRealization) -> Result<UnitaryOperator> {
    spec.validate()?;
    r.expect_model(ModelKind::Nv)?;
    let l = spec.sites;
    let delta = r.checked("delta", l, Some(spec.delta))?;
    let couplings = nv_couplings(spec, r)?;
    let mut common = PauliSum::new(l)?;
    for i in 0..l {
        common.add(&[(i, Axis::Z)], delta[i])?;
    }
    for &(i, j, c) in &couplings {
        common.add(&[(i, Axis::X), (j, Axis::X)], c)?;
        common.add(&[(i, Axis::Y), (j, Axis::Y)], c)?;
        common.add(&[(i, Axis::Z), (j, Axis::Z)], -c)?;
    }
    let common = common.build()?;
    let drive = |axis: Axis, omega: f64| -> Result<HermitianOperator> {
        let mut s = PauliSum::new(l)?;
        for i in 0..l {
            s.add(&[(i, axis)], omega)?;
        }
        common.plus(&s.build()?)
    };
    let ux = unitary_exp(&drive(Axis::X, spec.omega_x)?, spec.tau1)?;
    let uy = unitary_exp(&drive(Axis::Y, spec.omega_y)?, spec.tau2)?;
    uy.then_after(&ux)
}

// ---------------------------------------------------------------- dispatch

/// Any of the spin-chain drives, tagged by `model` in serialized form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum SpinModelSpec {
    Khemani(KhemaniSpec),
    Minimal(MinimalSpec),
    Else(ElseSpec),
    Yao(YaoSpec),
    Ion(IonSpec),
    Nv(NvSpec),
}

impl SpinModelSpec {
    pub fn kind(&self) -> ModelKind {
        match self {
            Self::Khemani(_) => ModelKind::Khemani,
            Self::Minimal(_) => ModelKind::Minimal,
            Self::Else(_) => ModelKind::Else,
            Self::Yao(_) => ModelKind::Yao,
            Self::Ion(_) => ModelKind::Ion,
            Self::Nv(_) => ModelKind::Nv,
        }
    }

    pub fn sites(&self) -> usize {
        match self {
            Self::Khemani(s) => s.sites,
            Self::Minimal(s) => s.sites,
            Self::Else(s) => s.sites,
            Self::Yao(s) => s.sites,
            Self::Ion(s) => s.sites,
            Self::Nv(s) => s.sites,
        }
    }

    pub fn period(&self) -> f64 {
        match self {
            Self::Khemani(s) => s.period(),
            Self::Minimal(s) => s.period(),
            Self::Else(s) => s.period(),
            Self::Yao(s) => s.period(),
            Self::Ion(s) => s.period(),
            Self::Nv(s) => s.period(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Khemani(s) => s.validate(),
            Self::Minimal(s) => s.validate(),
            Self::Else(s) => s.validate(),
            Self::Yao(s) => s.validate(),
            Self::Ion(s) => s.validate(),
            Self::Nv(s) => s.validate(),
        }
    }

    pub fn sample(&self, seed: u64) -> Result<DisorderRealization> {
        match self {
            Self::Khemani(s) => s.sample(seed),
            Self::Minimal(s) => s.sample(seed),
            Self::Else(s) => s.sample(seed),
            Self::Yao(s) => s.sample(seed),
            Self::Ion(s) => s.sample(seed),
            Self::Nv(s) => s.sample(seed),
        }
    }

    pub fn build(&self, r: &DisorderRealization) -> Result<UnitaryOperator> {
        match self {
            Self::Khemani(s) => build_floquet_khemani(s, r),
            Self::Minimal(s) => build_floquet_minimal(s, r),
            Self::Else(s) => build_floquet_else(s, r),
            Self::Yao(s) => build_floquet_yao(s, r),
            Self::Ion(s) => build_floquet_ion(s, r),
            Self::Nv(s) => build_floquet_nv(s, r),
        }
    }

    /// Symmetry blocks of the Floquet operator when the model has a cheap
    /// block structure, otherwise the whole operator as a single block.
    pub fn build_blocks(
        &self,
        r: &DisorderRealization,
    ) -> Result<Vec<(Vec<usize>, UnitaryOperator)>> {
        match self {
            Self::Khemani(s) => khemani_parity_blocks(s, r),
            other => {
                let u = other.build(r)?;
                Ok(vec![((0..u.dim()).collect(), u)])
            }
        }
    }
}
