// SPDX-License-Identifier: Apache-2.0

//! Eigendecompositions and matrix exponentials.

use std::f64::consts::TAU;

use faer::{Mat, Side};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, HermitianOperator, UnitaryOperator};
use crate::error::{Error, Result};

/// Overlap above which two computed eigenvectors of a unitary are treated as
/// belonging to one (near-)degenerate cluster and re-orthonormalized.
const CLUSTER_OVERLAP: f64 = 1e-12;
/// Accepted per-vector residual `‖Uv − λv‖` is this times the dimension.
const UNITARY_RESIDUAL_PER_DIM: f64 = 1e-9;

/// Spectrum of a Hermitian operator: ascending eigenvalues and the matching
/// orthonormal eigenvectors stored as columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }
}

/// Quasi-energy spectrum of a Floquet operator.
///
/// Quasi-energies live in the half-open zone `[0, 2π/T)` and are sorted
/// ascending. Eigenvectors, when present, are the columns of a unitary
/// matrix in the same order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuasiSpectrum {
    pub period: f64,
    pub energies: Vec<f64>,
    #[serde(skip)]
    pub vectors: Option<ComplexMatrix>,
}

impl QuasiSpectrum {
    /// Spectrum without eigenvectors; energies are wrapped into the zone and
    /// sorted.
    pub fn from_energies(period: f64, energies: impl IntoIterator<Item = f64>) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::param(format!(
                "period must be positive, got {period}"
            )));
        }
        let zone = TAU / period;
        let mut e: Vec<f64> = energies.into_iter().map(|x| wrap_zone(x, zone)).collect();
        e.sort_by(f64::total_cmp);
        Ok(Self {
            period,
            energies: e,
            vectors: None,
        })
    }

    /// Width of the Floquet zone, `2π/T`.
    pub fn zone(&self) -> f64 {
        TAU / self.period
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Merge spectra of independent symmetry sectors (same period).
    pub fn merge(parts: &[QuasiSpectrum]) -> Result<Self> {
        let period = parts
            .first()
            .ok_or(Error::EmptyInput("spectrum list"))?
            .period;
        if parts.iter().any(|p| p.period != period) {
            return Err(Error::contract(
                "cannot merge spectra with different periods",
            ));
        }
        Self::from_energies(
            period,
            parts.iter().flat_map(|p| p.energies.iter().copied()),
        )
    }
}

/// Map `x` into `[0, zone)`.
pub fn wrap_zone(x: f64, zone: f64) -> f64 {
    let mut y = x.rem_euclid(zone);
    if y >= zone {
        y -= zone;
    }
    // normalizes −0.0
    y + 0.0
}

/// Map `x` into `(−zone/2, zone/2]`.
pub fn wrap_symmetric(x: f64, zone: f64) -> f64 {
    let mut y = wrap_zone(x, zone);
    if y > zone / 2.0 {
        y -= zone;
    }
    y
}

/// Eigendecomposition of a Hermitian operator.
pub fn eig_hermitian(h: &HermitianOperator) -> Result<HermitianEigen> {
    let n = h.dim();
    if n == 0 {
        return Err(Error::EmptyInput("Hermitian operator"));
    }
    let m = h.matrix().as_mat();
    if let Some(real) = real_part_if_real(m) {
        // Real symmetric input: the real solver is several times cheaper.
        let evd = real
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        let values: Vec<f64> = evd.S().column_vector().iter().copied().collect();
        let u = evd.U();
        let vectors =
            ComplexMatrix::from_mat(Mat::from_fn(n, n, |i, j| Complex64::new(u[(i, j)], 0.0)));
        return Ok(HermitianEigen { values, vectors });
    }
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let values: Vec<f64> = evd.S().column_vector().iter().map(|z| z.re).collect();
    let vectors = ComplexMatrix::from_mat(evd.U().to_owned());
    Ok(HermitianEigen { values, vectors })
}

fn real_part_if_real(m: faer::MatRef<'_, Complex64>) -> Option<Mat<f64>> {
    let (r, c) = (m.nrows(), m.ncols());
    for j in 0..c {
        for i in 0..r {
            if m[(i, j)].im != 0.0 {
                return None;
            }
        }
    }
    Some(Mat::from_fn(r, c, |i, j| m[(i, j)].re))
}

/// Eigenvalues only, ascending.
pub fn eigvals_hermitian(h: &HermitianOperator) -> Result<Vec<f64>> {
    if h.dim() == 0 {
        return Err(Error::EmptyInput("Hermitian operator"));
    }
    h.matrix()
        .as_mat()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))
}

/// `exp(−iHt)` through the spectral decomposition of `H`.
pub fn unitary_exp(h: &HermitianOperator, t: f64) -> Result<UnitaryOperator> {
    if !t.is_finite() {
        return Err(Error::param("evolution time must be finite"));
    }
    if h.is_diagonal() {
        let phases: Vec<f64> = (0..h.dim()).map(|i| -h.matrix().get(i, i).re * t).collect();
        return UnitaryOperator::from_phases(&phases);
    }
    let eig = eig_hermitian(h)?;
    UnitaryOperator::new(spectral_exp(&eig, t))
}

/// `exp(−iHt)` for an `H` that is block diagonal on the given index sets.
///
/// The sets must partition the basis and `H` must have no entries coupling
/// different sets; each block is exponentiated on its own.
pub fn unitary_exp_in_sectors(
    h: &HermitianOperator,
    t: f64,
    sectors: &[Vec<usize>],
) -> Result<UnitaryOperator> {
    let n = h.dim();
    let mut owner = vec![usize::MAX; n];
    for (s, idx) in sectors.iter().enumerate() {
        for &i in idx {
            if i >= n || owner[i] != usize::MAX {
                return Err(Error::contract("sectors must partition the basis"));
            }
            owner[i] = s;
        }
    }
    if owner.contains(&usize::MAX) {
        return Err(Error::contract("sectors must partition the basis"));
    }
    let scale = h.matrix().max_abs();
    for j in 0..n {
        for i in 0..n {
            if owner[i] != owner[j] && h.matrix().get(i, j).norm() > 1e-12 * scale.max(1.0) {
                return Err(Error::contract(format!(
                    "operator couples sectors at ({i}, {j})"
                )));
            }
        }
    }
    let mut out = ComplexMatrix::zeros(n, n)?;
    for idx in sectors {
        if idx.is_empty() {
            continue;
        }
        let block = HermitianOperator::new(h.matrix().principal_submatrix(idx))?;
        let u = if block.is_diagonal() {
            let d: Vec<Complex64> = (0..idx.len())
                .map(|i| Complex64::from_polar(1.0, -block.matrix().get(i, i).re * t))
                .collect();
            ComplexMatrix::diagonal(&d)?
        } else {
            spectral_exp(&eig_hermitian(&block)?, t)
        };
        for (a, &ia) in idx.iter().enumerate() {
            for (b, &ib) in idx.iter().enumerate() {
                out.set(ia, ib, u.get(a, b));
            }
        }
    }
    UnitaryOperator::new(out)
}

fn spectral_exp(eig: &HermitianEigen, t: f64) -> ComplexMatrix {
    let v = eig.vectors.as_mat();
    let n = v.nrows();
    if let Some(vr) = real_part_if_real(v) {
        // V e^{−iΛt} Vᵀ = V cos(Λt) Vᵀ − i V sin(Λt) Vᵀ
        let vc = Mat::from_fn(n, n, |i, k| vr[(i, k)] * (eig.values[k] * t).cos());
        let vs = Mat::from_fn(n, n, |i, k| vr[(i, k)] * (eig.values[k] * t).sin());
        let c = &vc * vr.transpose();
        let s = &vs * vr.transpose();
        return ComplexMatrix::from_mat(Mat::from_fn(n, n, |i, j| {
            Complex64::new(c[(i, j)], -s[(i, j)])
        }));
    }
    let scaled = Mat::from_fn(n, n, |i, k| {
        v[(i, k)] * Complex64::from_polar(1.0, -eig.values[k] * t)
    });
    ComplexMatrix::from_mat(&scaled * v.adjoint())
}

fn phase_to_quasi_energy(lambda: Complex64, period: f64) -> f64 {
    // U v = e^{−iεT} v
    wrap_zone(-lambda.arg() / period, TAU / period)
}

/// Quasi-energies of a Floquet operator, eigenvalues only.
pub fn quasi_energies(u: &UnitaryOperator, period: f64) -> Result<QuasiSpectrum> {
    if u.dim() == 0 {
        return Err(Error::EmptyInput("unitary operator"));
    }
    let vals = u
        .matrix()
        .as_mat()
        .eigenvalues()
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    QuasiSpectrum::from_energies(period, vals.into_iter().map(|l| -l.arg() / period))
}

/// Full Floquet decomposition `U v_n = e^{−iε_n T} v_n` with orthonormal
/// eigenvectors.
///
/// Uses the general complex eigensolver, then re-orthonormalizes clusters of
/// computed vectors whose mutual overlap is not negligible (degenerate or
/// nearly degenerate eigenphases).
pub fn eig_unitary(u: &UnitaryOperator, period: f64) -> Result<QuasiSpectrum> {
    let n = u.dim();
    if n == 0 {
        return Err(Error::EmptyInput("unitary operator"));
    }
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::param(format!(
            "period must be positive, got {period}"
        )));
    }
    let residual = u.matrix().unitarity_residual();
    if residual > super::matrix::UNITARY_TOL {
        return Err(Error::contract(format!(
            "operator is not unitary: ‖U†U − I‖_max = {residual:.3e}"
        )));
    }
    let evd = u
        .matrix()
        .as_mat()
        .eigen()
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let lambdas: Vec<Complex64> = evd.S().column_vector().iter().copied().collect();
    let mut order: Vec<usize> = (0..n).collect();
    let energies_raw: Vec<f64> = lambdas
        .iter()
        .map(|&l| phase_to_quasi_energy(l, period))
        .collect();
    order.sort_by(|&a, &b| energies_raw[a].total_cmp(&energies_raw[b]));

    let raw = evd.U();
    let mut vecs = Mat::from_fn(n, n, |i, k| raw[(i, order[k])]);
    let lambdas: Vec<Complex64> = order.iter().map(|&k| lambdas[k]).collect();
    let energies: Vec<f64> = order.iter().map(|&k| energies_raw[k]).collect();

    for k in 0..n {
        let norm = vecs.col(k).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            vecs[(i, k)] /= norm;
        }
    }
    orthonormalize_clusters(&mut vecs);

    let uv = u.matrix().as_mat() * vecs.as_ref();
    let tol = UNITARY_RESIDUAL_PER_DIM * n as f64;
    for k in 0..n {
        let r = (0..n)
            .map(|i| (uv[(i, k)] - lambdas[k] * vecs[(i, k)]).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if r > tol {
            return Err(Error::Eigensolver(format!(
                "eigenpair {k} residual {r:.3e} exceeds {tol:.3e}"
            )));
        }
    }
    Ok(QuasiSpectrum {
        period,
        energies,
        vectors: Some(ComplexMatrix::from_mat(vecs)),
    })
}

/// Group columns into connected components of non-negligible overlap and
/// orthonormalize each component with two passes of modified Gram–Schmidt.
fn orthonormalize_clusters(vecs: &mut Mat<Complex64>) {
    let n = vecs.ncols();
    let gram = vecs.adjoint() * vecs.as_ref();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for j in 0..n {
        for i in 0..j {
            if gram[(i, j)].norm() > CLUSTER_OVERLAP {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for k in 0..n {
        let r = find(&mut parent, k);
        groups.entry(r).or_default().push(k);
    }
    for members in groups.values().filter(|g| g.len() > 1) {
        for _pass in 0..2 {
            for (a, &ka) in members.iter().enumerate() {
                for &kb in &members[..a] {
                    let proj: Complex64 = (0..vecs.nrows())
                        .map(|i| vecs[(i, kb)].conj() * vecs[(i, ka)])
                        .sum();
                    for i in 0..vecs.nrows() {
                        let v = vecs[(i, kb)];
                        vecs[(i, ka)] -= proj * v;
                    }
                }
                let norm = vecs
                    .col(ka)
                    .iter()
                    .map(|z| z.norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                for i in 0..vecs.nrows() {
                    vecs[(i, ka)] /= norm;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, PI};

    use super::*;
    use crate::opalg::pauli::{pauli_site, Axis};
    use crate::opalg::test_support::random_hermitian;

    #[test]
    fn pauli_exponential_identity() {
        let sx = pauli_site(1, 0, Axis::X).unwrap();
        let u = unitary_exp(&sx, FRAC_PI_2).unwrap();
        let expected = sx.matrix().scale(Complex64::new(0.0, -1.0));
        assert!((u.matrix() - &expected).max_abs() < 1e-15);
    }

    #[test]
    fn zero_time_is_identity() {
        let h = random_hermitian(6, 3);
        let u = unitary_exp(&h, 0.0).unwrap();
        assert!((u.matrix() - &ComplexMatrix::identity(6).unwrap()).max_abs() < 1e-13);
    }

    #[test]
    fn group_property() {
        let h = random_hermitian(8, 11);
        let (t1, t2) = (0.37, 1.21);
        let u12 = unitary_exp(&h, t1 + t2).unwrap();
        let prod = unitary_exp(&h, t2)
            .unwrap()
            .then_after(&unitary_exp(&h, t1).unwrap())
            .unwrap();
        assert!((u12.matrix() - prod.matrix()).max_abs() < 1e-10);
    }

    #[test]
    fn sigma_z_spectrum() {
        let z = pauli_site(1, 0, Axis::Z).unwrap();
        let e = eig_hermitian(&z).unwrap();
        assert_eq!(e.values, vec![-1.0, 1.0]);
    }

    #[test]
    fn diagonal_spectrum_sorted() {
        let h = HermitianOperator::from_real_diagonal(&[3.0, -1.0, 2.0, 0.5]).unwrap();
        let e = eig_hermitian(&h).unwrap();
        assert_eq!(e.values, vec![-1.0, 0.5, 2.0, 3.0]);
    }

    #[test]
    fn reconstruction_from_spectral_sum() {
        let h = random_hermitian(8, 5);
        let e = eig_hermitian(&h).unwrap();
        // oracle: H = Σ_k λ_k v_k v_k†, summed entry by entry
        let mut max_dev = 0.0f64;
        for i in 0..8 {
            for j in 0..8 {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..8 {
                    s += e.values[k] * e.vectors.get(i, k) * e.vectors.get(j, k).conj();
                }
                max_dev = max_dev.max((s - h.matrix().get(i, j)).norm());
            }
        }
        assert!(max_dev <= 1e-9, "deviation {max_dev}");
        assert!(e.vectors.unitarity_residual() <= 1e-9);
    }

    #[test]
    fn residuals_within_bound() {
        let h = random_hermitian(16, 8);
        let e = eig_hermitian(&h).unwrap();
        let norm = h.matrix().max_abs();
        for k in 0..16 {
            let v = e.vector(k);
            let hv = h.matrix().apply(&v);
            let r = hv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - e.values[k] * b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(r <= 1e-9 * norm);
        }
    }

    #[test]
    fn empty_operator_rejected() {
        let h = HermitianOperator::new(ComplexMatrix::zeros(0, 0).unwrap()).unwrap();
        assert!(matches!(eig_hermitian(&h), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn identity_has_zero_quasi_energies() {
        let u = UnitaryOperator::identity(5).unwrap();
        let s = eig_unitary(&u, 1.0).unwrap();
        assert!(s.energies.iter().all(|&e| e == 0.0));
        assert!(s.vectors.unwrap().unitarity_residual() < 1e-12);
    }

    #[test]
    fn quasi_energies_match_hamiltonian_mod_zone() {
        let h = random_hermitian(8, 21).scaled(3.0);
        let u = unitary_exp(&h, 1.0).unwrap();
        let s = eig_unitary(&u, 1.0).unwrap();
        let mut expected: Vec<f64> = eig_hermitian(&h)
            .unwrap()
            .values
            .iter()
            .map(|&x| wrap_zone(x, TAU))
            .collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in s.energies.iter().zip(&expected) {
            let d = wrap_symmetric(a - b, TAU).abs();
            assert!(d < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn eigenphases_invariant_under_vector_phase_gauge() {
        let h = random_hermitian(6, 2);
        let u = unitary_exp(&h, 0.8).unwrap();
        let s = eig_unitary(&u, 2.0).unwrap();
        let v = s.vectors.as_ref().unwrap();
        for k in 0..6 {
            let col: Vec<Complex64> = v
                .column(k)
                .iter()
                .map(|z| z * Complex64::from_polar(1.0, 0.7 * k as f64))
                .collect();
            let uv = u.apply(&col);
            let ratio = crate::opalg::inner(&col, &uv);
            let eps = wrap_zone(-ratio.arg() / 2.0, PI);
            assert!((eps - s.energies[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn degenerate_unitary_gets_orthonormal_vectors() {
        // σ^x ⊗ σ^x has two doubly degenerate eigenvalues ±1
        let xx = crate::opalg::pauli::pauli_string(2, &[(0, Axis::X), (1, Axis::X)]).unwrap();
        let u = UnitaryOperator::new(xx.into_matrix()).unwrap();
        let s = eig_unitary(&u, 1.0).unwrap();
        assert!(s.vectors.unwrap().unitarity_residual() < 1e-12);
        assert!((s.energies[0] - 0.0).abs() < 1e-12);
        assert!((s.energies[3] - PI).abs() < 1e-12);
    }

    #[test]
    fn sector_exponential_matches_full() {
        use crate::opalg::pauli::z_parity_sectors;
        let zz = crate::opalg::pauli::pauli_string(3, &[(0, Axis::Z), (1, Axis::Z)]).unwrap();
        let xx = crate::opalg::pauli::pauli_string(3, &[(1, Axis::X), (2, Axis::X)]).unwrap();
        let h = zz.plus(&xx.scaled(0.7)).unwrap();
        let full = unitary_exp(&h, 0.9).unwrap();
        let blocked = unitary_exp_in_sectors(&h, 0.9, &z_parity_sectors(3)).unwrap();
        assert!((full.matrix() - blocked.matrix()).max_abs() < 1e-13);
    }

    #[test]
    fn sector_exponential_rejects_coupling() {
        use crate::opalg::pauli::z_parity_sectors;
        let x = pauli_site(2, 0, Axis::X).unwrap();
        assert!(unitary_exp_in_sectors(&x, 1.0, &z_parity_sectors(2)).is_err());
    }
}
