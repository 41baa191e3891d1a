// SPDX-License-Identifier: Apache-2.0

use chronolab::opalg::{
    binomial, eig_hermitian, eig_unitary, unitary_exp, wrap_symmetric, wrap_zone, ComplexMatrix,
    FockBasis, HermitianOperator,
};
use chronolab::sampling::{unit_draw, Interval};
use chronolab::time_lattice::bouncer::{monodromy, BouncerBasis};
use chronolab::time_lattice::{
    bose_hubbard_time, effective_potential, rwa_phase_crystal, BoseHubbardTimeSpec, BouncerSpec,
    DisorderedRingSpec, PhaseCrystalSpec,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn hermitian(n: usize, entries: &[f64]) -> HermitianOperator {
    let m = ComplexMatrix::from_fn(n, n, |i, j| {
        let (a, b) = (i.min(j), i.max(j));
        let re = entries[(a * n + b) % entries.len()];
        let im = if i == j {
            0.0
        } else {
            entries[(b * n + a) % entries.len()]
        };
        Complex64::new(re, if i < j { im } else { -im })
    })
    .unwrap();
    HermitianOperator::new(m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exponential_is_unitary(n in 1usize..12, entries in prop::collection::vec(-3.0f64..3.0, 16), t in -5.0f64..5.0) {
        let u = unitary_exp(&hermitian(n, &entries), t).unwrap();
        prop_assert!(u.matrix().unitarity_residual() < 1e-11);
    }

    #[test]
    fn eigensystem_reconstructs(n in 1usize..12, entries in prop::collection::vec(-3.0f64..3.0, 16)) {
        let h = hermitian(n, &entries);
        let e = eig_hermitian(&h).unwrap();
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        for k in 0..n {
            let v = e.vector(k);
            let hv = h.matrix().apply(&v);
            let r = hv.iter().zip(&v).map(|(a, b)| (a - b * e.values[k]).norm()).fold(0.0, f64::max);
            prop_assert!(r < 1e-10, "residual {r}");
        }
    }

    #[test]
    fn floquet_phases_match_exponent(n in 1usize..8, entries in prop::collection::vec(-1.0f64..1.0, 16), period in 0.1f64..3.0) {
        let h = hermitian(n, &entries);
        let want: Vec<f64> = {
            let zone = std::f64::consts::TAU / period;
            let mut w: Vec<f64> = eig_hermitian(&h).unwrap().values.iter().map(|&e| wrap_zone(e, zone)).collect();
            w.sort_by(f64::total_cmp);
            w
        };
        let got = eig_unitary(&unitary_exp(&h, period).unwrap(), period).unwrap();
        let zone = got.zone();
        for (a, b) in got.energies.iter().zip(&want) {
            prop_assert!(wrap_symmetric(a - b, zone).abs() < 1e-9);
        }
    }

    #[test]
    fn wrapping_lands_in_the_zone(x in -1e4f64..1e4, zone in 0.01f64..100.0) {
        let y = wrap_zone(x, zone);
        prop_assert!((0.0..zone).contains(&y));
        let z = wrap_symmetric(x, zone);
        prop_assert!(z >= -zone / 2.0 && z < zone / 2.0);
        prop_assert!(wrap_symmetric(y - z, zone).abs() < 1e-9 * zone.max(x.abs()));
    }

    #[test]
    fn draws_are_addressable(seed in any::<u64>(), index in 0u64..1 << 40) {
        let a = unit_draw(seed, "prop", index);
        prop_assert!((0.0..1.0).contains(&a));
        prop_assert_eq!(a.to_bits(), unit_draw(seed, "prop", index).to_bits());
    }

    #[test]
    fn interval_maps_inside(lo in -10.0f64..10.0, w in 0.0f64..5.0, u in 0.0f64..1.0) {
        let i = Interval::new(lo, lo + w).unwrap();
        prop_assert!(i.contains(i.at(u)));
    }

    #[test]
    fn fock_basis_counts_and_indexes(modes in 1usize..6, particles in 0usize..7) {
        let b = FockBasis::new(modes, particles).unwrap();
        prop_assert_eq!(b.len(), binomial(particles + modes - 1, particles).unwrap());
        for (i, occ) in b.states().iter().enumerate() {
            prop_assert_eq!(occ.iter().sum::<u32>() as usize, particles);
            prop_assert_eq!(b.index_of(occ), Some(i));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    // E₀(J) is a minimum of functions linear in J, hence concave.
    #[test]
    fn mott_ground_energy_is_concave_in_hopping(a in -3.0f64..3.0, b in -3.0f64..3.0, u in 0.0f64..20.0) {
        let e = |j: f64| bose_hubbard_time(&BoseHubbardTimeSpec::uniform(4, j, u, 0.0, 4)).unwrap().ground_energy;
        prop_assert!(e(0.5 * (a + b)) >= 0.5 * (e(a) + e(b)) - 1e-9);
    }

    #[test]
    fn phase_crystal_sectors_partition_the_basis(fold in 1usize..8, extra in 0usize..40, mu in -0.01f64..0.01) {
        let n_max = 4 * fold + extra;
        let spec = PhaseCrystalSpec { fold, mu, lambda: 1.0 / 100.0, n_max };
        let spec_levels = rwa_phase_crystal(&spec).unwrap();
        prop_assert_eq!(spec_levels.fold(), fold);
        for m in 0..fold {
            prop_assert_eq!(spec_levels.levels[m].len(), (m..=n_max).step_by(fold).count());
            prop_assert_eq!(spec_levels.flagged[m].len(), spec_levels.levels[m].len());
        }
        prop_assert!(spec.commutator_norm().unwrap() < 1e-12);
    }
}

#[test]
fn mott_energy_falls_with_hopping_at_unit_filling() {
    // deep in the insulator the energy is −O(J²/U), so it decreases with |J|
    let e: Vec<f64> = [0.0, 0.5, 1.0, 2.0]
        .iter()
        .map(|&j| {
            bose_hubbard_time(&BoseHubbardTimeSpec::uniform(5, j, 20.0, 0.0, 5))
                .unwrap()
                .ground_energy
        })
        .collect();
    assert!(e[0].abs() < 1e-12);
    assert!(e.windows(2).all(|w| w[1] < w[0]), "{e:?}");
}

#[test]
fn undriven_bouncer_keeps_its_levels() {
    let spec = BouncerSpec::new(0.0, 1.1, 2);
    let basis = BouncerBasis::new(spec.basis).unwrap();
    let u = monodromy(&spec, &basis).unwrap();
    let fl = eig_unitary(&u, spec.period()).unwrap();
    let mut want: Vec<f64> = basis
        .energies
        .iter()
        .map(|&e| wrap_zone(e, spec.omega))
        .collect();
    want.sort_by(f64::total_cmp);
    for (a, b) in fl.energies.iter().zip(&want) {
        assert!(wrap_symmetric(a - b, spec.omega).abs() < 1e-8, "{a} vs {b}");
    }
}

#[test]
fn ring_potentials_decorrelate_across_seeds() {
    let spec = |seed| DisorderedRingSpec {
        amplitude: 1.0,
        k0: 100.0,
        harmonics: 300,
        omega: 1.0,
        seed,
    };
    let pots: Vec<_> = (0..4)
        .map(|s| effective_potential(&spec(s), 4096).unwrap())
        .collect();
    for a in 0..pots.len() {
        for b in a + 1..pots.len() {
            let c = pots[a].cross_correlation_peak(&pots[b]).unwrap();
            assert!(c < 0.35, "seeds {a} and {b}: {c}");
        }
    }
    let same = pots[0].cross_correlation_peak(&pots[0]).unwrap();
    assert!((same - 1.0).abs() < 1e-12);
    let width = pots[0].empirical_correlation_length().unwrap();
    let want = spec(0).correlation_length();
    assert!((width / want - 1.0).abs() < 0.2, "{width} vs {want}");
}
