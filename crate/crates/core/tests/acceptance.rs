// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite. One PASS/FAIL line per criterion; exits non-zero if any
//! criterion fails. `ACCEPTANCE_ONLY=3,7` restricts the run to a subset.

use std::f64::consts::{PI, TAU};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use chronolab::bosonic_ring::{
    gpe_ground_state, soliton_profile, symmetry_breaking_threshold, GpeParams, RingGrid,
};
use chronolab::disorder_lab::{run_ensemble, EnsembleSpec, InitialState, Observable, RunOptions};
use chronolab::floquet_observables::{
    dft_series, magnetization_trace, r_statistic, FrequencyGrid, MagnitudeSpectrum, R_POISSON,
};
use chronolab::opalg::{pauli_site, Axis, QuasiSpectrum};
use chronolab::sampling::{unit_draw, Interval};
use chronolab::spin_models::{build_floquet_ion, ElseSpec, IonSpec, KhemaniSpec, SpinModelSpec};
use chronolab::time_lattice::{
    bose_hubbard_time, bouncer_floquet, lloyd_localization, ring_anderson, rwa_phase_crystal,
    tb_ring_eigensystem, time_profile, BoseHubbardTimeSpec, BouncerSpec, DisorderedRingSpec,
    LloydSpec, PhaseCrystalSpec,
};
use chronolab::two_mode_dtc::{gap_scaling, TwoModeParams};
use chronolab::Result;

type Check = Result<(bool, String)>;

// 1: subharmonic lock-in
const ELSE_SITES: usize = 8;
const ELSE_EPSILON: f64 = 0.02;
const ELSE_REALIZATIONS: usize = 50;
const ELSE_PERIODS: usize = 200;
const ELSE_BUDGET: Duration = Duration::from_secs(300);

// 2: spectral peak at −π/T
const SG_SITES: usize = 8;
const SG_REALIZATIONS: usize = 100;
const SG_JZ: [f64; 4] = [0.0, 0.05, 0.1, 0.2];
const SG_GRID_POINTS: usize = 400;
const SG_PROBE_SITE: usize = 3;
const SG_BUDGET: Duration = Duration::from_secs(600);

// 3: level statistics
const ORACLE_SPECTRA: usize = 200;
const ORACLE_LEVELS: usize = 1024;
const ORACLE_TOL: f64 = 0.005;
const MBL_SITES: usize = 10;
const MBL_REALIZATIONS: usize = 200;
const MBL_TOL: f64 = 0.03;

// 4: bright soliton
const GPE_POINTS: usize = 256;
const GPE_BRACKET: (f64, f64) = (-15.0, -5.0);
const GPE_BISECTION_WIDTH: f64 = 0.05;
const GPE_BROKEN_CONTRAST: f64 = 1e-3;
const GPE_THRESHOLD_TOL: f64 = 0.05;
const GPE_SOLITON_GAMMA: f64 = -15.0;
const GPE_MIN_OVERLAP: f64 = 0.99;

// 5: cat gap
const CAT_RATIO: f64 = 4.0;
const CAT_MIN_R2: f64 = 0.98;

// 6: exact alternation
const ION_SITES: usize = 8;
const ION_PERIODS: usize = 100;
const ION_TOL: f64 = 1e-10;

// 7: Lloyd model
const LLOYD_SITES: usize = 200;
const LLOYD_HOPPING: f64 = 1.0;
const LLOYD_WIDTH: f64 = 1.0;
const LLOYD_REALIZATIONS: u64 = 20;
const LLOYD_TOL: f64 = 0.15;
const LLOYD_CYCLES: usize = 3;

// 8: disordered ring
const RING_AMPLITUDE: f64 = 40.0;
const RING_K0: f64 = 40.0;
const RING_HARMONICS: usize = 120;
const RING_CUTOFF: usize = 480;
const RING_POINTS: usize = 2048;
const RING_SEEDS: u64 = 5;
const RING_MIN_FRACTION: f64 = 0.8;
const RING_STRETCH: f64 = 1.5;

// 9: phase-space crystal
const PC_FOLD: usize = 10;
const PC_MU: f64 = 3.2e-3;
const PC_LAMBDA: f64 = 1.0 / 205.0;
const PC_N_MAX: usize = 400;
const PC_COMMUTATOR_TOL: f64 = 1e-10;

// 10: Mott state
const MOTT_SITES: usize = 5;
const MOTT_U_OVER_J: f64 = 20.0;
const MOTT_MAX_VARIANCE: f64 = 0.1;
const MOTT_CONDENSATE_TOL: f64 = 1e-8;

// 11: bouncer
const BOUNCER_DRIVE: f64 = 0.06;
const BOUNCER_OMEGA: f64 = 1.1;
const BOUNCER_FOLD: usize = 2;
/// "J ≪ ω" read as at least three decades.
const BOUNCER_MAX_SPLITTING_RATIO: f64 = 1e-3;
const BOUNCER_MIN_EXCHANGE: f64 = 0.9;

fn else_peak(j: Interval) -> Result<(MagnitudeSpectrum, Duration)> {
    let start = Instant::now();
    let mut model = ElseSpec::standard(ELSE_SITES, 1.0, 1.0, 0.3, ELSE_EPSILON);
    model.j = j;
    let spec = EnsembleSpec {
        model: SpinModelSpec::Else(model),
        realizations: ELSE_REALIZATIONS,
        master_seed: 1,
        periods: ELSE_PERIODS,
        pipeline: vec![Observable::Magnetization {
            axis: Axis::Z,
            initial: InitialState::ZUp,
        }],
    };
    let record = run_ensemble(&spec, &RunOptions::default())?;
    let series = record
        .averaged_series("magnetization_z")
        .expect("pipeline records magnetization");
    Ok((dft_series(&series)?, start.elapsed()))
}

fn within_bins(spectrum: &MagnitudeSpectrum, k: usize, target: f64) -> bool {
    (spectrum.frequencies[k] - target).abs() <= spectrum.bin_width() * (1.0 + 1e-9)
}

fn subharmonic_lock_in() -> Check {
    let (locked, t_locked) = else_peak(Interval::new(0.5, 1.5)?)?;
    let (free, t_free) = else_peak(Interval::point(0.0))?;
    let k = locked.argmax();
    let c = free.argmax();
    let locked_ok = within_bins(&locked, k, 0.5);
    let control_ok = within_bins(&free, c, 0.5 * (1.0 - ELSE_EPSILON))
        || within_bins(&free, c, 0.5 * (1.0 + ELSE_EPSILON));
    let elapsed = t_locked + t_free;
    Ok((
        locked_ok && control_ok && elapsed <= ELSE_BUDGET,
        format!(
            "peak ν={:.3} (bin {:.3}); J≡0 control peak ν={:.3}, expected {:.3} or {:.3}; {:.0} s",
            locked.frequencies[k],
            locked.bin_width(),
            free.frequencies[c],
            0.5 * (1.0 - ELSE_EPSILON),
            0.5 * (1.0 + ELSE_EPSILON),
            elapsed.as_secs_f64()
        ),
    ))
}

fn spectral_peak() -> Check {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for jz in SG_JZ {
        let model = KhemaniSpec::pi_spin_glass(SG_SITES, jz);
        let period = model.period();
        let spec = EnsembleSpec {
            model: SpinModelSpec::Khemani(model),
            realizations: SG_REALIZATIONS,
            master_seed: 1,
            periods: 0,
            pipeline: vec![Observable::SpectralFunction {
                site: SG_PROBE_SITE,
                points: SG_GRID_POINTS,
                eta: None,
            }],
        };
        let record = run_ensemble(&spec, &RunOptions::default())?;
        let a = &record.aggregates.series[&format!("spectral_function_{SG_PROBE_SITE}")].mean;
        let grid = FrequencyGrid::new(period, SG_GRID_POINTS)?;
        let peak = (0..a.len())
            .max_by(|&i, &j| a[i].total_cmp(&a[j]))
            .unwrap_or(0);
        let bins = grid.bin_distance(peak, grid.nearest(-PI / period));
        ok &= bins <= 1;
        parts.push(format!("Jz={jz}: {bins} bin(s)"));
    }
    let elapsed = start.elapsed();
    Ok((
        ok && elapsed <= SG_BUDGET,
        format!(
            "peak distance from −π/T: {}; {:.0} s",
            parts.join(", "),
            elapsed.as_secs_f64()
        ),
    ))
}

fn level_statistics() -> Check {
    let mut sum = 0.0;
    let mut count = 0usize;
    for s in 0..ORACLE_SPECTRA {
        let phases =
            (0..ORACLE_LEVELS).map(|k| TAU * unit_draw(s as u64, "phase_oracle", k as u64));
        let r = r_statistic(&QuasiSpectrum::from_energies(1.0, phases)?)?;
        sum += r.mean * r.count as f64;
        count += r.count;
    }
    let oracle = sum / count as f64;
    let spec = EnsembleSpec {
        model: SpinModelSpec::Khemani(KhemaniSpec::pi_spin_glass(MBL_SITES, 0.05)),
        realizations: MBL_REALIZATIONS,
        master_seed: 1,
        periods: 0,
        pipeline: vec![Observable::GapRatio],
    };
    let record = run_ensemble(&spec, &RunOptions::default())?;
    let mbl = record.aggregates.scalars["gap_ratio"];
    Ok((
        (oracle - R_POISSON).abs() <= ORACLE_TOL && (mbl.mean - R_POISSON).abs() <= MBL_TOL,
        format!(
            "uniform phases r̄={oracle:.4}; L={MBL_SITES} Floquet r̄={:.4}±{:.4} over {} realizations (target {R_POISSON:.4})",
            mbl.mean, mbl.sem, record.aggregates.succeeded
        ),
    ))
}

fn gpe_soliton() -> Check {
    let grid = RingGrid::new(GPE_POINTS)?;
    let b = symmetry_breaking_threshold(
        grid,
        GPE_BRACKET.0,
        GPE_BRACKET.1,
        GPE_BISECTION_WIDTH,
        GPE_BROKEN_CONTRAST,
    )?;
    let rel = (b.gamma / -(PI * PI) - 1.0).abs();
    let gs = gpe_ground_state(&GpeParams::new(GPE_SOLITON_GAMMA), grid)?;
    let sol = soliton_profile(GPE_SOLITON_GAMMA, gs.state.center_of_mass(), grid)?;
    let overlap = gs.state.overlap(&sol)?;
    Ok((
        rel <= GPE_THRESHOLD_TOL && overlap >= GPE_MIN_OVERLAP,
        format!(
            "threshold γ={:.3} ({:.2}% from −π²); soliton overlap {overlap:.4}",
            b.gamma,
            100.0 * rel
        ),
    ))
}

fn cat_gap() -> Check {
    let particles: Vec<usize> = (10..=60).step_by(5).collect();
    let s = gap_scaling(
        &TwoModeParams::with_ratio(1.0, -CAT_RATIO, particles[0]),
        &particles,
    )?;
    let kept = s.points.iter().filter(|p| !p.underflow).count();
    Ok((
        s.fit.r_squared >= CAT_MIN_R2 && s.fit.slope > 0.0 && kept == particles.len(),
        format!(
            "ln(1/gap) vs N: slope {:.4}, R²={:.5}, {kept}/{} points",
            s.fit.slope,
            s.fit.r_squared,
            particles.len()
        ),
    ))
}

fn exact_alternation() -> Check {
    let model = IonSpec::new(ION_SITES, 0.0, 1.0, 0.0);
    let u = build_floquet_ion(&model, &model.sample(0)?)?;
    let psi = InitialState::XUp.vector(ION_SITES)?;
    let mut worst = 0.0f64;
    for site in 0..ION_SITES {
        let op = pauli_site(ION_SITES, site, Axis::X)?;
        let ts = magnetization_trace(&u, &psi, &op, ION_PERIODS, model.period())?;
        for (n, v) in ts.values.iter().enumerate() {
            let expect = if n % 2 == 0 { 1.0 } else { -1.0 };
            worst = worst.max((v - expect).abs());
        }
    }
    Ok((
        worst <= ION_TOL,
        format!("max |⟨σˣ(nT)⟩ − (−1)ⁿ| = {worst:.2e} over {ION_PERIODS} periods"),
    ))
}

fn lloyd() -> Check {
    let mut deviations = Vec::new();
    let mut periodic = true;
    for r in 0..LLOYD_REALIZATIONS {
        let spec = LloydSpec::new(LLOYD_SITES, LLOYD_HOPPING, LLOYD_WIDTH, 1000 + r);
        let report = lloyd_localization(&spec)?;
        deviations.push(report.relative_deviation().unwrap_or(f64::INFINITY));
        let eig = tb_ring_eigensystem(&spec.ring()?)?;
        let weights: Vec<f64> = (0..LLOYD_SITES)
            .map(|j| eig.vectors.get(j, 0).norm_sqr())
            .collect();
        let profile = time_profile(&weights, spec.period, LLOYD_CYCLES)?;
        periodic &= (LLOYD_SITES..profile.values.len())
            .all(|n| profile.values[n] == profile.values[n - LLOYD_SITES]);
    }
    deviations.sort_by(f64::total_cmp);
    let m = deviations.len() / 2;
    let median = 0.5 * (deviations[m - 1] + deviations[m]);
    Ok((
        median <= LLOYD_TOL && periodic,
        format!("median |ℓ_fit − ℓ_TM|/ℓ_TM = {median:.3} over {LLOYD_REALIZATIONS} realizations; profile period sT exact: {periodic}"),
    ))
}

fn ring_localization() -> Check {
    let (mut below, mut below_n, mut stretch, mut stretch_n) = (0usize, 0usize, 0usize, 0usize);
    let mut warned = false;
    for seed in 0..RING_SEEDS {
        let spec = DisorderedRingSpec {
            amplitude: RING_AMPLITUDE,
            k0: RING_K0,
            harmonics: RING_HARMONICS,
            omega: 1.0,
            seed,
        };
        let r = ring_anderson(&spec, RING_CUTOFF, RING_POINTS)?;
        warned |= r.truncated;
        let (f, n) = r.localized_fraction(r.disorder_std);
        below += (f * n as f64).round() as usize;
        below_n += n;
        let (f, n) = r.localized_fraction(RING_STRETCH * r.disorder_std);
        stretch += (f * n as f64).round() as usize;
        stretch_n += n;
    }
    let f1 = below as f64 / below_n as f64;
    let f2 = stretch as f64 / stretch_n as f64;
    Ok((
        f1 >= RING_MIN_FRACTION && f2 >= RING_MIN_FRACTION && !warned,
        format!("localized (R² ≥ 0.9): {below}/{below_n} = {f1:.3} below σ_V; {stretch}/{stretch_n} = {f2:.3} below 1.5σ_V"),
    ))
}

fn phase_crystal() -> Check {
    let spec = PhaseCrystalSpec {
        fold: PC_FOLD,
        mu: PC_MU,
        lambda: PC_LAMBDA,
        n_max: PC_N_MAX,
    };
    let comm = spec.commutator_norm()?;
    let sp = rwa_phase_crystal(&spec)?;
    let resolved = sp.lowest_band_is_sector_resolved();
    let bw = sp.bandwidth(0).unwrap_or(f64::INFINITY);
    let gap = sp.gap(0).unwrap_or(f64::NAN);
    let ok = comm <= PC_COMMUTATOR_TOL && resolved && bw < gap;
    Ok((
        ok,
        format!("‖[g, e^(−i2πn/s)]‖ = {comm:.1e}; one level per sector: {resolved}; bandwidth {bw:.3e} vs gap {gap:.3e}"),
    ))
}

fn mott() -> Check {
    let r = bose_hubbard_time(&BoseHubbardTimeSpec::uniform(
        MOTT_SITES,
        1.0,
        MOTT_U_OVER_J,
        0.0,
        MOTT_SITES,
    ))?;
    let worst = r.number_variance.iter().copied().fold(0.0, f64::max);
    let free = bose_hubbard_time(&BoseHubbardTimeSpec::uniform(
        MOTT_SITES, 1.0, 0.0, 0.0, MOTT_SITES,
    ))?;
    // every particle in the k = 0 orbital, single-particle energy −J
    let condensate = -(MOTT_SITES as f64);
    let dev = (free.ground_energy - condensate).abs();
    Ok((
        worst < MOTT_MAX_VARIANCE && r.gap > 0.0 && dev <= MOTT_CONDENSATE_TOL,
        format!(
            "max var(n_i) = {worst:.4}, gap {:.3}; U=0 energy off by {dev:.1e}",
            r.gap
        ),
    ))
}

fn bouncer() -> Check {
    let r = bouncer_floquet(&BouncerSpec::new(
        BOUNCER_DRIVE,
        BOUNCER_OMEGA,
        BOUNCER_FOLD,
    ))?;
    let ratio = r.splitting / BOUNCER_OMEGA;
    let exchange = r.min_exchange_overlap();
    Ok((
        ratio <= BOUNCER_MAX_SPLITTING_RATIO && exchange >= BOUNCER_MIN_EXCHANGE,
        format!(
            "level {} pair {:?}: J = {:.3e} (J/ω = {ratio:.1e}); min |⟨φ_(j+1)|U φ_j⟩| = {exchange:.6}",
            r.resonant_level, r.resonant_states, r.splitting
        ),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 11] = [
        ("subharmonic lock-in", subharmonic_lock_in),
        ("spectral peak at −π/T", spectral_peak),
        ("level statistics", level_statistics),
        ("soliton threshold and profile", gpe_soliton),
        ("cat gap scaling", cat_gap),
        ("exact period doubling", exact_alternation),
        ("Lloyd localization length", lloyd),
        ("disordered ring localization", ring_localization),
        ("phase-space crystal bands", phase_crystal),
        ("Mott state in time", mott),
        ("bouncer resonance", bouncer),
    ];
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|s| s.trim().parse().ok()).collect());
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = i + 1;
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let (pass, detail) = match check() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!(
            "{} [{id:>2}] {name}: {detail} ({:.1} s)",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion/criteria failed");
        ExitCode::FAILURE
    }
}
