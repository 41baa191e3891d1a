// SPDX-License-Identifier: Apache-2.0

//! The experiment catalog: parameter schemas and runners.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use chronolab::bosonic_ring::{
    gpe_ground_state, soliton_profile, symmetry_breaking_threshold, GpeParams, RingGrid,
};
use chronolab::disorder_lab::{
    persist, run_ensemble, scan_cell, write_series_csv, write_spectrum_csv, EnsembleSpec,
    FloatEncoding, InitialState, Observable, RunOptions, RunRecord, ScanGrid,
};
use chronolab::floquet_observables::{dft_series, FrequencyGrid};
use chronolab::opalg::Axis;
use chronolab::sampling::Interval;
use chronolab::spin_models::{
    Boundary, ElseSpec, IonSpec, KhemaniSpec, NvSpec, SpinModelSpec, YaoSpec,
};
use chronolab::table::write_csv;
use chronolab::time_lattice::{
    bose_hubbard_time, bouncer_floquet, effective_potential, lloyd_localization, ring_anderson,
    rwa_phase_crystal, secular_bands, tb_ring_eigensystem, time_profile, BoseHubbardTimeSpec,
    BouncerSpec, DisorderedRingSpec, LloydSpec, PendulumSpec, PhaseCrystalSpec,
};
use chronolab::two_mode_dtc::{classify_ground, gap_scaling, TwoModeParams};
use chronolab::Result;
use serde::Serialize;

use crate::config::{ExperimentConfig, Kind, ParamSpec, Params, Range, Violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Experiment {
    ElseDtc,
    KhemaniSg,
    YaoPhaseDiagram,
    IonChain,
    NvEnsemble,
    GpeRing,
    TwoModeCat,
    LloydTime,
    RingAnderson,
    SecularBands,
    PhaseCrystal,
    Bouncer,
    MottTime,
}

pub const ALL: [Experiment; 13] = [
    Experiment::ElseDtc,
    Experiment::KhemaniSg,
    Experiment::YaoPhaseDiagram,
    Experiment::IonChain,
    Experiment::NvEnsemble,
    Experiment::GpeRing,
    Experiment::TwoModeCat,
    Experiment::LloydTime,
    Experiment::RingAnderson,
    Experiment::SecularBands,
    Experiment::PhaseCrystal,
    Experiment::Bouncer,
    Experiment::MottTime,
];

pub fn names() -> Vec<&'static str> {
    ALL.iter().map(|e| e.name()).collect()
}

/// Largest chain for the dense spin-model experiments (`2^14` states).
const MAX_SITES: i64 = 14;

fn int(min: i64, max: i64) -> Kind {
    Kind::Int { min, max }
}

fn float(range: Range) -> Kind {
    Kind::Float { range }
}

fn sites(default: i64, max: i64) -> ParamSpec {
    ParamSpec::optional("sites", int(2, max), default, "chain length")
}

fn realizations(default: i64) -> ParamSpec {
    ParamSpec::optional(
        "realizations",
        int(1, 1_000_000),
        default,
        "disorder realizations",
    )
}

fn periods(default: i64) -> ParamSpec {
    ParamSpec::optional(
        "periods",
        int(4, 1_000_000),
        default,
        "drive periods in the time trace",
    )
}

fn epsilon() -> ParamSpec {
    ParamSpec::required(
        "epsilon",
        float(Range::FRACTION),
        "fractional flip-angle error",
    )
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::ElseDtc => "else_dtc",
            Self::KhemaniSg => "khemani_sg",
            Self::YaoPhaseDiagram => "yao_phase_diagram",
            Self::IonChain => "ion_chain",
            Self::NvEnsemble => "nv_ensemble",
            Self::GpeRing => "gpe_ring",
            Self::TwoModeCat => "two_mode_cat",
            Self::LloydTime => "lloyd_time",
            Self::RingAnderson => "ring_anderson",
            Self::SecularBands => "secular_bands",
            Self::PhaseCrystal => "phase_crystal",
            Self::Bouncer => "bouncer",
            Self::MottTime => "mott_time",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        ALL.into_iter().find(|e| e.name() == name)
    }

    pub fn description(self) -> &'static str {
        match self {
            Self::ElseDtc => {
                "disordered Ising chain with imperfect global flips; magnetization trace and DFT"
            }
            Self::KhemaniSg => {
                "pi-spin-glass drive; averaged spectral function and level statistics"
            }
            Self::YaoPhaseDiagram => "subharmonic response over a (jz, epsilon) grid",
            Self::IonChain => "trapped-ion chain with power-law couplings; x magnetization trace",
            Self::NvEnsemble => "dipolar spin ensemble at random positions; x magnetization trace",
            Self::GpeRing => "mean-field ground state on a ring and bright-soliton comparison",
            Self::TwoModeCat => "two-mode boson gap scaling and ground-state classification",
            Self::LloydTime => "Lorentzian-disordered time lattice; localization lengths",
            Self::RingAnderson => "correlated temporal disorder on a ring; localized fraction",
            Self::SecularBands => "band structure of the resonant pendulum",
            Self::PhaseCrystal => "rotating-frame phase-space crystal levels per sector",
            Self::Bouncer => "driven bouncer Floquet resonance and Wannier packets",
            Self::MottTime => "bosons on a time lattice; number variance and coherence",
        }
    }

    pub fn schema(self) -> Vec<ParamSpec> {
        use ParamSpec as P;
        let pos = || float(Range::POSITIVE);
        let nonneg = || float(Range::NON_NEGATIVE);
        let any = || float(Range::ANY);
        match self {
            Self::ElseDtc => vec![
                sites(8, MAX_SITES),
                P::optional(
                    "j",
                    nonneg(),
                    1.0,
                    "Ising coupling scale J; J_i ∈ [J/2, 3J/2]",
                ),
                P::optional(
                    "hz",
                    nonneg(),
                    1.0,
                    "longitudinal field scale; h^z_i ∈ [0, hz]",
                ),
                P::optional("h", nonneg(), 0.3, "transverse field scale; h^x_i ∈ [0, h]"),
                epsilon(),
                P::optional("t2", pos(), 1.0, "duration of the Ising step"),
                P::optional(
                    "initial",
                    Kind::Choice(&["z_up", "z_down"]),
                    "z_up",
                    "initial product state",
                ),
                realizations(50),
                periods(200),
            ],
            Self::KhemaniSg => vec![
                sites(8, MAX_SITES),
                P::optional("jz", nonneg(), 0.05, "J_z t2"),
                P::optional("h_lo", any(), 1.512, "lower edge of h_i t1"),
                P::optional("h_hi", any(), 1.551, "upper edge of h_i t1"),
                P::optional("j_lo", any(), 0.393, "lower edge of J_i t2"),
                P::optional("j_hi", any(), 1.492, "upper edge of J_i t2"),
                realizations(100),
                P::optional(
                    "site",
                    int(0, MAX_SITES - 1),
                    3,
                    "probe site of the spectral function",
                ),
                P::optional("points", int(2, 100_000), 400, "frequency grid points"),
                P::optional(
                    "gap_ratio",
                    Kind::Bool,
                    true,
                    "also compute the level-spacing ratio",
                ),
            ],
            Self::YaoPhaseDiagram => vec![
                sites(8, MAX_SITES),
                P::optional(
                    "jz",
                    Kind::FloatList {
                        range: Range::NON_NEGATIVE,
                        min_len: 1,
                    },
                    vec![0.0, 0.05, 0.1, 0.15, 0.2],
                    "interaction axis",
                ),
                P::optional(
                    "epsilon",
                    Kind::FloatList {
                        range: Range::FRACTION,
                        min_len: 1,
                    },
                    vec![0.0, 0.025, 0.05, 0.075, 0.1],
                    "flip-error axis",
                ),
                P::optional("hz", nonneg(), 1.0, "field disorder; h^z_i ∈ [0, hz]"),
                P::optional(
                    "alpha",
                    nonneg(),
                    0.0,
                    "power-law exponent; 0 keeps nearest neighbours",
                ),
                realizations(20),
                periods(100),
            ],
            Self::IonChain => vec![
                sites(8, MAX_SITES),
                epsilon(),
                P::optional("j0", any(), 1.0, "coupling amplitude"),
                P::optional("alpha", pos(), 1.5, "power-law exponent"),
                P::optional("w", nonneg(), 0.0, "field disorder; h_i ∈ [0, w]"),
                realizations(1),
                periods(100),
            ],
            Self::NvEnsemble => vec![
                sites(8, chronolab::spin_models::NV_MAX_SITES as i64),
                P::optional("tau1", pos(), 1.0, "x-drive duration"),
                P::optional("tau2", pos(), 1.0, "y-pulse duration"),
                P::optional("omega_x", any(), 0.1, "x drive strength"),
                P::optional(
                    "omega_y",
                    any(),
                    FRAC_PI_2,
                    "y pulse strength; θ = 2 omega_y tau2",
                ),
                P::optional(
                    "delta",
                    nonneg(),
                    0.5,
                    "on-site disorder; Δ_i ∈ [−delta, delta]",
                ),
                P::optional("j", any(), 0.05, "dipolar coupling"),
                realizations(10),
                periods(100),
            ],
            Self::GpeRing => vec![
                P::optional("gamma", any(), -15.0, "g0 (N − 1)"),
                P::optional("flux", any(), 0.0, "ring flux α"),
                P::optional("points", int(32, 1 << 16), 256, "grid points"),
                P::optional(
                    "threshold",
                    Kind::Bool,
                    false,
                    "also bisect for the symmetry-breaking γ",
                ),
            ],
            Self::TwoModeCat => vec![
                P::optional("tunneling", pos(), 1.0, "mode splitting J"),
                P::optional("ratio", any(), 4.0, "N(U − 2U12)/J"),
                P::optional(
                    "particles",
                    Kind::IntList {
                        min: 2,
                        max: 2000,
                        min_len: 2,
                    },
                    vec![10, 15, 20, 25, 30, 35, 40, 45, 50, 55, 60],
                    "particle numbers of the gap scan",
                ),
                P::optional(
                    "classify_particles",
                    int(1, 2000),
                    40,
                    "N of the ground-state classification",
                ),
            ],
            Self::LloydTime => vec![
                P::optional("sites", int(2, 1 << 14), 200, "time-lattice sites s"),
                P::optional("hopping", pos(), 1.0, "hopping J"),
                P::optional("width", nonneg(), 1.0, "Lorentzian half width"),
                P::optional("window", pos(), 0.5, "|E| window of the length estimate"),
                P::optional("period", pos(), 1.0, "drive period T"),
                realizations(20),
                P::optional(
                    "cycles",
                    int(1, 10_000),
                    3,
                    "repetitions of the lab-frame profile",
                ),
            ],
            Self::RingAnderson => vec![
                P::optional("amplitude", nonneg(), 40.0, "disorder strength V0"),
                P::optional("k0", pos(), 40.0, "envelope width of the harmonics"),
                P::optional("harmonics", int(1, 100_000), 120, "harmonics kept"),
                P::optional("omega", pos(), 1.0, "drive frequency"),
                P::optional("cutoff", int(1, 4096), 480, "plane-wave cutoff"),
                P::optional("points", int(16, 1 << 20), 2048, "ring grid points"),
            ],
            Self::SecularBands => vec![
                P::optional("mass", pos(), 1.0, "effective mass"),
                P::optional("amplitude", any(), 1.0, "lattice depth V0"),
                P::optional("fold", int(1, 1000), 2, "lattice period s"),
                P::optional("cutoff", int(1, 4096), 12, "plane-wave cutoff"),
                P::optional("bands", int(1, 1000), 4, "bands reported"),
                P::optional("points", int(2, 100_000), 101, "quasi-momenta"),
            ],
            Self::PhaseCrystal => vec![
                P::optional("fold", int(1, 1000), 10, "crystal order s"),
                P::optional("mu", any(), 3.2e-3, "drive strength μ"),
                P::optional("lambda", pos(), 1.0 / 205.0, "effective Planck constant λ"),
                P::optional("n_max", int(4, 1 << 14), 400, "oscillator cutoff"),
            ],
            Self::Bouncer => vec![
                P::optional("drive", any(), 0.06, "drive amplitude λ"),
                P::optional("omega", pos(), 1.1, "drive frequency ω"),
                P::optional("resonance", int(1, 100), 2, "resonance order s"),
                P::optional("basis", int(4, 4096), 96, "unperturbed levels kept"),
                P::optional("steps", int(256, 1 << 20), 512, "time steps per period"),
                P::optional("z_max", pos(), 30.0, "extent of the packet profile"),
                P::optional(
                    "profile_points",
                    int(2, 1 << 16),
                    121,
                    "points of the packet profile",
                ),
            ],
            Self::MottTime => vec![
                P::optional("sites", int(2, 64), 5, "time-lattice sites s"),
                P::optional("particles", int(1, 256), 5, "bosons N"),
                P::optional("hopping", any(), 1.0, "hopping J"),
                P::optional("u", any(), 20.0, "on-site interaction"),
                P::optional(
                    "u_off",
                    any(),
                    0.0,
                    "uniform interaction between distinct sites",
                ),
            ],
        }
    }

    /// Constraints spanning several parameters; run after each parameter
    /// passed its own check.
    pub fn cross_check(self, p: &Params) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut bad = |path: &str, message: String| {
            out.push(Violation {
                path: format!("params.{path}"),
                message,
            })
        };
        match self {
            Self::KhemaniSg => {
                if p.float("h_lo") > p.float("h_hi") {
                    bad("h_lo", "exceeds h_hi".into());
                }
                if p.float("j_lo") > p.float("j_hi") {
                    bad("j_lo", "exceeds j_hi".into());
                }
                if p.int("site") >= p.int("sites") {
                    bad(
                        "site",
                        format!(
                            "{} is outside the chain of {}",
                            p.int("site"),
                            p.int("sites")
                        ),
                    );
                }
            }
            Self::YaoPhaseDiagram => {
                for axis in ["jz", "epsilon"] {
                    if p.floats(axis).windows(2).any(|w| !(w[0] < w[1])) {
                        bad(axis, "must be strictly ascending".into());
                    }
                }
            }
            Self::TwoModeCat => {
                if p.ints("particles").windows(2).any(|w| w[1] <= w[0]) {
                    bad("particles", "must be strictly ascending".into());
                }
            }
            Self::SecularBands => {
                if p.int("bands") > 2 * p.int("cutoff") + 1 {
                    bad(
                        "bands",
                        format!("exceeds the basis size {}", 2 * p.int("cutoff") + 1),
                    );
                }
            }
            Self::PhaseCrystal => {
                if p.int("n_max") < 4 * p.int("fold") {
                    bad(
                        "n_max",
                        format!("must be at least 4·fold = {}", 4 * p.int("fold")),
                    );
                }
            }
            Self::Bouncer => {
                if p.float("drive").abs() >= p.float("omega") {
                    bad("drive", "must be small compared with omega".into());
                }
            }
            Self::MottTime if p.float("u_off").abs() > p.float("u").abs() => {
                bad(
                    "u_off",
                    "exceeds the on-site interaction in magnitude".into(),
                );
            }
            _ => {}
        }
        out
    }

    pub fn run(
        self,
        config: &ExperimentConfig,
        out: &mut Artifacts,
        options: &RunOptions,
    ) -> Result<()> {
        let p = &config.params;
        let seed = config.seed;
        match self {
            Self::ElseDtc => {
                let mut model = ElseSpec::standard(
                    p.int("sites"),
                    p.float("j"),
                    p.float("hz"),
                    p.float("h"),
                    p.float("epsilon"),
                );
                model.t2 = p.float("t2");
                let initial = if p.choice("initial") == "z_down" {
                    InitialState::ZDown
                } else {
                    InitialState::ZUp
                };
                trace_ensemble(
                    SpinModelSpec::Else(model),
                    Axis::Z,
                    initial,
                    p,
                    seed,
                    out,
                    options,
                )
            }
            Self::IonChain => {
                let mut model = IonSpec::new(
                    p.int("sites"),
                    p.float("epsilon"),
                    p.float("j0"),
                    p.float("w"),
                );
                model.alpha = p.float("alpha");
                trace_ensemble(
                    SpinModelSpec::Ion(model),
                    Axis::X,
                    InitialState::XUp,
                    p,
                    seed,
                    out,
                    options,
                )
            }
            Self::NvEnsemble => {
                let d = p.float("delta");
                let model = NvSpec {
                    sites: p.int("sites"),
                    tau1: p.float("tau1"),
                    tau2: p.float("tau2"),
                    omega_x: p.float("omega_x"),
                    omega_y: p.float("omega_y"),
                    delta: Interval::new(-d, d)?,
                    j: p.float("j"),
                    min_separation: 0.1,
                };
                trace_ensemble(
                    SpinModelSpec::Nv(model),
                    Axis::X,
                    InitialState::XUp,
                    p,
                    seed,
                    out,
                    options,
                )
            }
            Self::KhemaniSg => khemani(p, seed, out, options),
            Self::YaoPhaseDiagram => yao(p, seed, out, options),
            Self::GpeRing => gpe(p, out, config.float_encoding),
            Self::TwoModeCat => two_mode(p, out, config.float_encoding),
            Self::LloydTime => lloyd(p, seed, out, config.float_encoding),
            Self::RingAnderson => ring(p, seed, out, config.float_encoding),
            Self::SecularBands => {
                let spec = PendulumSpec {
                    mass: p.float("mass"),
                    amplitude: p.float("amplitude"),
                    fold: p.int("fold"),
                    cutoff: p.int("cutoff"),
                };
                let bands = secular_bands(&spec, p.int("bands"), p.int("points"))?;
                bands.write_csv(&out.file("bands.csv"))?;
                let gaps: Vec<f64> = (0..p.int("bands") - 1)
                    .filter_map(|b| bands.gap(b))
                    .collect();
                let widths: Vec<f64> = (0..p.int("bands"))
                    .filter_map(|b| bands.bandwidth(b))
                    .collect();
                out.json(
                    "summary.json",
                    &serde_json::json!({ "spec": spec, "gaps": gaps, "bandwidths": widths }),
                    config.float_encoding,
                )
            }
            Self::PhaseCrystal => {
                let spec = PhaseCrystalSpec {
                    fold: p.int("fold"),
                    mu: p.float("mu"),
                    lambda: p.float("lambda"),
                    n_max: p.int("n_max"),
                };
                let sp = rwa_phase_crystal(&spec)?;
                sp.write_csv(&out.file("levels.csv"))?;
                let summary = serde_json::json!({
                    "spec": spec,
                    "commutator_norm": spec.commutator_norm()?,
                    "sector_resolved": sp.lowest_band_is_sector_resolved(),
                    "bandwidth": sp.bandwidth(0),
                    "gap": sp.gap(0),
                });
                out.json("summary.json", &summary, config.float_encoding)
            }
            Self::Bouncer => {
                let mut spec =
                    BouncerSpec::new(p.float("drive"), p.float("omega"), p.int("resonance"));
                spec.basis = p.int("basis");
                spec.steps = p.int("steps");
                let report = bouncer_floquet(&spec)?;
                report.write_packets_csv(
                    &out.file("packets.csv"),
                    p.float("z_max"),
                    p.int("profile_points"),
                )?;
                out.json("floquet_pair.json", &report, config.float_encoding)
            }
            Self::MottTime => {
                let spec = BoseHubbardTimeSpec::uniform(
                    p.int("sites"),
                    p.float("hopping"),
                    p.float("u"),
                    p.float("u_off"),
                    p.int("particles"),
                );
                let report = bose_hubbard_time(&spec)?;
                let summary = serde_json::json!({
                    "spec": spec,
                    "dimension": report.dimension,
                    "ground_energy": report.ground_energy,
                    "gap": report.gap,
                    "number_variance": report.number_variance,
                    "mean_number_variance": report.mean_number_variance(),
                    "coherence": report.coherence,
                    "max_off_diagonal_coherence": report.max_off_diagonal_coherence(),
                });
                out.json("summary.json", &summary, config.float_encoding)
            }
        }
    }
}

/// Files written by a run, in write order, relative to the output root.
#[derive(Debug)]
pub struct Artifacts {
    root: PathBuf,
    written: Vec<String>,
}

impl Artifacts {
    pub fn new(root: &Path) -> Self {
        Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Register `name` and return where to write it.
    pub fn file(&mut self, name: &str) -> PathBuf {
        self.written.push(name.to_string());
        self.root.join(name)
    }

    pub fn json<T: Serialize>(
        &mut self,
        name: &str,
        value: &T,
        encoding: FloatEncoding,
    ) -> Result<()> {
        let envelope = Envelope {
            schema_version: chronolab::disorder_lab::SCHEMA_VERSION,
            result: value,
        };
        persist(&envelope, &self.file(name), encoding)
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }
}

/// JSON envelope of a result payload.
#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    result: &'a T,
}

fn ensemble(
    model: SpinModelSpec,
    p: &Params,
    seed: u64,
    pipeline: Vec<Observable>,
    periods: usize,
) -> EnsembleSpec {
    EnsembleSpec {
        model,
        realizations: p.int("realizations"),
        master_seed: seed,
        periods,
        pipeline,
    }
}

fn write_record(record: &RunRecord, out: &mut Artifacts, name: &str) -> Result<()> {
    persist(record, &out.file(name), FloatEncoding::Decimal)
}

fn trace_ensemble(
    model: SpinModelSpec,
    axis: Axis,
    initial: InitialState,
    p: &Params,
    seed: u64,
    out: &mut Artifacts,
    options: &RunOptions,
) -> Result<()> {
    let obs = Observable::Magnetization { axis, initial };
    let name = obs.name();
    let spec = ensemble(model, p, seed, vec![obs], p.int("periods"));
    let record = run_ensemble(&spec, options)?;
    write_record(&record, out, "record.json")?;
    if let Some(series) = record.averaged_series(&name) {
        write_series_csv(&out.file("magnetization.csv"), &series)?;
        write_spectrum_csv(&out.file("spectrum.csv"), &dft_series(&series)?)?;
    }
    Ok(())
}

fn khemani(p: &Params, seed: u64, out: &mut Artifacts, options: &RunOptions) -> Result<()> {
    let model = KhemaniSpec {
        sites: p.int("sites"),
        jz: p.float("jz"),
        t1: 1.0,
        t2: 1.0,
        h_t1: Interval::new(p.float("h_lo"), p.float("h_hi"))?,
        j_t2: Interval::new(p.float("j_lo"), p.float("j_hi"))?,
        boundary: Boundary::Open,
    };
    let period = model.period();
    let site = p.int("site");
    let points = p.int("points");
    let mut pipeline = vec![Observable::SpectralFunction {
        site,
        points,
        eta: None,
    }];
    if p.flag("gap_ratio") {
        pipeline.push(Observable::GapRatio);
    }
    let spec = ensemble(SpinModelSpec::Khemani(model), p, seed, pipeline, 0);
    let record = run_ensemble(&spec, options)?;
    write_record(&record, out, "record.json")?;
    if let Some(a) = record
        .aggregates
        .series
        .get(&format!("spectral_function_{site}"))
    {
        let grid = FrequencyGrid::new(period, points)?;
        let rows = grid
            .omegas()
            .into_iter()
            .zip(a.mean.iter().zip(&a.sem))
            .map(|(w, (m, s))| vec![w, *m, *s]);
        write_csv(
            &out.file("spectral_function.csv"),
            &["omega", "value", "sem"],
            rows,
        )?;
    }
    Ok(())
}

fn yao(p: &Params, seed: u64, out: &mut Artifacts, options: &RunOptions) -> Result<()> {
    let alpha = p.float("alpha");
    let jz = p.floats("jz");
    let eps = p.floats("epsilon");
    let model = YaoSpec {
        sites: p.int("sites"),
        epsilon: 0.0,
        t1: FRAC_PI_2,
        t2: 1.0,
        jz: 1.0,
        alpha: (alpha > 0.0).then_some(alpha),
        j: None,
        hz: Interval::new(0.0, p.float("hz"))?,
        boundary: Boundary::Open,
    };
    let obs = Observable::Magnetization {
        axis: Axis::Z,
        initial: InitialState::ZUp,
    };
    let grid = ScanGrid {
        jz: jz.clone(),
        epsilon: eps.clone(),
        template: ensemble(
            SpinModelSpec::Yao(model),
            p,
            seed,
            vec![obs],
            p.int("periods"),
        ),
    };
    grid.validate()?;
    let mut rows = Vec::new();
    for (i, &z) in jz.iter().enumerate() {
        for (j, &e) in eps.iter().enumerate() {
            let cell = scan_cell(&grid, i, j, options)?;
            rows.push(vec![
                z,
                e,
                cell.report.peak_center,
                cell.report.peak_height,
                f64::from(u8::from(cell.report.locked)),
            ]);
            out.json(
                &format!("cells/cell_{i:02}_{j:02}.json"),
                &cell,
                FloatEncoding::Decimal,
            )?;
        }
    }
    write_csv(
        &out.file("phase_diagram.csv"),
        &["jz", "epsilon", "peak_center", "peak_height", "locked"],
        rows,
    )
}

fn gpe(p: &Params, out: &mut Artifacts, enc: FloatEncoding) -> Result<()> {
    let grid = RingGrid::new(p.int("points"))?;
    let mut params = GpeParams::new(p.float("gamma"));
    params.flux = p.float("flux");
    let gs = gpe_ground_state(&params, grid)?;
    gs.state.write_csv(&out.file("ground_state.csv"))?;
    let center = gs.state.center_of_mass();
    let soliton_overlap = if params.gamma < 0.0 {
        let sol = soliton_profile(params.gamma, center, grid)?;
        sol.write_csv(&out.file("soliton.csv"))?;
        Some(gs.state.overlap(&sol)?)
    } else {
        None
    };
    let threshold = if p.flag("threshold") {
        Some(symmetry_breaking_threshold(grid, -15.0, -5.0, 0.05, 1e-3)?)
    } else {
        None
    };
    let summary = serde_json::json!({
        "gamma": params.gamma,
        "flux": params.flux,
        "chemical_potential": gs.state.chemical_potential,
        "energy": gs.energy,
        "residual": gs.residual,
        "iterations": gs.iterations,
        "peak_to_mean": gs.state.peak_to_mean(),
        "center_of_mass": center,
        "soliton_overlap": soliton_overlap,
        "threshold": threshold,
    });
    out.json("summary.json", &summary, enc)
}

fn two_mode(p: &Params, out: &mut Artifacts, enc: FloatEncoding) -> Result<()> {
    let particles = p.ints("particles");
    let template = TwoModeParams::with_ratio(p.float("tunneling"), -p.float("ratio"), particles[0]);
    let scaling = gap_scaling(&template, &particles)?;
    scaling.write_csv(&out.file("gap_scaling.csv"))?;
    let ground = classify_ground(&template.rescaled(p.int("classify_particles")))?;
    let summary = serde_json::json!({
        "fit": scaling.fit,
        "monotone": scaling.is_monotone_decreasing(),
        "ground": ground,
    });
    out.json("summary.json", &summary, enc)
}

fn lloyd(p: &Params, seed: u64, out: &mut Artifacts, enc: FloatEncoding) -> Result<()> {
    let n = p.int("realizations");
    let mut rows = Vec::with_capacity(n);
    let mut first = None;
    for r in 0..n as u64 {
        let spec = LloydSpec {
            sites: p.int("sites"),
            hopping: p.float("hopping"),
            width: p.float("width"),
            period: p.float("period"),
            seed: seed.wrapping_add(r),
            window: p.float("window"),
        };
        let report = lloyd_localization(&spec)?;
        rows.push(vec![
            r as f64,
            spec.seed as f64,
            report.fitted_length.unwrap_or(f64::NAN),
            report.transfer_length,
            report.relative_deviation().unwrap_or(f64::NAN),
            report.reliable_fits as f64,
        ]);
        if first.is_none() {
            first = Some((spec, report));
        }
    }
    write_csv(
        &out.file("lengths.csv"),
        &[
            "realization",
            "seed",
            "fitted_length",
            "transfer_length",
            "relative_deviation",
            "reliable_fits",
        ],
        rows.iter().cloned(),
    )?;
    let (spec, report) = first.expect("at least one realization");
    // lab-frame profile of the most localized state of the first realization
    let k = (0..report.participation.len())
        .min_by(|&a, &b| report.participation[a].total_cmp(&report.participation[b]))
        .unwrap_or(0);
    let eig = tb_ring_eigensystem(&spec.ring()?)?;
    let w: Vec<f64> = (0..spec.sites)
        .map(|j| eig.vectors.get(j, k).norm_sqr())
        .collect();
    write_series_csv(
        &out.file("profile.csv"),
        &time_profile(&w, spec.period, p.int("cycles"))?,
    )?;
    let mut devs: Vec<f64> = rows
        .iter()
        .map(|r| r[4])
        .filter(|d| d.is_finite())
        .collect();
    devs.sort_by(f64::total_cmp);
    let median = match devs.len() {
        0 => None,
        m if m % 2 == 1 => Some(devs[m / 2]),
        m => Some(0.5 * (devs[m / 2 - 1] + devs[m / 2])),
    };
    let summary = serde_json::json!({
        "realizations": n,
        "median_relative_deviation": median,
        "profile_state": k,
        "profile_energy": report.energies[k],
    });
    out.json("summary.json", &summary, enc)
}

fn ring(p: &Params, seed: u64, out: &mut Artifacts, enc: FloatEncoding) -> Result<()> {
    let spec = DisorderedRingSpec {
        amplitude: p.float("amplitude"),
        k0: p.float("k0"),
        harmonics: p.int("harmonics"),
        omega: p.float("omega"),
        seed,
    };
    let points = p.int("points");
    let potential = effective_potential(&spec, points)?;
    potential.write_csv(&out.file("potential.csv"))?;
    potential.write_harmonics_csv(&out.file("harmonics.csv"))?;
    let report = ring_anderson(&spec, p.int("cutoff"), points)?;
    let nan = f64::NAN;
    let rows = report.energies.iter().enumerate().map(|(k, &e)| {
        let (l, r2) = report.fits[k].map_or((nan, nan), |f| (f.length, f.r_squared));
        let (pl, pr2) = report.profile_fits[k].map_or((nan, nan), |f| (f.length, f.r_squared));
        vec![k as f64, e, l, r2, pl, pr2]
    });
    write_csv(
        &out.file("states.csv"),
        &[
            "index",
            "energy",
            "length",
            "r_squared",
            "profile_length",
            "profile_r_squared",
        ],
        rows,
    )?;
    let sd = report.disorder_std;
    let (below, n_below) = report.localized_fraction(sd);
    let (stretch, n_stretch) = report.localized_fraction(1.5 * sd);
    let summary = serde_json::json!({
        "spec": spec,
        "disorder_std": sd,
        "correlation_length": spec.correlation_length(),
        "empirical_correlation_length": potential.empirical_correlation_length(),
        "truncation_warning": report.truncated,
        "localized_fraction": below,
        "states_below_std": n_below,
        "localized_fraction_1p5": stretch,
        "states_below_1p5_std": n_stretch,
    });
    out.json("summary.json", &summary, enc)
}
