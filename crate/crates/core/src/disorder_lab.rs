// SPDX-License-Identifier: Apache-2.0

//! Reproducible disorder ensembles: sampling, parallel execution,
//! aggregation, phase-diagram scans and result files.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::floquet_observables::{
    dft_series, expectation_trace, magnetization_trace, pi_pairing, r_statistic_sectors,
    spectral_function, subharmonic_peak, FrequencyGrid, MagnitudeSpectrum, SubharmonicReport,
    TimeSeries,
};
use crate::opalg::{
    eig_unitary, pauli_site, quasi_energies, Axis, HermitianOperator, StateVector, UnitaryOperator,
};
use crate::spin_models::{DisorderRealization, SpinModelSpec};
use crate::table::write_csv;

pub const SCHEMA_VERSION: u32 = 1;
const HEX_PREFIX: &str = "f64:";

/// Draw the realization for `seed` (deterministic in `(spec, seed)`).
pub fn sample_realization(spec: &SpinModelSpec, seed: u64) -> Result<DisorderRealization> {
    spec.sample(seed)
}

/// Product initial states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// `|↑…↑⟩_z`
    ZUp,
    /// `|↓…↓⟩_z`
    ZDown,
    /// all spins `σ^x = +1`
    XUp,
    /// all spins `σ^x = −1`
    XDown,
}

impl InitialState {
    pub fn vector(self, sites: usize) -> Result<StateVector> {
        let dim = 1usize << sites;
        match self {
            Self::ZUp => StateVector::basis(dim, 0),
            Self::ZDown => StateVector::basis(dim, dim - 1),
            Self::XUp | Self::XDown => {
                let amp = (dim as f64).sqrt().recip();
                let v = (0..dim)
                    .map(|b: usize| {
                        let sign = if self == Self::XDown && b.count_ones() % 2 == 1 {
                            -1.0
                        } else {
                            1.0
                        };
                        num_complex::Complex64::new(sign * amp, 0.0)
                    })
                    .collect();
                StateVector::normalize(v)
            }
        }
    }
}

/// Observables evaluated on each realization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Observable {
    /// `⟨ψ_n|(1/L)Σσ^axis|ψ_n⟩` at `t = nT`.
    Magnetization { axis: Axis, initial: InitialState },
    /// `Re⟨ψ₀|σ_i^axis(nT) σ_i^axis(0)|ψ₀⟩`.
    Correlator {
        axis: Axis,
        site: usize,
        initial: InitialState,
    },
    /// Mean adjacent-gap ratio, pooled over symmetry blocks when available.
    GapRatio,
    /// Spin-raising spectral function on a frequency grid.
    SpectralFunction {
        site: usize,
        points: usize,
        /// Defaults to a hundredth of the zone.
        #[serde(default)]
        eta: Option<f64>,
    },
    /// Fraction of π/T-paired quasi-energies.
    PiPairing { tol: f64 },
}

impl Observable {
    pub fn name(&self) -> String {
        let axis = |a: &Axis| match a {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        };
        match self {
            Self::Magnetization { axis: a, .. } => format!("magnetization_{}", axis(a)),
            Self::Correlator { axis: a, site, .. } => format!("correlator_{}_{site}", axis(a)),
            Self::GapRatio => "gap_ratio".into(),
            Self::SpectralFunction { site, .. } => format!("spectral_function_{site}"),
            Self::PiPairing { .. } => "pi_pairing".into(),
        }
    }

    fn is_trace(&self) -> bool {
        matches!(self, Self::Magnetization { .. } | Self::Correlator { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub model: SpinModelSpec,
    pub realizations: usize,
    pub master_seed: u64,
    pub periods: usize,
    pub pipeline: Vec<Observable>,
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.realizations == 0 {
            return Err(Error::param("realizations must be at least 1"));
        }
        if self.pipeline.is_empty() {
            return Err(Error::param("pipeline is empty"));
        }
        let l = self.model.sites();
        for obs in &self.pipeline {
            match obs {
                Observable::Correlator { site, .. } | Observable::SpectralFunction { site, .. }
                    if *site >= l =>
                {
                    return Err(Error::param(format!(
                        "{}: site {site} outside chain of {l}",
                        obs.name()
                    )));
                }
                Observable::SpectralFunction { points, eta, .. } => {
                    FrequencyGrid::new(self.model.period(), *points)?;
                    if let Some(e) = eta {
                        if !(*e > 0.0) {
                            return Err(Error::param("spectral broadening must be positive"));
                        }
                    }
                }
                Observable::PiPairing { tol } if !(*tol > 0.0) => {
                    return Err(Error::param("pairing tolerance must be positive"));
                }
                _ => {}
            }
            if obs.is_trace() && self.periods < 4 {
                return Err(Error::param("time traces need at least 4 periods"));
            }
        }
        let mut names: Vec<String> = self.pipeline.iter().map(Observable::name).collect();
        names.sort();
        names.dedup();
        if names.len() != self.pipeline.len() {
            return Err(Error::param("pipeline contains duplicate observables"));
        }
        Ok(())
    }

    /// Seed of realization `index`.
    pub fn seed(&self, index: usize) -> u64 {
        self.master_seed.wrapping_add(index as u64)
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> Result<String> {
        let v = serde_json::to_value(self).map_err(|e| Error::contract(e.to_string()))?;
        let bytes = serde_json::to_vec(&v).map_err(|e| Error::contract(e.to_string()))?;
        Ok(hex::encode(Sha256::digest(bytes)))
    }
}

/// Values produced by one realization.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub scalars: BTreeMap<String, f64>,
    pub series: BTreeMap<String, Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealizationResult {
    pub index: usize,
    pub seed: u64,
    #[serde(default)]
    pub outcome: Option<Outcome>,
    #[serde(default)]
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub sem: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesStat {
    pub mean: Vec<f64>,
    pub sem: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub succeeded: usize,
    pub failed: usize,
    pub scalars: BTreeMap<String, Stat>,
    pub series: BTreeMap<String, SeriesStat>,
    /// Subharmonic descriptors of each averaged time trace.
    pub subharmonic: BTreeMap<String, SubharmonicReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub spec_hash: String,
    pub spec: EnsembleSpec,
    pub seeds: Vec<u64>,
    pub aggregates: Aggregates,
    pub realizations: Vec<RealizationResult>,
    /// Measured run time; not persisted so result files stay reproducible.
    #[serde(skip)]
    pub wall_clock_seconds: f64,
}

impl RunRecord {
    pub fn averaged_series(&self, name: &str) -> Option<TimeSeries> {
        let s = self.aggregates.series.get(name)?;
        TimeSeries::new(self.spec.model.period(), s.mean.clone()).ok()
    }
}

/// Execution controls that must not change results.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Worker threads; 0 picks the rayon default.
    pub workers: usize,
    /// Order in which realizations are dispatched (a permutation of the
    /// indices); defaults to ascending.
    pub execution_order: Option<Vec<usize>>,
}

fn site_average(sites: usize, axis: Axis) -> Result<HermitianOperator> {
    let mut s = crate::opalg::PauliSum::new(sites)?;
    for i in 0..sites {
        s.add(&[(i, axis)], 1.0 / sites as f64)?;
    }
    s.build()
}

/// Evaluate the pipeline on the realization drawn from `seed`.
pub fn evaluate_realization(spec: &EnsembleSpec, seed: u64) -> Result<Outcome> {
    let model = &spec.model;
    let l = model.sites();
    let period = model.period();
    let r = model.sample(seed)?;
    let mut out = Outcome::default();
    let mut full: Option<UnitaryOperator> = None;
    let mut eig: Option<crate::opalg::QuasiSpectrum> = None;
    for obs in &spec.pipeline {
        let name = obs.name();
        let needs_u = !matches!(obs, Observable::GapRatio);
        if needs_u && full.is_none() {
            full = Some(model.build(&r)?);
        }
        match obs {
            Observable::Magnetization { axis, initial } => {
                let op = site_average(l, *axis)?;
                let psi = initial.vector(l)?;
                let ts =
                    expectation_trace(full.as_ref().unwrap(), &psi, &op, spec.periods, period)?;
                out.series.insert(name, ts.values);
            }
            Observable::Correlator {
                axis,
                site,
                initial,
            } => {
                let op = pauli_site(l, *site, *axis)?;
                let psi = initial.vector(l)?;
                let ts =
                    magnetization_trace(full.as_ref().unwrap(), &psi, &op, spec.periods, period)?;
                out.series.insert(name, ts.values);
            }
            Observable::GapRatio => {
                let blocks = model.build_blocks(&r)?;
                let spectra = blocks
                    .iter()
                    .map(|(_, u)| quasi_energies(u, period))
                    .collect::<Result<Vec<_>>>()?;
                let g = r_statistic_sectors(&spectra)?;
                out.scalars.insert(name.clone(), g.mean);
                out.scalars
                    .insert(format!("{name}_zero_gaps"), g.zero_gaps as f64);
            }
            Observable::SpectralFunction { site, points, eta } => {
                if eig.is_none() {
                    eig = Some(eig_unitary(full.as_ref().unwrap(), period)?);
                }
                let grid = FrequencyGrid::new(period, *points)?;
                let eta = eta.unwrap_or(grid.zone() / 100.0);
                let a = spectral_function(eig.as_ref().unwrap(), l, *site, eta, &grid)?;
                out.series.insert(name, a);
            }
            Observable::PiPairing { tol } => {
                if eig.is_none() {
                    eig = Some(eig_unitary(full.as_ref().unwrap(), period)?);
                }
                out.scalars
                    .insert(name, pi_pairing(eig.as_ref().unwrap(), *tol)?);
            }
        }
    }
    Ok(out)
}

fn stat(values: &[f64]) -> Stat {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sem = if values.len() > 1 {
        let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Stat { mean, sem }
}

/// Mean and standard error of a set of samples.
pub fn mean_sem(values: &[f64]) -> Result<Stat> {
    if values.is_empty() {
        return Err(Error::EmptyInput("samples"));
    }
    Ok(stat(values))
}

/// Reduce per-realization results in index order.
pub fn aggregate(spec: &EnsembleSpec, results: &[RealizationResult]) -> Result<Aggregates> {
    let ok: Vec<&Outcome> = results.iter().filter_map(|r| r.outcome.as_ref()).collect();
    let mut agg = Aggregates {
        succeeded: ok.len(),
        failed: results.len() - ok.len(),
        ..Default::default()
    };
    if ok.is_empty() {
        return Ok(agg);
    }
    for key in ok[0].scalars.keys() {
        let v: Vec<f64> = ok.iter().map(|o| o.scalars[key]).collect();
        agg.scalars.insert(key.clone(), stat(&v));
    }
    for (key, first) in &ok[0].series {
        let len = first.len();
        let mut mean = Vec::with_capacity(len);
        let mut sem = Vec::with_capacity(len);
        for k in 0..len {
            let v: Vec<f64> = ok.iter().map(|o| o.series[key][k]).collect();
            let s = stat(&v);
            mean.push(s.mean);
            sem.push(s.sem);
        }
        agg.series.insert(key.clone(), SeriesStat { mean, sem });
    }
    for obs in spec.pipeline.iter().filter(|o| o.is_trace()) {
        let name = obs.name();
        let ts = TimeSeries::new(spec.model.period(), agg.series[&name].mean.clone())?;
        agg.subharmonic
            .insert(name, subharmonic_peak(&dft_series(&ts)?)?);
    }
    Ok(agg)
}

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::contract(format!("cannot start worker pool: {e}")))
}

/// Run every realization of the ensemble and aggregate.
pub fn run_ensemble(spec: &EnsembleSpec, options: &RunOptions) -> Result<RunRecord> {
    spec.validate()?;
    let start = Instant::now();
    let n = spec.realizations;
    let order: Vec<usize> = match &options.execution_order {
        Some(o) => {
            let mut sorted = o.clone();
            sorted.sort_unstable();
            if sorted != (0..n).collect::<Vec<_>>() {
                return Err(Error::param(
                    "execution order must permute the realization indices",
                ));
            }
            o.clone()
        }
        None => (0..n).collect(),
    };
    let pool = thread_pool(options.workers)?;
    let mut results: Vec<RealizationResult> = pool.install(|| {
        order
            .par_iter()
            .map(|&index| {
                let seed = spec.seed(index);
                match evaluate_realization(spec, seed) {
                    Ok(o) => RealizationResult {
                        index,
                        seed,
                        outcome: Some(o),
                        error: None,
                    },
                    Err(e) => RealizationResult {
                        index,
                        seed,
                        outcome: None,
                        error: Some(e.to_string()),
                    },
                }
            })
            .collect()
    });
    results.sort_by_key(|r| r.index);
    let aggregates = aggregate(spec, &results)?;
    Ok(RunRecord {
        schema_version: SCHEMA_VERSION,
        spec_hash: spec.hash()?,
        spec: spec.clone(),
        seeds: (0..n).map(|i| spec.seed(i)).collect(),
        aggregates,
        realizations: results,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })
}

// ---------------------------------------------------------------- scans

/// `(J_z, ε)` grid over a template ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanGrid {
    pub jz: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub template: EnsembleSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanCell {
    pub jz: f64,
    pub epsilon: f64,
    pub spec_hash: String,
    pub report: SubharmonicReport,
    pub aggregates: Aggregates,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub schema_version: u32,
    pub grid: ScanGrid,
    /// Row-major over `(jz, epsilon)`.
    pub cells: Vec<Vec<ScanCell>>,
}

/// Template with interaction scale `jz` and flip deviation `epsilon` set.
pub fn with_jz_epsilon(model: &SpinModelSpec, jz: f64, epsilon: f64) -> Result<SpinModelSpec> {
    use crate::sampling::Interval;
    Ok(match model {
        SpinModelSpec::Yao(s) => SpinModelSpec::Yao(crate::spin_models::YaoSpec {
            jz,
            epsilon,
            j: None,
            ..s.clone()
        }),
        SpinModelSpec::Else(s) => SpinModelSpec::Else(crate::spin_models::ElseSpec {
            j: Interval::new(0.5 * jz, 1.5 * jz)?,
            epsilon,
            ..s.clone()
        }),
        SpinModelSpec::Ion(s) => SpinModelSpec::Ion(crate::spin_models::IonSpec {
            j0: jz,
            epsilon,
            ..s.clone()
        }),
        other => {
            return Err(Error::param(format!(
                "{:?} has no flip deviation to scan",
                other.kind()
            )))
        }
    })
}

impl ScanGrid {
    pub fn validate(&self) -> Result<()> {
        if self.jz.is_empty() || self.epsilon.is_empty() {
            return Err(Error::param("scan axes must be non-empty"));
        }
        for axis in [&self.jz, &self.epsilon] {
            if axis.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(Error::param("scan axes must be strictly ascending"));
            }
        }
        if !self.template.pipeline.iter().any(Observable::is_trace) {
            return Err(Error::param("scan template needs a time-trace observable"));
        }
        self.template.validate()
    }

    pub fn cell_spec(&self, i: usize, j: usize) -> Result<EnsembleSpec> {
        Ok(EnsembleSpec {
            model: with_jz_epsilon(&self.template.model, self.jz[i], self.epsilon[j])?,
            ..self.template.clone()
        })
    }
}

/// Compute one scan cell; cells share no state.
pub fn scan_cell(grid: &ScanGrid, i: usize, j: usize, options: &RunOptions) -> Result<ScanCell> {
    let spec = grid.cell_spec(i, j)?;
    let rec = run_ensemble(&spec, options)?;
    let trace = spec
        .pipeline
        .iter()
        .find(|o| o.is_trace())
        .map(Observable::name)
        .ok_or_else(|| Error::param("scan template needs a time-trace observable"))?;
    let report =
        *rec.aggregates.subharmonic.get(&trace).ok_or_else(|| {
            Error::Sampling(format!("all realizations failed in cell ({i}, {j})"))
        })?;
    Ok(ScanCell {
        jz: grid.jz[i],
        epsilon: grid.epsilon[j],
        spec_hash: rec.spec_hash,
        report,
        aggregates: rec.aggregates,
    })
}

pub fn scan_phase_diagram(grid: &ScanGrid, options: &RunOptions) -> Result<ScanRecord> {
    grid.validate()?;
    let mut cells = Vec::with_capacity(grid.jz.len());
    for i in 0..grid.jz.len() {
        let row = (0..grid.epsilon.len())
            .map(|j| scan_cell(grid, i, j, options))
            .collect::<Result<Vec<_>>>()?;
        cells.push(row);
    }
    Ok(ScanRecord {
        schema_version: SCHEMA_VERSION,
        grid: grid.clone(),
        cells,
    })
}

// ---------------------------------------------------------------- persistence

/// How doubles are written to result files.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FloatEncoding {
    /// Shortest round-trip decimal.
    #[default]
    Decimal,
    /// `"f64:<16 hex digits>"` of the IEEE-754 bit pattern.
    Hex,
}

fn encode_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let bits = n.as_f64().expect("f64 number").to_bits();
            *v = Value::String(format!("{HEX_PREFIX}{bits:016x}"));
        }
        Value::Array(a) => a.iter_mut().for_each(encode_floats),
        Value::Object(o) => o.values_mut().for_each(encode_floats),
        _ => {}
    }
}

fn decode_floats(v: &mut Value, path: &Path) -> Result<()> {
    match v {
        Value::String(s) if s.starts_with(HEX_PREFIX) => {
            let bits =
                u64::from_str_radix(&s[HEX_PREFIX.len()..], 16).map_err(|e| Error::Format {
                    path: path.to_path_buf(),
                    reason: format!("bad hex float `{s}`: {e}"),
                })?;
            let x = f64::from_bits(bits);
            *v = Value::Number(
                serde_json::Number::from_f64(x).ok_or_else(|| Error::Format {
                    path: path.to_path_buf(),
                    reason: format!("non-finite value `{s}`"),
                })?,
            );
        }
        Value::Array(a) => {
            for x in a {
                decode_floats(x, path)?;
            }
        }
        Value::Object(o) => {
            for x in o.values_mut() {
                decode_floats(x, path)?;
            }
        }
        _ => {}
    }
    Ok(())
}

/// Serialize any record into the versioned JSON envelope.
pub fn to_json<T: Serialize>(record: &T, encoding: FloatEncoding) -> Result<String> {
    let mut v = serde_json::to_value(record).map_err(|e| Error::contract(e.to_string()))?;
    if encoding == FloatEncoding::Hex {
        encode_floats(&mut v);
    }
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::contract(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn persist<T: Serialize>(record: &T, path: &Path, encoding: FloatEncoding) -> Result<()> {
    let text = to_json(record, encoding)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Read a record written by [`persist`] in either float encoding.
pub fn load<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut v: Value = serde_json::from_str(&text).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let found = v.get("schema_version").and_then(Value::as_u64);
    if found != Some(SCHEMA_VERSION as u64) {
        return Err(Error::SchemaVersion {
            path: path.to_path_buf(),
            found: found.map_or_else(|| "missing".to_string(), |f| f.to_string()),
            expected: SCHEMA_VERSION,
        });
    }
    decode_floats(&mut v, path)?;
    serde_json::from_value(v).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

/// CSV with header `period_index,value`.
pub fn write_series_csv(path: &Path, series: &TimeSeries) -> Result<()> {
    let rows = series
        .values
        .iter()
        .enumerate()
        .map(|(n, &v)| vec![n as f64, v]);
    write_csv(path, &["period_index", "value"], rows)
}

/// CSV with header `freq_cycles_per_period,magnitude`.
pub fn write_spectrum_csv(path: &Path, spectrum: &MagnitudeSpectrum) -> Result<()> {
    let rows = spectrum
        .frequencies
        .iter()
        .zip(&spectrum.magnitudes)
        .map(|(&f, &m)| vec![f, m]);
    write_csv(path, &["freq_cycles_per_period", "magnitude"], rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Interval;
    use crate::spin_models::{ElseSpec, KhemaniSpec, YaoSpec};

    fn else_ensemble(n: usize) -> EnsembleSpec {
        EnsembleSpec {
            model: SpinModelSpec::Else(ElseSpec::standard(4, 1.0, 1.0, 0.3, 0.02)),
            realizations: n,
            master_seed: 100,
            periods: 16,
            pipeline: vec![
                Observable::Magnetization {
                    axis: Axis::Z,
                    initial: InitialState::ZUp,
                },
                Observable::GapRatio,
            ],
        }
    }

    #[test]
    fn sampling_deterministic_and_in_range() {
        let spec = SpinModelSpec::Khemani(KhemaniSpec::pi_spin_glass(8, 0.0));
        let a = sample_realization(&spec, 9).unwrap();
        assert_eq!(a, sample_realization(&spec, 9).unwrap());
        assert!(a
            .array("h_t1")
            .unwrap()
            .iter()
            .all(|&x| (1.512..=1.551).contains(&x)));
    }

    #[test]
    fn initial_states_are_eigenstates() {
        let l = 3;
        for (state, axis, value) in [
            (InitialState::ZUp, Axis::Z, 1.0),
            (InitialState::ZDown, Axis::Z, -1.0),
            (InitialState::XUp, Axis::X, 1.0),
            (InitialState::XDown, Axis::X, -1.0),
        ] {
            let psi = state.vector(l).unwrap();
            for i in 0..l {
                let op = pauli_site(l, i, axis).unwrap();
                assert!((op.expectation(psi.amplitudes()) - value).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn single_realization_aggregates_equal_run() {
        let spec = else_ensemble(1);
        let rec = run_ensemble(&spec, &RunOptions::default()).unwrap();
        let o = rec.realizations[0].outcome.as_ref().unwrap();
        assert_eq!(
            rec.aggregates.scalars["gap_ratio"].mean,
            o.scalars["gap_ratio"]
        );
        assert_eq!(
            rec.aggregates.series["magnetization_z"].mean,
            o.series["magnetization_z"]
        );
        assert_eq!(rec.aggregates.scalars["gap_ratio"].sem, 0.0);
    }

    #[test]
    fn execution_order_and_workers_do_not_matter() {
        let spec = else_ensemble(6);
        let a = run_ensemble(&spec, &RunOptions::default()).unwrap();
        let b = run_ensemble(
            &spec,
            &RunOptions {
                workers: 3,
                execution_order: Some(vec![4, 1, 5, 0, 3, 2]),
            },
        )
        .unwrap();
        assert_eq!(
            to_json(&a, FloatEncoding::Hex).unwrap(),
            to_json(&b, FloatEncoding::Hex).unwrap()
        );
    }

    #[test]
    fn bad_execution_order_rejected() {
        let spec = else_ensemble(3);
        let opts = RunOptions {
            workers: 1,
            execution_order: Some(vec![0, 0, 1]),
        };
        assert!(run_ensemble(&spec, &opts).is_err());
    }

    #[test]
    fn failing_realizations_are_excluded() {
        let mut spec = else_ensemble(2);
        spec.pipeline = vec![Observable::PiPairing { tol: 1e-9 }];
        let results = vec![
            RealizationResult {
                index: 0,
                seed: 1,
                outcome: Some(Outcome {
                    scalars: [("pi_pairing".to_string(), 0.5)].into(),
                    series: BTreeMap::new(),
                }),
                error: None,
            },
            RealizationResult {
                index: 1,
                seed: 2,
                outcome: None,
                error: Some("eigensolver failed".into()),
            },
        ];
        let agg = aggregate(&spec, &results).unwrap();
        assert_eq!((agg.succeeded, agg.failed), (1, 1));
        assert_eq!(agg.scalars["pi_pairing"].mean, 0.5);
    }

    #[test]
    fn sem_shrinks_like_inverse_root_n() {
        // deterministic synthetic observable with fixed spread
        let sample = |n: usize| -> Vec<f64> {
            (0..n)
                .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 })
                .collect()
        };
        let s100 = mean_sem(&sample(100)).unwrap().sem;
        let s400 = mean_sem(&sample(400)).unwrap().sem;
        assert!((s100 / s400 - 2.0).abs() < 0.01);
    }

    #[test]
    fn hex_and_decimal_round_trip() {
        let rec = run_ensemble(&else_ensemble(2), &RunOptions::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        for enc in [FloatEncoding::Decimal, FloatEncoding::Hex] {
            let p1 = dir.path().join("a.json");
            let p2 = dir.path().join("b.json");
            persist(&rec, &p1, enc).unwrap();
            let back: RunRecord = load(&p1).unwrap();
            assert_eq!(back.aggregates, rec.aggregates);
            persist(&back, &p2, enc).unwrap();
            assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
        }
    }

    #[test]
    fn schema_mismatch_reported() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("old.json");
        fs::write(&p, "{\"schema_version\": 0}").unwrap();
        assert!(matches!(
            load::<RunRecord>(&p),
            Err(Error::SchemaVersion { .. })
        ));
    }

    #[test]
    fn io_error_names_path() {
        let e = load::<RunRecord>(Path::new("/nonexistent/dir/r.json")).unwrap_err();
        assert!(e.to_string().contains("/nonexistent/dir/r.json"));
    }

    #[test]
    fn csv_headers() {
        let dir = tempfile::tempdir().unwrap();
        let ts = TimeSeries::new(1.0, vec![1.0, -1.0, 1.0, -1.0]).unwrap();
        let p = dir.path().join("t.csv");
        write_series_csv(&p, &ts).unwrap();
        assert!(fs::read_to_string(&p)
            .unwrap()
            .starts_with("period_index,value\n0,1\n"));
        let q = dir.path().join("s.csv");
        write_spectrum_csv(&q, &dft_series(&ts).unwrap()).unwrap();
        assert!(fs::read_to_string(&q)
            .unwrap()
            .starts_with("freq_cycles_per_period,magnitude\n"));
    }

    fn yao_grid(jz: Vec<f64>, eps: Vec<f64>) -> ScanGrid {
        ScanGrid {
            jz,
            epsilon: eps,
            template: EnsembleSpec {
                model: SpinModelSpec::Yao(YaoSpec {
                    sites: 4,
                    epsilon: 0.0,
                    t1: std::f64::consts::FRAC_PI_2,
                    t2: 1.0,
                    jz: 1.0,
                    alpha: Some(1.5),
                    j: None,
                    hz: Interval::new(0.0, 1.0).unwrap(),
                    boundary: Default::default(),
                }),
                realizations: 3,
                master_seed: 7,
                periods: 64,
                pipeline: vec![Observable::Magnetization {
                    axis: Axis::Z,
                    initial: InitialState::ZUp,
                }],
            },
        }
    }

    #[test]
    fn one_cell_scan_equals_ensemble() {
        let grid = yao_grid(vec![0.4], vec![0.03]);
        let scan = scan_phase_diagram(&grid, &RunOptions::default()).unwrap();
        let rec = run_ensemble(&grid.cell_spec(0, 0).unwrap(), &RunOptions::default()).unwrap();
        assert_eq!(scan.cells[0][0].aggregates, rec.aggregates);
    }

    #[test]
    fn exact_flip_column_locked() {
        let grid = yao_grid(vec![0.0, 0.5, 1.0], vec![0.0]);
        let scan = scan_phase_diagram(&grid, &RunOptions::default()).unwrap();
        assert!(scan.cells.iter().all(|row| row[0].report.locked));
    }

    #[test]
    fn scan_cells_recompute_exactly() {
        let grid = yao_grid(vec![0.2, 0.6], vec![0.0, 0.05]);
        let scan = scan_phase_diagram(&grid, &RunOptions::default()).unwrap();
        let again = scan_cell(
            &grid,
            1,
            0,
            &RunOptions {
                workers: 2,
                execution_order: None,
            },
        )
        .unwrap();
        assert_eq!(again, scan.cells[1][0]);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("scan.json");
        persist(&scan, &p, FloatEncoding::Hex).unwrap();
        let back: ScanRecord = load(&p).unwrap();
        assert_eq!(back, scan);
    }
}
