//! Config-file driven experiments.
//!
//! A run is one JSON document plus a mode. Resolution happens in two stages:
//! the raw tree is checked field by field (missing sections, unknown keys,
//! type errors) and every problem is reported at once; the typed sections are
//! then validated semantically. Omitted optional sections are filled with
//! their defaults and the complete result is echoed as `resolved_config.json`.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::ensemble::random_real_field;
use crate::error::Error;
use crate::gauge::{solve_q, GaugeSolveReport};
use crate::nonlinearity::{direct_nonlinearity, nr_trilinear_fast, resonant_term};
use crate::norms::NormProxyConfig;
use crate::picard::{picard_step, reconstruct_u, solve_z, PicardConfig, PicardReport};
use crate::probes::{
    probe_estimate_16, probe_h_form_700, probe_trilinear_12, smoothing_report, v_equation_residual, EnsembleFamily,
    EnsembleSpec, ProbeReport, SmoothingReport,
};
use crate::reference::{compare_trajectories, solve_reference, solve_reference_with_diagnostics, ETDConfig};
use crate::report::{emit_table, write_json, Format, Table};
use crate::spectral::{FourierField, GridSpec, SobolevIndex, Trajectory};
use crate::VERSION;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Directory used when neither the file, the CLI nor `OUTPUT_DIR` names one.
pub const DEFAULT_OUTPUT_DIR: &str = "output";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Simulate,
    GaugeSolve,
    Compare,
    DecomposeCheck,
    Probe16,
    Probe12,
    Probe700,
    Smoothing,
    QSolve,
}

impl Mode {
    pub const ALL: [Mode; 9] = [
        Mode::Simulate,
        Mode::GaugeSolve,
        Mode::Compare,
        Mode::DecomposeCheck,
        Mode::Probe16,
        Mode::Probe12,
        Mode::Probe700,
        Mode::Smoothing,
        Mode::QSolve,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Simulate => "simulate",
            Mode::GaugeSolve => "gauge_solve",
            Mode::Compare => "compare",
            Mode::DecomposeCheck => "decompose_check",
            Mode::Probe16 => "probe16",
            Mode::Probe12 => "probe12",
            Mode::Probe700 => "probe700",
            Mode::Smoothing => "smoothing",
            Mode::QSolve => "q_solve",
        }
    }

    pub fn needs_ensemble(self) -> bool {
        matches!(self, Mode::Probe16 | Mode::Probe12 | Mode::Probe700)
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Mode::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Mode::ALL.iter().map(|m| m.name()).collect();
            format!("unknown mode '{s}' (expected one of {})", names.join(", "))
        })
    }
}

fn one() -> f64 {
    1.0
}
fn one_i() -> i64 {
    1
}
fn default_decay() -> f64 {
    0.8
}

/// Initial profile `f`, built at the grid's `K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum InitialData {
    /// `amplitude · cos(mode · x)`.
    #[serde(rename = "cosine")]
    Cosine {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one_i")]
        mode: i64,
    },
    /// `[k, re, im]` entries; the conjugate mode is filled in.
    #[serde(rename = "modes-list")]
    Modes { modes: Vec<(i64, f64, f64)> },
    /// Mean-zero random field with `|f̂(k)| ∝ ⟨k⟩^{-decay_exponent}`, scaled to L² norm `amplitude`.
    #[serde(rename = "seeded-random")]
    SeededRandom {
        seed: u64,
        #[serde(default = "default_decay")]
        decay_exponent: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
}

impl InitialData {
    pub fn validate(&self, k_max: usize) -> Vec<String> {
        let mut problems = Vec::new();
        match self {
            InitialData::Cosine { amplitude, mode } => {
                if !amplitude.is_finite() {
                    problems.push("initial_data.amplitude: must be finite".into());
                }
                if mode.unsigned_abs() as usize > k_max {
                    problems.push(format!("initial_data.mode: |{mode}| exceeds grid.K = {k_max}"));
                }
            }
            InitialData::Modes { modes } => {
                for (i, &(k, re, im)) in modes.iter().enumerate() {
                    if k.unsigned_abs() as usize > k_max {
                        problems.push(format!("initial_data.modes[{i}]: |k| = {} exceeds grid.K = {k_max}", k.abs()));
                    }
                    if !(re.is_finite() && im.is_finite()) {
                        problems.push(format!("initial_data.modes[{i}]: coefficient must be finite"));
                    }
                }
            }
            InitialData::SeededRandom { decay_exponent, amplitude, .. } => {
                if !(decay_exponent.is_finite() && amplitude.is_finite()) {
                    problems.push("initial_data: decay_exponent and amplitude must be finite".into());
                }
            }
        }
        problems
    }

    pub fn build(&self, k_max: usize) -> FourierField {
        match self {
            InitialData::Cosine { amplitude, mode } => FourierField::cosine(k_max, *amplitude, *mode),
            InitialData::Modes { modes } => {
                let m: Vec<(i64, Complex64)> = modes.iter().map(|&(k, re, im)| (k, Complex64::new(re, im))).collect();
                FourierField::real_from_modes(k_max, &m)
            }
            InitialData::SeededRandom { seed, decay_exponent, amplitude } => {
                &random_real_field(*seed, k_max, *decay_exponent) * *amplitude
            }
        }
    }
}

/// Fully resolved run description; this is what `resolved_config.json` holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub initial_data: InitialData,
    pub grid: GridSpec,
    pub params: SobolevIndex,
    pub proxy: NormProxyConfig,
    pub etd: ETDConfig,
    pub picard: PicardConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleSpec>,
    pub output_dir: PathBuf,
}

/// Command-line overrides, applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub mode: Option<Mode>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    ValidationError,
    NumericalFailure,
}

/// Failure of a run, serialized as the machine-readable error document.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunError {
    pub status: FailureKind,
    pub exit_code: i32,
    pub messages: Vec<String>,
}

impl RunError {
    pub fn validation(messages: Vec<String>) -> Self {
        Self { status: FailureKind::ValidationError, exit_code: EXIT_VALIDATION, messages }
    }

    pub fn numerical(message: String) -> Self {
        Self { status: FailureKind::NumericalFailure, exit_code: EXIT_NUMERICAL, messages: vec![message] }
    }

    pub fn to_json(&self) -> String {
        crate::report::to_json_string(&serde_json::json!({
            "version": VERSION,
            "status": self.status,
            "exit_code": self.exit_code,
            "messages": self.messages,
        }))
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Json(_) => Self::validation(vec![e.to_string()]),
            e if e.is_validation() => Self::validation(vec![e.to_string()]),
            e => Self::numerical(e.to_string()),
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.messages.join("; "))
    }
}

impl std::error::Error for RunError {}

/// Overlays `patch` on `base`, recursing into objects; keys absent from `base` are errors.
fn overlay(base: &mut Value, patch: &Value, path: &str, problems: &mut Vec<String>) {
    let (Some(base_obj), Some(patch_obj)) = (base.as_object_mut(), patch.as_object()) else {
        problems.push(format!("{path}: expected an object"));
        return;
    };
    for (key, value) in patch_obj {
        let here = format!("{path}.{key}");
        match base_obj.get_mut(key) {
            None => problems.push(format!("{here}: unknown field")),
            Some(slot) if slot.is_object() && value.is_object() => overlay(slot, value, &here, problems),
            Some(slot) => *slot = value.clone(),
        }
    }
}

/// Default section overlaid with the file's section, then typed.
fn section<T: Serialize + DeserializeOwned>(name: &str, default: T, raw: Option<&Value>, problems: &mut Vec<String>) -> Option<T> {
    let mut tree = serde_json::to_value(&default).expect("config sections serialize");
    if let Some(raw) = raw {
        let before = problems.len();
        overlay(&mut tree, raw, name, problems);
        if problems.len() > before {
            return None;
        }
    }
    match serde_json::from_value(tree) {
        Ok(v) => Some(v),
        Err(e) => {
            problems.push(format!("{name}: {e}"));
            None
        }
    }
}

fn required<T: DeserializeOwned>(name: &str, raw: Option<&Value>, problems: &mut Vec<String>) -> Option<T> {
    let Some(raw) = raw else {
        problems.push(format!("{name}: missing required section"));
        return None;
    };
    match serde_json::from_value(raw.clone()) {
        Ok(v) => Some(v),
        Err(e) => {
            problems.push(format!("{name}: {e}"));
            None
        }
    }
}

const TOP_LEVEL: [&str; 9] = ["mode", "initial_data", "grid", "params", "proxy", "etd", "picard", "ensemble", "output_dir"];

/// Parses config text; empty text counts as `{}`.
pub fn parse_config_text(text: &str) -> Result<Map<String, Value>, RunError> {
    if text.trim().is_empty() {
        return Ok(Map::new());
    }
    match serde_json::from_str::<Value>(text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(RunError::validation(vec!["config: expected a JSON object at the top level".into()])),
        Err(e) => Err(RunError::validation(vec![format!("config: {e}")])),
    }
}

/// Resolves a raw config tree into a [`RunConfig`], reporting every problem found.
///
/// The output directory is taken from the CLI override, then `env_output_dir`
/// (the `OUTPUT_DIR` variable), then the file, then [`DEFAULT_OUTPUT_DIR`].
pub fn resolve(raw: &Map<String, Value>, overrides: &Overrides, env_output_dir: Option<PathBuf>) -> Result<RunConfig, RunError> {
    let mut problems: Vec<String> = Vec::new();
    for key in raw.keys() {
        if !TOP_LEVEL.contains(&key.as_str()) {
            problems.push(format!("{key}: unknown field"));
        }
    }

    let mode = match overrides.mode {
        Some(m) => Some(m),
        None => match raw.get("mode") {
            None => {
                problems.push("mode: missing required field".into());
                None
            }
            Some(Value::String(s)) => Mode::from_str(s).map_err(|e| problems.push(format!("mode: {e}"))).ok(),
            Some(_) => {
                problems.push("mode: expected a string".into());
                None
            }
        },
    };
    let mut initial_data: Option<InitialData> = required("initial_data", raw.get("initial_data"), &mut problems);
    let grid: Option<GridSpec> = required("grid", raw.get("grid"), &mut problems);

    // params may be given in full or as just {"s0": ...}
    let params = match raw.get("params") {
        Some(Value::Object(p)) if p.len() == 1 && p.contains_key("s0") => match p["s0"].as_f64() {
            Some(s0) => SobolevIndex::for_s0(s0).map_err(|e| problems.push(format!("params: {e}"))).ok(),
            None => {
                problems.push("params.s0: expected a number".into());
                None
            }
        },
        other => section("params", SobolevIndex::for_s0(0.3).expect("default exponents"), other, &mut problems),
    };
    let proxy = section("proxy", NormProxyConfig::default(), raw.get("proxy"), &mut problems);
    let etd = section("etd", ETDConfig::default(), raw.get("etd"), &mut problems);

    let output_dir = match raw.get("output_dir") {
        Some(Value::String(s)) => PathBuf::from(s),
        Some(_) => {
            problems.push("output_dir: expected a string".into());
            PathBuf::from(DEFAULT_OUTPUT_DIR)
        }
        None => PathBuf::from(DEFAULT_OUTPUT_DIR),
    };
    let output_dir = overrides.output_dir.clone().or(env_output_dir).unwrap_or(output_dir);

    if let Some(m) = mode.filter(|m| m.needs_ensemble() && !raw.contains_key("ensemble")) {
        problems.push(format!("ensemble: required for mode {}", m.name()));
    }

    let (Some(mode), Some(grid), Some(params), Some(proxy), Some(etd)) = (mode, grid, params, proxy, etd) else {
        return Err(RunError::validation(problems));
    };

    let picard_default = PicardConfig { proxy, ..PicardConfig::new(params, grid.t_final, grid.frames) };
    let picard = section("picard", picard_default, raw.get("picard"), &mut problems);

    let ensemble = match raw.get("ensemble") {
        None => None,
        Some(e) => {
            for key in ["seed", "count"] {
                if e.get(key).is_none() {
                    problems.push(format!("ensemble.{key}: missing required field"));
                }
            }
            let default = EnsembleSpec {
                seed: 0,
                count: 1,
                k_max: grid.k_max,
                decay_exponent: params.s0 + 0.5,
                params,
                proxy,
                t_final: grid.t_final,
                frames: grid.frames,
                k_levels: Vec::new(),
                family: EnsembleFamily::Free,
            };
            section("ensemble", default, Some(e), &mut problems)
        }
    };

    if !problems.is_empty() {
        return Err(RunError::validation(problems));
    }
    let mut picard = picard.expect("no problems recorded");
    let mut ensemble = ensemble;

    if let Some(seed) = overrides.seed {
        if let Some(InitialData::SeededRandom { seed: s, .. }) = initial_data.as_mut() {
            *s = seed;
        }
        if let Some(e) = ensemble.as_mut() {
            e.seed = seed;
        }
    }
    picard.q_solve.s0 = picard.params.s0;

    let config = RunConfig {
        mode,
        initial_data: initial_data.ok_or_else(|| RunError::validation(problems.clone()))?,
        grid,
        params,
        proxy,
        etd,
        picard,
        ensemble,
        output_dir,
    };
    let problems = validate(&config);
    if problems.is_empty() {
        Ok(config)
    } else {
        Err(RunError::validation(problems))
    }
}

/// Semantic checks of a typed config; empty when valid.
pub fn validate(c: &RunConfig) -> Vec<String> {
    let mut problems = Vec::new();
    let mut check = |name: &str, r: crate::Result<()>| {
        if let Err(e) = r {
            problems.push(format!("{name}: {e}"));
        }
    };
    check("grid", c.grid.validate());
    check("params", c.params.validate());
    check("proxy", c.proxy.validate());
    check("etd", c.etd.validate());
    check("picard", c.picard.validate());
    if let Some(e) = &c.ensemble {
        check("ensemble", e.validate());
    }
    if c.picard.t_final != c.grid.t_final || c.picard.frames != c.grid.frames {
        problems.push("picard.T and picard.M: must equal grid.T and grid.M".into());
    }
    if c.picard.params != c.params {
        problems.push("picard.params: must equal params".into());
    }
    if c.grid.frames < 8 && !matches!(c.mode, Mode::Simulate | Mode::DecomposeCheck) {
        problems.push("grid.M: the norm proxy needs at least 8 frames".into());
    }
    problems.extend(c.initial_data.validate(c.grid.k_max));
    problems
}

/// Files written by a successful run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub output_dir: PathBuf,
    pub files: Vec<PathBuf>,
}

struct Writer<'a> {
    config: &'a RunConfig,
    files: Vec<PathBuf>,
}

impl Writer<'_> {
    fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<(), RunError> {
        self.files.push(write_json(&self.config.output_dir, name, value)?);
        Ok(())
    }

    fn csv(&mut self, stem: &str, table: &Table) -> Result<(), RunError> {
        self.files.push(emit_table(&self.config.output_dir, stem, table, Format::Csv)?);
        Ok(())
    }

    fn report<T: Serialize>(&mut self, result: &T) -> Result<(), RunError> {
        let doc = Report { version: VERSION, mode: self.config.mode, config: self.config, result };
        self.json("report.json", &doc)
    }
}

/// Top-level layout of every `report.json`.
#[derive(Debug, Serialize)]
pub struct Report<'a, T> {
    pub version: &'a str,
    pub mode: Mode,
    pub config: &'a RunConfig,
    pub result: &'a T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecomposeResult {
    #[serde(rename = "K")]
    pub k_max: usize,
    pub mean: f64,
    pub decomposition_max_err: f64,
    pub direct_max_abs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateResult {
    pub frames: usize,
    pub max_mass_drift: f64,
    pub max_l2_drift: f64,
    pub max_energy_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareResult {
    pub max_h0_distance: f64,
    pub max_hs0_distance: f64,
    pub picard: PicardReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingResult {
    pub v_equation_residual: f64,
    pub smoothing: SmoothingReport,
    pub picard: PicardReport,
}

fn profile_of(c: &RunConfig) -> FourierField {
    c.initial_data.build(c.grid.k_max)
}

fn picard_solution(c: &RunConfig, f: &FourierField) -> Result<(Trajectory, PicardReport), RunError> {
    let (z, q, rep) = solve_z(f, &c.picard)?;
    Ok((reconstruct_u(&z, &q, f)?, rep))
}

fn unconverged(rep: &PicardReport) -> Result<(), RunError> {
    if rep.converged {
        Ok(())
    } else {
        let last = rep.iters.last().map_or(f64::NAN, |r| r.diff_norm);
        Err(RunError::numerical(format!(
            "Picard iteration stopped after {} iterates without reaching tol (last update {last:e})",
            rep.iters.len()
        )))
    }
}

fn probe_table(rep: &ProbeReport) -> Table {
    let cases = rep.k0.is_some();
    let mut cols = vec!["K", "samples", "valid", "max_ratio"];
    if cases {
        cols.extend(["case_i_max", "case_ii_max"]);
    }
    let mut t = Table::new(&cols);
    for l in &rep.per_k {
        let mut row = vec![Some(l.k_max as f64), Some(l.samples as f64), Some(l.valid as f64), l.max_ratio];
        if cases {
            row.extend([l.case_i_max, l.case_ii_max]);
        }
        t.push_opt(row);
    }
    t
}

/// Runs a resolved config, writing `resolved_config.json` first and then the
/// mode's artifacts into `config.output_dir`.
pub fn run(config: &RunConfig) -> Result<RunOutcome, RunError> {
    let mut w = Writer { config, files: Vec::new() };
    w.json("resolved_config.json", &serde_json::json!({ "version": VERSION, "config": config }))?;
    let c = config;
    let f = profile_of(c);
    log::info!("mode {} with K = {}, M = {}, T = {}", c.mode.name(), c.grid.k_max, c.grid.frames, c.grid.t_final);

    match c.mode {
        Mode::Simulate => {
            let (u, records) = solve_reference_with_diagnostics(&f, &c.grid, &c.etd)?;
            let mut t = Table::new(&["t", "mass", "l2", "energy"]);
            for r in &records {
                t.push(&[r.t, r.mass, r.l2, r.energy]);
            }
            let drift = |g: fn(&crate::reference::ConservedRecord) -> f64| {
                records.iter().map(|r| (g(r) - g(&records[0])).abs()).fold(0.0, f64::max)
            };
            let result = SimulateResult {
                frames: records.len(),
                max_mass_drift: drift(|r| r.mass),
                max_l2_drift: drift(|r| r.l2),
                max_energy_drift: drift(|r| r.energy),
            };
            w.json("trajectory.json", &u)?;
            w.csv("conserved", &t)?;
            w.report(&result)?;
        }
        Mode::GaugeSolve => {
            let (z, q, rep) = solve_z(&f, &c.picard)?;
            let u = reconstruct_u(&z, &q, &f)?;
            let mut t = Table::new(&["iter", "norm_x", "diff_norm", "ratio"]);
            for (i, r) in rep.iters.iter().enumerate() {
                t.push_opt(vec![Some(i as f64 + 1.0), Some(r.norm_x), Some(r.diff_norm), r.ratio]);
            }
            w.json("z_trajectory.json", &z)?;
            w.json("u_trajectory.json", &u)?;
            w.json("phase_q.json", &q)?;
            w.csv("iterations", &t)?;
            w.report(&rep)?;
            unconverged(&rep)?;
        }
        Mode::Compare => {
            let (u, rep) = picard_solution(c, &f)?;
            let reference = solve_reference(&f, &c.grid, &c.etd)?;
            let (max0, prof0) = compare_trajectories(&u, &reference, 0.0)?;
            let (max_s, prof_s) = compare_trajectories(&u, &reference, c.params.s0)?;
            let mut t = Table::new(&["t", "h0_distance", "hs0_distance"]);
            for (n, (a, b)) in prof0.iter().zip(&prof_s).enumerate() {
                t.push(&[c.grid.time(n), *a, *b]);
            }
            w.csv("comparison", &t)?;
            w.report(&CompareResult { max_h0_distance: max0, max_hs0_distance: max_s, picard: rep.clone() })?;
            unconverged(&rep)?;
        }
        Mode::DecomposeCheck => {
            let direct = direct_nonlinearity(&f)?;
            let split = &nr_trilinear_fast(&f, &f, &f)? + &resonant_term(&f);
            let mut t = Table::new(&["k", "direct_re", "direct_im", "split_re", "split_im"]);
            for ((k, d), (_, s)) in direct.modes().zip(split.modes()) {
                t.push(&[k as f64, d.re, d.im, s.re, s.im]);
            }
            w.csv("decomposition", &t)?;
            w.report(&DecomposeResult {
                k_max: c.grid.k_max,
                mean: f.coeff(0).re,
                decomposition_max_err: direct.max_abs_diff(&split),
                direct_max_abs: direct.max_abs(),
            })?;
        }
        Mode::Probe16 | Mode::Probe12 | Mode::Probe700 => {
            let spec = c.ensemble.as_ref().expect("validated");
            let mut rep = match c.mode {
                Mode::Probe16 => probe_estimate_16(&f, spec)?,
                Mode::Probe12 => probe_trilinear_12(&f, spec)?,
                _ => probe_h_form_700(&f, spec)?,
            };
            if let Some(arg) = &rep.argmax_sample {
                w.json("argmax_sample.json", arg)?;
                rep.argmax_sample_file = Some("argmax_sample.json".into());
            }
            w.csv("per_k", &probe_table(&rep))?;
            w.report(&rep)?;
        }
        Mode::Smoothing => {
            let (u, rep) = picard_solution(c, &f)?;
            let smoothing = smoothing_report(&u, &f, &c.params)?;
            let residual = v_equation_residual(&u, &f)?;
            let mut t = Table::new(&["t", "remainder_hs1", "modulus_sum", "modulus_sum_upgraded", "modulus_sup"]);
            for m in &smoothing.frames {
                t.push(&[m.t, m.remainder_hs1, m.modulus_sum, m.modulus_sum_upgraded, m.modulus_sup]);
            }
            w.csv("smoothing", &t)?;
            w.report(&SmoothingResult { v_equation_residual: residual, smoothing, picard: rep.clone() })?;
            unconverged(&rep)?;
        }
        Mode::QSolve => {
            // phase system driven by the first Picard iterate
            let (z1, _, _) = picard_step(&Trajectory::zeros(c.picard.grid(c.grid.k_max)?), &f, &c.picard)?;
            let (q, rep): (_, GaugeSolveReport) = solve_q(&f, &z1, c.picard.q_solve)?;
            let mut t = Table::new(&["sweep", "ratio"]);
            for (i, r) in rep.sweep_ratios.iter().enumerate() {
                t.push(&[i as f64 + 2.0, *r]);
            }
            w.json("phase_q.json", &q)?;
            w.csv("sweeps", &t)?;
            w.report(&rep)?;
        }
    }
    Ok(RunOutcome { output_dir: c.output_dir.clone(), files: w.files })
}

/// Reads, resolves and runs a config file; returns the process exit code.
///
/// Failures are printed to stderr as JSON and, when the output directory can
/// be created, also written to `error.json` there.
pub fn run_file(path: Option<&Path>, overrides: &Overrides) -> i32 {
    let env_dir = std::env::var_os("OUTPUT_DIR").map(PathBuf::from);
    let mut out_dir = overrides.output_dir.clone().or_else(|| env_dir.clone());
    let result = (|| -> Result<RunOutcome, RunError> {
        let text = match path {
            Some(p) => fs::read_to_string(p).map_err(|e| RunError::validation(vec![format!("config: cannot read {}: {e}", p.display())]))?,
            None => String::new(),
        };
        let raw = parse_config_text(&text)?;
        let config = resolve(&raw, overrides, env_dir.clone())?;
        out_dir = Some(config.output_dir.clone());
        run(&config)
    })();
    match result {
        Ok(outcome) => {
            log::info!("wrote {} files to {}", outcome.files.len(), outcome.output_dir.display());
            EXIT_OK
        }
        Err(e) => {
            eprint!("{}", e.to_json());
            let dir = out_dir.unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
            if fs::create_dir_all(&dir).is_ok() {
                let _ = fs::write(dir.join("error.json"), e.to_json());
            }
            e.exit_code
        }
    }
}
