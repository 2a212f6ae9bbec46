//! Seeded searches for large values of the trilinear estimate ratios, plus
//! the smoothing and uniqueness diagnostics evaluated on computed solutions.
//!
//! Samples are free modified-phase evolutions `ĝ(k)e^{iφ_k t}` of random data,
//! optionally with a random phase modulation `e^{i a_k sin(πt/T)}`. Each input
//! is scaled to unit denominator norm before the ratio is formed.
//!
//! Ensembles are nested: level `ℓ` draws `count` new samples at cutoff `K_ℓ`
//! and is evaluated on every sample drawn at levels `<= ℓ`, zero padded to
//! `K_ℓ`. Since padding leaves the denominators unchanged and only adds output
//! modes to the numerators, the per-level maxima are nondecreasing in `K`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::{draw_real_field, sample_rng};
use crate::error::{Error, Result};
use crate::gauge::{gauge_decompose, phase_p};
use crate::nonlinearity::{eval_h_form_filtered, is_comparable_triple, nr_trilinear_fast, select_k0, NRSplitConfig};
use crate::norms::{dispersion, xinfty_hs_norm, ysb_norm_proxy, NormProxyConfig, PhaseSymbol};
use crate::picard::{duhamel_integrate, duhamel_integrate_from, picard_rhs};
use crate::spectral::{sobolev_norm, FourierField, GridSpec, SobolevIndex, Trajectory};

/// Triples with `ratio · k_min >= k_max` count as comparable-frequency (Case I).
pub const CASE_RATIO: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleFamily {
    #[default]
    Free,
    Modulated,
}

fn default_t() -> f64 {
    0.01
}
fn default_m() -> usize {
    16
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub seed: u64,
    pub count: usize,
    #[serde(rename = "K")]
    pub k_max: usize,
    pub decay_exponent: f64,
    pub params: SobolevIndex,
    pub proxy: NormProxyConfig,
    #[serde(rename = "T", default = "default_t")]
    pub t_final: f64,
    #[serde(rename = "M", default = "default_m")]
    pub frames: usize,
    /// Extra, smaller cutoffs for the nested growth table; `K` is always the last level.
    #[serde(default)]
    pub k_levels: Vec<usize>,
    #[serde(default)]
    pub family: EnsembleFamily,
}

impl EnsembleSpec {
    pub fn new(seed: u64, count: usize, k_max: usize, params: SobolevIndex) -> Self {
        Self {
            seed,
            count,
            k_max,
            decay_exponent: params.s0 + 0.5,
            params,
            proxy: NormProxyConfig::default(),
            t_final: default_t(),
            frames: default_m(),
            k_levels: Vec::new(),
            family: EnsembleFamily::Free,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 1 {
            return Err(Error::Config("ensemble.count must be at least 1".into()));
        }
        if self.k_levels.iter().any(|&k| k < 1 || k > self.k_max) {
            return Err(Error::Config(format!("ensemble.k_levels must lie in [1, K = {}]", self.k_max)));
        }
        if !self.decay_exponent.is_finite() {
            return Err(Error::Config("ensemble.decay_exponent must be finite".into()));
        }
        self.params.validate()?;
        self.proxy.validate()?;
        let grid = self.grid(self.k_max)?;
        if grid.frames < 8 {
            return Err(Error::Config("ensemble.M must be at least 8".into()));
        }
        Ok(())
    }

    /// Sorted distinct cutoffs ending in `K`.
    pub fn levels(&self) -> Vec<usize> {
        let mut levels: Vec<usize> = self.k_levels.iter().copied().chain([self.k_max]).collect();
        levels.sort_unstable();
        levels.dedup();
        levels
    }

    fn grid(&self, k_max: usize) -> Result<GridSpec> {
        GridSpec::new(k_max, self.frames, self.t_final)
    }
}

/// Drawn inputs of one sample, stored at the cutoff they were drawn at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub level_k: usize,
    pub index: u64,
    pub data: [FourierField; 3],
    /// Modulation amplitudes `a(k)` for `k = 1..=K`, modulated family only.
    pub modulation: Option<[Vec<f64>; 3]>,
}

fn draw_sample(spec: &EnsembleSpec, level_k: usize, index: u64) -> Sample {
    let mut rng = sample_rng(spec.seed, index);
    let data = [(); 3].map(|_| draw_real_field(&mut rng, level_k, spec.decay_exponent));
    let modulation = (spec.family == EnsembleFamily::Modulated)
        .then(|| [(); 3].map(|_| (0..level_k).map(|_| rand::Rng::gen_range(&mut rng, -1.0..1.0)).collect()));
    Sample { level_k, index, data, modulation }
}

/// Free modified-phase evolution of `g` on `grid`, with optional odd phase modulation.
pub fn free_evolution(g: &FourierField, f: &FourierField, grid: GridSpec, modulation: Option<&[f64]>) -> Trajectory {
    Trajectory::from_fn(grid, |_, t| {
        let bump = (std::f64::consts::PI * t / grid.t_final).sin();
        let modes: Vec<(i64, Complex64)> = (0..=grid.k_max as i64)
            .map(|k| {
                let a = match (k, modulation) {
                    (k, Some(m)) if k >= 1 => m.get(k as usize - 1).copied().unwrap_or(0.0),
                    _ => 0.0,
                };
                let phase = dispersion(k, PhaseSymbol::Modified, Some(f)) * t + a * bump;
                (k, g.coeff(k) * Complex64::from_polar(1.0, phase))
            })
            .collect();
        FourierField::real_from_modes(grid.k_max, &modes)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeKind {
    Estimate16,
    Trilinear12,
    HForm700,
}

/// Ratio of one sample; `case_i`/`case_ii` only for the explicit-form probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleRatio {
    pub ratio: f64,
    pub case_i: Option<f64>,
    pub case_ii: Option<f64>,
}

fn y_proxy(u: &Trajectory, proxy: &NormProxyConfig, s: f64, b: f64, f: &FourierField) -> Result<f64> {
    let cfg = NormProxyConfig { s, b, ..*proxy };
    ysb_norm_proxy(u, &cfg, Some(f))
}

fn nr_frames(u: &[Trajectory; 3]) -> Result<Trajectory> {
    let frames = (0..u[0].grid().frames)
        .map(|n| nr_trilinear_fast(u[0].frame(n), u[1].frame(n), u[2].frame(n)))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(*u[0].grid(), frames)
}

/// `sup_t ‖Duhamel(NR(u₁,u₂,u₃))‖_{H^{s₁}} / (T^δ Π_j ‖u_j‖_{Y^{s₀,b}})`; `None` for a zero denominator.
pub fn ratio_16(u: &[Trajectory; 3], f: &FourierField, params: &SobolevIndex, proxy: &NormProxyConfig) -> Result<Option<f64>> {
    let mut den = u[0].grid().t_final.powf(params.delta);
    for uj in u {
        den *= y_proxy(uj, proxy, params.s0, params.b, f)?;
    }
    if den == 0.0 {
        return Ok(None);
    }
    let big_u = duhamel_integrate(&nr_frames(u)?, f)?;
    Ok(Some(xinfty_hs_norm(&big_u, params.s1) / den))
}

/// `‖NR(u₁,u₂,u₃)‖_{Y^{s₀,b-1+δ}} / Π_j ‖u_j‖_{Y^{s₀,b}}`; `None` for a zero denominator.
pub fn ratio_12(u: &[Trajectory; 3], f: &FourierField, params: &SobolevIndex, proxy: &NormProxyConfig) -> Result<Option<f64>> {
    let mut den = 1.0;
    for uj in u {
        den *= y_proxy(uj, proxy, params.s0, params.b, f)?;
    }
    if den == 0.0 {
        return Ok(None);
    }
    let num = y_proxy(&nr_frames(u)?, proxy, params.s0, params.b - 1.0 + params.delta, f)?;
    Ok(Some(num / den))
}

/// `sup_t ‖H(u₁,u₂,u₃)‖_{H^{s₁}} / Π_j ‖u_j(0)‖_{H^{s₀}}`, overall and split into
/// comparable-frequency (Case I) and separated (Case II) triples.
pub fn ratio_700(u: &[Trajectory; 3], f: &FourierField, params: &SobolevIndex, k0: usize) -> Result<Option<SampleRatio>> {
    let den: f64 = u.iter().map(|uj| sobolev_norm(uj.frame(0), params.s0)).product();
    if den == 0.0 {
        return Ok(None);
    }
    let cfg = NRSplitConfig { k0 };
    let (mut sup_all, mut sup_i, mut sup_ii) = (0.0f64, 0.0f64, 0.0f64);
    for n in 0..u[0].grid().frames {
        let (a, b, c) = (u[0].frame(n), u[1].frame(n), u[2].frame(n));
        let h1 = eval_h_form_filtered(a, b, c, f, cfg, |x, y, z| is_comparable_triple(x, y, z, CASE_RATIO))?;
        let h2 = eval_h_form_filtered(a, b, c, f, cfg, |x, y, z| !is_comparable_triple(x, y, z, CASE_RATIO))?;
        sup_all = sup_all.max(sobolev_norm(&(&h1 + &h2), params.s1));
        sup_i = sup_i.max(sobolev_norm(&h1, params.s1));
        sup_ii = sup_ii.max(sobolev_norm(&h2, params.s1));
    }
    Ok(Some(SampleRatio { ratio: sup_all / den, case_i: Some(sup_i / den), case_ii: Some(sup_ii / den) }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioSummary {
    pub max: Option<f64>,
    pub mean: Option<f64>,
    pub p99: Option<f64>,
}

impl RatioSummary {
    fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self { max: None, mean: None, p99: None };
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let rank = ((0.99 * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
        Self {
            max: sorted.last().copied(),
            mean: Some(values.iter().sum::<f64>() / values.len() as f64),
            p99: Some(sorted[rank - 1]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    #[serde(rename = "K")]
    pub k_max: usize,
    pub samples: usize,
    pub valid: usize,
    pub max_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case_i_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case_ii_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArgmaxSample {
    pub ratio: f64,
    pub sample: Sample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub probe: ProbeKind,
    pub spec: EnsembleSpec,
    pub valid_samples: usize,
    pub skipped: usize,
    /// Per-sample results at the top level, in draw order; `null` marks a skipped sample.
    pub ratios: Vec<Option<SampleRatio>>,
    pub ratios_summary: RatioSummary,
    #[serde(rename = "per_K")]
    pub per_k: Vec<LevelSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k0: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case_i_summary: Option<RatioSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case_ii_summary: Option<RatioSummary>,
    pub argmax_sample: Option<ArgmaxSample>,
    /// Set by the runner when the argmax snapshot is written to its own file.
    pub argmax_sample_file: Option<String>,
}

impl ProbeReport {
    pub fn max_ratio(&self) -> Option<f64> {
        self.ratios_summary.max
    }
}

fn evaluate(kind: ProbeKind, sample: &Sample, f: &FourierField, spec: &EnsembleSpec, eval_k: usize, k0: usize) -> Result<Option<SampleRatio>> {
    let grid = spec.grid(eval_k)?;
    let mods = sample.modulation.as_ref();
    let mut u: [Trajectory; 3] = [0, 1, 2].map(|j| {
        let g = sample.data[j].resized(eval_k);
        free_evolution(&g, f, grid, mods.map(|m| m[j].as_slice()))
    });
    // unit denominators, fixed at the draw cutoff so padding leaves them unchanged
    let draw_grid = spec.grid(sample.level_k)?;
    for j in 0..3 {
        let norm = match kind {
            ProbeKind::HForm700 => sobolev_norm(&sample.data[j], spec.params.s0),
            _ => {
                let at_draw = free_evolution(&sample.data[j], f, draw_grid, mods.map(|m| m[j].as_slice()));
                y_proxy(&at_draw, &spec.proxy, spec.params.s0, spec.params.b, f)?
            }
        };
        if norm == 0.0 {
            return Ok(None);
        }
        u[j] = u[j].scaled(Complex64::new(1.0 / norm, 0.0));
    }
    let plain = |r: Option<f64>| r.map(|ratio| SampleRatio { ratio, case_i: None, case_ii: None });
    match kind {
        ProbeKind::Estimate16 => Ok(plain(ratio_16(&u, f, &spec.params, &spec.proxy)?)),
        ProbeKind::Trilinear12 => Ok(plain(ratio_12(&u, f, &spec.params, &spec.proxy)?)),
        ProbeKind::HForm700 => ratio_700(&u, f, &spec.params, k0),
    }
}

fn run_probe(kind: ProbeKind, f: &FourierField, spec: &EnsembleSpec) -> Result<ProbeReport> {
    spec.validate()?;
    if !f.is_real_symmetric() {
        return Err(Error::Domain("probe profile f must be real".into()));
    }
    let levels = spec.levels();
    let mut samples: Vec<Sample> = Vec::new();
    let mut per_k = Vec::new();
    let mut last: Vec<Option<SampleRatio>> = Vec::new();
    let k0 = match kind {
        ProbeKind::HForm700 => select_k0(f, spec.k_max),
        _ => 0,
    };
    for (level, &k) in levels.iter().enumerate() {
        let offset = (level * spec.count) as u64;
        samples.extend((0..spec.count as u64).map(|i| draw_sample(spec, k, offset + i)));
        last = samples
            .par_iter()
            .map(|s| evaluate(kind, s, f, spec, k, k0))
            .collect::<Result<Vec<_>>>()?;
        let valid: Vec<&SampleRatio> = last.iter().flatten().collect();
        let max_of = |g: fn(&SampleRatio) -> Option<f64>| valid.iter().filter_map(|r| g(r)).reduce(f64::max);
        per_k.push(LevelSummary {
            k_max: k,
            samples: samples.len(),
            valid: valid.len(),
            max_ratio: max_of(|r| Some(r.ratio)),
            case_i_max: max_of(|r| r.case_i),
            case_ii_max: max_of(|r| r.case_ii),
        });
    }

    let valid: Vec<f64> = last.iter().flatten().map(|r| r.ratio).collect();
    let argmax = last
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.map(|r| (i, r.ratio)))
        .fold(None, |best: Option<(usize, f64)>, (i, r)| match best {
            Some((_, b)) if b >= r => best,
            _ => Some((i, r)),
        })
        .map(|(i, ratio)| ArgmaxSample { ratio, sample: samples[i].clone() });
    let cases = |g: fn(&SampleRatio) -> Option<f64>| {
        (kind == ProbeKind::HForm700).then(|| RatioSummary::of(&last.iter().flatten().filter_map(g).collect::<Vec<_>>()))
    };
    Ok(ProbeReport {
        probe: kind,
        spec: spec.clone(),
        valid_samples: valid.len(),
        skipped: last.len() - valid.len(),
        ratios_summary: RatioSummary::of(&valid),
        case_i_summary: cases(|r| r.case_i),
        case_ii_summary: cases(|r| r.case_ii),
        k0: (kind == ProbeKind::HForm700).then_some(k0),
        ratios: last,
        per_k,
        argmax_sample: argmax,
        argmax_sample_file: None,
    })
}

/// Ratio probe for the `L^∞_t H^{s₁}` estimate of the Duhamel term of `NR`.
pub fn probe_estimate_16(f: &FourierField, spec: &EnsembleSpec) -> Result<ProbeReport> {
    run_probe(ProbeKind::Estimate16, f, spec)
}

/// Ratio probe for the `Y^{s₀,b-1+δ}` trilinear estimate of `NR`.
pub fn probe_trilinear_12(f: &FourierField, spec: &EnsembleSpec) -> Result<ProbeReport> {
    run_probe(ProbeKind::Trilinear12, f, spec)
}

/// Ratio probe for the explicit form `H`, with Case I / Case II maxima.
pub fn probe_h_form_700(f: &FourierField, spec: &EnsembleSpec) -> Result<ProbeReport> {
    run_probe(ProbeKind::HForm700, f, spec)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingFrame {
    pub t: f64,
    /// `‖u - f̂e^{iP}‖_{H^{s₁}}`
    pub remainder_hs1: f64,
    /// `Σ_k |k| ||û|² - |f̂|²|`
    pub modulus_sum: f64,
    /// `Σ_k |k|^γ ||û|² - |f̂|²|`, `γ = min(4s₀, 1+s₀)`
    pub modulus_sum_upgraded: f64,
    /// `sup_k |k| ||û|² - |f̂|²|`
    pub modulus_sup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingReport {
    pub upgraded_exponent: f64,
    pub frames: Vec<SmoothingFrame>,
    pub sup_remainder_hs1: f64,
    pub sup_modulus_sum: f64,
    pub sup_modulus_sum_upgraded: f64,
    pub sup_modulus_sup: f64,
}

/// Smoothing metrics of a solution `u` with data `f`.
pub fn smoothing_report(u: &Trajectory, f: &FourierField, params: &SobolevIndex) -> Result<SmoothingReport> {
    let k_max = u.grid().k_max;
    let f = f.resized(k_max);
    let start = u.frame(0).max_abs_diff(&f);
    if start > 1e-12 {
        return Err(Error::Precondition(format!("u(0) differs from f by {start:e}")));
    }
    let gamma = (4.0 * params.s0).min(1.0 + params.s0);
    let z = gauge_decompose(u, &phase_p(u), &f)?;
    let frames: Vec<SmoothingFrame> = (0..u.grid().frames)
        .map(|n| {
            let mut sums = (0.0, 0.0, 0.0f64);
            for (k, c) in u.frame(n).modes() {
                let d = (c.norm_sqr() - f.coeff(k).norm_sqr()).abs();
                let ak = k.abs() as f64;
                sums.0 += ak * d;
                sums.1 += ak.powf(gamma) * d;
                sums.2 = sums.2.max(ak * d);
            }
            SmoothingFrame {
                t: u.grid().time(n),
                remainder_hs1: sobolev_norm(z.frame(n), params.s1),
                modulus_sum: sums.0,
                modulus_sum_upgraded: sums.1,
                modulus_sup: sums.2,
            }
        })
        .collect();
    let sup = |g: fn(&SmoothingFrame) -> f64| frames.iter().map(g).fold(0.0, f64::max);
    Ok(SmoothingReport {
        upgraded_exponent: gamma,
        sup_remainder_hs1: sup(|m| m.remainder_hs1),
        sup_modulus_sum: sup(|m| m.modulus_sum),
        sup_modulus_sum_upgraded: sup(|m| m.modulus_sum_upgraded),
        sup_modulus_sup: sup(|m| m.modulus_sup),
        frames,
    })
}

/// `sup_{t,k} |v - Duhamel(rhs(v, P))|` for `v = u - f̂e^{iP}`, `P = P[u]`.
pub fn v_equation_residual(u: &Trajectory, f: &FourierField) -> Result<f64> {
    let f = f.resized(u.grid().k_max);
    let p = phase_p(u);
    let v = gauge_decompose(u, &p, &f)?;
    let rhs = picard_rhs(&v, &p, &f)?;
    let again = duhamel_integrate_from(&rhs, &f, Some(v.frame(0)))?;
    Ok(again.try_sub(&v)?.max_abs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeDifference {
    /// `(k, sup_t |k| ||û₁|² - |û₂|²|)` in ascending `k`.
    pub per_k: Vec<(i64, f64)>,
    pub sup: f64,
}

pub fn difference_gauge_metric(u1: &Trajectory, u2: &Trajectory) -> Result<GaugeDifference> {
    u1.check_same_grid(u2)?;
    let k_max = u1.grid().k_max as i64;
    let per_k: Vec<(i64, f64)> = (-k_max..=k_max)
        .map(|k| {
            let v = u1
                .frames()
                .iter()
                .zip(u2.frames())
                .map(|(a, b)| k.abs() as f64 * (a.coeff(k).norm_sqr() - b.coeff(k).norm_sqr()).abs())
                .fold(0.0, f64::max);
            (k, v)
        })
        .collect();
    let sup = per_k.iter().map(|p| p.1).fold(0.0, f64::max);
    Ok(GaugeDifference { per_k, sup })
}
