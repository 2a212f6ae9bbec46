//! Computable stand-ins for the Bourgain-type norms
//! `‖z‖²_{Y^{s,b}} = Σ_k ∫ ⟨k⟩^{2s} ⟨τ - φ_k⟩^{2b} |ẑ(τ,k)|² dτ`.
//!
//! Each mode's time series is multiplied by a window of unit discrete L² mass,
//! demodulated by `e^{-iφ_k t}`, zero padded and transformed in time. The sum
//! is a rectangle rule over the padded frequency grid, normalized so that at
//! `b = 0` it reduces to the windowed discrete Parseval sum. Demodulating
//! before the transform keeps the spectrum centred at `σ = τ - φ_k = 0`,
//! so large `φ_k` never aliases.
//!
//! These are proxies: the restriction norm (an infimum over extensions) is
//! not computable, and every statement built on this module is about the proxy.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{jbracket, sobolev_norm, FourierField, SobolevIndex, Trajectory};
use crate::transform;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    Hann,
    Rect,
}

/// Dispersion symbol `φ_k` the modulation is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseSymbol {
    /// `k³`
    Airy,
    /// `k³ + k|f̂(k)|²`
    Modified,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormProxyConfig {
    pub s: f64,
    pub b: f64,
    pub window: Window,
    pub pad_factor: usize,
    pub phase: PhaseSymbol,
}

impl Default for NormProxyConfig {
    fn default() -> Self {
        Self { s: 0.3, b: 0.52, window: Window::Hann, pad_factor: 4, phase: PhaseSymbol::Modified }
    }
}

impl NormProxyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pad_factor < 1 {
            return Err(Error::Config("proxy.pad_factor must be at least 1".into()));
        }
        if !(self.s.is_finite() && self.b.is_finite()) {
            return Err(Error::Config("proxy.s and proxy.b must be finite".into()));
        }
        Ok(())
    }

    pub fn with_sb(&self, s: f64, b: f64) -> Self {
        Self { s, b, ..*self }
    }
}

/// `φ_k` for the chosen symbol.
pub fn dispersion(k: i64, phase: PhaseSymbol, f: Option<&FourierField>) -> f64 {
    let cube = (k * k * k) as f64;
    match (phase, f) {
        (PhaseSymbol::Modified, Some(f)) => cube + k as f64 * f.coeff(k).norm_sqr(),
        _ => cube,
    }
}

/// Window samples scaled so that `Δt Σ w_n² = 1`.
pub fn window_samples(window: Window, m: usize, dt: f64) -> Vec<f64> {
    let raw: Vec<f64> = match window {
        Window::Rect => vec![1.0; m],
        Window::Hann => (0..m).map(|n| (PI * n as f64 / (m - 1) as f64).sin().powi(2)).collect(),
    };
    let mass = dt * raw.iter().map(|w| w * w).sum::<f64>();
    raw.iter().map(|w| w / mass.sqrt()).collect()
}

/// Signed frequency of padded-DFT bin `j` for `l` bins of spacing `dt`.
pub fn bin_frequency(j: usize, l: usize, dt: f64) -> f64 {
    let signed = if j <= l / 2 { j as f64 } else { j as f64 - l as f64 };
    TAU * signed / (l as f64 * dt)
}

fn mode_contribution(series: &[Complex64], phi: f64, weights: &[f64], window: &[f64], cfg: &NormProxyConfig, dt: f64) -> f64 {
    let m = series.len();
    let l = cfg.pad_factor * m;
    let mut buf = vec![Complex64::new(0.0, 0.0); l];
    for n in 0..m {
        let t = n as f64 * dt;
        buf[n] = series[n] * window[n] * Complex64::from_polar(1.0, -phi * t);
    }
    transform::forward(&mut buf);
    let sum: f64 = buf.iter().zip(weights).map(|(s, w)| w * s.norm_sqr()).sum();
    sum * dt / l as f64
}

/// Windowed `Y^{s,b}` proxy of a trajectory (`X^{s,b}` with the Airy symbol).
pub fn ysb_norm_proxy(z: &Trajectory, cfg: &NormProxyConfig, f: Option<&FourierField>) -> Result<f64> {
    cfg.validate()?;
    if cfg.phase == PhaseSymbol::Modified && f.is_none() {
        return Err(Error::Config("the modified phase symbol needs a profile f".into()));
    }
    let grid = z.grid();
    if grid.frames < 8 {
        return Err(Error::Precondition(format!("time-DFT proxy needs M >= 8, got {}", grid.frames)));
    }
    let dt = grid.dt();
    let window = window_samples(cfg.window, grid.frames, dt);
    let l = cfg.pad_factor * grid.frames;
    let weights: Vec<f64> = (0..l).map(|j| jbracket(bin_frequency(j, l, dt)).powf(2.0 * cfg.b)).collect();
    let k_max = grid.k_max as i64;
    let parts: Vec<f64> = (-k_max..=k_max)
        .into_par_iter()
        .map(|k| {
            let series = z.mode_series(k);
            if series.iter().all(|c| *c == Complex64::new(0.0, 0.0)) {
                return 0.0;
            }
            let phi = dispersion(k, cfg.phase, f);
            jbracket(k as f64).powf(2.0 * cfg.s) * mode_contribution(&series, phi, &weights, &window, cfg, dt)
        })
        .collect();
    Ok(parts.iter().sum::<f64>().sqrt())
}

/// `max_n ‖z(t_n)‖_{H^s}`.
pub fn xinfty_hs_norm(z: &Trajectory, s: f64) -> f64 {
    z.frames().iter().map(|fr| sobolev_norm(fr, s)).fold(0.0, f64::max)
}

/// `‖z‖_𝒳 = Y^{s₀,b}` proxy with the modified symbol plus `sup_t H^{s₁}`.
///
/// Only `window` and `pad_factor` are taken from `proxy`; `s`, `b` and the
/// symbol come from `params`.
pub fn x_space_norm(z: &Trajectory, params: &SobolevIndex, f: &FourierField, proxy: &NormProxyConfig) -> Result<f64> {
    params.validate()?;
    let cfg = NormProxyConfig { s: params.s0, b: params.b, phase: PhaseSymbol::Modified, ..*proxy };
    Ok(ysb_norm_proxy(z, &cfg, Some(f))? + xinfty_hs_norm(z, params.s1))
}
