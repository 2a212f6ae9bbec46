//! Duhamel integration against the modified linear flow and the Picard
//! iteration for the gauged remainder `z`.
//!
//! With `F = f̂e^{iQ}` the remainder solves
//! `∂_t ẑ = iφ_k ẑ + ik|ẑ|²ẑ + 2ik Re(F conj ẑ) ẑ + NR(F+z, F+z, F+z)`,
//! `φ_k = k³ + k|f̂(k)|²`, `ẑ(0) = 0`. Each iterate re-solves `Q` from the
//! previous `z` and integrates the right side once.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::{self, modulated_profile, GaugeSolveReport, PhaseTable, QSolveConfig};
use crate::nonlinearity::{nr_trilinear_fast, resonant_term};
use crate::norms::{dispersion, x_space_norm, NormProxyConfig, PhaseSymbol};
use crate::spectral::{FourierField, GridSpec, SobolevIndex, Trajectory};

fn default_tol() -> f64 {
    1e-10
}
fn default_max_iters() -> usize {
    30
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardConfig {
    pub params: SobolevIndex,
    #[serde(rename = "T")]
    pub t_final: f64,
    #[serde(rename = "M")]
    pub frames: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    /// Window and padding of the 𝒳-norm proxy.
    #[serde(default)]
    pub proxy: NormProxyConfig,
    #[serde(default = "QSolveConfig::default")]
    pub q_solve: QSolveConfig,
    /// Re-run on a grid with `2M - 1` frames and report the difference.
    #[serde(default)]
    pub richardson_check: bool,
    /// Evaluate `NR((F+z)^{⊗3})` as eight separate trilinear calls.
    #[serde(default)]
    pub expand_nr: bool,
}

impl PicardConfig {
    pub fn new(params: SobolevIndex, t_final: f64, frames: usize) -> Self {
        Self {
            params,
            t_final,
            frames,
            tol: default_tol(),
            max_iters: default_max_iters(),
            proxy: NormProxyConfig::default(),
            q_solve: QSolveConfig { s0: params.s0, ..QSolveConfig::default() },
            richardson_check: false,
            expand_nr: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.proxy.validate()?;
        if self.max_iters < 1 {
            return Err(Error::Config("picard.max_iters must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config("picard.tol must be positive".into()));
        }
        if self.t_final >= 1.0 {
            log::warn!("Picard run with T = {} >= 1; contraction is not expected", self.t_final);
        }
        Ok(())
    }

    pub fn grid(&self, k_max: usize) -> Result<GridSpec> {
        GridSpec::new(k_max, self.frames, self.t_final)
    }

    fn q_config(&self) -> QSolveConfig {
        QSolveConfig { s0: self.params.s0, ..self.q_solve }
    }
}

/// `z(t_n) = e^{it_nφ}z₀ + ∫₀^{t_n} e^{i(t_n-s)φ}F(s)ds` by the trapezoid rule
/// with the exact integrating factor, `φ_k = k³ + k|f̂(k)|²`.
pub fn duhamel_integrate(forcing: &Trajectory, f: &FourierField) -> Result<Trajectory> {
    duhamel_integrate_from(forcing, f, None)
}

pub fn duhamel_integrate_from(forcing: &Trajectory, f: &FourierField, z0: Option<&FourierField>) -> Result<Trajectory> {
    let grid = *forcing.grid();
    if let Some(z0) = z0 {
        if z0.k_max() != grid.k_max {
            return Err(Error::GridMismatch(format!("initial data K = {} vs forcing K = {}", z0.k_max(), grid.k_max)));
        }
    }
    let dt = grid.dt();
    let half = 0.5 * dt;
    let k_max = grid.k_max as i64;
    let series: Vec<Vec<Complex64>> = (-k_max..=k_max)
        .into_par_iter()
        .map(|k| {
            let step = Complex64::from_polar(1.0, dispersion(k, PhaseSymbol::Modified, Some(f)) * dt);
            let force = forcing.mode_series(k);
            let mut z = z0.map_or(Complex64::new(0.0, 0.0), |z0| z0.coeff(k));
            let mut out = Vec::with_capacity(grid.frames);
            out.push(z);
            for n in 1..grid.frames {
                z = step * (z + half * force[n - 1]) + half * force[n];
                out.push(z);
            }
            out
        })
        .collect();
    let real = f.is_real_symmetric()
        && forcing.frames().iter().all(FourierField::is_real_symmetric)
        && z0.map_or(true, FourierField::is_real_symmetric);
    Ok(Trajectory::from_fn(grid, |n, _| {
        FourierField::from_fn(grid.k_max, real, |k| series[(k + k_max) as usize][n])
    }))
}

fn rhs_frame(z: &FourierField, big_f: &FourierField, expand: bool) -> Result<FourierField> {
    let resonant = resonant_term(z);
    let cross = FourierField::from_fn(z.k_max(), false, |k| {
        let zk = z.coeff(k);
        Complex64::new(0.0, 2.0 * k as f64 * (big_f.coeff(k) * zk.conj()).re) * zk
    });
    let nr = if expand {
        let mut acc = FourierField::zeros(z.k_max());
        for mask in 0..8u8 {
            let pick = |bit: u8| if mask & (1 << bit) != 0 { z } else { big_f };
            acc = &acc + &nr_trilinear_fast(pick(0), pick(1), pick(2))?;
        }
        acc
    } else {
        let sum = big_f + z;
        nr_trilinear_fast(&sum, &sum, &sum)?
    };
    let mut out = &(&resonant + &cross) + &nr;
    if z.is_real_symmetric() && big_f.is_real_symmetric() {
        out.symmetrize();
    }
    Ok(out)
}

/// Frame-wise right side of the `z`-equation for a given phase table.
pub fn picard_rhs(z: &Trajectory, q: &PhaseTable, f: &FourierField) -> Result<Trajectory> {
    picard_rhs_with(z, q, f, false)
}

/// [`picard_rhs`] with the option of the eight-term multilinear expansion.
pub fn picard_rhs_with(z: &Trajectory, q: &PhaseTable, f: &FourierField, expand: bool) -> Result<Trajectory> {
    if q.grid() != z.grid() {
        return Err(Error::GridMismatch(format!("phase grid {:?} vs trajectory grid {:?}", q.grid(), z.grid())));
    }
    let profile = modulated_profile(&f.resized(z.grid().k_max), q);
    let frames = z
        .frames()
        .par_iter()
        .zip(profile.frames().par_iter())
        .map(|(zf, ff)| rhs_frame(zf, ff, expand))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(*z.grid(), frames)
}

/// One iterate: `Q_m = Q[z_m]`, `z_{m+1} = Duhamel(rhs(z_m, Q_m))`.
pub fn picard_step(z_m: &Trajectory, f: &FourierField, cfg: &PicardConfig) -> Result<(Trajectory, PhaseTable, GaugeSolveReport)> {
    let (q, rep) = gauge::solve_q(f, z_m, cfg.q_config())?;
    let forcing = picard_rhs_with(z_m, &q, f, cfg.expand_nr)?;
    let next = duhamel_integrate(&forcing, f)?;
    Ok((next, q, rep))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterRecord {
    pub norm_x: f64,
    pub diff_norm: f64,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RichardsonCheck {
    pub fine_frames: usize,
    /// `sup |z_coarse - z_fine|` on the shared nodes.
    pub max_diff: f64,
    /// Second-order extrapolated error estimate of the coarse run, `max_diff · 4/3`.
    pub coarse_error_estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardReport {
    pub iters: Vec<IterRecord>,
    /// `‖z₁‖_𝒳`.
    #[serde(rename = "K")]
    pub k_first: f64,
    pub converged: bool,
    pub certified_t0: f64,
    pub contraction_threshold: Option<f64>,
    pub final_norm_x: f64,
    /// `‖z‖_𝒳 <= 2K`.
    pub within_2k: bool,
    /// `sup |z - Duhamel(rhs(z, Q[z]))|` for the returned pair.
    pub strong_residual: f64,
    pub phase_sweeps: usize,
    pub richardson: Option<RichardsonCheck>,
}

/// Runs the iteration from `z₀ = 0` until the 𝒳-proxy of the update is at most `tol`.
///
/// Three consecutive ratios `>= 1` (or non-finite) abort with
/// [`Error::NonContraction`]; exhausting `max_iters` returns an unconverged report.
pub fn solve_z(f: &FourierField, cfg: &PicardConfig) -> Result<(Trajectory, PhaseTable, PicardReport)> {
    cfg.validate()?;
    let grid = cfg.grid(f.k_max())?;
    let xnorm = |z: &Trajectory| x_space_norm(z, &cfg.params, f, &cfg.proxy);

    let mut z = Trajectory::zeros(grid);
    let mut iters: Vec<IterRecord> = Vec::new();
    let mut ratios: Vec<f64> = Vec::new();
    let mut bad_run = 0;
    let mut converged = false;
    let mut first_q_report = None;
    for _ in 0..cfg.max_iters {
        let (next, _, q_rep) = picard_step(&z, f, cfg)?;
        first_q_report.get_or_insert(q_rep);
        let diff_norm = xnorm(&next.try_sub(&z)?)?;
        let norm_x = xnorm(&next)?;
        let ratio = iters.last().map(|prev| diff_norm / prev.diff_norm);
        log::debug!("picard iterate {}: |z| = {norm_x:e}, |dz| = {diff_norm:e}, ratio {ratio:?}", iters.len() + 1);
        iters.push(IterRecord { norm_x, diff_norm, ratio });
        z = next;
        if let Some(r) = ratio {
            ratios.push(r);
            // a vanishing previous difference gives NaN or ∞ only when it was already at the stop level
            if !(r < 1.0) && !(diff_norm <= cfg.tol) {
                bad_run += 1;
            } else {
                bad_run = 0;
            }
        }
        if !norm_x.is_finite() {
            bad_run = 3;
        }
        if bad_run >= 3 {
            return Err(Error::NonContraction { ratios });
        }
        if diff_norm <= cfg.tol {
            converged = true;
            break;
        }
    }

    let (q, q_rep) = gauge::solve_q(f, &z, cfg.q_config())?;
    let again = duhamel_integrate(&picard_rhs_with(&z, &q, f, cfg.expand_nr)?, f)?;
    let strong_residual = again.try_sub(&z)?.max_abs();
    let k_first = iters[0].norm_x;
    let final_norm_x = iters.last().map_or(0.0, |r| r.norm_x);
    let first = first_q_report.expect("at least one iterate");

    let richardson = if cfg.richardson_check {
        let fine_cfg = PicardConfig { frames: 2 * cfg.frames - 1, richardson_check: false, ..*cfg };
        let (fine, _, _) = solve_z(f, &fine_cfg)?;
        let max_diff = (0..grid.frames)
            .map(|n| z.frame(n).max_abs_diff(fine.frame(2 * n)))
            .fold(0.0, f64::max);
        Some(RichardsonCheck { fine_frames: fine_cfg.frames, max_diff, coarse_error_estimate: max_diff * 4.0 / 3.0 })
    } else {
        None
    };

    let report = PicardReport {
        iters,
        k_first,
        converged,
        certified_t0: q_rep.certified_t0.min(first.certified_t0),
        contraction_threshold: q_rep.contraction_threshold,
        final_norm_x,
        within_2k: final_norm_x <= 2.0 * k_first,
        strong_residual,
        phase_sweeps: q_rep.sweeps,
        richardson,
    };
    Ok((z, q, report))
}

/// `û = ẑ + f̂e^{iQ}`; `û(0) = f̂` whenever `ẑ(0) = 0`.
pub fn reconstruct_u(z: &Trajectory, q: &PhaseTable, f: &FourierField) -> Result<Trajectory> {
    gauge::gauge_compose(z, q, &f.resized(z.grid().k_max))
}
