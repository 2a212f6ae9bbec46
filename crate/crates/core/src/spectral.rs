//! Periodic fields on the 2π-torus represented by their Fourier modes
//! `û(k)`, `|k| <= K`, with the convention `u(x) = Σ_k û(k) e^{ikx}`.
//!
//! All Sobolev norms are pure sequence-space norms,
//! `‖u‖²_{H^s} = Σ_k ⟨k⟩^{2s} |û(k)|²` with `⟨k⟩ = (1 + k²)^{1/2}`; no factors
//! of 2π appear anywhere in the crate.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::transform;

/// Japanese bracket `⟨k⟩ = (1 + k²)^{1/2}`.
#[inline]
pub fn jbracket(k: f64) -> f64 {
    (1.0 + k * k).sqrt()
}

/// Space-time discretization: modes `|k| <= k_max`, `frames` uniform samples on `[0, t_final]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(rename = "K")]
    pub k_max: usize,
    #[serde(rename = "M")]
    pub frames: usize,
    #[serde(rename = "T")]
    pub t_final: f64,
}

impl GridSpec {
    pub fn new(k_max: usize, frames: usize, t_final: f64) -> Result<Self> {
        let grid = Self { k_max, frames, t_final };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_max < 1 {
            return Err(Error::Config("grid.K must be at least 1".into()));
        }
        if self.frames < 2 {
            return Err(Error::Config("grid.M must be at least 2".into()));
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(Error::Config("grid.T must be positive and finite".into()));
        }
        if self.t_final >= 1.0 {
            log::warn!("final time T = {} is outside the standing assumption T < 1", self.t_final);
        }
        Ok(())
    }

    /// Time step between consecutive frames.
    pub fn dt(&self) -> f64 {
        self.t_final / (self.frames - 1) as f64
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.dt()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.frames).map(|n| self.time(n)).collect()
    }

    /// Same time grid with a different spectral cutoff.
    pub fn with_k_max(&self, k_max: usize) -> Self {
        Self { k_max, ..*self }
    }

    /// Number of retained modes, `2K + 1`.
    pub fn modes(&self) -> usize {
        2 * self.k_max + 1
    }
}

/// Finite Fourier mode vector `û(k)`, `|k| <= K`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierField {
    k_max: usize,
    coeffs: Vec<Complex64>,
    real_symmetric: bool,
}

impl FourierField {
    pub fn zeros(k_max: usize) -> Self {
        Self { k_max, coeffs: vec![Complex64::new(0.0, 0.0); 2 * k_max + 1], real_symmetric: true }
    }

    /// Builds a field from coefficients ordered `k = -K..=K`.
    ///
    /// With `real_symmetric` set, the coefficients must already be conjugate
    /// symmetric to within `1e-12` of their largest modulus; they are then
    /// symmetrized exactly.
    pub fn from_coeffs(k_max: usize, coeffs: Vec<Complex64>, real_symmetric: bool) -> Result<Self> {
        if coeffs.len() != 2 * k_max + 1 {
            return Err(Error::Precondition(format!(
                "expected {} coefficients for K = {}, got {}",
                2 * k_max + 1,
                k_max,
                coeffs.len()
            )));
        }
        let mut field = Self { k_max, coeffs, real_symmetric: false };
        if real_symmetric {
            let scale = field.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
            let asym = check_real_symmetry(&field);
            if asym > 1e-12 * scale.max(1.0) {
                return Err(Error::Domain(format!(
                    "coefficients flagged real are not conjugate symmetric (asymmetry {asym:e})"
                )));
            }
            field.symmetrize();
        }
        Ok(field)
    }

    /// Real field with the given positive-frequency modes; `û(-k)` is set to `conj(û(k))`.
    /// A `k = 0` entry keeps only its real part.
    pub fn real_from_modes(k_max: usize, modes: &[(i64, Complex64)]) -> Self {
        let mut field = Self::zeros(k_max);
        for &(k, c) in modes {
            assert!(k.unsigned_abs() as usize <= k_max, "mode {k} outside |k| <= {k_max}");
            if k == 0 {
                field.coeffs[k_max] = Complex64::new(c.re, 0.0);
            } else {
                field.set(k, c);
                field.set(-k, c.conj());
            }
        }
        field.real_symmetric = true;
        field
    }

    /// `amplitude · cos(mode · x)`.
    pub fn cosine(k_max: usize, amplitude: f64, mode: i64) -> Self {
        if mode == 0 {
            return Self::real_from_modes(k_max, &[(0, Complex64::new(amplitude, 0.0))]);
        }
        Self::real_from_modes(k_max, &[(mode.abs(), Complex64::new(amplitude / 2.0, 0.0))])
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn is_real_symmetric(&self) -> bool {
        self.real_symmetric
    }

    /// Coefficients ordered `k = -K..=K`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// `û(k)`, zero outside the retained band.
    #[inline]
    pub fn coeff(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.k_max {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + self.k_max as i64) as usize]
        }
    }

    /// Sets `û(k)` and clears the reality flag.
    pub fn set(&mut self, k: i64, value: Complex64) {
        let idx = (k + self.k_max as i64) as usize;
        self.coeffs[idx] = value;
        self.real_symmetric = false;
    }

    /// Iterator over `(k, û(k))` in ascending `k`.
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let k_max = self.k_max as i64;
        self.coeffs.iter().enumerate().map(move |(i, c)| (i as i64 - k_max, *c))
    }

    /// Replaces `û(k)` by the average of `û(k)` and `conj(û(-k))`, making the field exactly real.
    pub fn symmetrize(&mut self) {
        let k_max = self.k_max;
        let mid = &mut self.coeffs[k_max];
        *mid = Complex64::new(mid.re, 0.0);
        for j in 1..=k_max {
            let avg = (self.coeffs[k_max + j] + self.coeffs[k_max - j].conj()) * 0.5;
            self.coeffs[k_max + j] = avg;
            self.coeffs[k_max - j] = avg.conj();
        }
        self.real_symmetric = true;
    }

    /// Builds a field mode-wise; the reality flag is taken from `real_symmetric`
    /// and enforced exactly when set.
    pub fn from_fn(k_max: usize, real_symmetric: bool, mut f: impl FnMut(i64) -> Complex64) -> Self {
        let coeffs = (-(k_max as i64)..=k_max as i64).map(&mut f).collect();
        let mut field = Self { k_max, coeffs, real_symmetric: false };
        if real_symmetric {
            field.symmetrize();
        }
        field
    }

    /// Truncates or zero-pads to a new cutoff.
    pub fn resized(&self, k_max: usize) -> Self {
        let mut out = Self::from_fn(k_max, false, |k| self.coeff(k));
        out.real_symmetric = self.real_symmetric;
        out
    }

    /// Complex multiple; the result keeps the reality flag only for real scalars.
    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            k_max: self.k_max,
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
            real_symmetric: self.real_symmetric && c.im == 0.0,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Mode-wise maximum of `|a(k) - b(k)|` over the union of both bands.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let k_max = self.k_max.max(other.k_max) as i64;
        (-k_max..=k_max).map(|k| (self.coeff(k) - other.coeff(k)).norm()).fold(0.0, f64::max)
    }

    /// Complex values `Σ_k û(k) e^{ikx_j}` on `n` uniform points of [0, 2π).
    pub fn to_complex_samples(&self, n: usize) -> Vec<Complex64> {
        assert!(n > 2 * self.k_max, "{n} samples cannot resolve K = {}", self.k_max);
        transform::modes_to_grid(&self.coeffs, self.k_max, n)
    }

    /// Real part of the reconstructed function on `n` uniform points of [0, 2π).
    pub fn to_samples(&self, n: usize) -> Vec<f64> {
        self.to_complex_samples(n).into_iter().map(|c| c.re).collect()
    }

    fn zip_with(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let k_max = self.k_max.max(other.k_max);
        let mut out = Self::from_fn(k_max, false, |k| op(self.coeff(k), other.coeff(k)));
        out.real_symmetric = self.real_symmetric && other.real_symmetric;
        out
    }
}

impl Add for &FourierField {
    type Output = FourierField;
    fn add(self, rhs: &FourierField) -> FourierField {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &FourierField {
    type Output = FourierField;
    fn sub(self, rhs: &FourierField) -> FourierField {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for &FourierField {
    type Output = FourierField;
    fn mul(self, rhs: f64) -> FourierField {
        self.scaled(Complex64::new(rhs, 0.0))
    }
}

impl Serialize for FourierField {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let triples: Vec<(i64, f64, f64)> = self.modes().map(|(k, c)| (k, c.re, c.im)).collect();
        triples.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FourierField {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let triples = Vec::<(i64, f64, f64)>::deserialize(deserializer)?;
        if triples.is_empty() || triples.len() % 2 == 0 {
            return Err(D::Error::custom("field must list modes -K..=K"));
        }
        let k_max = (triples.len() - 1) / 2;
        for (i, (k, _, _)) in triples.iter().enumerate() {
            if *k != i as i64 - k_max as i64 {
                return Err(D::Error::custom(format!("mode list must be -K..=K ascending, found {k} at position {i}")));
            }
        }
        let coeffs = triples.into_iter().map(|(_, re, im)| Complex64::new(re, im)).collect();
        let mut field = FourierField { k_max, coeffs, real_symmetric: false };
        field.real_symmetric = check_real_symmetry(&field) == 0.0;
        Ok(field)
    }
}

/// DFT of real samples on a uniform grid of [0, 2π), truncated to `|k| <= k_max`
/// and made exactly conjugate symmetric.
pub fn field_from_samples(samples: &[f64], k_max: usize) -> Result<FourierField> {
    if samples.len() < 2 * k_max + 2 {
        return Err(Error::Precondition(format!(
            "need at least {} samples for K = {}, got {}",
            2 * k_max + 2,
            k_max,
            samples.len()
        )));
    }
    let values = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let coeffs = transform::grid_to_modes(values, k_max);
    let mut field = FourierField { k_max, coeffs, real_symmetric: false };
    field.symmetrize();
    Ok(field)
}

/// `‖u‖_{H^s} = (Σ_k ⟨k⟩^{2s} |û(k)|²)^{1/2}`.
pub fn sobolev_norm(u: &FourierField, s: f64) -> f64 {
    u.modes()
        .map(|(k, c)| jbracket(k as f64).powf(2.0 * s) * c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `max_k |û(-k) - conj(û(k))|`; zero exactly when the field is real.
pub fn check_real_symmetry(u: &FourierField) -> f64 {
    let k_max = u.k_max as i64;
    (0..=k_max).map(|k| (u.coeff(-k) - u.coeff(k).conj()).norm()).fold(0.0, f64::max)
}

/// Uniformly sampled sequence of fields on `[0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    grid: GridSpec,
    frames: Vec<FourierField>,
}

impl Trajectory {
    pub fn new(grid: GridSpec, frames: Vec<FourierField>) -> Result<Self> {
        if frames.len() != grid.frames {
            return Err(Error::GridMismatch(format!(
                "grid has {} frames but {} were supplied",
                grid.frames,
                frames.len()
            )));
        }
        if let Some(bad) = frames.iter().find(|f| f.k_max() != grid.k_max) {
            return Err(Error::GridMismatch(format!(
                "frame with K = {} on a grid with K = {}",
                bad.k_max(),
                grid.k_max
            )));
        }
        Ok(Self { grid, frames })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, frames: vec![FourierField::zeros(grid.k_max); grid.frames] }
    }

    /// The same field at every frame.
    pub fn constant(grid: GridSpec, field: &FourierField) -> Self {
        let field = field.resized(grid.k_max);
        Self { grid, frames: vec![field; grid.frames] }
    }

    /// Builds frames from `(n, t_n)`; each frame is resized to the grid cutoff.
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(usize, f64) -> FourierField) -> Self {
        let frames = (0..grid.frames)
            .map(|n| {
                let frame = f(n, grid.time(n));
                if frame.k_max() == grid.k_max {
                    frame
                } else {
                    frame.resized(grid.k_max)
                }
            })
            .collect();
        Self { grid, frames }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn frames(&self) -> &[FourierField] {
        &self.frames
    }

    pub fn frame(&self, n: usize) -> &FourierField {
        &self.frames[n]
    }

    pub fn last(&self) -> &FourierField {
        self.frames.last().expect("trajectories have at least two frames")
    }

    /// Time series `ẑ(t_n, k)` of one mode.
    pub fn mode_series(&self, k: i64) -> Vec<Complex64> {
        self.frames.iter().map(|f| f.coeff(k)).collect()
    }

    pub fn check_same_grid(&self, other: &Trajectory) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!("{:?} vs {:?}", self.grid, other.grid)));
        }
        Ok(())
    }

    pub fn map(&self, mut f: impl FnMut(usize, &FourierField) -> FourierField) -> Self {
        Self::from_fn(self.grid, |n, _| f(n, &self.frames[n]))
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        self.map(|_, f| f.scaled(c))
    }

    pub fn try_sub(&self, other: &Trajectory) -> Result<Trajectory> {
        self.check_same_grid(other)?;
        Ok(self.map(|n, f| f - &other.frames[n]))
    }

    pub fn try_add(&self, other: &Trajectory) -> Result<Trajectory> {
        self.check_same_grid(other)?;
        Ok(self.map(|n, f| f + &other.frames[n]))
    }

    /// `sup_{n,k} |û(t_n, k)|`.
    pub fn max_abs(&self) -> f64 {
        self.frames.iter().map(FourierField::max_abs).fold(0.0, f64::max)
    }
}

impl<'de> Deserialize<'de> for Trajectory {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            grid: GridSpec,
            frames: Vec<FourierField>,
        }
        let raw = Raw::deserialize(deserializer)?;
        Trajectory::new(raw.grid, raw.frames).map_err(D::Error::custom)
    }
}

/// Regularity exponents of a run: `s₀` (data), `s₁` (smoothing), `b`, `δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevIndex {
    pub s0: f64,
    pub s1: f64,
    pub b: f64,
    pub delta: f64,
}

impl SobolevIndex {
    /// Exponent set for a given `s₀`: `s₁` at the midpoint of `(1 - s₀, min(1, 3s₀))`,
    /// `δ = (s₀ - 1/4)/5` and `b = 1/2 + 2δ`.
    pub fn for_s0(s0: f64) -> Result<Self> {
        let s1 = 0.5 * ((1.0 - s0) + (3.0 * s0).min(1.0));
        let delta = (s0 - 0.25) / 5.0;
        let params = Self { s0, s1, b: 0.5 + 2.0 * delta, delta };
        params.validate()?;
        Ok(params)
    }

    /// Checks `1/4 < s₀ < 1/2`, `1 - s₀ < s₁ < min(1, 3s₀)`, `0 < δ < s₀ - 1/4` and `b > 1/2`.
    pub fn validate(&self) -> Result<()> {
        let Self { s0, s1, b, delta } = *self;
        let mut problems = Vec::new();
        if !(0.25 < s0 && s0 < 0.5) {
            problems.push(format!("s0 = {s0} must lie in (1/4, 1/2)"));
        }
        if !(1.0 - s0 < s1 && s1 < (3.0 * s0).min(1.0)) {
            problems.push(format!("s1 = {s1} must lie in (1 - s0, min(1, 3 s0))"));
        }
        if !(0.0 < delta && delta < s0 - 0.25) {
            problems.push(format!("delta = {delta} must lie in (0, s0 - 1/4)"));
        }
        if !(b > 0.5) {
            problems.push(format!("b = {b} must exceed 1/2"));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems.join("; ")))
        }
    }
}
