//! Oracle integrator for the Galilean-shifted mKdV equation
//! `∂_t û = iφ_k û + N(û)` with `φ_k = k³` (or `k³ + k|f̂(k)|²`, in which case
//! `ik|f̂(k)|²û` is moved out of `N`).
//!
//! ETDRK4 follows Cox & Matthews with the φ-functions evaluated as complex
//! contour means on a unit circle around each `hL_k`; IFRK4 is classical RK4
//! in the interaction picture.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nonlinearity::{conserved_functionals, direct_nonlinearity, ConservedFunctionals};
use crate::norms::{dispersion, PhaseSymbol};
use crate::spectral::{sobolev_norm, FourierField, GridSpec, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Etdrk4,
    Ifrk4,
}

fn default_contour() -> usize {
    32
}
fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ETDConfig {
    pub dt: f64,
    pub scheme: Scheme,
    pub linear_phase: PhaseSymbol,
    #[serde(default = "default_contour")]
    pub contour_points: usize,
    /// Debug switch: `false` integrates the linear flow only.
    #[serde(default = "yes")]
    pub nonlinear: bool,
}

impl Default for ETDConfig {
    fn default() -> Self {
        Self { dt: 1e-4, scheme: Scheme::Etdrk4, linear_phase: PhaseSymbol::Airy, contour_points: 32, nonlinear: true }
    }
}

impl ETDConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config("etd.dt must be positive".into()));
        }
        if self.contour_points < 16 {
            return Err(Error::Config("etd.contour_points must be at least 16".into()));
        }
        Ok(())
    }
}

/// Mode-wise multiplication by `e^{itφ_k}`; `f` selects the modified symbol.
pub fn airy_exact(u0: &FourierField, t: f64, f: Option<&FourierField>) -> FourierField {
    let phase = if f.is_some() { PhaseSymbol::Modified } else { PhaseSymbol::Airy };
    let mut out = FourierField::from_fn(u0.k_max(), false, |k| {
        u0.coeff(k) * Complex64::from_polar(1.0, dispersion(k, phase, f) * t)
    });
    if u0.is_real_symmetric() && f.map_or(true, FourierField::is_real_symmetric) {
        out.symmetrize();
    }
    out
}

/// Per-mode coefficients of one step of size `h`.
struct StepCoefficients {
    e: Vec<Complex64>,
    e2: Vec<Complex64>,
    q: Vec<Complex64>,
    f1: Vec<Complex64>,
    f2: Vec<Complex64>,
    f3: Vec<Complex64>,
}

fn contour_mean(center: Complex64, points: usize, g: impl Fn(Complex64) -> Complex64) -> Complex64 {
    let sum: Complex64 = (0..points)
        .map(|j| g(center + Complex64::from_polar(1.0, TAU * (j as f64 + 0.5) / points as f64)))
        .sum();
    sum / points as f64
}

impl StepCoefficients {
    fn new(phis: &[f64], h: f64, points: usize) -> Self {
        let mut c = Self { e: vec![], e2: vec![], q: vec![], f1: vec![], f2: vec![], f3: vec![] };
        for &phi in phis {
            let l = Complex64::new(0.0, phi * h);
            c.e.push(l.exp());
            c.e2.push((l / 2.0).exp());
            c.q.push(h * contour_mean(l, points, |z| ((z / 2.0).exp() - 1.0) / z));
            c.f1.push(h * contour_mean(l, points, |z| (-4.0 - z + z.exp() * (4.0 - 3.0 * z + z * z)) / z.powi(3)));
            c.f2.push(h * contour_mean(l, points, |z| (2.0 + z + z.exp() * (z - 2.0)) / z.powi(3)));
            c.f3.push(h * contour_mean(l, points, |z| (-4.0 - 3.0 * z - z * z + z.exp() * (4.0 - z)) / z.powi(3)));
        }
        c
    }
}

struct Integrator<'a> {
    k_max: usize,
    cfg: ETDConfig,
    f: &'a FourierField,
    phis: Vec<f64>,
}

impl Integrator<'_> {
    fn field(&self, coeffs: Vec<Complex64>) -> FourierField {
        let mut u = FourierField::from_coeffs(self.k_max, coeffs, false).expect("band length");
        u.symmetrize();
        u
    }

    fn nonlinear(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if !self.cfg.nonlinear {
            return Ok(vec![Complex64::new(0.0, 0.0); v.len()]);
        }
        let mut n = direct_nonlinearity(&self.field(v.to_vec()))?.into_coeffs();
        if self.cfg.linear_phase == PhaseSymbol::Modified {
            for (i, (nk, vk)) in n.iter_mut().zip(v).enumerate() {
                let k = i as i64 - self.k_max as i64;
                *nk -= Complex64::new(0.0, k as f64 * self.f.coeff(k).norm_sqr()) * vk;
            }
        }
        Ok(n)
    }

    fn step(&self, v: &[Complex64], c: &StepCoefficients, h: f64) -> Result<Vec<Complex64>> {
        let zip = |a: &[Complex64], b: &[Complex64], op: &dyn Fn(usize, Complex64, Complex64) -> Complex64| {
            a.iter().zip(b).enumerate().map(|(i, (x, y))| op(i, *x, *y)).collect::<Vec<_>>()
        };
        match self.cfg.scheme {
            Scheme::Etdrk4 => {
                let nv = self.nonlinear(v)?;
                let a = zip(v, &nv, &|i, x, n| c.e2[i] * x + c.q[i] * n);
                let na = self.nonlinear(&a)?;
                let b = zip(v, &na, &|i, x, n| c.e2[i] * x + c.q[i] * n);
                let nb = self.nonlinear(&b)?;
                let cc: Vec<Complex64> = (0..v.len()).map(|i| c.e2[i] * a[i] + c.q[i] * (2.0 * nb[i] - nv[i])).collect();
                let nc = self.nonlinear(&cc)?;
                Ok((0..v.len())
                    .map(|i| c.e[i] * v[i] + c.f1[i] * nv[i] + 2.0 * c.f2[i] * (na[i] + nb[i]) + c.f3[i] * nc[i])
                    .collect())
            }
            Scheme::Ifrk4 => {
                let k1: Vec<Complex64> = self.nonlinear(v)?.iter().map(|x| h * x).collect();
                let v2 = zip(v, &k1, &|i, x, k| c.e2[i] * (x + 0.5 * k));
                let k2: Vec<Complex64> = self.nonlinear(&v2)?.iter().map(|x| h * x).collect();
                let v3 = zip(v, &k2, &|i, x, k| c.e2[i] * x + 0.5 * k);
                let k3: Vec<Complex64> = self.nonlinear(&v3)?.iter().map(|x| h * x).collect();
                let v4 = zip(v, &k3, &|i, x, k| c.e[i] * x + c.e2[i] * k);
                let k4: Vec<Complex64> = self.nonlinear(&v4)?.iter().map(|x| h * x).collect();
                Ok((0..v.len())
                    .map(|i| c.e[i] * v[i] + (c.e[i] * k1[i] + 2.0 * c.e2[i] * (k2[i] + k3[i]) + k4[i]) / 6.0)
                    .collect())
            }
        }
    }
}

/// Integrates from `u0` over `duration` (either sign) in `ceil(|duration|/dt)` equal steps.
pub fn evolve(u0: &FourierField, duration: f64, f: &FourierField, cfg: &ETDConfig) -> Result<FourierField> {
    cfg.validate()?;
    let mut stepper = Stepper::new(u0, f, cfg)?;
    stepper.advance(duration)?;
    Ok(stepper.current())
}

struct Stepper<'a> {
    integ: Integrator<'a>,
    v: Vec<Complex64>,
    steps_taken: usize,
    cache: Option<(f64, StepCoefficients)>,
}

impl<'a> Stepper<'a> {
    fn new(u0: &FourierField, f: &'a FourierField, cfg: &ETDConfig) -> Result<Self> {
        if !u0.is_real_symmetric() {
            return Err(Error::Domain("reference solver needs real initial data".into()));
        }
        let k_max = u0.k_max();
        let phis = (-(k_max as i64)..=k_max as i64).map(|k| dispersion(k, cfg.linear_phase, Some(f))).collect();
        let integ = Integrator { k_max, cfg: *cfg, f, phis };
        Ok(Self { integ, v: u0.coeffs().to_vec(), steps_taken: 0, cache: None })
    }

    fn advance(&mut self, duration: f64) -> Result<()> {
        if duration == 0.0 {
            return Ok(());
        }
        let steps = ((duration.abs() / self.integ.cfg.dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let h = duration / steps as f64;
        if self.cache.as_ref().map_or(true, |(ch, _)| *ch != h) {
            self.cache = Some((h, StepCoefficients::new(&self.integ.phis, h, self.integ.cfg.contour_points)));
        }
        let coeffs = &self.cache.as_ref().expect("just filled").1;
        for _ in 0..steps {
            let mut next = self.integ.step(&self.v, coeffs, h)?;
            self.steps_taken += 1;
            if next.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
                return Err(Error::Instability { step: self.steps_taken });
            }
            let u = self.integ.field(std::mem::take(&mut next));
            self.v = u.into_coeffs();
        }
        Ok(())
    }

    fn current(&self) -> FourierField {
        self.integ.field(self.v.clone())
    }
}

/// One row of the conserved-functional series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservedRecord {
    pub t: f64,
    pub mass: f64,
    pub l2: f64,
    pub energy: f64,
}

impl ConservedRecord {
    fn at(t: f64, c: ConservedFunctionals) -> Self {
        Self { t, mass: c.mass, l2: c.l2, energy: c.energy }
    }
}

/// Reference trajectory of `f` sampled on `grid` (the grid's `K` must match `f`).
pub fn solve_reference(f: &FourierField, grid: &GridSpec, cfg: &ETDConfig) -> Result<Trajectory> {
    Ok(solve_reference_with_diagnostics(f, grid, cfg)?.0)
}

/// [`solve_reference`] plus mass, L² and energy at every frame.
pub fn solve_reference_with_diagnostics(
    f: &FourierField,
    grid: &GridSpec,
    cfg: &ETDConfig,
) -> Result<(Trajectory, Vec<ConservedRecord>)> {
    cfg.validate()?;
    grid.validate()?;
    if f.k_max() != grid.k_max {
        return Err(Error::GridMismatch(format!("profile K = {} vs grid K = {}", f.k_max(), grid.k_max)));
    }
    let cfl = f.max_abs() * (grid.k_max * grid.k_max) as f64 * cfg.dt;
    if cfl > 1.0 {
        log::warn!("step size dt = {} may not resolve the nonlinear scale (max|f̂| K² dt = {cfl:.3})", cfg.dt);
    }
    let mut stepper = Stepper::new(f, f, cfg)?;
    let mut frames = vec![stepper.current()];
    let mut records = vec![ConservedRecord::at(0.0, conserved_functionals(&frames[0])?)];
    let dt_frame = grid.dt();
    for n in 1..grid.frames {
        stepper.advance(dt_frame)?;
        let u = stepper.current();
        records.push(ConservedRecord::at(grid.time(n), conserved_functionals(&u)?));
        frames.push(u);
    }
    Ok((Trajectory::new(*grid, frames)?, records))
}

/// `max_n ‖a(t_n) - b(t_n)‖_{H^s}` and the per-frame distances.
pub fn compare_trajectories(a: &Trajectory, b: &Trajectory, s: f64) -> Result<(f64, Vec<f64>)> {
    a.check_same_grid(b)?;
    let profile: Vec<f64> = a.frames().iter().zip(b.frames()).map(|(x, y)| sobolev_norm(&(x - y), s)).collect();
    Ok((profile.iter().copied().fold(0.0, f64::max), profile))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::random_real_field;

    fn cos1(k: usize) -> FourierField {
        FourierField::cosine(k, 1.0, 1)
    }

    #[test]
    fn airy_examples() {
        let u = cos1(4);
        assert_eq!(airy_exact(&u, 0.0, None), u);
        let t = 0.7;
        let a = airy_exact(&u, t, None);
        assert!((a.coeff(1) - 0.5 * Complex64::from_polar(1.0, t)).norm() < 1e-16);
        let m = airy_exact(&u, t, Some(&u));
        assert!((m.coeff(1) - 0.5 * Complex64::from_polar(1.0, 1.25 * t)).norm() < 1e-16);
        assert!(m.is_real_symmetric());
    }

    #[test]
    fn phi_functions_match_series_near_zero() {
        // limits at z → 0: Q/h → 1/2, f1/h → 1/6, f2/h → 1/6, f3/h → 1/6
        let c = StepCoefficients::new(&[0.0, 1e-14], 1.0, 32);
        for i in 0..2 {
            assert!((c.q[i] - 0.5).norm() < 1e-13, "{} {} {} {}", c.q[i], c.f1[i], c.f2[i], c.f3[i]);
            assert!((c.f1[i] - 1.0 / 6.0).norm() < 1e-13);
            assert!((c.f2[i] - 1.0 / 6.0).norm() < 1e-13);
            assert!((c.f3[i] - 1.0 / 6.0).norm() < 1e-13);
        }
        // large |z|: direct formulas are stable
        let z = Complex64::new(0.0, 150.0);
        let c = StepCoefficients::new(&[150.0], 1.0, 32);
        let direct = ((z / 2.0).exp() - 1.0) / z;
        assert!((c.q[0] - direct).norm() < 1e-14);
    }

    #[test]
    fn linear_flow_is_exact() {
        let f = random_real_field(3, 12, 0.5);
        for scheme in [Scheme::Etdrk4, Scheme::Ifrk4] {
            for phase in [PhaseSymbol::Airy, PhaseSymbol::Modified] {
                let cfg = ETDConfig { dt: 0.01, scheme, linear_phase: phase, contour_points: 32, nonlinear: false };
                let u = evolve(&f, 1.0, &f, &cfg).unwrap();
                let want = airy_exact(&f, 1.0, (phase == PhaseSymbol::Modified).then_some(&f));
                assert!(u.max_abs_diff(&want) < 1e-13, "{scheme:?} {phase:?}: {}", u.max_abs_diff(&want));
                let one = evolve(&f, 0.37, &f, &ETDConfig { dt: 1.0, ..cfg }).unwrap();
                let want = airy_exact(&f, 0.37, (phase == PhaseSymbol::Modified).then_some(&f));
                assert!(one.max_abs_diff(&want) < 1e-13);
            }
        }
    }

    #[test]
    fn schemes_agree_and_phases_agree() {
        let f = cos1(16);
        let g = GridSpec::new(16, 3, 0.1).unwrap();
        let base = ETDConfig { dt: 1e-3, ..Default::default() };
        let a = solve_reference(&f, &g, &base).unwrap();
        let b = solve_reference(&f, &g, &ETDConfig { scheme: Scheme::Ifrk4, ..base }).unwrap();
        let c = solve_reference(&f, &g, &ETDConfig { linear_phase: PhaseSymbol::Modified, ..base }).unwrap();
        assert!(compare_trajectories(&a, &b, 0.0).unwrap().0 < 1e-10);
        assert!(compare_trajectories(&a, &c, 0.0).unwrap().0 < 1e-10);
        assert_eq!(a.frame(0), &f);
    }

    #[test]
    fn short_conservation_check() {
        let f = cos1(16);
        let g = GridSpec::new(16, 11, 0.2).unwrap();
        let (_, rec) = solve_reference_with_diagnostics(&f, &g, &ETDConfig { dt: 1e-3, ..Default::default() }).unwrap();
        for r in &rec {
            assert_eq!(r.mass, 0.0);
            assert!((r.l2 - rec[0].l2).abs() < 1e-11);
            assert!((r.energy - rec[0].energy).abs() < 1e-9);
        }
    }

    #[test]
    fn time_reversal_returns_to_data() {
        let f = cos1(16);
        let cfg = ETDConfig { dt: 1e-3, ..Default::default() };
        let there = evolve(&f, 0.3, &f, &cfg).unwrap();
        let back = evolve(&there, -0.3, &f, &cfg).unwrap();
        assert!(sobolev_norm(&(&back - &f), 0.0) < 1e-6);
    }

    #[test]
    fn instability_detected() {
        let f = &cos1(32) * 50.0;
        let g = GridSpec::new(32, 2, 1.0).unwrap();
        let err = solve_reference(&f, &g, &ETDConfig { dt: 0.2, scheme: Scheme::Ifrk4, ..Default::default() });
        assert!(matches!(err, Err(Error::Instability { .. })), "{err:?}");
    }

    #[test]
    fn config_and_grid_errors() {
        let f = cos1(4);
        assert!(ETDConfig { contour_points: 8, ..Default::default() }.validate().is_err());
        assert!(ETDConfig { dt: 0.0, ..Default::default() }.validate().is_err());
        let g = GridSpec::new(5, 2, 0.1).unwrap();
        assert!(matches!(solve_reference(&f, &g, &ETDConfig::default()), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn comparison_examples() {
        let g = GridSpec::new(4, 5, 0.1).unwrap();
        let a = Trajectory::from_fn(g, |n, _| random_real_field(n as u64, 4, 0.0));
        let (d, prof) = compare_trajectories(&a, &a, 0.5).unwrap();
        assert_eq!(d, 0.0);
        assert_eq!(prof.len(), 5);
        let (d, _) = compare_trajectories(&a, &Trajectory::zeros(g), 0.0).unwrap();
        assert!((d - 1.0).abs() < 1e-14);
        let b = Trajectory::from_fn(g, |n, _| random_real_field(n as u64 + 10, 4, 0.0));
        let (d1, _) = compare_trajectories(&a, &b, 0.3).unwrap();
        let (d2, _) = compare_trajectories(&b, &a, 0.3).unwrap();
        assert_eq!(d1, d2);
        let brute = (0..5).map(|n| sobolev_norm(&(a.frame(n) - b.frame(n)), 0.3)).fold(0.0, f64::max);
        assert_eq!(d1, brute);
    }
}
