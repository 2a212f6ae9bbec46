//! Fourier-side decomposition of the cubic nonlinearity of
//! `u_t + u_xxx + (u² - mean(u²)) u_x = 0` into its resonant part
//! `ik|û(k)|²û(k)` and the non-resonant trilinear operator `NR`.
//!
//! `NR(v₁,v₂,v₃)(k) = -(ik/3) Σ v̂₁(k₁)v̂₂(k₂)v̂₃(k₃)` over `k₁+k₂+k₃ = k` with
//! `k, k_j ≠ 0` and `(k₁+k₂)(k₂+k₃)(k₃+k₁) ≠ 0`. Triples are drawn from the
//! retained band `|k_j| <= K` and outputs are reported on `|k| <= K`
//! (Galerkin truncation).
//!
//! For real fields with `û(0) = 0` the identity
//! `direct_nonlinearity(u) = NR(u,u,u) + resonant_term(u)` holds exactly.
//! A nonzero mean adds quadratic interactions through the `k_j = 0` modes that
//! `NR` excludes, so the identity is only claimed for mean-zero data.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::FourierField;
use crate::transform;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Cutoff `K₀` separating the low block `|k₁|,|k₂|,|k₃| <= K₀` of `NR`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NRSplitConfig {
    pub k0: usize,
}

/// `(k₁+k₂)(k₂+k₃)(k₃+k₁)`.
#[inline]
pub fn pair_product(k1: i64, k2: i64, k3: i64) -> i64 {
    (k1 + k2) * (k2 + k3) * (k3 + k1)
}

/// Index set of `NR`: all of `k₁, k₂, k₃, k` nonzero and no pair summing to zero.
#[inline]
pub fn is_admissible(k1: i64, k2: i64, k3: i64) -> bool {
    k1 != 0 && k2 != 0 && k3 != 0 && k1 + k2 + k3 != 0 && pair_product(k1, k2, k3) != 0
}

fn common_k_max(fields: &[&FourierField]) -> Result<usize> {
    let k_max = fields[0].k_max();
    if fields.iter().any(|f| f.k_max() != k_max) {
        let ks: Vec<usize> = fields.iter().map(|f| f.k_max()).collect();
        return Err(Error::Precondition(format!("inputs must share K, got {ks:?}")));
    }
    Ok(k_max)
}

fn finish(k_max: usize, coeffs: Vec<Complex64>, real: bool) -> FourierField {
    let mut out = FourierField::from_coeffs(k_max, coeffs, false).expect("length matches band");
    if real {
        out.symmetrize();
    }
    out
}

fn all_real(fields: &[&FourierField]) -> bool {
    fields.iter().all(|f| f.is_real_symmetric())
}

/// Mode-wise restricted triple sum `Σ v̂₁v̂₂v̂₃` for fixed output `k`, in a fixed order.
fn triple_sum(
    v1: &FourierField,
    v2: &FourierField,
    v3: &FourierField,
    k: i64,
    keep: impl Fn(i64, i64, i64) -> bool,
) -> Complex64 {
    let kk = v1.k_max() as i64;
    let mut acc = ZERO;
    for k1 in -kk..=kk {
        let a = v1.coeff(k1);
        if k1 == 0 || a == ZERO {
            continue;
        }
        for k2 in -kk..=kk {
            let k3 = k - k1 - k2;
            if k3.abs() > kk || !is_admissible(k1, k2, k3) || !keep(k1, k2, k3) {
                continue;
            }
            acc += a * v2.coeff(k2) * v3.coeff(k3);
        }
    }
    acc
}

fn nr_restricted(
    v1: &FourierField,
    v2: &FourierField,
    v3: &FourierField,
    keep: impl Fn(i64, i64, i64) -> bool + Sync,
) -> Result<FourierField> {
    let k_max = common_k_max(&[v1, v2, v3])?;
    let kk = k_max as i64;
    let coeffs: Vec<Complex64> = (-kk..=kk)
        .into_par_iter()
        .map(|k| {
            if k == 0 {
                ZERO
            } else {
                Complex64::new(0.0, -(k as f64) / 3.0) * triple_sum(v1, v2, v3, k, &keep)
            }
        })
        .collect();
    Ok(finish(k_max, coeffs, all_real(&[v1, v2, v3])))
}

/// Non-resonant trilinear term by direct O(K³) enumeration.
pub fn nr_trilinear_naive(v1: &FourierField, v2: &FourierField, v3: &FourierField) -> Result<FourierField> {
    nr_restricted(v1, v2, v3, |_, _, _| true)
}

/// Non-resonant trilinear term from the full cubic convolution (one padded
/// transform product) minus inclusion-exclusion corrections for the excluded
/// index sets.
///
/// With `w_j` the inputs with mode 0 removed and `A₁₂ = {k₁+k₂ = 0}` etc., the
/// excluded mass is
/// `c₁₂ w₃(k) + c₂₃ w₁(k) + c₃₁ w₂(k) - [w₁(k)w₂(-k)w₃(k) + w₁(k)w₂(k)w₃(-k) + w₁(-k)w₂(k)w₃(k)]`
/// where `c_ij = Σ_m w_i(m) w_j(-m)`; the triple intersection is `k_j = 0` and
/// already removed.
pub fn nr_trilinear_fast(v1: &FourierField, v2: &FourierField, v3: &FourierField) -> Result<FourierField> {
    let k_max = common_k_max(&[v1, v2, v3])?;
    let kk = k_max as i64;
    let strip = |v: &FourierField| {
        let mut c = v.coeffs().to_vec();
        c[k_max] = ZERO;
        c
    };
    let (w1, w2, w3) = (strip(v1), strip(v2), strip(v3));
    let at = |w: &[Complex64], k: i64| w[(k + kk) as usize];

    let n = transform::cubic_grid_len(k_max);
    let g1 = transform::modes_to_grid(&w1, k_max, n);
    let g2 = transform::modes_to_grid(&w2, k_max, n);
    let g3 = transform::modes_to_grid(&w3, k_max, n);
    let product: Vec<Complex64> = g1.iter().zip(&g2).zip(&g3).map(|((a, b), c)| a * b * c).collect();
    let full = transform::grid_to_modes(product, k_max);

    let pair = |a: &[Complex64], b: &[Complex64]| (-kk..=kk).map(|m| at(a, m) * at(b, -m)).sum::<Complex64>();
    let c12 = pair(&w1, &w2);
    let c23 = pair(&w2, &w3);
    let c31 = pair(&w3, &w1);

    let coeffs = (-kk..=kk)
        .map(|k| {
            if k == 0 {
                return ZERO;
            }
            let singles = c12 * at(&w3, k) + c23 * at(&w1, k) + c31 * at(&w2, k);
            let doubles = at(&w1, k) * at(&w2, -k) * at(&w3, k)
                + at(&w1, k) * at(&w2, k) * at(&w3, -k)
                + at(&w1, -k) * at(&w2, k) * at(&w3, k);
            let s = full[(k + kk) as usize] - singles + doubles;
            Complex64::new(0.0, -(k as f64) / 3.0) * s
        })
        .collect();
    Ok(finish(k_max, coeffs, all_real(&[v1, v2, v3])))
}

/// Resonant term `ik|û(k)|²û(k)`.
pub fn resonant_term(u: &FourierField) -> FourierField {
    let coeffs = u
        .modes()
        .map(|(k, c)| Complex64::new(0.0, k as f64) * c.norm_sqr() * c)
        .collect();
    finish(u.k_max(), coeffs, u.is_real_symmetric())
}

/// Fourier coefficients of `-(u² - (1/2π)∫u²) u_x` on `|k| <= K`, computed
/// alias-free in conservative form `-(ik/3) FT(u³) + ik ‖u‖²_{L²} û`.
pub fn direct_nonlinearity(u: &FourierField) -> Result<FourierField> {
    if !u.is_real_symmetric() {
        return Err(Error::Domain("direct_nonlinearity requires a real field".into()));
    }
    let k_max = u.k_max();
    let n = transform::cubic_grid_len(k_max);
    let grid = u.to_complex_samples(n);
    let cube: Vec<Complex64> = grid.iter().map(|&x| Complex64::new(x.re * x.re * x.re, 0.0)).collect();
    let cube_hat = transform::grid_to_modes(cube, k_max);
    let mean_sq: f64 = u.coeffs().iter().map(|c| c.norm_sqr()).sum();
    let coeffs = u
        .modes()
        .zip(cube_hat)
        .map(|((k, c), c3)| {
            let ik = Complex64::new(0.0, k as f64);
            -ik / 3.0 * c3 + ik * mean_sq * c
        })
        .collect();
    Ok(finish(k_max, coeffs, true))
}

/// Galilean speed `(1/2π)∫u₀² = Σ_k |f̂(k)|²`.
pub fn galilean_speed(f: &FourierField) -> Result<f64> {
    if !f.is_real_symmetric() {
        return Err(Error::Domain("galilean_speed requires a real field".into()));
    }
    Ok(f.coeffs().iter().map(|c| c.norm_sqr()).sum())
}

/// Low/high split of `NR` at `K₀`: `low` keeps triples with every `|k_j| <= K₀`,
/// `high = NR - low`.
pub fn nr_split_k0(
    v1: &FourierField,
    v2: &FourierField,
    v3: &FourierField,
    cfg: NRSplitConfig,
) -> Result<(FourierField, FourierField)> {
    let k0 = cfg.k0 as i64;
    let low = nr_restricted(v1, v2, v3, |a, b, c| a.abs() <= k0 && b.abs() <= k0 && c.abs() <= k0)?;
    let full = nr_trilinear_naive(v1, v2, v3)?;
    let high = &full - &low;
    Ok((low, high))
}

/// Frequency-shift correction `E = Σ_j k_j|f̂(k_j)|² - k|f̂(k)|²`, `k = k₁+k₂+k₃`.
pub fn eval_e(k1: i64, k2: i64, k3: i64, f: &FourierField) -> f64 {
    let w = |k: i64| k as f64 * f.coeff(k).norm_sqr();
    w(k1) + w(k2) + w(k3) - w(k1 + k2 + k3)
}

/// Denominator `-3(k₁+k₂)(k₂+k₃)(k₃+k₁) + E(k₁,k₂,k₃)` of the explicit trilinear form.
pub fn h_denominator(k1: i64, k2: i64, k3: i64, f: &FourierField) -> f64 {
    -3.0 * pair_product(k1, k2, k3) as f64 + eval_e(k1, k2, k3, f)
}

fn k_extremes(k1: i64, k2: i64, k3: i64) -> (i64, i64) {
    let (a, b, c) = (k1.abs(), k2.abs(), k3.abs());
    (a.min(b).min(c), a.max(b).max(c))
}

/// Smallest `K₀` such that `|denominator| >= k_max/2` for every admissible
/// triple in the band `|k_j|, |k| <= k_max_band` with `max|k_j| > K₀`.
pub fn select_k0(f: &FourierField, k_max_band: usize) -> usize {
    let kk = k_max_band as i64;
    (-kk..=kk)
        .into_par_iter()
        .map(|k1| {
            let mut worst = 0i64;
            for k2 in -kk..=kk {
                for k3 in -kk..=kk {
                    if (k1 + k2 + k3).abs() > kk || !is_admissible(k1, k2, k3) {
                        continue;
                    }
                    let (_, kmax) = k_extremes(k1, k2, k3);
                    if h_denominator(k1, k2, k3, f).abs() < kmax as f64 / 2.0 {
                        worst = worst.max(kmax);
                    }
                }
            }
            worst
        })
        .max()
        .unwrap_or(0) as usize
}

/// Explicit trilinear form
/// `H(v₁,v₂,v₃)(k) = Σ (k₁+k₂+k₃) v̂₁v̂₂v̂₃ / (-3(k₁+k₂)(k₂+k₃)(k₃+k₁) + E)`
/// over admissible triples with `max|k_j| > K₀`.
pub fn eval_h_form(
    v1: &FourierField,
    v2: &FourierField,
    v3: &FourierField,
    f: &FourierField,
    cfg: NRSplitConfig,
) -> Result<FourierField> {
    eval_h_form_filtered(v1, v2, v3, f, cfg, |_, _, _| true)
}

/// [`eval_h_form`] restricted to triples accepted by `keep`.
pub fn eval_h_form_filtered(
    v1: &FourierField,
    v2: &FourierField,
    v3: &FourierField,
    f: &FourierField,
    cfg: NRSplitConfig,
    keep: impl Fn(i64, i64, i64) -> bool + Sync,
) -> Result<FourierField> {
    let k_max = common_k_max(&[v1, v2, v3])?;
    let kk = k_max as i64;
    let k0 = cfg.k0 as i64;
    let coeffs = (-kk..=kk)
        .into_par_iter()
        .map(|k| -> Result<Complex64> {
            let mut acc = ZERO;
            if k == 0 {
                return Ok(acc);
            }
            for k1 in -kk..=kk {
                let a = v1.coeff(k1);
                if k1 == 0 || a == ZERO {
                    continue;
                }
                for k2 in -kk..=kk {
                    let k3 = k - k1 - k2;
                    if k3.abs() > kk || !is_admissible(k1, k2, k3) {
                        continue;
                    }
                    let (_, kmax) = k_extremes(k1, k2, k3);
                    if kmax <= k0 || !keep(k1, k2, k3) {
                        continue;
                    }
                    let den = h_denominator(k1, k2, k3, f);
                    if den == 0.0 {
                        return Err(Error::ZeroDenominator(k1, k2, k3));
                    }
                    acc += a * v2.coeff(k2) * v3.coeff(k3) * (k as f64 / den);
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(finish(k_max, coeffs, all_real(&[v1, v2, v3]) && f.is_real_symmetric()))
}

/// Classifies a triple as comparable-frequency (`k_min ∼ k_max`) when
/// `ratio · k_min >= k_max`.
pub fn is_comparable_triple(k1: i64, k2: i64, k3: i64, ratio: f64) -> bool {
    let (kmin, kmax) = k_extremes(k1, k2, k3);
    ratio * kmin as f64 >= kmax as f64
}

/// Mass, squared L² norm and Hamiltonian, all normalized by `1/2π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservedFunctionals {
    pub mass: f64,
    pub l2: f64,
    pub energy: f64,
}

/// `mass = û(0)`, `l2 = Σ|û|²`, `energy = (1/2π)∫(u_x²/2 - u⁴/12)`.
pub fn conserved_functionals(u: &FourierField) -> Result<ConservedFunctionals> {
    if !u.is_real_symmetric() {
        return Err(Error::Domain("conserved functionals require a real field".into()));
    }
    let mass = u.coeff(0).re;
    let l2 = u.coeffs().iter().map(|c| c.norm_sqr()).sum();
    let gradient: f64 = u.modes().map(|(k, c)| (k * k) as f64 * c.norm_sqr()).sum();
    let n = transform::cubic_grid_len(u.k_max());
    let quartic = u.to_samples(n).iter().map(|x| x.powi(4)).sum::<f64>() / n as f64;
    Ok(ConservedFunctionals { mass, l2, energy: gradient / 2.0 - quartic / 12.0 })
}

/// `|LHS - RHS|` of `(τ₁+τ₂+τ₃) - (k₁+k₂+k₃)³ = Σ(τ_j - k_j³) - 3(k₁+k₂)(k₂+k₃)(k₃+k₁)`.
pub fn resonance_identity_check(k1: i64, k2: i64, k3: i64, tau1: f64, tau2: f64, tau3: f64) -> f64 {
    let cube = |k: i64| (k as f64).powi(3);
    let lhs = (tau1 + tau2 + tau3) - cube(k1 + k2 + k3);
    let rhs = (tau1 - cube(k1)) + (tau2 - cube(k2)) + (tau3 - cube(k3)) - 3.0 * pair_product(k1, k2, k3) as f64;
    (lhs - rhs).abs()
}

/// The same identity in exact integer arithmetic; returns `LHS - RHS`.
pub fn resonance_identity_residual_exact(k: [i64; 3], tau: [i64; 3]) -> i128 {
    let [k1, k2, k3] = k.map(i128::from);
    let [t1, t2, t3] = tau.map(i128::from);
    let lhs = (t1 + t2 + t3) - (k1 + k2 + k3).pow(3);
    let rhs = (t1 - k1.pow(3)) + (t2 - k2.pow(3)) + (t3 - k3.pow(3)) - 3 * (k1 + k2) * (k2 + k3) * (k3 + k1);
    lhs - rhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::random_real_field;
    use crate::spectral::check_real_symmetry;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cos1(k_max: usize) -> FourierField {
        FourierField::cosine(k_max, 1.0, 1)
    }

    /// Independent oracle: scatter every admissible triple into its output slot.
    fn scatter_oracle(v1: &FourierField, v2: &FourierField, v3: &FourierField) -> Vec<Complex64> {
        let kk = v1.k_max() as i64;
        let mut out = vec![ZERO; (2 * kk + 1) as usize];
        for k3 in -kk..=kk {
            for k2 in -kk..=kk {
                for k1 in -kk..=kk {
                    let k = k1 + k2 + k3;
                    if k.abs() > kk || k1 * k2 * k3 == 0 || k == 0 {
                        continue;
                    }
                    if (k1 + k2) * (k2 + k3) * (k3 + k1) == 0 {
                        continue;
                    }
                    out[(k + kk) as usize] += v1.coeff(k1) * v2.coeff(k2) * v3.coeff(k3);
                }
            }
        }
        for (i, v) in out.iter_mut().enumerate() {
            *v *= c(0.0, -(i as f64 - kk as f64) / 3.0);
        }
        out
    }

    #[test]
    fn nr_of_cosine() {
        let u = cos1(4);
        let nr = nr_trilinear_naive(&u, &u, &u).unwrap();
        for (k, v) in nr.modes() {
            let want = match k {
                3 => c(0.0, -0.125),
                -3 => c(0.0, 0.125),
                _ => ZERO,
            };
            assert!((v - want).norm() < 1e-16, "k={k}: {v}");
        }
        let fast = nr_trilinear_fast(&u, &u, &u).unwrap();
        assert!(fast.max_abs_diff(&nr) < 1e-15);
    }

    #[test]
    fn nr_with_a_zero_input_vanishes() {
        let u = cos1(5);
        let z = FourierField::zeros(5);
        assert_eq!(nr_trilinear_naive(&u, &z, &u).unwrap().max_abs(), 0.0);
        assert!(nr_trilinear_fast(&z, &u, &u).unwrap().max_abs() == 0.0);
    }

    #[test]
    fn nr_mismatched_bands_rejected() {
        let err = nr_trilinear_naive(&cos1(3), &cos1(4), &cos1(3)).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
        assert!(nr_trilinear_fast(&cos1(3), &cos1(3), &cos1(4)).is_err());
    }

    #[test]
    fn naive_nr_matches_scatter_oracle() {
        for seed in 0..4 {
            let v1 = random_real_field(seed, 8, 1.0);
            let v2 = random_real_field(seed + 100, 8, 0.5);
            let v3 = random_real_field(seed + 200, 8, 1.5);
            let nr = nr_trilinear_naive(&v1, &v2, &v3).unwrap();
            let oracle = scatter_oracle(&v1, &v2, &v3);
            for (k, v) in nr.modes() {
                assert!((v - oracle[(k + 8) as usize]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn fast_matches_naive_on_complex_inputs() {
        // no reality assumption in either path
        let mut v1 = random_real_field(5, 10, 1.0);
        v1.set(3, c(0.4, 0.9));
        v1.set(0, c(0.7, -0.2));
        let v2 = random_real_field(6, 10, 1.0).scaled(c(0.3, 0.8));
        let v3 = random_real_field(7, 10, 1.0);
        let naive = nr_trilinear_naive(&v1, &v2, &v3).unwrap();
        let fast = nr_trilinear_fast(&v1, &v2, &v3).unwrap();
        assert!(fast.max_abs_diff(&naive) < 1e-13);
    }

    #[test]
    fn resonant_term_examples() {
        let r = resonant_term(&cos1(3));
        assert!((r.coeff(1) - c(0.0, 0.125)).norm() < 1e-16);
        assert!((r.coeff(-1) - c(0.0, -0.125)).norm() < 1e-16);
        assert_eq!(resonant_term(&FourierField::zeros(3)).max_abs(), 0.0);
        let mut u = FourierField::zeros(3);
        u.set(2, c(0.0, 1.0));
        assert_eq!(resonant_term(&u).coeff(2), c(-2.0, 0.0));
    }

    #[test]
    fn direct_nonlinearity_of_cosine() {
        let n = direct_nonlinearity(&cos1(4)).unwrap();
        for (k, v) in n.modes() {
            let want = match k {
                1 => c(0.0, 0.125),
                -1 => c(0.0, -0.125),
                3 => c(0.0, -0.125),
                -3 => c(0.0, 0.125),
                _ => ZERO,
            };
            assert!((v - want).norm() < 1e-15, "k={k}: {v}");
        }
        assert_eq!(direct_nonlinearity(&FourierField::zeros(4)).unwrap().max_abs(), 0.0);
        let mut complex = cos1(4);
        complex.set(2, c(0.0, 1.0));
        assert!(matches!(direct_nonlinearity(&complex), Err(Error::Domain(_))));
    }

    #[test]
    fn decomposition_identity_random() {
        for seed in 0..5 {
            let u = random_real_field(seed, 16, 1.0);
            let direct = direct_nonlinearity(&u).unwrap();
            let nr = nr_trilinear_naive(&u, &u, &u).unwrap();
            let sum = &nr + &resonant_term(&u);
            assert!(direct.max_abs_diff(&sum) < 1e-12);
            assert!(check_real_symmetry(&nr) < 1e-13);
            assert!(check_real_symmetry(&direct) < 1e-13);
            assert_eq!(direct.coeff(0), ZERO);
            assert_eq!(nr.coeff(0), ZERO);
        }
    }

    #[test]
    fn galilean_speed_examples() {
        assert!((galilean_speed(&cos1(3)).unwrap() - 0.5).abs() < 1e-16);
        assert_eq!(galilean_speed(&FourierField::zeros(3)).unwrap(), 0.0);
        let u = random_real_field(3, 12, 1.0);
        let n = 128;
        let quad = u.to_samples(n).iter().map(|x| x * x).sum::<f64>() / n as f64;
        assert!((galilean_speed(&u).unwrap() - quad).abs() < 1e-13);
    }

    #[test]
    fn split_at_k0() {
        let u = cos1(4);
        let full = nr_trilinear_naive(&u, &u, &u).unwrap();
        let (low, high) = nr_split_k0(&u, &u, &u, NRSplitConfig { k0: 0 }).unwrap();
        assert_eq!(low.max_abs(), 0.0);
        assert!(high.max_abs_diff(&full) == 0.0);
        let (low, high) = nr_split_k0(&u, &u, &u, NRSplitConfig { k0: 1 }).unwrap();
        assert!(low.max_abs_diff(&full) == 0.0);
        assert_eq!(high.max_abs(), 0.0);

        let v1 = random_real_field(1, 8, 1.0);
        let v2 = random_real_field(2, 8, 1.0);
        let v3 = random_real_field(3, 8, 1.0);
        let full = nr_trilinear_naive(&v1, &v2, &v3).unwrap();
        let (low, high) = nr_split_k0(&v1, &v2, &v3, NRSplitConfig { k0: 3 }).unwrap();
        assert!((&low + &high).max_abs_diff(&full) < 1e-14);
    }

    #[test]
    fn e_examples() {
        let f = cos1(4);
        assert!((eval_e(1, 1, 1, &f) - 0.75).abs() < 1e-16);
        assert_eq!(eval_e(1, -1, 2, &f), 0.0);
        assert_eq!(eval_e(3, -2, 4, &FourierField::zeros(4)), 0.0);
        let g = random_real_field(9, 6, 0.7);
        for (a, b, d) in [(1, 2, 3), (-4, 2, 5), (6, -6, 1)] {
            assert!((eval_e(-a, -b, -d, &g) + eval_e(a, b, d, &g)).abs() < 1e-15);
        }
    }

    #[test]
    fn h_form_with_zero_profile() {
        let zero = FourierField::zeros(3);
        let mut v = FourierField::zeros(3);
        v.set(1, c(1.0, 0.0));
        let h = eval_h_form(&v, &v, &v, &zero, NRSplitConfig { k0: 0 }).unwrap();
        // only (1,1,1) contributes: 3 / (-24)
        assert!((h.coeff(3) - c(-0.125, 0.0)).norm() < 1e-16);
        assert_eq!(eval_h_form(&v, &zero, &v, &zero, NRSplitConfig { k0: 0 }).unwrap().max_abs(), 0.0);

        let v1 = random_real_field(11, 8, 1.0);
        let v2 = random_real_field(12, 8, 1.0);
        let v3 = random_real_field(13, 8, 1.0);
        let h = eval_h_form(&v1, &v2, &v3, &FourierField::zeros(8), NRSplitConfig { k0: 0 }).unwrap();
        let kk = 8i64;
        let mut oracle = vec![ZERO; 17];
        for k1 in -kk..=kk {
            for k2 in -kk..=kk {
                for k3 in -kk..=kk {
                    let k = k1 + k2 + k3;
                    if k == 0 || k.abs() > kk || k1 * k2 * k3 == 0 {
                        continue;
                    }
                    let p = (k1 + k2) * (k2 + k3) * (k3 + k1);
                    if p == 0 {
                        continue;
                    }
                    oracle[(k + kk) as usize] += v1.coeff(k1) * v2.coeff(k2) * v3.coeff(k3) * (k as f64 / (-3.0 * p as f64));
                }
            }
        }
        for (k, val) in h.modes() {
            assert!((val - oracle[(k + kk) as usize]).norm() < 1e-14);
        }
    }

    #[test]
    fn h_form_reports_zero_denominator() {
        // -24 + 3|f̂(1)|² - 3|f̂(3)|² = -24 + 48 - 24
        let mut f = FourierField::zeros(3);
        f.set(1, c(4.0, 0.0));
        f.set(3, c(2.0, 2.0));
        assert_eq!(h_denominator(1, 1, 1, &f), 0.0);
        let mut v = FourierField::zeros(3);
        v.set(1, c(1.0, 0.0));
        let err = eval_h_form(&v, &v, &v, &f, NRSplitConfig { k0: 0 }).unwrap_err();
        assert!(matches!(err, Error::ZeroDenominator(1, 1, 1)));
        assert!(eval_h_form(&v, &v, &v, &f, NRSplitConfig { k0: 1 }).is_ok());
        assert!(select_k0(&f, 3) >= 1);
    }

    #[test]
    fn k0_selection_for_small_profiles() {
        assert_eq!(select_k0(&FourierField::zeros(6), 6), 0);
        assert_eq!(select_k0(&cos1(6), 6), 0);
    }

    #[test]
    fn conserved_functional_examples() {
        let cf = conserved_functionals(&cos1(4)).unwrap();
        assert_eq!(cf.mass, 0.0);
        assert!((cf.l2 - 0.5).abs() < 1e-16);
        assert!((cf.energy - 7.0 / 32.0).abs() < 1e-15);
        let cf = conserved_functionals(&FourierField::zeros(4)).unwrap();
        assert_eq!((cf.mass, cf.l2, cf.energy), (0.0, 0.0, 0.0));
        let c0 = 0.7;
        let cf = conserved_functionals(&FourierField::cosine(4, c0, 0)).unwrap();
        assert_eq!(cf.mass, c0);
        assert!((cf.l2 - c0 * c0).abs() < 1e-16);
        assert!((cf.energy + c0.powi(4) / 12.0).abs() < 1e-15);
    }

    #[test]
    fn resonance_identity_examples() {
        assert_eq!(resonance_identity_check(1, 2, 3, 0.25, -7.0, 3.5), 0.0);
        assert_eq!(resonance_identity_residual_exact([1, 2, 3], [0, 0, 0]), 0);
        assert_eq!(6i64.pow(3), 1 + 8 + 27 + 3 * 3 * 5 * 4);
        assert_eq!(resonance_identity_check(0, 0, 0, 1.0, 2.0, 3.0), 0.0);
    }

    #[test]
    fn kernel_lower_bound_exhaustive_small() {
        // full enumeration with no symmetry reduction
        let n = 60i64;
        for k1 in -n..=n {
            for k2 in -n..=n {
                for k3 in -n..=n {
                    let p = pair_product(k1, k2, k3);
                    if p == 0 {
                        continue;
                    }
                    let kmax = k1.abs().max(k2.abs()).max(k3.abs());
                    assert!(p.abs() >= kmax, "({k1},{k2},{k3})");
                }
            }
        }
    }
}
