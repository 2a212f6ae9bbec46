//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mkdv_lab::ensemble::random_real_field;
use mkdv_lab::gauge::{solve_q, QSolveConfig};
use mkdv_lab::nonlinearity::{
    conserved_functionals, direct_nonlinearity, nr_trilinear_fast, nr_trilinear_naive, resonance_identity_residual_exact,
    resonant_term,
};
use mkdv_lab::norms::x_space_norm;
use mkdv_lab::picard::{picard_step, reconstruct_u, solve_z, PicardConfig, PicardReport};
use mkdv_lab::probes::{difference_gauge_metric, probe_estimate_16, smoothing_report, v_equation_residual, EnsembleSpec};
use mkdv_lab::reference::{compare_trajectories, evolve, solve_reference, solve_reference_with_diagnostics, ETDConfig};
use mkdv_lab::spectral::sobolev_norm;
use mkdv_lab::{FourierField, GridSpec, SobolevIndex, Trajectory};

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: String) -> Outcome {
    Outcome { ok, detail }
}

fn params() -> SobolevIndex {
    SobolevIndex::for_s0(0.3).unwrap()
}

fn decomposition() -> Outcome {
    let mut worst = 0.0f64;
    for k in [8, 16, 32, 64] {
        for i in 0..50 {
            let u = random_real_field(1000 + i, k, 0.5);
            let split = &nr_trilinear_fast(&u, &u, &u).unwrap() + &resonant_term(&u);
            worst = worst.max(direct_nonlinearity(&u).unwrap().max_abs_diff(&split));
        }
    }
    outcome(worst < 1e-12, format!("max err {worst:.3e} < 1e-12"))
}

fn fast_vs_naive() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..100 {
        let [a, b, c] = [0, 1, 2].map(|j| random_real_field(5000 + 3 * i + j, 32, 0.5));
        let fast = nr_trilinear_fast(&a, &b, &c).unwrap();
        worst = worst.max(fast.max_abs_diff(&nr_trilinear_naive(&a, &b, &c).unwrap()));
    }
    outcome(worst < 1e-12, format!("max dev {worst:.3e} < 1e-12"))
}

fn resonance_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut nonzero = 0;
    for _ in 0..10_000 {
        let k = [0; 3].map(|_| rng.gen_range(-1000..=1000));
        let tau = [0; 3].map(|_| rng.gen_range(-2_000_000_000..=2_000_000_000i64));
        if resonance_identity_residual_exact(k, tau) != 0 {
            nonzero += 1;
        }
    }
    outcome(nonzero == 0, format!("{nonzero} nonzero residuals in 10^4 exact triples"))
}

/// Per-mode RK4 integration of `Q' = k³ + k|f̂|² + k(2Re(f̂e^{iQ}conj ẑ) + |ẑ|²)` for time-constant `z`.
fn q_by_ode(fk: Complex64, zk: Complex64, k: i64, t_end: f64, steps: usize) -> f64 {
    let kf = k as f64;
    let rhs = |q: f64| kf.powi(3) + kf * fk.norm_sqr() + kf * (2.0 * (fk * Complex64::from_polar(1.0, q) * zk.conj()).re + zk.norm_sqr());
    let h = t_end / steps as f64;
    let mut q = 0.0;
    for _ in 0..steps {
        let a = rhs(q);
        let b = rhs(q + 0.5 * h * a);
        let c = rhs(q + 0.5 * h * b);
        let d = rhs(q + h * c);
        q += h / 6.0 * (a + 2.0 * b + 2.0 * c + d);
    }
    q
}

fn q_fixed_point() -> Outcome {
    let grid = GridSpec::new(16, 64, 0.01).unwrap();
    let f = FourierField::cosine(16, 1.0, 1);
    let zf = FourierField::from_fn(16, true, |k| if k == 0 { Complex64::new(0.0, 0.0) } else { Complex64::new(0.02, 0.01 * k.signum() as f64) });
    let z = Trajectory::constant(grid, &zf);
    let (q, rep) = solve_q(&f, &z, QSolveConfig::default()).unwrap();
    let below = rep.contraction_threshold.is_some_and(|th| grid.t_final < th);
    let worst_ratio = rep.sweep_ratios.iter().copied().fold(0.0, f64::max);
    let mut ode_err = 0.0f64;
    for n in 1..grid.frames {
        for k in -16..=16i64 {
            let steps = 100 * n;
            let exact = q_by_ode(f.coeff(k), zf.coeff(k), k, grid.time(n), steps);
            ode_err = ode_err.max((q.value(n, k) - exact).abs());
        }
    }
    let ok = rep.residual < 1e-12 && below && worst_ratio < 0.5 && ode_err <= 1e-8;
    outcome(
        ok,
        format!(
            "residual {:.3e} < 1e-12, T below threshold {below}, max sweep ratio {worst_ratio:.3e} < 0.5, ODE diff {ode_err:.3e} <= 1e-8",
            rep.residual
        ),
    )
}

fn reference_order() -> Outcome {
    let f = FourierField::cosine(32, 1.0, 1);
    let run = |dt: f64| evolve(&f, 0.5, &f, &ETDConfig { dt, ..ETDConfig::default() }).unwrap();
    let [a, b, c] = [4e-3, 2e-3, 1e-3].map(run);
    let e1 = sobolev_norm(&(&a - &b), 0.0);
    let e2 = sobolev_norm(&(&b - &c), 0.0);
    let order = (e1 / e2).log2();

    let grid = GridSpec::new(32, 51, 0.5).unwrap();
    let (_, records) = solve_reference_with_diagnostics(&f, &grid, &ETDConfig { dt: 1e-3, ..ETDConfig::default() }).unwrap();
    let c0 = conserved_functionals(&f).unwrap();
    let drift = |g: fn(&mkdv_lab::reference::ConservedRecord) -> f64, start: f64| {
        records.iter().map(|r| (g(r) - start).abs()).fold(0.0, f64::max)
    };
    let (dm, dl, de) = (drift(|r| r.mass, c0.mass), drift(|r| r.l2, c0.l2), drift(|r| r.energy, c0.energy));
    let ok = (order - 4.0).abs() <= 0.3 && dm == 0.0 && dl < 1e-10 && de < 1e-8;
    outcome(ok, format!("order {order:.3} (4.0 ± 0.3), mass drift {dm:e}, L2 drift {dl:.3e} < 1e-10, energy drift {de:.3e} < 1e-8"))
}

struct Converged {
    f: FourierField,
    cfg: PicardConfig,
    u: Trajectory,
    report: PicardReport,
}

fn criterion6_run() -> mkdv_lab::Result<Converged> {
    let f = FourierField::cosine(16, 1.0, 1);
    let cfg = PicardConfig::new(params(), 0.01, 64);
    let (z, q, report) = solve_z(&f, &cfg)?;
    let u = reconstruct_u(&z, &q, &f)?;
    Ok(Converged { f, cfg, u, report })
}

fn picard_vs_oracle(run: &mkdv_lab::Result<Converged>) -> Outcome {
    let run = match run {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("solve_z failed: {e}")),
    };
    let grid = run.cfg.grid(16).unwrap();
    let reference = solve_reference(&run.f, &grid, &ETDConfig::default()).unwrap();
    let (dist, _) = compare_trajectories(&run.u, &reference, 0.0).unwrap();
    let ratios: Vec<f64> = run.report.iters.iter().filter_map(|r| r.ratio).collect();
    let contracting = ratios.iter().all(|&r| r < 1.0);
    let ok = run.report.converged && contracting && dist < 1e-4;
    let worst = ratios.iter().copied().fold(0.0, f64::max);
    outcome(
        ok,
        format!(
            "converged {} in {} iterates, max ratio {worst:.3e} < 1, H0 distance {dist:.3e} < 1e-4",
            run.report.converged,
            run.report.iters.len()
        ),
    )
}

fn cubic_scaling() -> Outcome {
    let cfg = PicardConfig::new(params(), 1e-3, 64);
    let grid = cfg.grid(16).unwrap();
    let norm_z1 = |amp: f64| {
        let f = FourierField::cosine(16, amp, 1);
        let (z1, _, _) = picard_step(&Trajectory::zeros(grid), &f, &cfg).unwrap();
        x_space_norm(&z1, &cfg.params, &f, &cfg.proxy).unwrap()
    };
    let factor = norm_z1(2.0) / norm_z1(1.0);
    outcome((factor / 8.0 - 1.0).abs() <= 0.05, format!("growth factor {factor:.4} (8 ± 5%)"))
}

fn smoothing(run: &mkdv_lab::Result<Converged>) -> Outcome {
    let Ok(run) = run else {
        return outcome(false, "criterion-6 run unavailable".into());
    };
    let rep = smoothing_report(&run.u, &run.f, &run.cfg.params).unwrap();
    let finite = rep.frames.iter().all(|m| {
        [m.remainder_hs1, m.modulus_sum, m.modulus_sum_upgraded, m.modulus_sup].iter().all(|x| x.is_finite())
    });
    let m0 = rep.frames[0];
    let at_zero = m0.remainder_hs1 == 0.0 && m0.modulus_sum == 0.0 && m0.modulus_sum_upgraded == 0.0 && m0.modulus_sup == 0.0;
    let bounded = rep.sup_remainder_hs1 <= run.report.final_norm_x;
    outcome(
        finite && at_zero && bounded,
        format!(
            "finite {finite}, zero at t=0 {at_zero}, metric (i) {:.3e} <= X norm {:.3e}",
            rep.sup_remainder_hs1, run.report.final_norm_x
        ),
    )
}

fn probe_determinism() -> Outcome {
    let f = FourierField::cosine(32, 1.0, 1);
    let spec = EnsembleSpec { k_levels: vec![8, 16], ..EnsembleSpec::new(1, 100, 32, params()) };
    let a = probe_estimate_16(&f, &spec).unwrap();
    let b = probe_estimate_16(&f, &spec).unwrap();
    let (ja, jb) = (serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let ks: Vec<usize> = a.per_k.iter().map(|l| l.k_max).collect();
    let well_formed = ks == [8, 16, 32] && a.per_k.iter().all(|l| l.max_ratio.is_some_and(f64::is_finite));
    let table: Vec<String> = a.per_k.iter().map(|l| format!("K={}: {:.4e}", l.k_max, l.max_ratio.unwrap_or(f64::NAN))).collect();
    outcome(ja == jb && well_formed, format!("bit-identical {}, table [{}]", ja == jb, table.join(", ")))
}

fn v_equation(run: &mkdv_lab::Result<Converged>) -> Outcome {
    let Ok(run) = run else {
        return outcome(false, "criterion-6 run unavailable".into());
    };
    let residual = v_equation_residual(&run.u, &run.f).unwrap();
    let again = criterion6_run().unwrap();
    let diff = difference_gauge_metric(&run.u, &again.u).unwrap().sup;
    let bound = 10.0 * run.cfg.tol;
    outcome(
        residual <= bound && diff <= 1e-10,
        format!("residual {residual:.3e} <= {bound:.0e}, difference metric {diff:.3e} <= 1e-10"),
    )
}

fn main() {
    let mut failed = 0;
    let mut report = |n: usize, what: &str, budget: Duration, run: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let in_time = took <= budget;
        let ok = out.ok && in_time;
        if !ok {
            failed += 1;
        }
        println!(
            "{} criterion {n:>2} {what}: {} ({:.2} s, budget {} s{})",
            if ok { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64(),
            budget.as_secs(),
            if in_time { "" } else { ", over budget" }
        );
    };
    let s = Duration::from_secs;
    report(1, "decomposition identity", s(30), &mut decomposition);
    report(2, "fast/naive NR", s(60), &mut fast_vs_naive);
    report(3, "resonance identity", s(5), &mut resonance_identity);
    report(4, "Q fixed point", s(10), &mut q_fixed_point);
    report(5, "reference order and conservation", s(120), &mut reference_order);
    let mut run6 = None;
    report(6, "gauge/Picard vs reference", s(120), &mut || {
        let run = criterion6_run();
        let out = picard_vs_oracle(&run);
        run6 = Some(run);
        out
    });
    let run6 = run6.expect("criterion 6 ran");
    report(7, "first-iterate cubic scaling", s(60), &mut cubic_scaling);
    report(8, "smoothing metrics", s(120), &mut || smoothing(&run6));
    report(9, "probe determinism and growth table", s(300), &mut probe_determinism);
    report(10, "v-equation consistency", s(60), &mut || v_equation(&run6));
    println!("{} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
