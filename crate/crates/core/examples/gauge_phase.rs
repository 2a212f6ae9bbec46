//! Phase system Q for a given remainder z, and the gauge u = z + f e^{iQ}.

use num_complex::Complex64;

use mkdv_lab::gauge::{gauge_compose, gauge_decompose, gprime_bound_report, solve_q, QSolveConfig};
use mkdv_lab::{FourierField, GridSpec, Trajectory};

fn main() {
    let grid = GridSpec::new(16, 64, 0.01).unwrap();
    let f = FourierField::cosine(16, 1.0, 1);
    let z = Trajectory::from_fn(grid, |_, t| FourierField::real_from_modes(16, &[(1, Complex64::new(0.05 * t, 0.01))]));

    let (q, rep) = solve_q(&f, &z, QSolveConfig::default()).unwrap();
    println!("sweeps {}, residual {:.2e}, ratios {:?}", rep.sweeps, rep.residual, rep.sweep_ratios);
    println!("C0 = {:.3e}, certified T0 = {:.3e}, inside window: {}", rep.c0, rep.certified_t0, rep.within_certified_window);
    println!("Q(T, 1) = {:.12}  Q(T, -1) = {:.12}", q.value(63, 1), q.value(63, -1));

    let u = gauge_compose(&z, &q, &f).unwrap();
    let back = gauge_decompose(&u, &q, &f).unwrap();
    println!("round trip error {:.2e}", back.try_sub(&z).unwrap().max_abs());

    let g = gprime_bound_report(&f, &z, 0.3);
    println!("G' bound: {:.3e} <= {:.3e}", g.value, g.bound);
}
