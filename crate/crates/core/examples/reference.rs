//! ETDRK4 reference run: conservation and self-convergence.

use mkdv_lab::reference::{evolve, solve_reference_with_diagnostics, ETDConfig};
use mkdv_lab::spectral::sobolev_norm;
use mkdv_lab::{FourierField, GridSpec};

fn main() {
    let f = FourierField::cosine(32, 1.0, 1);
    let grid = GridSpec::new(32, 6, 0.5).unwrap();
    let (_, records) = solve_reference_with_diagnostics(&f, &grid, &ETDConfig { dt: 1e-3, ..ETDConfig::default() }).unwrap();
    println!("t       mass  l2                  energy");
    for r in &records {
        println!("{:.2}  {:>5}  {:.16}  {:.16}", r.t, r.mass, r.l2, r.energy);
    }

    let run = |dt| evolve(&f, 0.5, &f, &ETDConfig { dt, ..ETDConfig::default() }).unwrap();
    let (a, b, c) = (run(4e-3), run(2e-3), run(1e-3));
    let order = (sobolev_norm(&(&a - &b), 0.0) / sobolev_norm(&(&b - &c), 0.0)).log2();
    println!("observed order {order:.3}");
}
