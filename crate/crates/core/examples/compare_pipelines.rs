//! Gauge/Picard solution against the ETDRK4 reference on the same grid.

use mkdv_lab::picard::{reconstruct_u, solve_z, PicardConfig};
use mkdv_lab::reference::{compare_trajectories, solve_reference, ETDConfig};
use mkdv_lab::{FourierField, SobolevIndex};

fn main() {
    let f = FourierField::cosine(16, 1.0, 1);
    let cfg = PicardConfig::new(SobolevIndex::for_s0(0.3).unwrap(), 0.01, 32);
    let (z, q, _) = solve_z(&f, &cfg).unwrap();
    let u = reconstruct_u(&z, &q, &f).unwrap();
    let reference = solve_reference(&f, u.grid(), &ETDConfig::default()).unwrap();
    let (max, profile) = compare_trajectories(&u, &reference, 0.0).unwrap();
    for (n, d) in profile.iter().enumerate().step_by(8) {
        println!("t = {:.5}  |u - u_ref|_H0 = {d:.3e}", u.grid().time(n));
    }
    println!("max {max:.3e}");
}
