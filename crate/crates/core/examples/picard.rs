//! Picard iteration for the gauged remainder z.

use mkdv_lab::picard::{reconstruct_u, solve_z, PicardConfig};
use mkdv_lab::{FourierField, SobolevIndex};

fn main() {
    let f = FourierField::cosine(16, 1.0, 1);
    let cfg = PicardConfig { richardson_check: true, ..PicardConfig::new(SobolevIndex::for_s0(0.3).unwrap(), 0.01, 64) };
    let (z, q, rep) = solve_z(&f, &cfg).unwrap();
    for (i, it) in rep.iters.iter().enumerate() {
        println!("iter {:>2}: |z|_X = {:.6e}  |dz|_X = {:.3e}  ratio {:?}", i + 1, it.norm_x, it.diff_norm, it.ratio);
    }
    println!("converged {}, strong residual {:.2e}, within 2K {}", rep.converged, rep.strong_residual, rep.within_2k);
    if let Some(r) = rep.richardson {
        println!("grid refinement ({} frames): max diff {:.2e}", r.fine_frames, r.max_diff);
    }
    let u = reconstruct_u(&z, &q, &f).unwrap();
    println!("u(T, 1) = {}", u.last().coeff(1));
}
