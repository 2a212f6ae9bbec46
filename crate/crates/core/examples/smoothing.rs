//! Smoothing metrics and the v-equation residual of a computed solution.

use mkdv_lab::picard::{reconstruct_u, solve_z, PicardConfig};
use mkdv_lab::probes::{difference_gauge_metric, smoothing_report, v_equation_residual};
use mkdv_lab::reference::{solve_reference, ETDConfig};
use mkdv_lab::{FourierField, SobolevIndex};

fn main() {
    let params = SobolevIndex::for_s0(0.3).unwrap();
    let f = FourierField::cosine(16, 1.0, 1);
    let (z, q, _) = solve_z(&f, &PicardConfig::new(params, 0.01, 32)).unwrap();
    let u = reconstruct_u(&z, &q, &f).unwrap();

    let rep = smoothing_report(&u, &f, &params).unwrap();
    println!("sup |z|_H^s1            {:.4e}", rep.sup_remainder_hs1);
    println!("sup sum |k| d|u|^2      {:.4e}", rep.sup_modulus_sum);
    println!("sup sum |k|^{:.2} d|u|^2  {:.4e}", rep.upgraded_exponent, rep.sup_modulus_sum_upgraded);
    println!("sup_k |k| d|u|^2        {:.4e}", rep.sup_modulus_sup);
    println!("v residual              {:.2e}", v_equation_residual(&u, &f).unwrap());

    // the reference run solves the same equation without a gauge
    let reference = solve_reference(&f, u.grid(), &ETDConfig::default()).unwrap();
    println!("modulus gap to reference {:.2e}", difference_gauge_metric(&u, &reference).unwrap().sup);
}
