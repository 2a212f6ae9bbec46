//! Explicit-form probe with comparable / separated frequency cases.

use mkdv_lab::probes::{probe_h_form_700, EnsembleSpec};
use mkdv_lab::{FourierField, SobolevIndex};

fn main() {
    let f = FourierField::cosine(16, 1.0, 1);
    let spec = EnsembleSpec { k_levels: vec![8], ..EnsembleSpec::new(3, 10, 16, SobolevIndex::for_s0(0.35).unwrap()) };
    let rep = probe_h_form_700(&f, &spec).unwrap();
    println!("K0 = {:?}", rep.k0);
    for l in &rep.per_k {
        println!(
            "K = {:>2}: all {:.4e}  case I {:.4e}  case II {:.4e}",
            l.k_max,
            l.max_ratio.unwrap_or(f64::NAN),
            l.case_i_max.unwrap_or(f64::NAN),
            l.case_ii_max.unwrap_or(f64::NAN)
        );
    }
}
