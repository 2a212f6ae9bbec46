//! Seeded ratio probes with a nested max-ratio-vs-K table.

use mkdv_lab::probes::{probe_estimate_16, probe_trilinear_12, EnsembleFamily, EnsembleSpec};
use mkdv_lab::{FourierField, SobolevIndex};

fn main() {
    let f = FourierField::cosine(32, 1.0, 1);
    let spec = EnsembleSpec {
        k_levels: vec![8, 16],
        family: EnsembleFamily::Modulated,
        ..EnsembleSpec::new(1, 40, 32, SobolevIndex::for_s0(0.3).unwrap())
    };
    for (name, rep) in [("L^inf H^s1 Duhamel", probe_estimate_16(&f, &spec)), ("Y trilinear", probe_trilinear_12(&f, &spec))] {
        let rep = rep.unwrap();
        println!("{name}: {} valid, {} skipped", rep.valid_samples, rep.skipped);
        for l in &rep.per_k {
            println!("  K = {:>2}  samples {:>3}  max ratio {:.4e}", l.k_max, l.samples, l.max_ratio.unwrap_or(f64::NAN));
        }
    }
}
