//! Fourier fields: construction, norms, sampling and the JSON form.

use mkdv_lab::spectral::{field_from_samples, sobolev_norm};
use mkdv_lab::FourierField;

fn main() {
    let u = FourierField::cosine(8, 1.0, 2);
    println!("u = cos 2x, K = {}", u.k_max());
    for s in [0.0, 0.3, 1.0] {
        println!("  |u|_H^{s} = {:.6}", sobolev_norm(&u, s));
    }

    // 64 samples resolve every mode up to K = 8
    let samples = u.to_samples(64);
    let back = field_from_samples(&samples, 8).unwrap();
    println!("sample round trip error {:.2e}", back.max_abs_diff(&u));

    let json = serde_json::to_string(&FourierField::cosine(2, 1.0, 1)).unwrap();
    println!("json: {json}");
}
