//! Driving the runner from code: resolve a JSON config and run it.

use mkdv_lab::runner::{parse_config_text, resolve, run, Overrides};

fn main() {
    let out = std::env::temp_dir().join("mkdv-lab-example");
    let text = r#"{
        "mode": "decompose_check",
        "initial_data": {"kind": "seeded-random", "seed": 3},
        "grid": {"K": 16, "M": 16, "T": 0.01}
    }"#;
    let raw = parse_config_text(text).unwrap();
    let config = resolve(&raw, &Overrides { output_dir: Some(out), ..Overrides::default() }, None).unwrap();
    println!("resolved picard tol {}, proxy window {:?}", config.picard.tol, config.proxy.window);
    let outcome = run(&config).unwrap();
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }

    let bad = parse_config_text(r#"{
        "mode": "gauge_solve",
        "initial_data": {"kind": "cosine", "mode": 3},
        "grid": {"K": 2, "M": 4, "T": 0.01}
    }"#).unwrap();
    let err = resolve(&bad, &Overrides::default(), None).unwrap_err();
    print!("{}", err.to_json());
}
