//! Scores a restoration with the log-domain metrics and writes amplitude
//! previews of the noisy, restored and true images.
//!
//!     cargo run --release --example evaluate_and_preview [out_dir]

use std::path::PathBuf;

use mtdespeckle::io::{export_preview, Scene};
use mtdespeckle::prelude::*;

fn main() -> Result<(), Error> {
    let out: PathBuf = std::env::args()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(|| std::env::temp_dir().join("mtdespeckle-preview"));
    std::fs::create_dir_all(&out).map_err(|e| Error::Config(e.to_string()))?;

    let scene = Scene::reference();
    let truth = scene.render()?;
    let stack = simulate_stack(&truth, 25, LooksCount::SINGLE, &[], 0, RngSeed(9))?;
    let s = build_super_image(&stack, None, scene.homogeneous_region)?;
    let w = &stack.images()[0];
    let estimate = despeckle_ratio(w, &s, &BoxDenoiser::new(3, true), LooksCount::SINGLE)?;

    let report = EvalReport::evaluate(&estimate, &truth, Some(w), scene.homogeneous_region)?;
    print!("{}", report.to_key_values());

    for (name, img) in [("noisy", w), ("restored", &estimate), ("truth", &truth), ("super", s.data())] {
        export_preview(img, out.join(format!("{name}.pgm")), 0.7)?;
    }
    println!("previews written to {}", out.display());
    Ok(())
}
