//! Renders the built-in reference scene, simulates a 25-date single-look
//! stack with one temporal change and writes it as rasters plus a manifest.
//!
//!     cargo run --release --example simulate_stack [out_dir]

use std::path::PathBuf;

use mtdespeckle::io::{save_manifest, write_raster, ManifestEntry, Scene, StackManifest};
use mtdespeckle::prelude::*;

fn main() -> Result<(), Error> {
    let out: PathBuf = std::env::args()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(|| std::env::temp_dir().join("mtdespeckle-stack"));
    std::fs::create_dir_all(&out).map_err(|e| Error::Config(e.to_string()))?;

    let mut scene = Scene::reference();
    scene.changes.push(ChangeEvent {
        region: Rect::new(80, 80, 24, 24),
        first_date: 12,
        last_date: 24,
        gain: 5.0,
    });
    let truth = scene.render()?;
    let stack = simulate_stack(&truth, 25, LooksCount::SINGLE, &scene.changes, 0, RngSeed(2024))?;

    write_raster(out.join("truth.rdim"), &truth)?;
    let mut entries = Vec::new();
    for (date, img) in stack.dates().iter().zip(stack.images()) {
        let path = PathBuf::from(format!("{date}.rdim"));
        write_raster(out.join(&path), img)?;
        entries.push(ManifestEntry { date: date.clone(), path });
    }
    let manifest = StackManifest {
        id: "reference-with-change".into(),
        looks: 1.0,
        homogeneous_region: scene.homogeneous_region,
        entries,
        changes: scene.changes.clone(),
    };
    save_manifest(out.join("manifest.toml"), &manifest)?;

    let region = scene.homogeneous_region.expect("reference scene has a homogeneous region");
    let first = &stack.images()[0];
    println!("wrote {} dates of {}x{} to {}", stack.len(), truth.width(), truth.height(), out.display());
    println!("ENL of one date over {region}: {:.2}", estimate_enl(&first.crop(region)?)?.get());
    let inside = |img: &IntensityImage| img.crop(Rect::new(80, 80, 24, 24)).map(|c| c.mean());
    println!(
        "mean intensity in the changed block: date 0 {:.3}, date 24 {:.3}",
        inside(first)?,
        inside(&stack.images()[24])?
    );
    Ok(())
}
