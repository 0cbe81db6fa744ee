use std::path::Path;
use std::process::Command;

use mtdespeckle::cli::{run, EXIT_DIMENSION, EXIT_FORMAT, EXIT_MANIFEST, EXIT_OK};
use mtdespeckle::io::{read_raster, write_raster};
use mtdespeckle::metrics::EvalReport;
use mtdespeckle::prelude::IntensityImage;

fn cli(args: &[&str]) -> i32 {
    let mut argv = vec!["mtdespeckle"];
    argv.extend_from_slice(args);
    run(argv)
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn scripted_pipeline_runs_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let sim = d.join("sim");
    let manifest = sim.join("manifest.toml");
    let super_img = d.join("super.rdim");
    let model = d.join("model.rdnm");
    let out_box = d.join("box.rdim");
    let out_cnn = d.join("cnn.rdim");
    let report = d.join("report.txt");

    let sim_args = ["simulate", "--scene", "reference", "--frames", "4", "--seed", "11", "--out", p(&sim)];
    assert_eq!(cli(&sim_args), EXIT_OK);
    assert!(sim.join("t03.rdim").is_file());
    assert_eq!(cli(&["superimage", "--stack", p(&manifest), "--smooth", "1", "--out", p(&super_img)]), EXIT_OK);
    let train = [
        "train", "--stack", p(&manifest), "--epochs", "2", "--layers", "2", "--channels", "4",
        "--patch", "16", "--batch", "2", "--samples-per-epoch", "8", "--seed", "3", "--out", p(&model),
    ];
    assert_eq!(cli(&train), EXIT_OK);
    let t00 = sim.join("t00.rdim");
    let despeckle = |denoiser: &str, out: &Path| {
        cli(&["despeckle", "--input", p(&t00), "--super", p(&super_img), "--denoiser", denoiser, "--out", p(out)])
    };
    assert_eq!(despeckle("baseline", &out_box), EXIT_OK);
    assert_eq!(despeckle(&format!("model:{}", p(&model)), &out_cnn), EXIT_OK);
    let truth = sim.join("truth.rdim");
    let eval = [
        "eval", "--estimate", p(&out_box), "--truth", p(&truth), "--noisy", p(&t00),
        "--region", "4,4,48,24", "--report", p(&report),
    ];
    assert_eq!(cli(&eval), EXIT_OK);
    let r = EvalReport::parse(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(r.mse_log.is_finite() && r.mse_log > 0.0);
    assert!(r.psnr_log.is_finite());
    assert!(r.ratio_mean.is_some() && r.ratio_enl.is_some());
    assert_eq!(cli(&["preview", "--input", p(&out_cnn), "--out", p(&d.join("cnn.pgm"))]), EXIT_OK);

    // Retraining with the same seed reproduces the model file byte for byte.
    let again = d.join("again.rdnm");
    let mut train2 = train;
    train2[train2.len() - 1] = p(&again);
    assert_eq!(cli(&train2), EXIT_OK);
    assert_eq!(std::fs::read(&model).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn half_resolution_despeckling_halves_the_output() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.rdim");
    let out = dir.path().join("o.rdim");
    write_raster(&w, &IntensityImage::constant(21, 16, 2.0).unwrap()).unwrap();
    let code = cli(&["despeckle", "--input", p(&w), "--radius", "1", "--downsample2", "--out", p(&out)]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(read_raster(&out).unwrap().dims(), (10, 8));
}

#[test]
fn failures_map_to_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let a = d.join("a.rdim");
    let b = d.join("b.rdim");
    let junk = d.join("junk.rdim");
    let out = d.join("o.rdim");
    write_raster(&a, &IntensityImage::constant(8, 8, 1.0).unwrap()).unwrap();
    write_raster(&b, &IntensityImage::constant(9, 8, 1.0).unwrap()).unwrap();
    std::fs::write(&junk, b"JUNKJUNKJUNKJUNKJUNK").unwrap();
    std::fs::write(d.join("bad.toml"), "entries = 3").unwrap();

    let mismatch = cli(&["despeckle", "--input", p(&a), "--super", p(&b), "--out", p(&out)]);
    assert_eq!(mismatch, EXIT_DIMENSION);
    assert_eq!(cli(&["despeckle", "--input", p(&junk), "--out", p(&out)]), EXIT_FORMAT);
    let bad_region = cli(&[
        "eval", "--estimate", p(&a), "--truth", p(&a), "--region", "4,4,8,8", "--report", p(&d.join("r.txt")),
    ]);
    assert_eq!(bad_region, EXIT_DIMENSION);
    let bad_manifest = cli(&["superimage", "--stack", p(&d.join("bad.toml")), "--out", p(&out)]);
    assert_eq!(bad_manifest, EXIT_MANIFEST);
}

#[test]
fn binary_reports_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_mtdespeckle");
    let status = Command::new(exe).arg("--version").status().unwrap();
    assert!(status.success());
    let status = Command::new(exe).args(["despeckle", "--input", "/nonexistent.rdim", "--out", "x"]).status().unwrap();
    assert_eq!(status.code(), Some(mtdespeckle::cli::EXIT_MISSING_FILE));
}
