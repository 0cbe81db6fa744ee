//! Command-line front end.
//!
//! Exit codes: `0` success, `2` usage error, `3` I/O failure, `4` malformed
//! raster or model file, `5` incompatible dimensions or out-of-bounds
//! regions, `6` invalid configuration or numeric domain, `7` invalid
//! manifest, `8` missing input file.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::denoiser::{
    downsample2, train_with_history, Architecture, BoxDenoiser, Denoiser, TrainConfig,
};
use crate::error::{Error, ErrorClass, Result};
use crate::image::Rect;
use crate::io::{
    export_preview, load_model, load_stack, read_raster, save_manifest, save_model,
    write_raster, ManifestEntry, Scene, StackManifest,
};
use crate::metrics::EvalReport;
use crate::ratio::{despeckle_ratio, despeckle_single};
use crate::rng::RngSeed;
use crate::speckle::LooksCount;
use crate::stack::{build_super_image, simulate_stack, SuperImage};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_FORMAT: i32 = 4;
pub const EXIT_DIMENSION: i32 = 5;
pub const EXIT_CONFIG: i32 = 6;
pub const EXIT_MANIFEST: i32 = 7;
pub const EXIT_MISSING_FILE: i32 = 8;

pub fn exit_code(class: ErrorClass) -> i32 {
    match class {
        ErrorClass::Io => EXIT_IO,
        ErrorClass::Format => EXIT_FORMAT,
        ErrorClass::Dimension => EXIT_DIMENSION,
        ErrorClass::Config => EXIT_CONFIG,
        ErrorClass::Manifest => EXIT_MANIFEST,
        ErrorClass::MissingFile => EXIT_MISSING_FILE,
    }
}

#[derive(Debug, Parser)]
#[command(name = "mtdespeckle", version, about = "Multi-temporal ratio despeckling of SAR intensity images")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a speckled stack from a scene description
    Simulate {
        /// Scene TOML file, or `reference` for the built-in 128x128 scene
        #[arg(long)]
        scene: String,
        #[arg(long, default_value_t = 25)]
        frames: usize,
        #[arg(long, default_value_t = 1.0)]
        looks: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Speckle correlation radius in pixels (0 = uncorrelated)
        #[arg(long, default_value_t = 0)]
        correlated: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Temporal average of a stack, optionally smoothed
    Superimage {
        #[arg(long)]
        stack: PathBuf,
        /// Radius of the bias-corrected box smoothing
        #[arg(long)]
        smooth: Option<usize>,
        /// Homogeneous region `x,y,width,height` for ENL estimation
        #[arg(long, value_parser = parse_rect)]
        region: Option<Rect>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Despeckle one image, through its ratio to a super-image if given
    Despeckle {
        #[arg(long)]
        input: PathBuf,
        /// `baseline` or `model:<path>`
        #[arg(long, default_value = "baseline")]
        denoiser: String,
        #[arg(long = "super")]
        super_image: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        looks: f64,
        /// Window radius of the baseline denoiser
        #[arg(long, default_value_t = 3)]
        radius: usize,
        /// Work at half resolution (2x2 block averages); the output is half size
        #[arg(long)]
        downsample2: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a denoiser on a change-free stack
    Train {
        #[arg(long)]
        stack: PathBuf,
        #[arg(long, default_value_t = 10)]
        epochs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        layers: usize,
        #[arg(long, default_value_t = 32)]
        channels: usize,
        #[arg(long, default_value_t = 32)]
        patch: usize,
        #[arg(long, default_value_t = 4)]
        batch: usize,
        #[arg(long, default_value_t = 1e-3)]
        lr: f64,
        #[arg(long)]
        samples_per_epoch: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare an estimate with the reference reflectivity
    Eval {
        #[arg(long)]
        estimate: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        /// Speckled input, enables residual ratio statistics
        #[arg(long)]
        noisy: Option<PathBuf>,
        #[arg(long, value_parser = parse_rect)]
        region: Option<Rect>,
        #[arg(long)]
        report: PathBuf,
    },
    /// Render a raster as an 8-bit PGM amplitude preview
    Preview {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_rect(s: &str) -> std::result::Result<Rect, String> {
    let v: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| format!("expected x,y,width,height: {e}"))?;
    match v[..] {
        [x, y, w, h] => Ok(Rect::new(x, y, w, h)),
        _ => Err("expected x,y,width,height".into()),
    }
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code. Errors go to stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(e.class())
        }
    }
}

fn looks(l: f64) -> Result<LooksCount> {
    LooksCount::new(l)
}

fn load_denoiser(name: &str, radius: usize) -> Result<Box<dyn Denoiser>> {
    if name == "baseline" {
        return Ok(Box::new(BoxDenoiser::new(radius, true)));
    }
    match name.strip_prefix("model:") {
        Some(path) => Ok(Box::new(load_model(path)?)),
        None => Err(Error::Config(format!(
            "unknown denoiser {name:?}, expected `baseline` or `model:<path>`"
        ))),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Simulate {
            scene,
            frames,
            looks: l,
            seed,
            correlated,
            out,
        } => {
            let scene = if scene == "reference" {
                Scene::reference()
            } else {
                Scene::load(&scene)?
            };
            let truth = scene.render()?;
            let stack = simulate_stack(
                &truth,
                frames,
                looks(l)?,
                &scene.changes,
                correlated,
                RngSeed(seed),
            )?;
            create_dir(&out)?;
            write_raster(out.join("truth.rdim"), &truth)?;
            let mut entries = Vec::with_capacity(stack.len());
            for (date, img) in stack.dates().iter().zip(stack.images()) {
                let name = format!("{date}.rdim");
                write_raster(out.join(&name), img)?;
                entries.push(ManifestEntry {
                    date: date.clone(),
                    path: name.into(),
                });
            }
            let manifest = StackManifest {
                id: format!("simulated-{seed}"),
                looks: l,
                homogeneous_region: scene.homogeneous_region,
                entries,
                changes: scene.changes.clone(),
            };
            save_manifest(out.join("manifest.toml"), &manifest)
        }
        Command::Superimage {
            stack,
            smooth,
            region,
            out,
        } => {
            let (manifest, stack) = load_stack(&stack)?;
            let region = region.or(manifest.homogeneous_region);
            let smoother = smooth.map(|r| BoxDenoiser::new(r, true));
            let s = build_super_image(
                &stack,
                smoother.as_ref().map(|d| d as &dyn Denoiser),
                region,
            )?;
            eprintln!("super-image ENL {:.2}", s.enl().get());
            write_raster(out, s.data())
        }
        Command::Despeckle {
            input,
            denoiser,
            super_image,
            looks: l,
            radius,
            downsample2: half,
            out,
        } => {
            let d = load_denoiser(&denoiser, radius)?;
            let mut w = read_raster(&input)?;
            let mut s = super_image.map(read_raster).transpose()?;
            if let Some(s) = &s {
                w.ensure_same_dims(s)?;
            }
            if half {
                w = downsample2(&w)?;
                s = s.as_ref().map(downsample2).transpose()?;
            }
            let estimate = match s {
                Some(s) => despeckle_ratio(&w, &SuperImage::from_image(s, None)?, &d, looks(l)?)?,
                None => despeckle_single(&w, &d, looks(l)?)?,
            };
            write_raster(out, &estimate)
        }
        Command::Train {
            stack,
            epochs,
            seed,
            layers,
            channels,
            patch,
            batch,
            lr,
            samples_per_epoch,
            out,
        } => {
            let (_, stack) = load_stack(&stack)?;
            let config = TrainConfig {
                epochs,
                batch_size: batch,
                patch_size: patch,
                learning_rate: lr,
                seed: RngSeed(seed),
                architecture: Architecture::new(layers, channels, 3)?,
                samples_per_epoch,
                ..TrainConfig::default()
            };
            let (model, history) = train_with_history(&stack, &config)?;
            for (e, loss) in history.train_loss.iter().enumerate() {
                let val = history
                    .validation_loss
                    .get(e)
                    .map(|v| format!(" validation={v:.6}"))
                    .unwrap_or_default();
                eprintln!("epoch {e}: train={loss:.6}{val}");
            }
            save_model(out, &model)
        }
        Command::Eval {
            estimate,
            truth,
            noisy,
            region,
            report,
        } => {
            let estimate = read_raster(&estimate)?;
            let truth = read_raster(&truth)?;
            let noisy = noisy.map(read_raster).transpose()?;
            let r = EvalReport::evaluate(&estimate, &truth, noisy.as_ref(), region)?;
            let text = r.to_key_values();
            print!("{text}");
            std::fs::write(&report, text).map_err(|e| Error::io(&report, e))
        }
        Command::Preview { input, gamma, out } => export_preview(&read_raster(input)?, out, gamma),
    }
}
