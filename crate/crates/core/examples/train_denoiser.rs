//! Trains a small residual CNN self-supervised on pairs of dates of a
//! change-free stack, saves it, and uses it inside the ratio pipeline.
//!
//!     cargo run --release --example train_denoiser [model.rdnm]

use mtdespeckle::denoiser::train_with_history;
use mtdespeckle::io::{load_model, save_model, Scene};
use mtdespeckle::prelude::*;

fn main() -> Result<(), Error> {
    let path = std::env::args()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(|| std::env::temp_dir().join("mtdespeckle-toy.rdnm"));
    let truth = Scene::reference().render()?;
    let stack = simulate_stack(&truth, 25, LooksCount::SINGLE, &[], 0, RngSeed(1000))?;

    let config = TrainConfig {
        epochs: 6,
        batch_size: 8,
        architecture: Architecture::new(4, 16, 3)?,
        samples_per_epoch: Some(400),
        ..TrainConfig::default()
    };
    let (model, history) = train_with_history(&stack, &config)?;
    for (epoch, (t, v)) in history.train_loss.iter().zip(&history.validation_loss).enumerate() {
        println!("epoch {epoch:>2}: train {t:.4}  validation {v:.4}");
    }
    save_model(&path, &model)?;
    let model = load_model(&path)?;
    println!("saved {} parameters to {}", model.params().len(), path.display());

    let test = simulate_stack(&truth, 25, LooksCount::SINGLE, &[], 0, RngSeed(7))?;
    let s = build_super_image(&test, None, None)?;
    let w = &test.images()[0];
    let single = mse_log(&despeckle_single(w, &model, LooksCount::SINGLE)?, &truth)?;
    let ratio = mse_log(&despeckle_ratio(w, &s, &model, LooksCount::SINGLE)?, &truth)?;
    println!("log-MSE on an unseen stack: single {single:.4}, ratio {ratio:.4}");
    Ok(())
}
