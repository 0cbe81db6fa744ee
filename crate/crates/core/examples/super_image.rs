//! Builds super-images from stacks of growing length and shows how their
//! ENL grows with the number of dates, with and without extra smoothing.
//!
//!     cargo run --release --example super_image

use mtdespeckle::io::Scene;
use mtdespeckle::prelude::*;

fn main() -> Result<(), Error> {
    let scene = Scene::reference();
    let truth = scene.render()?;
    let region = scene.homogeneous_region;
    let full = simulate_stack(&truth, 25, LooksCount::SINGLE, &[], 0, RngSeed(3))?;
    let smoother = BoxDenoiser::new(1, true);

    println!("{:>6} {:>10} {:>14} {:>12}", "dates", "ENL", "ENL smoothed", "log-MSE");
    for t in [2, 5, 10, 25] {
        let stack = Stack::from_images(full.images()[..t].to_vec(), LooksCount::SINGLE)?;
        let plain = build_super_image(&stack, None, region)?;
        let smooth = build_super_image(&stack, Some(&smoother), region)?;
        println!(
            "{t:>6} {:>10.2} {:>14.2} {:>12.4}",
            plain.enl().get(),
            smooth.enl().get(),
            mse_log(plain.data(), &truth)?
        );
    }

    let s = build_super_image(&full, None, region)?;
    let n = normalize_super(&s)?;
    println!("\nnormalization factor (geometric mean of s): {:.4}", n.lambda());
    Ok(())
}
