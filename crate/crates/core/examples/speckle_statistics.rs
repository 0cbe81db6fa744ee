//! Draws speckle fields and compares their moments, ENL and log-bias with
//! the theoretical values.
//!
//!     cargo run --release --example speckle_statistics

use mtdespeckle::metrics::lag1_autocorrelation;
use mtdespeckle::prelude::*;
use mtdespeckle::speckle::{fisher_tippett_pdf, gamma_pdf, log_speckle_bias};

fn main() -> Result<(), Error> {
    println!("{:>5} {:>9} {:>9} {:>9} {:>10} {:>10}", "L", "mean", "var*L", "ENL", "E[log u]", "psi-log L");
    for l in [1.0, 2.0, 4.0, 4.7, 16.0] {
        let looks = LooksCount::new(l)?;
        let u = sample_speckle(500, 500, looks, RngSeed(1))?;
        let n = u.len() as f64;
        let mean = u.mean();
        let var = u.data().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let mean_log = u.data().iter().map(|v| v.ln()).sum::<f64>() / n;
        println!(
            "{l:>5} {mean:>9.4} {:>9.4} {:>9.3} {mean_log:>10.4} {:>10.4}",
            var * l,
            estimate_enl(&u)?.get(),
            log_speckle_bias(looks)
        );
    }

    println!("\ndensities at u = 1 (z = 0):");
    for l in [1.0, 4.0, 16.0] {
        let looks = LooksCount::new(l)?;
        println!("  L={l:<4} gamma {:.5}  log-speckle {:.5}", gamma_pdf(1.0, looks)?, fisher_tippett_pdf(0.0, looks));
    }

    println!("\nspatially correlated single-look speckle:");
    for r in [0, 1, 2, 4] {
        let u = sample_correlated_speckle(256, 256, r, RngSeed(2))?;
        let half = downsample2(&u)?;
        println!(
            "  radius {r}: lag-1 autocorrelation {:.3}, after 2x2 averaging {:.3}",
            lag1_autocorrelation(&u),
            lag1_autocorrelation(&half)
        );
    }
    Ok(())
}
