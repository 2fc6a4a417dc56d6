//! Spectral distance between the Ising chain and its domain-wall conserving
//! approximation as `t` shrinks; the distance falls off as `t^2`.
//!
//!     cargo run --release --example sw_convergence

use z2scars::hamiltonian::{build_full, Model};
use z2scars::spectral::eigvalsh;
use z2scars::ModelParams;

fn main() -> z2scars::Result<()> {
    let len = 10;
    let mut previous: Option<f64> = None;
    for t in [0.16, 0.08, 0.04, 0.02, 0.01] {
        let p = ModelParams::new(t, 0.3);
        let exact = eigvalsh(&build_full(Model::Ising, &p, len)?)?;
        let approx = eigvalsh(&build_full(Model::Effective, &p, len)?)?;
        let dev = exact
            .iter()
            .zip(&approx)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        match previous {
            Some(prev) => println!("t = {t:5.2}: max level shift {dev:.3e}, ratio {:.3}", prev / dev),
            None => println!("t = {t:5.2}: max level shift {dev:.3e}"),
        }
        previous = Some(dev);
    }
    Ok(())
}
