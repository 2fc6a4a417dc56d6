//! Builds both scar towers on a ring and verifies they are exact eigenstates
//! of the domain-wall conserving model, with equally spaced energies.
//!
//!     cargo run --release --example scar_towers -- 12

use z2scars::hamiltonian::{apply_full, Model};
use z2scars::scalar::inner;
use z2scars::scars::{norm_constant_formula, scar_state, tower_labels};
use z2scars::{ModelParams, Tower};

fn main() -> z2scars::Result<()> {
    let len = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(12);
    let params = ModelParams::new(0.2, 0.5);
    for tower in [Tower::Magnon, Tower::Antimagnon] {
        println!("{tower} tower, L = {len}");
        for label in tower_labels(tower, len) {
            let (v, constant) = scar_state(label, len)?;
            let hv = apply_full(Model::Effective, &params, len, &v)?;
            let e = inner(&v, &hv).re;
            let residual = hv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - b * e).norm_sqr())
                .sum::<f64>()
                .sqrt();
            println!(
                "  n = {:2}  E = {:9.4}  (expected {:9.4})  residual {:.1e}  norm^2 {:.6e} / {:.6e}",
                label.n,
                e,
                label.effective_energy(&params, len),
                residual,
                constant,
                norm_constant_formula(len, label.n)
            );
        }
    }
    Ok(())
}
