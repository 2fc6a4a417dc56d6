//! Diagonalizes the symmetric block of the Ising chain and prints level
//! statistics plus the lowest-entropy mid-spectrum states.
//!
//!     cargo run --release --example spectrum -- 14 0.2 0.5

use std::sync::Arc;

use z2scars::hamiltonian::build_ising;
use z2scars::{diagonalize, gap_ratio, s_rmt, ModelParams, SectorBasis, SymmetrySector};

fn main() -> z2scars::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let len: usize = args.first().and_then(|a| a.parse().ok()).unwrap_or(12);
    let t: f64 = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(0.2);
    let h: f64 = args.get(2).and_then(|a| a.parse().ok()).unwrap_or(0.5);
    let params = ModelParams::new(t, h);

    let basis = Arc::new(SectorBasis::new(len, SymmetrySector::zero_even())?);
    let sol = diagonalize(&build_ising::<f64>(&params, &basis)?)?;
    let n = sol.len();
    println!("L = {len}, t = {t}, h = {h}: block dimension {n}");
    println!(
        "mean gap ratio {:.4} (GOE 0.531, Poisson 0.386)",
        gap_ratio(sol.energies(), 0.1)?
    );

    let baseline = s_rmt(len);
    let mut mid: Vec<(usize, f64)> = (n / 4..n - n / 4).map(|i| (i, sol.entropy(i) / baseline)).collect();
    mid.sort_by(|a, b| a.1.total_cmp(&b.1));
    println!("lowest mid-spectrum entropies (S / S_RMT):");
    for (i, s) in mid.iter().take(8) {
        println!("  E = {:9.4}  {s:.3}", sol.energies()[*i]);
    }
    Ok(())
}
