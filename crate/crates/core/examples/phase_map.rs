//! Coarse ergodicity and confinement map over the (t, h) plane, drawn as a
//! character grid: `q` QMBS-possible, `c` chaotic, `m` mixed, `n` nonergodic.
//! Upper case marks the deconfined side.
//!
//!     cargo run --release --example phase_map -- 10

use z2scars::scan::{confined_scar_points, grid_axis};
use z2scars::{scan_grid, Confinement, Region, ScanConfig};

fn main() -> z2scars::Result<()> {
    let len = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(10);
    let mut config = ScanConfig::new(len);
    config.t_values = grid_axis(0.1, 1.5, 0.1);
    config.h_values = config.t_values.clone();
    let points = scan_grid(&config)?;

    println!(
        "rows: h from {:.1} down to {:.1}; columns: t",
        config.h_values.last().unwrap(),
        config.h_values[0]
    );
    for h in config.h_values.iter().rev() {
        let row: String = points
            .iter()
            .filter(|p| p.h == *h)
            .map(|p| {
                let c = match p.region {
                    Region::QmbsPossible => 'q',
                    Region::ChaoticNoScars => 'c',
                    Region::Mixed => 'm',
                    Region::NonergodicHighEntropy => 'n',
                };
                if p.confinement == Confinement::CD {
                    c.to_ascii_uppercase()
                } else {
                    c
                }
            })
            .collect();
        println!("{h:4.1} {row}");
    }
    println!(
        "QMBS-possible and confined: {} points",
        confined_scar_points(&points).len()
    );
    Ok(())
}
