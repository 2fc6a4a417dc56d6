//! Return probability of a two-state scar superposition after a quench, for a
//! scarred and a thermalizing coupling.
//!
//!     cargo run --release --example quench -- 12

use z2scars::dynamics::default_time_grid;
use z2scars::{quench_experiment, ModelParams};

fn main() -> z2scars::Result<()> {
    let len = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(12);
    let params = [ModelParams::new(0.25, 0.5), ModelParams::new(0.5, 0.5)];
    let traces = quench_experiment(&params, len, &default_time_grid())?;
    for (p, trace) in params.iter().zip(&traces) {
        let top: Vec<String> = {
            let mut peaks = trace.peaks_after(2.0);
            peaks.sort_by(|a, b| b.1.total_cmp(&a.1));
            peaks.iter().take(3).map(|(t, f)| format!("{f:.3} at {t:.2}")).collect()
        };
        println!(
            "t = {}: long-time mean {:.4} (1/L^2 = {:.4}), largest revivals {}",
            p.t,
            trace.long_time_mean(),
            1.0 / (len * len) as f64,
            top.join(", ")
        );
    }
    Ok(())
}
