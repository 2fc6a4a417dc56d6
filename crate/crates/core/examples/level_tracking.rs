//! Follows antimagnon and magnon states through avoided crossings along a
//! preset path, then lists the entropy spikes picked up on the way.
//!
//!     cargo run --release --example level_tracking -- 12 path0

use z2scars::tracker::{entropy_spike_report, TrackEntry};
use z2scars::{preset_path, s_rmt, track_many, Error, ScarLabel, Tower, TrackingPolicy};

fn main() -> z2scars::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let len: usize = args.first().and_then(|a| a.parse().ok()).unwrap_or(12);
    let path = preset_path(args.get(1).map_or("path0", String::as_str))?;
    let labels = [
        ScarLabel::new(Tower::Antimagnon, 2)?,
        ScarLabel::new(Tower::Antimagnon, 4)?,
        ScarLabel::new(Tower::Magnon, 4)?,
    ];
    let baseline = s_rmt(len);

    for result in track_many(&path, &labels, len, &TrackingPolicy::default())? {
        let (record, lost) = match result {
            Ok(r) => (r, false),
            Err(Error::LostState { record, .. }) => (*record, true),
            Err(e) => return Err(e),
        };
        let last: &TrackEntry = record.last().expect("tracks start with one entry");
        println!(
            "{} n={}: {} steps, ended at t = {:.3}{}; S/S_RMT {:.3} -> {:.3}",
            record.label.tower,
            record.label.n,
            record.entries.len(),
            last.t,
            if lost { " (lost)" } else { "" },
            record.entries[0].entropy / baseline,
            last.entropy / baseline,
        );
        match record.low_entropy_loss(0.5, 5) {
            Some(t) => println!("  low entanglement lost at t = {t:.3}"),
            None => println!("  stays below S_RMT/2"),
        }
        for spike in entropy_spike_report(&record, 0.2, 3).iter().take(5) {
            println!(
                "  spike at t = {:.3}: S = {:.3} (+{:.3}){}",
                spike.t,
                spike.entropy,
                spike.excess,
                if spike.overlap_dip { ", overlap dip" } else { "" }
            );
        }
    }
    Ok(())
}
