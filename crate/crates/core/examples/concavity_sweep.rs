//! Seeded α-concavity sweep over chords, directional pairs and three-point
//! chords, for the three reference values of α.
//!
//! ```text
//! cargo run --release --example concavity_sweep -- [samples] [seed]
//! ```

use blo_bellman::concavity::sweep;
use blo_bellman::AlphaContext;
use std::time::Instant;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let samples: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(100_000);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(7);

    for alpha in [0.5, 0.25, 0.1] {
        let ctx = AlphaContext::new(alpha)?;
        let start = Instant::now();
        let report = sweep(&ctx, samples, seed)?;
        println!("alpha = {alpha}  ({:.2?})", start.elapsed());
        for (name, min, near) in [
            ("chord", report.chord.min_margin, report.chord.min_abs_margin),
            ("directional", report.directional.min_margin, report.directional.min_abs_margin),
            ("three-point", report.three_point.min_margin, report.three_point.min_abs_margin),
        ] {
            println!("  {name:<12} min margin {min:+.3e}   closest to equality {near:.3e}");
        }
        if !report.passed() {
            println!("  violation at {:?}", report.chord.argmin);
        }
    }
    Ok(())
}
