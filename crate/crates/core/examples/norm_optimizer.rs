//! Enclosures for the statistics of ψ_j: mean 0, BMO norm 1, and a maximal
//! function whose BLO difference γ_j tends to 1.
//!
//! ```text
//! cargo run --release --example norm_optimizer -- [jmax] [depth]
//! ```

use blo_bellman::optimizers::{m_norm_report, report_table};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let jmax: u32 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(12);
    let depth: u32 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(24);
    let rows = m_norm_report(1..=jmax, depth)?;
    println!(" j   gamma_j        <N psi> enclosure                 BMO enclosure               unresolved");
    for r in &rows {
        let s = &r.stats;
        println!(
            "{:2}   {:.10}   [{:.12}, {:.12}]   [{:.10}, {:.10}]   {:.3e}",
            r.params.j, r.params.gamma, s.mean_n.lo, s.mean_n.hi, s.bmo.lo, s.bmo.hi, s.unresolved_mass
        );
    }
    if std::env::var_os("CSV").is_some() {
        print!("{}", report_table(&rows).to_csv());
    }
    Ok(())
}
