//! ψ_j(t₁) on the dyadic squares of (0, 1]²: the brute-force BMO norm over all
//! squares equals the one-dimensional norm.
//!
//! ```text
//! cargo run --release --example tensor_optimizer -- [j] [depth]
//! ```

use blo_bellman::optimizers::{build_psi, dyadic_tree, tensor_bmo_brute_force, tensor_stats};
use blo_bellman::trees::bmo_norm;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let j: u32 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(3);
    let depth: u32 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(6);
    let psi = build_psi(j, depth)?;
    let vals = psi.grid_values(depth)?;
    let line = bmo_norm(&dyadic_tree(&vals)?);
    let square = tensor_bmo_brute_force(&vals, 2)?;
    println!("psi_{j} truncated at depth {depth}: {} cells", psi.cell_count());
    println!("BMO on the line     {line:.15}");
    println!("BMO on the square   {square:.15}");
    let s = tensor_stats(&psi, 2)?;
    println!("exact BMO enclosure [{:.15}, {:.15}]", s.bmo.lo, s.bmo.hi);
    Ok(())
}
