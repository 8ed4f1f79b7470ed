//! The sharp decay functions Φ_n on `[0, 5τ]`, with the knots `t = kτ` where
//! `Φ_n(kτ) = 2^{-nk}`.
//!
//! ```text
//! cargo run --example decay_table -- [n_max]
//! ```

use blo_bellman::bellman::eval_decay;
use blo_bellman::AlphaContext;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n_max: u32 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(4);
    for n in 1..=n_max {
        let ctx = AlphaContext::dyadic(n)?;
        println!("n = {n}  (tau = {:.6})", ctx.tau);
        for i in 0..=20i32 {
            let t = i as f64 * ctx.tau / 4.0;
            let knot = if i % 4 == 0 {
                format!("  knot: 2^-{} = {:.3e}", n as i32 * i / 4, ctx.alpha.powi(i / 4))
            } else {
                String::new()
            };
            println!("  t = {t:8.4}   Phi = {:.10e}{knot}", eval_decay(t, &ctx)?);
        }
    }
    Ok(())
}
