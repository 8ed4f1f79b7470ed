//! The majorants A_k next to A along a horizontal line in Ω: they agree on
//! the kept regions and dominate beyond.
//!
//! ```text
//! cargo run --example majorants -- [alpha] [L]
//! ```

use blo_bellman::bellman::{eval_a, eval_majorant};
use blo_bellman::{AlphaContext, OmegaPoint};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let alpha: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0.25);
    let l: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0.0);
    let ctx = AlphaContext::new(alpha)?;
    println!("    x1          A        A_0 - A     A_1 - A     A_2 - A     A_4 - A");
    for i in 0..=16 {
        let x = OmegaPoint::from_d(l - i as f64 * ctx.tau / 4.0, 0.7);
        let a = eval_a(x, l, &ctx)?;
        let gaps: Vec<String> = [0, 1, 2, 4]
            .iter()
            .map(|&k| eval_majorant(x, l, k, &ctx).map(|m| format!("{:+.3e}", m - a)))
            .collect::<Result<_, _>>()?;
        println!("{:8.4}   {:.6}   {}", x.x1, a, gaps.join("  "));
    }
    Ok(())
}
