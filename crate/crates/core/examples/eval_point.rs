//! Evaluates B, its gradient and the extremal segment at a point of Ω.
//!
//! ```text
//! cargo run --example eval_point -- [alpha] [x1] [x2] [L]
//! ```

use blo_bellman::bellman::{eval_a, eval_bellman, solve_s};
use blo_bellman::{AlphaContext, OmegaPoint, RegionId};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse())
        .collect::<Result<_, _>>()?;
    let get = |i: usize, d: f64| args.get(i).copied().unwrap_or(d);
    let ctx = AlphaContext::new(get(0, 0.25))?;
    let x = ctx.admit(OmegaPoint::new(get(1, -1.3), get(2, 2.5)))?;

    let b = eval_bellman(x, &ctx)?;
    println!("alpha = {}, tau = {:.6}, x = ({}, {})", ctx.alpha, ctx.tau, x.x1, x.x2);
    println!("region   {}", b.region);
    println!("B        {:.15}", b.value);
    println!("grad B   ({:.12}, {:.12})", b.grad1, b.grad2);
    if let RegionId::K(_) = b.region {
        let f = solve_s(x, &ctx)?;
        println!("segment  s = {:.12}, from ({:.6}, {:.6}) to ({:.6}, {:.6})", f.s, f.u, f.u * f.u, f.v, f.v * f.v + 1.0);
    }
    if let Some(&l) = args.get(3) {
        println!("A(x; {l}) {:.15}", eval_a(x, l, &ctx)?);
    }
    Ok(())
}
