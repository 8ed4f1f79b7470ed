//! Region map of Ω and the extremal segments through a few points.
//!
//! ```text
//! cargo run --example foliation -- [alpha]
//! ```

use blo_bellman::bellman::solve_s;
use blo_bellman::geometry::{classify, envelope_point};
use blo_bellman::{AlphaContext, OmegaPoint, RegionId};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let alpha: f64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(0.25);
    let ctx = AlphaContext::new(alpha)?;
    println!("alpha = {alpha}, tau = {:.6}, p0 = {:.6}, p1 = {:.6}", ctx.tau, ctx.p0, ctx.p(1.0));

    // rows: d = x2 - x1² from 1 down to 0; columns: x1
    let (lo, hi) = (-3.0 * ctx.tau - 1.0, 1.0);
    for row in 0..=10 {
        let d = 1.0 - row as f64 / 10.0;
        let line: String = (0..72)
            .map(|c| {
                let x1 = lo + (hi - lo) * c as f64 / 71.0;
                match classify(OmegaPoint::from_d(x1, d), &ctx) {
                    Ok(RegionId::Plus) => '+',
                    Ok(RegionId::Zero) => '0',
                    Ok(RegionId::K(m)) => char::from_digit((m % 10) as u32, 10).unwrap(),
                    Err(_) => '?',
                }
            })
            .collect();
        println!("d={d:.1} {line}");
    }

    for x1 in [-0.5, -1.2, -2.0, -3.5] {
        let x = OmegaPoint::from_d(x1, 0.9);
        let f = solve_s(x, &ctx)?;
        let e = envelope_point(f.s, f.region, &ctx)?;
        println!(
            "x1 = {x1:5.2}: {} s = {:.6}, segment [{:.4}, {:.4}], envelope ({:.4}, {:.4})",
            f.region, f.s, f.u, f.v, e.x1, e.x2
        );
    }
    Ok(())
}
