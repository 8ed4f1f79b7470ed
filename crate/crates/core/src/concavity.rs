//! Numerical checks of α-concavity: chords under the definition directly, and
//! the directional and three-point conditions on the upper boundary.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bellman::{eval_bellman, eval_boundary, family_u, solve_s};
use crate::error::{domain, Result};
use crate::geometry::{z_bracket, AlphaContext, OmegaPoint};

/// Margin below which a sample counts as a violation.
pub const MARGIN_TOL: f64 = -1e-9;

/// One chord `x = (1−β)x⁻ + βx⁺` and the concavity margin at it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChordSample {
    pub xminus: OmegaPoint,
    pub xplus: OmegaPoint,
    pub beta: f64,
    pub margin: f64,
}

/// A pair of abscissae on Γ₁ and the margin of a boundary condition there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairSample {
    pub p: f64,
    pub q: f64,
    pub margin: f64,
}

/// Extremes of one check family over a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySummary<S> {
    pub samples: usize,
    pub min_margin: f64,
    pub argmin: S,
    /// Smallest `|margin|`, evidence that equality cases are being hit.
    pub min_abs_margin: f64,
    pub argmin_abs: S,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub alpha: f64,
    pub seed: u64,
    pub samples: usize,
    /// Minimum over all three families.
    pub min_margin: f64,
    pub chord: FamilySummary<ChordSample>,
    pub directional: FamilySummary<PairSample>,
    pub three_point: FamilySummary<PairSample>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.min_margin >= MARGIN_TOL
    }

    /// Flat `key=value` lines.
    pub fn to_record(&self) -> String {
        let f = crate::output::fmt_num;
        let mut lines = vec![
            format!("alpha={}", f(self.alpha)),
            format!("seed={}", self.seed),
            format!("samples={}", self.samples),
            format!("min_margin={}", f(self.min_margin)),
        ];
        let c = &self.chord;
        lines.push(format!("chord.samples={}", c.samples));
        lines.push(format!("chord.min_margin={}", f(c.min_margin)));
        lines.push(format!("chord.min_abs_margin={}", f(c.min_abs_margin)));
        lines.push(format!(
            "chord.argmin={} {} {} {} {}",
            f(c.argmin.xminus.x1),
            f(c.argmin.xminus.x2),
            f(c.argmin.xplus.x1),
            f(c.argmin.xplus.x2),
            f(c.argmin.beta)
        ));
        for (name, s) in [("directional", &self.directional), ("three_point", &self.three_point)] {
            lines.push(format!("{name}.samples={}", s.samples));
            lines.push(format!("{name}.min_margin={}", f(s.min_margin)));
            lines.push(format!("{name}.min_abs_margin={}", f(s.min_abs_margin)));
            lines.push(format!("{name}.argmin={} {}", f(s.argmin.p), f(s.argmin.q)));
        }
        lines.join("\n") + "\n"
    }
}

fn midpoint(xm: OmegaPoint, xp: OmegaPoint, beta: f64) -> OmegaPoint {
    OmegaPoint::new(
        (1.0 - beta) * xm.x1 + beta * xp.x1,
        (1.0 - beta) * xm.x2 + beta * xp.x2,
    )
}

/// `B(mid) − (1−β)B(x⁻) − βB(x⁺)` for `mid = (1−β)x⁻ + βx⁺`.
pub fn chord_margin(
    xminus: OmegaPoint,
    xplus: OmegaPoint,
    beta: f64,
    ctx: &AlphaContext,
) -> Result<f64> {
    let eps = 1e-12;
    if !(beta >= ctx.alpha - eps && beta <= 0.5 + eps) {
        return Err(domain(format!("beta = {beta} outside [{}, 1/2]", ctx.alpha)));
    }
    let mid = midpoint(xminus, xplus, beta);
    let b_mid = eval_bellman(mid, ctx)?.value;
    let b_minus = eval_bellman(xminus, ctx)?.value;
    let b_plus = eval_bellman(xplus, ctx)?.value;
    Ok(b_mid - (1.0 - beta) * b_minus - beta * b_plus)
}

/// Directional condition between `P = (p, p²+1)` and `Q = (q, q²+1)`.
///
/// Returns `((D_PQ B)(P) − (D_PQ B)(Q)) / |q − p|`, which is symmetric in
/// `p, q` and equals `b'(p) − b'(q) + ½(q−p)(s_p+s_q)` for `p ≤ q ≤ 0`.
pub fn check_c2(p: f64, q: f64, ctx: &AlphaContext) -> Result<f64> {
    if !((q - p).abs() <= ctx.tau * (1.0 + 1e-12)) {
        return Err(domain(format!("|p - q| = {} exceeds tau", (q - p).abs())));
    }
    if p == q {
        return Ok(0.0);
    }
    let gp = eval_bellman(OmegaPoint::upper(p), ctx)?;
    let gq = eval_bellman(OmegaPoint::upper(q), ctx)?;
    let bracket = (gp.grad1 - gq.grad1) + (p + q) * (gp.grad2 - gq.grad2);
    Ok((q - p).signum() * bracket)
}

/// Three-point function `H(p,q) = b(p) − (1−α)B(R) − αb(q)` where
/// `R = ((p−αq)/(1−α), (p²−αq²)/(1−α) + 1)`.
pub fn chord_h(p: f64, q: f64, ctx: &AlphaContext) -> Result<f64> {
    if !((q - p).abs() <= ctx.tau * (1.0 + 1e-12)) {
        return Err(domain(format!("|q - p| = {} exceeds tau", (q - p).abs())));
    }
    let a = ctx.alpha;
    let r1 = (p - a * q) / (1.0 - a);
    let t = (p - q) / ctx.tau;
    let r = OmegaPoint::from_d(r1, (1.0 - t * t).clamp(0.0, 1.0));
    let b_r = eval_bellman(r, ctx)?.value;
    Ok(eval_boundary(p, ctx) - (1.0 - a) * b_r - a * eval_boundary(q, ctx))
}

/// Which extremal family parametrizes the W-surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WFamily {
    /// Endpoints `V ∈ Ω₁`, `ξ = s`.
    Odd,
    /// Endpoints `V ∈ Ω₂`, `ξ = 1/z`.
    Even,
}

/// `H` along the surface `δ = τ√((1−θ)(1−ξ²θ))` hanging off the extremal with
/// boundary parameter `ξ ∈ [√α, 1]`.
pub fn w_surface(xi: f64, theta: f64, family: WFamily, ctx: &AlphaContext) -> Result<f64> {
    let v = match family {
        WFamily::Odd => 0.5 * (3.0 * xi - 1.0 / xi) - 1.0,
        WFamily::Even => 0.5 * (xi + 1.0 / xi) - ctx.tau - 1.0,
    };
    let a = ctx.alpha;
    let delta = ctx.tau * ((1.0 - theta) * (1.0 - xi * xi * theta)).max(0.0).sqrt();
    let p = v - (1.0 - theta) * xi + a * delta / (1.0 - a);
    chord_h(p, (p + delta).min(p + ctx.tau), ctx)
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn sample_rng(seed: u64, family: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix(splitmix(seed ^ family.rotate_left(56)) ^ index))
}

fn sample_omega(rng: &mut ChaCha8Rng, half_width: f64) -> OmegaPoint {
    OmegaPoint::from_d(rng.random_range(-half_width..=half_width), rng.random::<f64>())
}

/// Random extremal segment `(u, v, v⁺, s²)` in the first few regions.
fn random_extremal(rng: &mut ChaCha8Rng, ctx: &AlphaContext) -> (f64, f64, f64, f64) {
    let folds = rng.random_range(0..3u64);
    let odd = rng.random::<bool>();
    let (lo, hi) = z_bracket(odd, ctx);
    let z = rng.random_range(lo..=hi);
    let mu = if odd { 1.0 } else { ctx.tau + 1.0 };
    let u = family_u(z, mu);
    let xi = if odd { z } else { 1.0 / z };
    let back = folds as f64 * ctx.tau;
    (u - back, u + xi - back, u + 1.0 / xi - back, xi * xi)
}

fn chord_probe(rng: &mut ChaCha8Rng, ctx: &AlphaContext, window: f64) -> ChordSample {
    let alpha = ctx.alpha;
    if rng.random_range(0..8) == 0 {
        let (u, v, vplus, xi2) = random_extremal(rng, ctx);
        let r = OmegaPoint::lower(u);
        let beta = if rng.random::<bool>() && xi2 >= alpha && xi2 <= 1.0 - alpha {
            // trajectory case: (v, v²+1) = (1−ξ²)(u, u²) + ξ²(v⁺, v⁺²+1)
            let q = OmegaPoint::upper(vplus);
            let (xm, xp, b) = if xi2 <= 0.5 { (r, q, xi2) } else { (q, r, 1.0 - xi2) };
            let margin = chord_margin(xm, xp, b, ctx).unwrap_or(f64::NAN);
            return ChordSample { xminus: xm, xplus: xp, beta: b, margin };
        } else {
            rng.random_range(alpha..=0.5)
        };
        // sub-chord of the segment from (u, u²) to (v, v²+1)
        let p = OmegaPoint::upper(v);
        let t0 = rng.random::<f64>();
        let t1 = rng.random::<f64>();
        let xm = OmegaPoint::lerp(r, p, t0);
        let xp = OmegaPoint::lerp(r, p, t1);
        let xm = OmegaPoint::from_d(xm.x1, xm.d().clamp(0.0, 1.0));
        let xp = OmegaPoint::from_d(xp.x1, xp.d().clamp(0.0, 1.0));
        let margin = chord_margin(xm, xp, beta, ctx).unwrap_or(f64::NAN);
        return ChordSample { xminus: xm, xplus: xp, beta, margin };
    }
    loop {
        let xm = sample_omega(rng, window);
        let xp = sample_omega(rng, window);
        let beta = rng.random_range(alpha..=0.5);
        let mid = midpoint(xm, xp, beta);
        if !ctx.contains(mid) {
            continue;
        }
        let margin = chord_margin(xm, xp, beta, ctx).unwrap_or(f64::NAN);
        return ChordSample { xminus: xm, xplus: xp, beta, margin };
    }
}

fn pair_probe(
    rng: &mut ChaCha8Rng,
    ctx: &AlphaContext,
    window: f64,
    check: fn(f64, f64, &AlphaContext) -> Result<f64>,
) -> PairSample {
    let tau = ctx.tau;
    let (p, q) = match rng.random_range(0..16) {
        // near-coincident pair
        0 => {
            let p = rng.random_range(-window..=window);
            (p, p + rng.random_range(-1e-7..=1e-7))
        }
        // full-length pair hanging off the lower boundary
        1 => {
            let p = ctx.p(1.0) - rng.random::<f64>() * 4.0 * tau;
            (p, p + tau)
        }
        _ => {
            let p = rng.random_range(-window..=window);
            (p, p + rng.random_range(-tau..=tau))
        }
    };
    let margin = check(p, q, ctx).unwrap_or(f64::NAN);
    PairSample { p, q, margin }
}

fn summarize<S: Copy>(samples: &[S], margin: impl Fn(&S) -> f64) -> FamilySummary<S> {
    let mut min_i = 0;
    let mut abs_i = 0;
    for (i, s) in samples.iter().enumerate() {
        let m = margin(s);
        // NaN margins are failures: they must surface as the minimum
        let cur = margin(&samples[min_i]);
        if m.is_nan() && !cur.is_nan() || m < cur {
            min_i = i;
        }
        if m.abs() < margin(&samples[abs_i]).abs() {
            abs_i = i;
        }
    }
    let min_margin = margin(&samples[min_i]);
    FamilySummary {
        samples: samples.len(),
        min_margin: if min_margin.is_nan() { f64::NEG_INFINITY } else { min_margin },
        argmin: samples[min_i],
        min_abs_margin: margin(&samples[abs_i]).abs(),
        argmin_abs: samples[abs_i],
    }
}

/// Seeded random sweep over the three check families, `n_samples` each.
///
/// Every sample draws from its own generator derived from `(seed, family,
/// index)`, so the report does not depend on thread scheduling.
pub fn sweep(ctx: &AlphaContext, n_samples: usize, seed: u64) -> Result<SweepReport> {
    if n_samples == 0 {
        return Err(domain("sweep needs at least one sample"));
    }
    let window = 6.0 * ctx.tau;
    let chords: Vec<ChordSample> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| chord_probe(&mut sample_rng(seed, 1, i), ctx, window))
        .collect();
    let directional: Vec<PairSample> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| pair_probe(&mut sample_rng(seed, 2, i), ctx, window, check_c2))
        .collect();
    let three_point: Vec<PairSample> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| pair_probe(&mut sample_rng(seed, 3, i), ctx, window, chord_h))
        .collect();
    let chord = summarize(&chords, |s| s.margin);
    let directional = summarize(&directional, |s| s.margin);
    let three_point = summarize(&three_point, |s| s.margin);
    let min_margin = chord
        .min_margin
        .min(directional.min_margin)
        .min(three_point.min_margin);
    Ok(SweepReport {
        alpha: ctx.alpha,
        seed,
        samples: n_samples,
        min_margin,
        chord,
        directional,
        three_point,
    })
}

/// Endpoints of the extended extremal through `x`: `(R, Q, s²)` with
/// `R = (u, u²)`, `Q = (v⁺, v⁺² + 1)` and `(v, v²+1) = (1−s²)R + s²Q`.
pub fn extended_extremal(x: OmegaPoint, ctx: &AlphaContext) -> Result<(OmegaPoint, OmegaPoint, f64)> {
    let f = solve_s(x, ctx)?;
    let xi = f.v - f.u;
    Ok((OmegaPoint::lower(f.u), OmegaPoint::upper(f.vplus), xi * xi))
}
