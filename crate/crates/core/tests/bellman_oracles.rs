//! Independent numerical oracles for B and its boundary data.

use blo_bellman::bellman::{
    eval_a, eval_bellman, eval_boundary, eval_boundary_prime, eval_decay, eval_f, eval_majorant, solve_s,
};
use blo_bellman::geometry::{classify, shift, AlphaContext, OmegaPoint, RegionId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn quarter() -> AlphaContext {
    AlphaContext::new(0.25).unwrap()
}

fn b(x: OmegaPoint, ctx: &AlphaContext) -> f64 {
    eval_bellman(x, ctx).unwrap().value
}

/// Point of Ω₋ away from Γ₀ and Γ₁.
fn random_minus(rng: &mut ChaCha8Rng, ctx: &AlphaContext) -> OmegaPoint {
    loop {
        let x1 = rng.random_range(-6.0 * ctx.tau..0.0);
        let d = rng.random_range(0.01..0.99);
        let x = OmegaPoint::from_d(x1, d);
        if x.x2 > 1.0 {
            return x;
        }
    }
}

/// Region is constant on a box of half-width `r` around `x`.
fn interior(x: OmegaPoint, r: f64, ctx: &AlphaContext) -> bool {
    let here = classify(x, ctx).unwrap();
    if x.d() < 2.0 * r || x.d() > 1.0 - 2.0 * r {
        return false;
    }
    [(-r, -r), (-r, r), (r, -r), (r, r), (0.0, r), (0.0, -r), (r, 0.0), (-r, 0.0)]
        .iter()
        .all(|&(a, c)| classify(OmegaPoint::new(x.x1 + a, x.x2 + c), ctx).ok() == Some(here))
}

#[test]
fn linear_along_extremal_segments() {
    for alpha in [0.5, 0.25, 0.1] {
        let ctx = AlphaContext::new(alpha).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let x = random_minus(&mut rng, &ctx);
            let f = solve_s(x, &ctx).unwrap();
            let interp = (x.x1 - f.u) / (f.v - f.u) * eval_boundary(f.v, &ctx);
            let got = b(x, &ctx);
            assert!((got - interp).abs() <= 1e-9, "alpha {alpha} at {x:?}: {got} vs {interp}");
        }
    }
}

#[test]
fn gradients_match_central_differences() {
    let ctx = quarter();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let h = 1e-6;
    let mut checked = 0;
    while checked < 2000 {
        let x = OmegaPoint::from_d(rng.random_range(-6.0 * ctx.tau..2.0), rng.random_range(0.0..1.0));
        if !interior(x, 1e-4, &ctx) {
            continue;
        }
        let g = eval_bellman(x, &ctx).unwrap();
        let fd1 = (b(OmegaPoint::new(x.x1 + h, x.x2), &ctx) - b(OmegaPoint::new(x.x1 - h, x.x2), &ctx)) / (2.0 * h);
        let fd2 = (b(OmegaPoint::new(x.x1, x.x2 + h), &ctx) - b(OmegaPoint::new(x.x1, x.x2 - h), &ctx)) / (2.0 * h);
        let scale = g.grad1.abs().max(g.grad2.abs());
        assert!((g.grad1 - fd1).abs() <= 1e-5 * scale, "{x:?} {} {fd1}", g.grad1);
        assert!((g.grad2 - fd2).abs() <= 1e-5 * scale, "{x:?} {} {fd2}", g.grad2);
        checked += 1;
    }
}

/// Central differences of the closed-form gradient, Richardson-extrapolated.
fn hessian(x: OmegaPoint, h: f64, ctx: &AlphaContext) -> (f64, f64, f64) {
    let grad = |a: f64, c: f64| {
        let v = eval_bellman(OmegaPoint::new(x.x1 + a, x.x2 + c), ctx).unwrap();
        (v.grad1, v.grad2)
    };
    let central = |h: f64| {
        let (p1, m1) = (grad(h, 0.0), grad(-h, 0.0));
        let (p2, m2) = (grad(0.0, h), grad(0.0, -h));
        (
            (p1.0 - m1.0) / (2.0 * h),
            (p2.1 - m2.1) / (2.0 * h),
            0.5 * ((p2.0 - m2.0) + (p1.1 - m1.1)) / (2.0 * h),
        )
    };
    let (a, b) = (central(h), central(0.5 * h));
    let r = |c: f64, f: f64| (4.0 * f - c) / 3.0;
    (r(a.0, b.0), r(a.1, b.1), r(a.2, b.2))
}

#[test]
fn hessian_is_degenerate_and_negative() {
    let ctx = quarter();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut checked = 0;
    while checked < 2000 {
        let x = random_minus(&mut rng, &ctx);
        let h = 1e-4 * (1.0 + x.x1.abs());
        if !interior(x, 3.0 * h, &ctx) {
            continue;
        }
        let (b11, b22, b12) = hessian(x, h, &ctx);
        let det = b11 * b22 - b12 * b12;
        assert!(det.abs() <= 1e-4 * ((b11 * b22).abs() + 1e-8), "{x:?}: det {det}, {b11} {b22} {b12}");
        assert!(b11 <= 1e-6 && b22 <= 1e-6, "{x:?}: {b11} {b22}");
        checked += 1;
    }
}

#[test]
fn nondecreasing_in_x2() {
    let ctx = quarter();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..10_000 {
        let x1 = rng.random_range(-6.0 * ctx.tau..2.0);
        let d0 = rng.random_range(0.0..1.0);
        let d1 = rng.random_range(d0..=1.0);
        let lo = b(OmegaPoint::from_d(x1, d0), &ctx);
        let hi = b(OmegaPoint::from_d(x1, d1), &ctx);
        assert!(hi >= lo - 1e-12, "x1 {x1}: {lo} > {hi}");
    }
}

#[test]
fn quasi_periodic_under_shifts() {
    for alpha in [0.5, 0.25, 0.1] {
        let ctx = AlphaContext::new(alpha).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let mut checked = 0;
        while checked < 500 {
            let x = random_minus(&mut rng, &ctx);
            if !matches!(classify(x, &ctx).unwrap(), RegionId::K(1) | RegionId::K(2)) {
                continue;
            }
            let base = b(x, &ctx);
            for k in 1..=5u64 {
                let y = shift(k as f64 * ctx.tau, x);
                let want = ctx.alpha_pow(k) * base;
                let got = b(y, &ctx);
                assert!((got - want).abs() <= 1e-10 * want.abs() + 1e-300, "alpha {alpha}, k {k}, {x:?}");
            }
            checked += 1;
        }
    }
}

#[test]
fn boundary_trace_matches_explicit_formula() {
    for alpha in [0.5, 0.25, 0.1] {
        let ctx = AlphaContext::new(alpha).unwrap();
        let lo = -5.0 * ctx.tau;
        for i in 0..=400 {
            let p = lo + (2.0 - lo) * i as f64 / 400.0;
            let got = b(OmegaPoint::upper(p), &ctx);
            assert!((got - eval_boundary(p, &ctx)).abs() <= 1e-10, "alpha {alpha}, p {p}");
        }
    }
}

#[test]
fn boundary_example_through_solver() {
    let ctx = quarter();
    let got = b(OmegaPoint::upper(-0.3), &ctx);
    assert!((got - eval_f(0.7)).abs() < 1e-10);
}

#[test]
fn boundary_derivative_central_differences() {
    let ctx = quarter();
    let h = 1e-5;
    let lo = -5.0 * ctx.tau;
    for i in 0..=997 {
        let v = lo + (1.0 - lo) * i as f64 / 997.0;
        let fd = (eval_boundary(v + h, &ctx) - eval_boundary(v - h, &ctx)) / (2.0 * h);
        // b is C¹, so even straddling a knot the error is O(h)
        assert!((fd - eval_boundary_prime(v, &ctx)).abs() < 1e-4, "v {v}");
    }
}

#[test]
fn boundary_recursion() {
    for alpha in [0.5, 0.25, 0.1] {
        let ctx = AlphaContext::new(alpha).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..100 {
            let v = ctx.p(1.0) - rng.random_range(0.0..5.0 * ctx.tau);
            let lhs = eval_boundary(v, &ctx);
            let rhs = ctx.alpha * eval_boundary(v + ctx.tau, &ctx);
            assert!((lhs - rhs).abs() <= 1e-10, "alpha {alpha}, v {v}");
        }
    }
}

#[test]
fn parametric_identity_for_f() {
    let ctx = quarter();
    let sa = ctx.sqrt_alpha();
    for i in 0..100 {
        let s = sa + (1.0 - sa) * i as f64 / 99.0;
        let v = 0.5 * (3.0 * s - 1.0 / s) - 1.0;
        assert!((eval_f(v + 1.0) - 0.5 * s * (1.0 + s * s)).abs() < 1e-10, "s {s}");
    }
}

#[test]
fn decay_is_decreasing_and_convex() {
    for n in 1..=4 {
        let ctx = AlphaContext::dyadic(n).unwrap();
        let step = ctx.tau / 100.0;
        let vals: Vec<f64> = (0..=500).map(|i| eval_decay(i as f64 * step, &ctx).unwrap()).collect();
        for w in vals.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
        for w in vals.windows(3) {
            assert!(w[1] <= 0.5 * (w[0] + w[2]) + 1e-12);
        }
    }
}

/// Largest gradient difference across a curve, sampled at `t ∈ (0, 1)`.
fn gradient_jump(ctx: &AlphaContext, at: impl Fn(f64) -> OmegaPoint, normal: (f64, f64)) -> f64 {
    let eps = 1e-11;
    let norm = normal.0.hypot(normal.1);
    let (n1, n2) = (normal.0 / norm * eps, normal.1 / norm * eps);
    (1..100)
        .map(|i| {
            let x = at(i as f64 / 100.0);
            let a = eval_bellman(OmegaPoint::new(x.x1 + n1, x.x2 + n2), ctx).unwrap();
            let c = eval_bellman(OmegaPoint::new(x.x1 - n1, x.x2 - n2), ctx).unwrap();
            assert_ne!(a.region, c.region, "both sides in {}", a.region);
            (a.grad1 - c.grad1).abs().max((a.grad2 - c.grad2).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn gradient_continuous_across_region_boundaries() {
    for alpha in [0.5, 0.25, 0.1] {
        let ctx = AlphaContext::new(alpha).unwrap();
        // ℓ₁: the segment x2 = 1 between Ω₀ and Ω₁
        let jump = gradient_jump(&ctx, |t| OmegaPoint::new(-t, 1.0), (0.0, 1.0));
        assert!(jump < 1e-7, "alpha {alpha}, l1: {jump}");
        // Ω₁/Ω₂: the segment from (u, u²) to (p₁, p₁² + 1)
        let u = -0.5 * ctx.tau - 1.0;
        let p1 = ctx.p(1.0);
        let (lo, hi) = (OmegaPoint::lower(u), OmegaPoint::upper(p1));
        let slope = (hi.x2 - lo.x2) / (hi.x1 - lo.x1);
        let jump = gradient_jump(&ctx, |t| OmegaPoint::lerp(lo, hi, t), (slope, -1.0));
        assert!(jump < 1e-7, "alpha {alpha}, chord: {jump}");
        // Ω₂/Ω₃: the tangent segment ending at (−τ, τ² + 1)
        let tau = ctx.tau;
        let (lo, hi) = (OmegaPoint::lower(-tau - 1.0), OmegaPoint::upper(-tau));
        let jump = gradient_jump(&ctx, |t| OmegaPoint::lerp(lo, hi, t), (2.0 * tau, 1.0));
        assert!(jump < 1e-7, "alpha {alpha}, tangent: {jump}");
    }
}

#[test]
fn majorants_dominate_and_agree_on_kept_regions() {
    let ctx = quarter();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..10_000 {
        let x = OmegaPoint::from_d(rng.random_range(-8.0..4.0), rng.random_range(0.0..1.0));
        let l = rng.random_range(-3.0..3.0);
        let a = eval_a(x, l, &ctx).unwrap();
        assert!(a >= l - 1e-12);
        assert!(eval_majorant(x, l, 0, &ctx).unwrap() >= a - 1e-12, "{x:?}, L {l}");
        if x.x1 >= l {
            assert!((a - (x.x1 + x.d().sqrt())).abs() < 1e-12);
        }
        let region = classify(shift(l, x), &ctx).unwrap();
        let m = match region {
            RegionId::K(m) => m,
            _ => 0,
        };
        for k in m.max(1)..m.max(1) + 3 {
            assert!((eval_majorant(x, l, k, &ctx).unwrap() - a).abs() < 1e-12);
        }
    }
    for l in [-2.0, 0.0, 1.5] {
        let x = OmegaPoint::new(l, l * l + 1.0);
        assert!((eval_majorant(x, l, 0, &ctx).unwrap() - (l + 1.0)).abs() < 1e-12);
    }
}
