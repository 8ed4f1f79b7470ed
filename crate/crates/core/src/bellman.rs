//! The Bellman candidate `B`, its foliation, boundary trace and majorants.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::{
    classify, classify_minus, shift, z_bracket, AlphaContext, OmegaPoint, RegionId,
};

const MAX_ITER: usize = 200;
const RESIDUAL_TARGET: f64 = 1e-13;
const RESIDUAL_LIMIT: f64 = 1e-11;

/// The extremal segment through a point of Ω₋.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Foliation {
    pub s: f64,
    /// `s / α^k`; ranges over `[√α, 1]` in odd and `[1, 1/√α]` in even regions.
    pub z: f64,
    pub k: u64,
    pub u: f64,
    pub v: f64,
    pub vplus: f64,
    pub region: RegionId,
}

/// `B(x)` together with its gradient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellmanValue {
    pub value: f64,
    pub grad1: f64,
    pub grad2: f64,
    pub region: RegionId,
    /// Set when `α^k` is below double precision and the value was flushed to 0.
    pub underflow: bool,
}

/// Residual of the line equation for the family with shift `μ`.
fn line_residual(z: f64, mu: f64, y: OmegaPoint) -> f64 {
    let z2 = z * z;
    2.0 * (z - mu) * y.x1 - 0.75 * z2 + 2.0 * mu * z + 0.5 - mu * mu + 0.25 / z2 - y.x2
}

fn line_residual_dz(z: f64, mu: f64, x1: f64) -> f64 {
    2.0 * x1 - 1.5 * z + 2.0 * mu - 0.5 / (z * z * z)
}

/// Lower endpoint of the extremal with parameter `z` in the family `μ`.
pub(crate) fn family_u(z: f64, mu: f64) -> f64 {
    0.5 * (z - 1.0 / z) - mu
}

/// Safeguarded Newton iteration on `[a, b]` with `g(a) ≥ 0 ≥ g(b)`.
fn newton_bisect(mut a: f64, mut b: f64, mu: f64, y: OmegaPoint) -> Result<f64> {
    let scale = 1.0 + y.x2.abs() + mu * mu;
    let g = |z: f64| line_residual(z, mu, y);
    let (ga, gb) = (g(a), g(b));
    if ga.abs() <= RESIDUAL_TARGET * scale {
        return Ok(a);
    }
    if gb.abs() <= RESIDUAL_TARGET * scale {
        return Ok(b);
    }
    if ga < 0.0 || gb > 0.0 {
        // Only reachable for points within tolerance of a bracket end.
        let z = if ga.abs() <= gb.abs() { a } else { b };
        return accept(z, g(z), scale, y);
    }
    let mut z = 0.5 * (a + b);
    let mut step_old = b - a;
    let mut step = step_old;
    for _ in 0..MAX_ITER {
        let gz = g(z);
        if gz.abs() <= RESIDUAL_TARGET * scale {
            return Ok(z);
        }
        if gz > 0.0 {
            a = z;
        } else {
            b = z;
        }
        if b - a <= 2.0 * f64::EPSILON * z.abs() {
            return accept(z, gz, scale, y);
        }
        let dg = line_residual_dz(z, mu, y.x1);
        let newton = if dg != 0.0 { z - gz / dg } else { f64::NAN };
        if newton > a && newton < b && (newton - z).abs() < 0.5 * step_old.abs() {
            step_old = step;
            step = newton - z;
            z = newton;
        } else {
            step_old = step;
            step = 0.5 * (b - a);
            z = a + step;
        }
    }
    let gz = g(z);
    accept(z, gz, scale, y)
}

fn accept(z: f64, gz: f64, scale: f64, y: OmegaPoint) -> Result<f64> {
    if gz.abs() <= RESIDUAL_LIMIT * scale {
        Ok(z)
    } else {
        Err(Error::Convergence(format!(
            "line equation residual {gz:.3e} at z = {z} for ({}, {})",
            y.x1, y.x2
        )))
    }
}

/// Solves for `z` in the folded regions Ω₁ (`odd`) or Ω₂.
fn solve_folded(y: OmegaPoint, odd: bool, ctx: &AlphaContext) -> Result<f64> {
    let mu = if odd { 1.0 } else { ctx.tau + 1.0 };
    let (zlo, zhi) = z_bracket(odd, ctx);
    let c = y.x1 + mu;
    // the segment must end on Γ₁ to the right of y …
    let z_end = if odd {
        (c + (c * c + 3.0).sqrt()) / 3.0
    } else if c > 1.0 {
        c + (c * c - 1.0).sqrt()
    } else {
        1.0
    };
    // … and start on Γ₀ to its left
    let z_start = c + (c * c + 1.0).sqrt();
    let lo = zlo.max(z_end);
    let hi = zhi.min(z_start);
    if lo >= hi {
        let z = if lo > zhi { zhi } else { lo.min(hi) };
        let scale = 1.0 + y.x2.abs() + mu * mu;
        return accept(z, line_residual(z, mu, y), scale, y);
    }
    newton_bisect(lo, hi, mu, y)
}

fn foliation_from_z(z: f64, region: RegionId, ctx: &AlphaContext) -> Foliation {
    let odd = region.is_odd();
    let folds = region.folds() as f64;
    let mu = if odd { 1.0 } else { ctx.tau + 1.0 };
    let shift_back = folds * ctx.tau;
    let u = family_u(z, mu);
    let xi = if odd { z } else { 1.0 / z };
    let v = u + xi;
    let vplus = v + 1.0 / xi - xi;
    let k = region.generation();
    Foliation {
        s: ctx.alpha_pow(k) * z,
        z,
        k,
        u: u - shift_back,
        v: v - shift_back,
        vplus: vplus - shift_back,
        region,
    }
}

/// Extremal segment through `x ∈ Ω₋`, including its boundary with Ω₀ and Ω₊.
pub fn solve_s(x: OmegaPoint, ctx: &AlphaContext) -> Result<Foliation> {
    let x = ctx.admit(x)?;
    let slack = ctx.tol * x.x2.abs().max(1.0);
    if x.x1 > slack || x.x2 < 1.0 - slack {
        return Err(domain(format!(
            "point ({}, {}) is not in the foliated part (needs x1 <= 0 and x2 >= 1)",
            x.x1, x.x2
        )));
    }
    let region = classify_minus(x, ctx)?;
    let y = shift(-(region.folds() as f64) * ctx.tau, x);
    let z = solve_folded(y, region.is_odd(), ctx)?;
    Ok(foliation_from_z(z, region, ctx))
}

/// `B(x)` and its gradient.
pub fn eval_bellman(x: OmegaPoint, ctx: &AlphaContext) -> Result<BellmanValue> {
    let x = ctx.admit(x)?;
    let region = classify(x, ctx)?;
    match region {
        RegionId::Plus => {
            let r = x.d().sqrt();
            Ok(BellmanValue {
                value: x.x1 + r,
                grad1: 1.0 - x.x1 / r,
                grad2: 0.5 / r,
                region,
                underflow: false,
            })
        }
        RegionId::Zero => {
            let r = x.x2.sqrt();
            Ok(BellmanValue {
                value: x.x1 + r,
                grad1: 1.0,
                grad2: 0.5 / r,
                region,
                underflow: false,
            })
        }
        RegionId::K(_) => {
            let y = shift(-(region.folds() as f64) * ctx.tau, x);
            let z = solve_folded(y, region.is_odd(), ctx)?;
            let f = foliation_from_z(z, region, ctx);
            let underflow = ctx.underflows(f.k);
            let value = if underflow || x.d() <= ctx.tol {
                0.0
            } else {
                let mu = if region.is_odd() { 1.0 } else { ctx.tau + 1.0 };
                0.5 * ctx.alpha_pow(f.k) * (1.0 + z * z) * (y.x1 - family_u(z, mu))
            };
            Ok(BellmanValue {
                value,
                grad1: -f.u * f.s,
                grad2: 0.5 * f.s,
                region,
                underflow,
            })
        }
    }
}

/// `A(x; L) = L + B(T_L x)`.
pub fn eval_a(x: OmegaPoint, l: f64, ctx: &AlphaContext) -> Result<f64> {
    let x = ctx.admit(x)?;
    Ok(l + eval_bellman(shift(l, x), ctx)?.value)
}

/// `f(y) = (2y³ + 2y²√(y²+3) + 9y + 6√(y²+3)) / 27`.
pub fn eval_f(y: f64) -> f64 {
    let r = (y * y + 3.0).sqrt();
    (2.0 * y * y * y + 2.0 * y * y * r + 9.0 * y + 6.0 * r) / 27.0
}

/// Root `s = (η + √(η²+3))/3` of the Ω₁ boundary relation, `η = v + 1`.
pub fn s_of_eta(eta: f64) -> f64 {
    (eta + (eta * eta + 3.0).sqrt()) / 3.0
}

/// Which arc of Γ₁ the abscissa `p < 0` lies on: `(k, curved)`.
fn boundary_branch(p: f64, ctx: &AlphaContext) -> (u64, bool) {
    let j = (-p / ctx.tau).floor();
    let j = if j.is_finite() && j >= 0.0 { j } else { 0.0 };
    if p >= ctx.p(j + 1.0) {
        (j as u64, true)
    } else {
        (j as u64 + 1, false)
    }
}

/// Boundary trace `b(p) = B(p, p² + 1)`.
pub fn eval_boundary(p: f64, ctx: &AlphaContext) -> f64 {
    if p.is_nan() {
        return f64::NAN;
    }
    if p >= 0.0 {
        return p + 1.0;
    }
    let (k, curved) = boundary_branch(p, ctx);
    let eta = p + k as f64 * ctx.tau + 1.0;
    let a = ctx.alpha_pow(k);
    if curved {
        a * eval_f(eta)
    } else {
        a * eta
    }
}

/// Derivative `b'(v)`.
pub fn eval_boundary_prime(v: f64, ctx: &AlphaContext) -> f64 {
    if v >= 0.0 {
        return 1.0;
    }
    let (k, curved) = boundary_branch(v, ctx);
    let a = ctx.alpha_pow(k);
    if curved {
        let s = s_of_eta(v + k as f64 * ctx.tau + 1.0);
        a * s * s
    } else {
        a
    }
}

/// Sharp decay function `F_α(t) = b(−t)`.
pub fn eval_decay(t: f64, ctx: &AlphaContext) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(domain(format!("decay function needs t >= 0, got {t}")));
    }
    Ok(eval_boundary(-t, ctx))
}

/// `Φ_n(t)`, the dyadic decay function in dimension `n`.
pub fn eval_phi(t: f64, n: u32) -> Result<f64> {
    eval_decay(t, &AlphaContext::dyadic(n)?)
}

/// Majorant `A_k(x; L)`: `A` cut off after Ω_k and continued analytically.
pub fn eval_majorant(x: OmegaPoint, l: f64, k: u64, ctx: &AlphaContext) -> Result<f64> {
    let x = ctx.admit(x)?;
    let y = shift(l, x);
    Ok(l + majorant_b(y, k, ctx)?)
}

fn majorant_b(y: OmegaPoint, k: u64, ctx: &AlphaContext) -> Result<f64> {
    if k == 0 {
        return Ok(if y.x1 >= 0.0 {
            y.x1 + y.d().sqrt()
        } else {
            y.x1 + y.x2.sqrt()
        });
    }
    let region = classify(y, ctx)?;
    let kept = match region {
        RegionId::K(m) => m <= k,
        _ => true,
    };
    if kept {
        return Ok(eval_bellman(y, ctx)?.value);
    }
    // continue the Ω_k line family below its parameter bracket
    let odd = k % 2 == 1;
    let mu = (k / 2) as f64 * ctx.tau + 1.0;
    let (zlo, _) = z_bracket(odd, ctx);
    let mut a = zlo;
    let mut found = false;
    for _ in 0..1100 {
        a *= 0.5;
        if line_residual(a, mu, y) >= 0.0 {
            found = true;
            break;
        }
    }
    if !found {
        return Err(Error::Convergence(format!(
            "no continuation parameter for ({}, {})",
            y.x1, y.x2
        )));
    }
    let z = if line_residual(zlo, mu, y) >= 0.0 {
        zlo
    } else {
        newton_bisect(a, zlo, mu, y)?
    };
    Ok(0.5 * ctx.alpha_pow(k / 2) * (1.0 + z * z) * (y.x1 - family_u(z, mu)))
}
