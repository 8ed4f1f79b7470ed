//! The strip Ω, parabolic shifts and the region decomposition of Ω.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{domain, Result};

const MAX_FOLDS: u64 = 1_000_000;

/// Fixed α together with the constants derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaContext {
    pub alpha: f64,
    pub tau: f64,
    pub p0: f64,
    pub tol: f64,
}

impl AlphaContext {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 0.5) {
            return Err(domain(format!("alpha must lie in (0, 1/2], got {alpha}")));
        }
        let r = alpha.sqrt();
        Ok(Self {
            alpha,
            tau: 1.0 / r - r,
            p0: 0.5 * r + 0.5 / r - 1.0,
            tol: 1e-12,
        })
    }

    /// α = 2^{-n}, the dyadic lattice in dimension n.
    pub fn dyadic(n: u32) -> Result<Self> {
        if n == 0 || n > 1000 {
            return Err(domain(format!("dimension n must lie in 1..=1000, got {n}")));
        }
        Self::new((-(n as f64)).exp2())
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn sqrt_alpha(&self) -> f64 {
        self.alpha.sqrt()
    }

    /// `p_k = p_0 − kτ`: the abscissa on Γ₁ where Ω_{2k+1} meets Ω_{2k+2}.
    pub fn p(&self, k: f64) -> f64 {
        self.p0 - k * self.tau
    }

    /// `α^k`, allowed to underflow to zero.
    pub fn alpha_pow(&self, k: u64) -> f64 {
        if k <= i32::MAX as u64 {
            self.alpha.powi(k as i32)
        } else {
            0.0
        }
    }

    /// Whether `α^k` underflows double precision.
    pub fn underflows(&self, k: u64) -> bool {
        (k as f64) * (1.0 / self.alpha).ln() > 700.0
    }

    fn slack(&self, scale: f64) -> f64 {
        self.tol * scale.abs().max(1.0)
    }

    /// Checks membership in Ω and clamps points within tolerance onto it.
    pub fn admit(&self, x: OmegaPoint) -> Result<OmegaPoint> {
        if !(x.x1.is_finite() && x.x2.is_finite()) {
            return Err(domain(format!("point ({}, {}) is not finite", x.x1, x.x2)));
        }
        let d = x.d();
        let slack = self.slack(x.x2);
        if d < -slack {
            return Err(domain(format!(
                "point ({}, {}) violates x2 >= x1^2 by {:.3e}",
                x.x1, x.x2, -d
            )));
        }
        if d > 1.0 + slack {
            return Err(domain(format!(
                "point ({}, {}) violates x2 <= x1^2 + 1 by {:.3e}",
                x.x1,
                x.x2,
                d - 1.0
            )));
        }
        if !(0.0..=1.0).contains(&d) {
            Ok(OmegaPoint::from_d(x.x1, d.clamp(0.0, 1.0)))
        } else {
            Ok(x)
        }
    }

    pub fn contains(&self, x: OmegaPoint) -> bool {
        self.admit(x).is_ok()
    }
}

pub fn make_context(alpha: f64) -> Result<AlphaContext> {
    AlphaContext::new(alpha)
}

/// A point of the plane, normally of Ω.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaPoint {
    pub x1: f64,
    pub x2: f64,
}

impl OmegaPoint {
    pub const fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    /// The point above `x1` at height `d` over Γ₀.
    pub fn from_d(x1: f64, d: f64) -> Self {
        Self { x1, x2: x1 * x1 + d }
    }

    /// Point `(p, p²)` of Γ₀.
    pub fn lower(p: f64) -> Self {
        Self::from_d(p, 0.0)
    }

    /// Point `(p, p² + 1)` of Γ₁.
    pub fn upper(p: f64) -> Self {
        Self::from_d(p, 1.0)
    }

    /// `x₂ − x₁²`, the height above Γ₀.
    pub fn d(&self) -> f64 {
        self.x2 - self.x1 * self.x1
    }

    pub fn lerp(a: Self, b: Self, t: f64) -> Self {
        Self::new(a.x1 + t * (b.x1 - a.x1), a.x2 + t * (b.x2 - a.x2))
    }
}

/// Parabolic shift `T_a(x) = (x₁ − a, x₂ − 2a x₁ + a²)`.
///
/// Computed through `d = x₂ − x₁²` so the height above Γ₀ is carried over
/// without cancellation.
pub fn shift(a: f64, x: OmegaPoint) -> OmegaPoint {
    OmegaPoint::from_d(x.x1 - a, x.d())
}

/// Region of the decomposition `Ω = Ω₊ ∪ Ω₀ ∪ Ω₁ ∪ Ω₂ ∪ …`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RegionId {
    Plus,
    Zero,
    K(u64),
}

impl RegionId {
    /// Generation `⌊m/2⌋` of `K(m)`; zero for Ω₊ and Ω₀.
    pub fn generation(&self) -> u64 {
        match self {
            RegionId::K(m) => m / 2,
            _ => 0,
        }
    }

    /// Number of τ-shifts taking `K(m)` back to Ω₁ or Ω₂.
    pub fn folds(&self) -> u64 {
        match self {
            RegionId::K(m) => (m - 1) / 2,
            _ => 0,
        }
    }

    pub fn is_odd(&self) -> bool {
        matches!(self, RegionId::K(m) if m % 2 == 1)
    }
}

impl fmt::Display for RegionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionId::Plus => write!(f, "Plus"),
            RegionId::Zero => write!(f, "Zero"),
            RegionId::K(m) => write!(f, "K({m})"),
        }
    }
}

/// Chord through `(p₁, p₁²+1)` and `(p₀, p₀²+1)`: the Ω₁/Ω₂ boundary line.
pub fn chord_line(x1: f64, ctx: &AlphaContext) -> f64 {
    let (p0, p1) = (ctx.p0, ctx.p(1.0));
    (p0 + p1) * x1 - p0 * p1 + 1.0
}

/// Tangent to Γ₁ at `−τ`: the Ω₂/Ω₃ boundary line.
pub fn tangent_line(x1: f64, ctx: &AlphaContext) -> f64 {
    -2.0 * ctx.tau * x1 - ctx.tau * ctx.tau + 1.0
}

pub(crate) fn in_omega1(y: OmegaPoint, ctx: &AlphaContext) -> bool {
    let s = ctx.slack(y.x2);
    y.x1 <= s && y.x2 >= 1.0 - s && y.x2 <= chord_line(y.x1, ctx) + s
}

pub(crate) fn in_omega2(y: OmegaPoint, ctx: &AlphaContext) -> bool {
    let s = ctx.slack(y.x2);
    // right of the tangent segment ending at (−τ, τ² + 1)
    let right_of_tangent = y.x1 >= -ctx.tau - s || y.x2 <= tangent_line(y.x1, ctx) + s;
    y.x1 <= s && y.x2 >= chord_line(y.x1, ctx) - s && right_of_tangent
}

/// Region containing `x`, smallest index on shared boundaries.
pub fn classify(x: OmegaPoint, ctx: &AlphaContext) -> Result<RegionId> {
    let x = ctx.admit(x)?;
    if x.x1 >= 0.0 {
        return Ok(RegionId::Plus);
    }
    if x.x2 <= 1.0 {
        return Ok(RegionId::Zero);
    }
    classify_minus(x, ctx)
}

/// Index `m` of the region `K(m)` whose closure contains `x`, for admitted
/// points with `x₁ ≤ 0` and `x₂ ≥ 1`.
pub(crate) fn classify_minus(x: OmegaPoint, ctx: &AlphaContext) -> Result<RegionId> {
    let d = x.d();
    // Folded abscissae of Ω₁ ∪ Ω₂ lie in [−τ−1, 0].
    let first = ((-x.x1 - ctx.tau - 1.0) / ctx.tau).ceil() - 1.0;
    let first = if first.is_finite() { first.max(0.0) } else { f64::INFINITY };
    if first > MAX_FOLDS as f64 {
        return Err(domain(format!(
            "point ({}, {}) needs more than {MAX_FOLDS} folds",
            x.x1, x.x2
        )));
    }
    let mut k = first as u64;
    while k <= MAX_FOLDS {
        let y = OmegaPoint::from_d(x.x1 + k as f64 * ctx.tau, d);
        if y.x1 > ctx.slack(y.x2) {
            break;
        }
        if in_omega1(y, ctx) {
            return Ok(RegionId::K(2 * k + 1));
        }
        if in_omega2(y, ctx) {
            return Ok(RegionId::K(2 * k + 2));
        }
        k += 1;
    }
    Err(domain(format!(
        "no region found for ({}, {}); point is not in the strip",
        x.x1, x.x2
    )))
}

/// Parameter bracket of `s` in region `K(m)`.
pub fn s_bracket(region: RegionId, ctx: &AlphaContext) -> Result<(f64, f64)> {
    match region {
        RegionId::K(m) => {
            let k = m / 2;
            let scale = ctx.alpha_pow(k);
            let (lo, hi) = z_bracket(m % 2 == 1, ctx);
            Ok((lo * scale, hi * scale))
        }
        other => Err(domain(format!("region {other} carries no foliation"))),
    }
}

/// Bracket of the unfolded parameter `z = s/α^{⌊m/2⌋}`.
pub(crate) fn z_bracket(odd: bool, ctx: &AlphaContext) -> (f64, f64) {
    let r = ctx.sqrt_alpha();
    if odd {
        (r, 1.0)
    } else {
        (1.0, 1.0 / r)
    }
}

/// Envelope point of the line family `x₂ = 2(z−μ)x₁ − ¾z² + 2μz + ½ − μ² + 1/(4z²)`.
pub(crate) fn envelope_unfolded(z: f64, mu: f64) -> OmegaPoint {
    let z2 = z * z;
    let z3 = z2 * z;
    let x1 = 0.75 * z - mu + 0.25 / z3;
    let x2 = 0.75 * z2 - 1.5 * mu * z + 0.75 / z2 - 0.5 * mu / z3 + mu * mu + 0.5;
    OmegaPoint::new(x1, x2)
}

/// Tangency point of the extremal line `ℓ_s` with the envelope of its family.
///
/// The Ω₁ family's envelope starts at `(0, 1)` with zero slope. For higher
/// regions the envelope leaves the strip through Γ₁.
pub fn envelope_point(s: f64, region: RegionId, ctx: &AlphaContext) -> Result<OmegaPoint> {
    let (lo, hi) = s_bracket(region, ctx)?;
    let eps = 1e-12 * hi;
    if !(s >= lo - eps && s <= hi + eps) {
        return Err(domain(format!(
            "s = {s} lies outside [{lo}, {hi}] for region {region}"
        )));
    }
    let m = match region {
        RegionId::K(m) => m,
        _ => unreachable!(),
    };
    let k = m / 2;
    let z = s / ctx.alpha_pow(k);
    let folds = region.folds();
    let mu = if m % 2 == 1 { 1.0 } else { ctx.tau + 1.0 };
    let folded = envelope_unfolded(z, mu);
    Ok(shift(-(folds as f64) * ctx.tau, folded))
}
