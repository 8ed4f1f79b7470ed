//! The norm-optimizing sequence ψ_j and its tensor extension.
//!
//! ψ_j lives on `I₀ = (0, 1]` and is defined by the recursion
//!
//! ```text
//! ψ(t) = −γ                 on (0, 2^{-j}]
//! ψ(t) = ψ(2^k t − 1)       on (2^{-k}, 2^{-k+1}],  1 < k ≤ j
//! ψ(t) = ψ(2t − 1) + δ      on (½, 1]
//! ```
//!
//! so every dyadic interval in the expansion is either a rescaled copy of ψ
//! plus an accumulated offset, a spine interval `(0, 2^{-i}]` of such a copy,
//! or a `−γ` cell. A copy whose remaining depth budget is below `j` cannot
//! reach any `−γ` cell and is left unresolved.
//!
//! Statistics are exact up to rounding: the unresolved copies are copies of ψ
//! itself, so each statistic satisfies a linear self-consistency relation that
//! is solved in interval arithmetic.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::interval::Interval;
use crate::output::{Cell as TableCell, Table};
use crate::trees::{AlphaTree, NodeSpec};

pub const DEFAULT_DEPTH: u32 = 24;
pub const DEFAULT_NODE_BUDGET: u64 = 1 << 20;
const MAX_DEPTH: u32 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiParams {
    pub j: u32,
    pub gamma: f64,
    pub delta: f64,
}

/// `γ_j = 1/√(1 + 2^{1−j})`, `δ_j = 2^{1−j} γ_j`.
pub fn psi_params(j: u32) -> Result<PsiParams> {
    if !(1..=MAX_DEPTH).contains(&j) {
        return Err(domain(format!("j must lie in 1..={MAX_DEPTH}, got {j}")));
    }
    let e = (1.0 - j as f64).exp2();
    let gamma = 1.0 / (1.0 + e).sqrt();
    Ok(PsiParams {
        j,
        gamma,
        delta: e * gamma,
    })
}

/// Aggregates of one copy of ψ per unit measure, relative to its own offset.
#[derive(Debug, Clone, Copy, PartialEq)]
struct CopyAgg {
    /// Unresolved fraction.
    u: Interval,
    /// `∫ψ` and `∫ψ²` over resolved cells.
    r1: Interval,
    r2: Interval,
    /// `Σ w·o` and `Σ w·o²` over unresolved sub-copies with offset `o`.
    s1: Interval,
    s2: Interval,
    /// Resolved part of `⟨N_loc⟩`, the local maximal function, with the
    /// coefficient of the unknown `⟨N_loc⟩_{I₀}` being `u`.
    n: Interval,
    /// Unresolved fraction, exact for dyadic depths within f64 precision.
    mass: f64,
    /// Number of cells in the expansion, saturating.
    cells: u64,
}

impl CopyAgg {
    fn unresolved() -> Self {
        let z = Interval::point(0.0);
        Self {
            u: Interval::point(1.0),
            r1: z,
            r2: z,
            s1: z,
            s2: z,
            n: z,
            mass: 1.0,
            cells: 1,
        }
    }
}

/// ψ_j expanded to depth `D` as a DAG of copies indexed by remaining depth.
#[derive(Debug, Clone)]
pub struct PsiFunction {
    pub params: PsiParams,
    pub depth: u32,
    /// Exact (dyadic) measure of unresolved cells.
    pub unresolved_mass: f64,
    /// Largest expansion `cells` and `to_tree` will materialize.
    pub node_budget: u64,
    gamma: Interval,
    delta: Interval,
    aggs: Vec<CopyAgg>,
}

/// One cell of the expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiCell {
    /// Left endpoint; the cell is `(left, left + 2^{-depth}]`.
    pub left: f64,
    pub depth: u32,
    /// Number of `δ` offsets accumulated on the way down.
    pub m: u32,
    /// `−γ + mδ` on resolved cells.
    pub value: Option<f64>,
    /// Mean of ψ over the cell, `mδ` on unresolved cells.
    pub mean: f64,
}

impl PsiCell {
    pub fn resolved(&self) -> bool {
        self.value.is_some()
    }
}

/// Rigorous enclosures of the statistics of ψ_j on `I₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiStats {
    pub mean: Interval,
    pub mean_sq: Interval,
    pub bmo: Interval,
    pub blo: Interval,
    /// `⟨N ψ⟩_{I₀}` with ψ extended by zero outside `I₀`.
    pub mean_n: Interval,
    /// `inf_{I₀} N ψ`.
    pub inf_n: Interval,
    pub unresolved_mass: f64,
}

impl PsiStats {
    /// `⟨N ψ⟩ − inf N ψ`, the BLO difference of the maximal function on `I₀`.
    pub fn blo_difference(&self) -> Interval {
        self.mean_n - self.inf_n
    }

    /// Whether the exact values `0, 1, 1, γ_j` are enclosed.
    pub fn targets_enclosed(&self, gamma: f64) -> bool {
        self.mean.contains(0.0)
            && self.mean_sq.contains(1.0)
            && self.bmo.contains(1.0)
            && self.mean_n.contains(gamma)
            && self.inf_n.contains(0.0)
            && self.blo_difference().contains(gamma)
    }
}

pub fn build_psi(j: u32, depth: u32) -> Result<PsiFunction> {
    build_psi_with_budget(j, depth, DEFAULT_NODE_BUDGET)
}

/// ψ_j to depth `depth`. Statistics never expand the tree; `cells` and
/// `to_tree` fail once the expansion has more than `budget` cells.
pub fn build_psi_with_budget(j: u32, depth: u32, budget: u64) -> Result<PsiFunction> {
    let params = psi_params(j)?;
    if depth < j || depth > MAX_DEPTH {
        return Err(domain(format!(
            "depth must lie in j..={MAX_DEPTH} (j = {j}), got {depth}"
        )));
    }
    let e = (1.0 - j as f64).exp2();
    let gamma = Interval::point(1.0) / (Interval::point(1.0) + Interval::point(e)).sqrt();
    let delta = gamma.scale(e);
    let mut psi = PsiFunction {
        params,
        depth,
        unresolved_mass: 0.0,
        node_budget: budget,
        gamma,
        delta,
        aggs: Vec::with_capacity(depth as usize + 1),
    };
    psi.build_moments();
    psi.build_maximal();
    psi.unresolved_mass = psi.aggs[depth as usize].mass;
    Ok(psi)
}

fn weight(i: u32) -> Interval {
    Interval::point((-(i as f64)).exp2())
}

impl PsiFunction {
    fn offset(&self, i: u32) -> Interval {
        if i == 1 {
            self.delta
        } else {
            Interval::point(0.0)
        }
    }

    fn build_moments(&mut self) {
        let j = self.params.j;
        let one = Interval::point(1.0);
        let two = Interval::point(2.0);
        for r in 0..=self.depth {
            if r < j {
                self.aggs.push(CopyAgg::unresolved());
                continue;
            }
            let mut a = CopyAgg {
                cells: 1,
                ..CopyAgg::unresolved()
            };
            a.u = Interval::point(0.0);
            a.mass = 0.0;
            for i in 1..=j {
                let c = self.aggs[(r - i) as usize];
                let (w, o) = (weight(i), self.offset(i));
                let res = one - c.u;
                a.r1 = a.r1 + w * (c.r1 + o * res);
                a.r2 = a.r2 + w * (c.r2 + two * o * c.r1 + o.sqr() * res);
                a.s1 = a.s1 + w * (c.s1 + o * c.u);
                a.s2 = a.s2 + w * (c.s2 + two * o * c.s1 + o.sqr() * c.u);
                a.u = a.u + w * c.u;
                a.mass += w.lo * c.mass;
                a.cells = a.cells.saturating_add(c.cells);
            }
            let wl = weight(j);
            a.r1 = a.r1 - wl * self.gamma;
            a.r2 = a.r2 + wl * self.gamma.sqr();
            self.aggs.push(a);
        }
    }

    fn top(&self) -> CopyAgg {
        self.aggs[self.depth as usize]
    }

    /// `⟨ψ⟩_{I₀}` from `M₁ = R₁ + S₁ + U·M₁`.
    pub fn mean(&self) -> Interval {
        let t = self.top();
        (t.r1 + t.s1) / (Interval::point(1.0) - t.u)
    }

    /// `⟨ψ²⟩_{I₀}` from `M₂ = R₂ + S₂ + 2S₁M₁ + U·M₂`.
    pub fn mean_sq(&self) -> Interval {
        let t = self.top();
        let m1 = self.mean();
        (t.r2 + t.s2 + Interval::point(2.0) * t.s1 * m1) / (Interval::point(1.0) - t.u)
    }

    /// Mean of the spine interval `(0, 2^{-i}]` of a copy, `1 ≤ i < j`.
    fn spine_mean(&self, i: u32, m1: Interval) -> Interval {
        let f = Interval::point((i as f64 - self.params.j as f64).exp2());
        (Interval::point(1.0) - f) * m1 - f * self.gamma
    }

    fn spine_mean_sq(&self, i: u32, m2: Interval) -> Interval {
        let f = Interval::point((i as f64 - self.params.j as f64).exp2());
        (Interval::point(1.0) - f) * m2 + f * self.gamma.sqr()
    }

    /// Running maxima of the means along the spine of a copy: `λ_0 = M₁`,
    /// `λ_i = max(λ_{i−1}, mean of (0, 2^{-i}])`.
    fn spine_maxima(&self, m1: Interval) -> Vec<Interval> {
        let mut lam = vec![m1];
        for i in 1..self.params.j {
            let next = lam[i as usize - 1].max(self.spine_mean(i, m1));
            lam.push(next);
        }
        lam
    }

    fn build_maximal(&mut self) {
        let j = self.params.j;
        let m1 = self.mean();
        let lam = self.spine_maxima(m1);
        let leaf_n = lam[j as usize - 1].max(-self.gamma);
        for r in j..=self.depth {
            let mut n = weight(j) * leaf_n;
            for i in 1..=j {
                let c = self.aggs[(r - i) as usize];
                let o = self.offset(i);
                // the sub-copy's own mean o + M₁ bounds its local maximal
                // function from below, so the ancestors add at most this much
                let corr = (lam[i as usize - 1].hi - o.lo - m1.lo).max(0.0);
                let slack = Interval::new(0.0, corr.next_up());
                n = n + weight(i) * (o + c.n + slack);
            }
            self.aggs[r as usize].n = n;
        }
    }

    /// `⟨N_loc⟩_{I₀}`: maximal function over dyadic subintervals of `I₀`.
    fn local_maximal_mean(&self) -> Interval {
        let t = self.top();
        t.n / (Interval::point(1.0) - t.u)
    }

    pub fn stats(&self) -> PsiStats {
        let j = self.params.j;
        let m1 = self.mean();
        let m2 = self.mean_sq();
        let mut var = m2 - m1.sqr();
        let mut blo = m1 + self.gamma;
        for i in 1..j {
            let m = self.spine_mean(i, m1);
            var = var.max(self.spine_mean_sq(i, m2) - m.sqr());
            blo = blo.max(m + self.gamma);
        }
        // averages over (0, 2^k], k ≥ 1, are M₁ 2^{-k}
        let outside = (m1.scale(0.5)).max0();
        let x = self.local_maximal_mean();
        let mean_n = Interval::new(x.lo, (x.hi + (outside.hi - m1.lo).max(0.0)).next_up());
        let lam = self.spine_maxima(m1);
        let lowest = outside.max(lam[j as usize - 1]).max(-self.gamma);
        let inf_n = Interval::new(outside.max(m1).lo.min(lowest.hi), lowest.hi);
        PsiStats {
            mean: m1,
            mean_sq: m2,
            bmo: var.max0().sqrt(),
            blo,
            mean_n,
            inf_n,
            unresolved_mass: self.unresolved_mass,
        }
    }

    /// Number of cells in the expansion.
    pub fn cell_count(&self) -> u64 {
        self.top().cells
    }

    fn check_budget(&self) -> Result<()> {
        let cells = self.cell_count();
        if cells > self.node_budget {
            return Err(Error::Resource(format!(
                "expansion of psi_{} to depth {} has {cells} cells, budget is {}",
                self.params.j, self.depth, self.node_budget
            )));
        }
        Ok(())
    }

    /// All cells in left-to-right order.
    pub fn cells(&self) -> Result<Vec<PsiCell>> {
        self.check_budget()?;
        let mut out = Vec::with_capacity(self.cell_count() as usize);
        self.walk_copy(0.0, 0, 0, &mut out);
        Ok(out)
    }

    fn cell(&self, left: f64, depth: u32, m: u32, resolved: bool) -> PsiCell {
        let mean = m as f64 * self.params.delta;
        PsiCell {
            left,
            depth,
            m,
            value: resolved.then_some(mean - self.params.gamma),
            mean,
        }
    }

    fn walk_copy(&self, left: f64, depth: u32, m: u32, out: &mut Vec<PsiCell>) {
        let j = self.params.j;
        let r = self.depth - depth;
        if r < j {
            out.push(self.cell(left, depth, m, false));
            return;
        }
        // left to right: the −γ cell, then copies at spine levels j, …, 1
        out.push(self.cell(left, depth + j, m, true));
        for i in (1..=j).rev() {
            let w = (-((depth + i) as f64)).exp2();
            let dm = u32::from(i == 1);
            self.walk_copy(left + w, depth + i, m + dm, out);
        }
    }

    /// The expansion as a binary ½-tree, unresolved cells carrying their mean.
    pub fn to_tree(&self) -> Result<AlphaTree> {
        fn copy(psi: &PsiFunction, depth: u32, m: u32) -> NodeSpec {
            let j = psi.params.j;
            let w = (-(depth as f64)).exp2();
            let c = psi.cell(0.0, depth, m, depth + j <= psi.depth);
            if depth + j > psi.depth {
                return NodeSpec::leaf(w, c.mean);
            }
            // build the spine bottom-up
            let bottom = psi.cell(0.0, depth + j, m, true);
            let mut node = NodeSpec::leaf(w * (-(j as f64)).exp2(), bottom.value.unwrap());
            for i in (1..=j).rev() {
                let right = copy(psi, depth + i, m + u32::from(i == 1));
                node = NodeSpec::internal(w * (1.0 - i as f64).exp2(), vec![node, right]);
            }
            node
        }
        self.check_budget()?;
        AlphaTree::new(0.5, copy(self, 0, 0))
    }

    /// Values of the expansion on the `2^level` grid (unresolved cells
    /// replaced by their mean).
    pub fn grid_values(&self, level: u32) -> Result<Vec<f64>> {
        if level < self.depth || level > 24 {
            return Err(domain(format!(
                "grid level must lie in {}..=24, got {level}",
                self.depth
            )));
        }
        let mut out = Vec::with_capacity(1 << level);
        for c in self.cells()? {
            let v = c.value.unwrap_or(c.mean);
            let reps = 1usize << (level - c.depth);
            out.extend(std::iter::repeat_n(v, reps));
        }
        Ok(out)
    }
}

pub fn psi_stats(psi: &PsiFunction) -> PsiStats {
    psi.stats()
}

/// Statistics of `φ_j(t₁, …, t_n) = ψ_j(t₁)` on `(0, 1]^n`.
///
/// A dyadic cube averages φ_j exactly as its first-coordinate interval
/// averages ψ_j, so the statistics coincide with the one-dimensional ones.
pub fn tensor_stats(psi: &PsiFunction, n: u32) -> Result<PsiStats> {
    if n < 1 {
        return Err(domain("dimension must be at least 1"));
    }
    Ok(psi.stats())
}

/// BMO norm over all dyadic subcubes of `(0, 1]^n` of `f(t₁)`, `f` a step
/// function on `2^D` equal cells, by enumerating every cube.
pub fn tensor_bmo_brute_force(values: &[f64], n: u32) -> Result<f64> {
    let len = values.len();
    if !len.is_power_of_two() || n < 1 {
        return Err(domain("need 2^D values and n >= 1"));
    }
    let d = len.trailing_zeros();
    if d * n > 20 {
        return Err(Error::Resource(format!("2^{} grid cells is too many", d * n)));
    }
    let side = len;
    let total = side.pow(n);
    // full n-dimensional grid, first coordinate fastest
    let grid: Vec<f64> = (0..total).map(|idx| values[idx % side]).collect();
    let mut best = 0.0f64;
    for level in 0..=d {
        let cubes_per_axis = 1usize << level;
        let width = side >> level;
        for cube in 0..cubes_per_axis.pow(n) {
            let mut corner = vec![0usize; n as usize];
            let mut c = cube;
            for k in corner.iter_mut() {
                *k = (c % cubes_per_axis) * width;
                c /= cubes_per_axis;
            }
            let (mut s1, mut s2, mut count) = (0.0, 0.0, 0usize);
            for inner in 0..width.pow(n) {
                let mut idx = 0usize;
                let mut stride = 1usize;
                let mut ic = inner;
                for &k in &corner {
                    idx += (k + ic % width) * stride;
                    ic /= width;
                    stride *= side;
                }
                s1 += grid[idx];
                s2 += grid[idx] * grid[idx];
                count += 1;
            }
            let mean = s1 / count as f64;
            let var = s2 / count as f64 - mean * mean;
            best = best.max(var.max(0.0).sqrt());
        }
    }
    Ok(best)
}

/// Perfect binary ½-tree carrying `values` on its `2^D` leaves.
pub fn dyadic_tree(values: &[f64]) -> Result<AlphaTree> {
    if !values.len().is_power_of_two() {
        return Err(domain("need 2^D values"));
    }
    fn rec(vals: &[f64], w: f64) -> NodeSpec {
        if vals.len() == 1 {
            return NodeSpec::leaf(w, vals[0]);
        }
        let (a, b) = vals.split_at(vals.len() / 2);
        NodeSpec::internal(w, vec![rec(a, w / 2.0), rec(b, w / 2.0)])
    }
    AlphaTree::new(0.5, rec(values, 1.0))
}

/// One row of the convergence report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MNormRow {
    pub params: PsiParams,
    pub stats: PsiStats,
}

impl MNormRow {
    pub fn targets_enclosed(&self) -> bool {
        self.stats.targets_enclosed(self.params.gamma)
    }
}

/// For each `j`: statistics of ψ_j, including the BLO difference of
/// `M(φ_j + γ_j) = N φ_j + γ_j`, which equals that of `N φ_j`.
pub fn m_norm_report(js: impl IntoIterator<Item = u32>, depth: u32) -> Result<Vec<MNormRow>> {
    js.into_iter()
        .map(|j| {
            let psi = build_psi(j, depth)?;
            Ok(MNormRow {
                params: psi.params,
                stats: psi.stats(),
            })
        })
        .collect()
}

pub fn report_table(rows: &[MNormRow]) -> Table {
    let mut t = Table::new([
        "j",
        "gamma_j",
        "delta_j",
        "mean_lo",
        "mean_hi",
        "meansq_lo",
        "meansq_hi",
        "bmo_lo",
        "bmo_hi",
        "meanN_lo",
        "meanN_hi",
        "unresolved_mass",
        "blo_diff_lo",
        "blo_diff_hi",
    ]);
    for r in rows {
        let s = &r.stats;
        let b = s.blo_difference();
        let row: Vec<TableCell> = vec![
            (r.params.j as i64).into(),
            r.params.gamma.into(),
            r.params.delta.into(),
            s.mean.lo.into(),
            s.mean.hi.into(),
            s.mean_sq.lo.into(),
            s.mean_sq.hi.into(),
            s.bmo.lo.into(),
            s.bmo.hi.into(),
            s.mean_n.lo.into(),
            s.mean_n.hi.into(),
            s.unresolved_mass.into(),
            b.lo.into(),
            b.hi.into(),
        ];
        t.push(row);
    }
    t
}
