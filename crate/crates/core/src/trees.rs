//! Finite α-trees carrying step functions, their BMO/BLO norms, the natural
//! and classical maximal operators, and executable Bellman induction.

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::bellman::{eval_a, eval_decay};
use crate::error::{Error, Result};
use crate::geometry::{AlphaContext, OmegaPoint};

pub type NodeId = usize;

const STRUCT_TOL: f64 = 1e-12;

/// Recursive description of a tree, mirroring the JSON format.
#[derive(Debug, Clone, PartialEq)]
pub enum NodeSpec {
    Leaf { measure: f64, value: f64 },
    Internal { measure: f64, children: Vec<NodeSpec> },
}

impl NodeSpec {
    pub fn leaf(measure: f64, value: f64) -> Self {
        NodeSpec::Leaf { measure, value }
    }

    pub fn internal(measure: f64, children: Vec<NodeSpec>) -> Self {
        NodeSpec::Internal { measure, children }
    }

    /// Node whose measure is the sum of its children's.
    pub fn join(children: Vec<NodeSpec>) -> Self {
        let measure = children.iter().map(NodeSpec::measure).sum();
        NodeSpec::Internal { measure, children }
    }

    /// Equal-measure leaves with the given values.
    pub fn equal_leaves(measure: f64, values: &[f64]) -> Self {
        let m = measure / values.len() as f64;
        NodeSpec::internal(measure, values.iter().map(|&v| NodeSpec::leaf(m, v)).collect())
    }

    pub fn measure(&self) -> f64 {
        match self {
            NodeSpec::Leaf { measure, .. } | NodeSpec::Internal { measure, .. } => *measure,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub measure: f64,
    /// Present exactly on leaves.
    pub value: Option<f64>,
    pub children: Vec<NodeId>,
    pub parent: Option<NodeId>,
    /// Position among the parent's children.
    pub slot: usize,
    pub depth: usize,
}

/// A finite weighted rooted tree with a step function on its leaves.
///
/// Nodes are stored in preorder, so every parent precedes its children.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaTree {
    pub alpha: f64,
    nodes: Vec<Node>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MaximalKind {
    /// `N_T φ`: suprema of plain averages.
    Natural,
    /// `M_T φ`: suprema of averages of `|φ|`.
    Classical,
}

impl AlphaTree {
    pub const ROOT: NodeId = 0;

    /// Builds and validates a tree.
    pub fn new(alpha: f64, root: NodeSpec) -> Result<Self> {
        let tree = Self::from_spec(alpha, root);
        validate(&tree)?;
        Ok(tree)
    }

    fn from_spec(alpha: f64, root: NodeSpec) -> Self {
        let mut nodes = Vec::new();
        fn push(nodes: &mut Vec<Node>, spec: NodeSpec, parent: Option<NodeId>, slot: usize, depth: usize) {
            let id = nodes.len();
            match spec {
                NodeSpec::Leaf { measure, value } => nodes.push(Node {
                    measure,
                    value: Some(value),
                    children: Vec::new(),
                    parent,
                    slot,
                    depth,
                }),
                NodeSpec::Internal { measure, children } => {
                    nodes.push(Node {
                        measure,
                        value: None,
                        children: Vec::new(),
                        parent,
                        slot,
                        depth,
                    });
                    for (i, c) in children.into_iter().enumerate() {
                        let cid = nodes.len();
                        nodes[id].children.push(cid);
                        push(nodes, c, Some(id), i, depth + 1);
                    }
                }
            }
        }
        push(&mut nodes, root, None, 0, 0);
        Self { alpha, nodes }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        self.nodes[id].children.is_empty()
    }

    /// Leaves in preorder.
    pub fn leaves(&self) -> Vec<NodeId> {
        (0..self.nodes.len()).filter(|&i| self.is_leaf(i)).collect()
    }

    /// Leaf values in preorder.
    pub fn values(&self) -> Vec<f64> {
        self.nodes.iter().filter_map(|n| n.value).collect()
    }

    /// Same tree with new leaf values, given in preorder.
    pub fn with_values(&self, values: &[f64]) -> Self {
        let mut t = self.clone();
        let mut it = values.iter();
        for n in &mut t.nodes {
            if n.value.is_some() {
                n.value = Some(*it.next().expect("one value per leaf"));
            }
        }
        assert!(it.next().is_none(), "one value per leaf");
        t
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Self {
        let mut t = self.clone();
        for n in &mut t.nodes {
            n.value = n.value.map(&f);
        }
        t
    }

    /// Node ids of the subtree at `id`, in preorder.
    pub fn subtree(&self, id: NodeId) -> std::ops::Range<NodeId> {
        // preorder: the subtree is a contiguous block
        let depth = self.nodes[id].depth;
        let end = (id + 1..self.nodes.len())
            .find(|&j| self.nodes[j].depth <= depth)
            .unwrap_or(self.nodes.len());
        id..end
    }

    /// Human-readable location such as `root.children[1].children[0]`.
    pub fn path(&self, id: NodeId) -> String {
        let mut parts = Vec::new();
        let mut cur = id;
        while let Some(p) = self.nodes[cur].parent {
            parts.push(format!(".children[{}]", self.nodes[cur].slot));
            cur = p;
        }
        parts.reverse();
        format!("root{}", parts.concat())
    }

    pub fn to_spec(&self) -> NodeSpec {
        fn rec(t: &AlphaTree, id: NodeId) -> NodeSpec {
            let n = &t.nodes[id];
            match n.value {
                Some(v) => NodeSpec::leaf(n.measure, v),
                None => NodeSpec::internal(n.measure, n.children.iter().map(|&c| rec(t, c)).collect()),
            }
        }
        rec(self, Self::ROOT)
    }

    /// `{"alpha": …, "root": node}`.
    pub fn to_json(&self) -> String {
        fn rec(t: &AlphaTree, id: NodeId) -> Value {
            let n = &t.nodes[id];
            let mut m = Map::new();
            m.insert("measure".into(), Value::from(n.measure));
            match n.value {
                Some(v) => {
                    m.insert("value".into(), Value::from(v));
                }
                None => {
                    let cs = n.children.iter().map(|&c| rec(t, c)).collect();
                    m.insert("children".into(), Value::Array(cs));
                }
            }
            Value::Object(m)
        }
        let mut top = Map::new();
        top.insert("alpha".into(), Value::from(self.alpha));
        top.insert("root".into(), rec(self, Self::ROOT));
        serde_json::to_string_pretty(&Value::Object(top)).expect("serializable")
    }

    /// Parses the JSON tree format and validates the α-tree invariants.
    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Parse("top level must be an object".into()))?;
        let alpha = obj
            .get("alpha")
            .and_then(Value::as_f64)
            .ok_or_else(|| Error::Parse("missing numeric \"alpha\"".into()))?;
        let root = obj
            .get("root")
            .ok_or_else(|| Error::Parse("missing \"root\"".into()))?;
        let spec = parse_node(root, "root")?;
        Self::new(alpha, spec)
    }
}

fn structure(path: &str, reason: impl Into<String>) -> Error {
    Error::Structure {
        node: path.to_string(),
        reason: reason.into(),
    }
}

fn parse_node(v: &Value, path: &str) -> Result<NodeSpec> {
    let obj = v
        .as_object()
        .ok_or_else(|| structure(path, "node must be an object"))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "measure" | "children" | "value") {
            return Err(structure(path, format!("unknown field \"{key}\"")));
        }
    }
    let measure = obj
        .get("measure")
        .and_then(Value::as_f64)
        .ok_or_else(|| structure(path, "missing numeric \"measure\""))?;
    match (obj.get("children"), obj.get("value")) {
        (Some(_), Some(_)) => Err(structure(path, "node has both \"children\" and \"value\"")),
        (None, None) => Err(structure(path, "node needs \"children\" or \"value\"")),
        (None, Some(value)) => {
            let value = value
                .as_f64()
                .ok_or_else(|| structure(path, "\"value\" must be a number"))?;
            Ok(NodeSpec::leaf(measure, value))
        }
        (Some(children), None) => {
            let arr = children
                .as_array()
                .ok_or_else(|| structure(path, "\"children\" must be an array"))?;
            let children = arr
                .iter()
                .enumerate()
                .map(|(i, c)| parse_node(c, &format!("{path}.children[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            Ok(NodeSpec::internal(measure, children))
        }
    }
}

/// Checks the α-tree axioms within relative tolerance `1e-12`.
pub fn validate(tree: &AlphaTree) -> Result<()> {
    if !(tree.alpha > 0.0 && tree.alpha <= 0.5) {
        return Err(structure("root", format!("alpha = {} outside (0, 1/2]", tree.alpha)));
    }
    for (id, n) in tree.nodes.iter().enumerate() {
        if !(n.measure.is_finite() && n.measure > 0.0) {
            return Err(structure(&tree.path(id), format!("measure {} is not positive and finite", n.measure)));
        }
        if let Some(v) = n.value {
            if !v.is_finite() {
                return Err(structure(&tree.path(id), "leaf value is not finite"));
            }
            continue;
        }
        if n.children.is_empty() {
            return Err(structure(&tree.path(id), "internal node without children"));
        }
        let sum: f64 = n.children.iter().map(|&c| tree.nodes[c].measure).sum();
        if (sum - n.measure).abs() > STRUCT_TOL * n.measure {
            return Err(structure(
                &tree.path(id),
                format!("children measures sum to {sum}, node measure is {}", n.measure),
            ));
        }
        for &c in &n.children {
            let m = tree.nodes[c].measure;
            if m < tree.alpha * n.measure * (1.0 - STRUCT_TOL) {
                return Err(structure(
                    &tree.path(c),
                    format!(
                        "measure fraction {} of parent is below alpha = {}",
                        m / n.measure,
                        tree.alpha
                    ),
                ));
            }
        }
    }
    Ok(())
}

/// Averages on one node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeStats {
    pub mean: f64,
    pub mean_sq: f64,
    /// `⟨φ²⟩ − ⟨φ⟩²`, aggregated in centered form.
    pub var: f64,
    /// Largest mean over the node and its ancestors.
    pub ancestor_max: f64,
    pub min_leaf: f64,
}

/// Statistics of every node, indexed by node id.
pub fn stats(tree: &AlphaTree) -> Vec<NodeStats> {
    let n = tree.nodes.len();
    let mut st = vec![
        NodeStats {
            mean: 0.0,
            mean_sq: 0.0,
            var: 0.0,
            ancestor_max: 0.0,
            min_leaf: 0.0,
        };
        n
    ];
    for id in (0..n).rev() {
        let node = &tree.nodes[id];
        if let Some(v) = node.value {
            st[id] = NodeStats {
                mean: v,
                mean_sq: v * v,
                var: 0.0,
                ancestor_max: v,
                min_leaf: v,
            };
            continue;
        }
        let total: f64 = node.children.iter().map(|&c| tree.nodes[c].measure).sum();
        let mut mean = 0.0;
        let mut mean_sq = 0.0;
        let mut min_leaf = f64::INFINITY;
        for &c in &node.children {
            let w = tree.nodes[c].measure / total;
            mean += w * st[c].mean;
            mean_sq += w * st[c].mean_sq;
            min_leaf = min_leaf.min(st[c].min_leaf);
        }
        let mut var = 0.0;
        for &c in &node.children {
            let w = tree.nodes[c].measure / total;
            let dm = st[c].mean - mean;
            var += w * (st[c].var + dm * dm);
        }
        st[id] = NodeStats {
            mean,
            mean_sq,
            var,
            ancestor_max: mean,
            min_leaf,
        };
    }
    for id in 1..n {
        let p = tree.nodes[id].parent.expect("non-root has a parent");
        st[id].ancestor_max = st[id].mean.max(st[p].ancestor_max);
    }
    st
}

/// `sup_J (⟨φ²⟩_J − ⟨φ⟩_J²)^{1/2}` over the whole tree.
pub fn bmo_norm(tree: &AlphaTree) -> f64 {
    subtree_bmo(tree, &stats(tree), AlphaTree::ROOT)
}

/// `sup_J (⟨φ⟩_J − inf_J φ)` over the whole tree.
pub fn blo_norm(tree: &AlphaTree) -> f64 {
    stats(tree)
        .iter()
        .map(|s| s.mean - s.min_leaf)
        .fold(0.0, f64::max)
}

/// BMO norm of the restriction to the subtree at `node`.
pub fn subtree_bmo(tree: &AlphaTree, st: &[NodeStats], node: NodeId) -> f64 {
    tree.subtree(node)
        .map(|j| st[j].var.max(0.0).sqrt())
        .fold(0.0, f64::max)
}

/// Maximal function on each leaf, in preorder of the leaves.
pub fn maximal(tree: &AlphaTree, kind: MaximalKind) -> Vec<f64> {
    let t;
    let tree = match kind {
        MaximalKind::Natural => tree,
        MaximalKind::Classical => {
            t = tree.map_values(f64::abs);
            &t
        }
    };
    let st = stats(tree);
    tree.leaves().into_iter().map(|l| st[l].ancestor_max).collect()
}

/// `inf_K N_T φ`, computed as the supremum of means over `K` and its ancestors.
pub fn inf_maximal(tree: &AlphaTree, node: NodeId) -> f64 {
    stats(tree)[node].ancestor_max
}

/// `inf_K N_T φ` by brute force: minimum of the maximal function over the
/// leaves below `node`.
pub fn inf_maximal_brute(tree: &AlphaTree, node: NodeId) -> f64 {
    let st = stats(tree);
    let mut best = f64::INFINITY;
    for l in tree.subtree(node).filter(|&j| tree.is_leaf(j)) {
        // walk the whole chain explicitly
        let mut m = st[l].mean;
        let mut cur = l;
        while let Some(p) = tree.nodes[cur].parent {
            m = m.max(st[p].mean);
            cur = p;
        }
        best = best.min(m);
    }
    best
}

/// Precomputed quantities for verifying every node of one tree.
#[derive(Debug, Clone)]
pub struct Analysis {
    /// Statistics of the function the operator acts on (`φ` or `|φ|`).
    pub stats: Vec<NodeStats>,
    /// Statistics of `φ` itself.
    pub signed: Vec<NodeStats>,
    /// `⟨N_T φ⟩_J` (or `⟨M_T φ⟩_J`) for every node.
    pub avg_maximal: Vec<f64>,
    /// BMO norm of `φ` on the subtree at each node.
    pub sub_bmo: Vec<f64>,
    pub kind: MaximalKind,
}

impl Analysis {
    pub fn new(tree: &AlphaTree, kind: MaximalKind) -> Self {
        let signed = stats(tree);
        let stats = match kind {
            MaximalKind::Natural => signed.clone(),
            MaximalKind::Classical => self::stats(&tree.map_values(f64::abs)),
        };
        let n = tree.len();
        let mut avg = vec![0.0; n];
        let mut sub = vec![0.0; n];
        for id in (0..n).rev() {
            let node = &tree.nodes[id];
            let own = signed[id].var.max(0.0).sqrt();
            if node.value.is_some() {
                avg[id] = stats[id].ancestor_max;
                sub[id] = own;
                continue;
            }
            let total: f64 = node.children.iter().map(|&c| tree.nodes[c].measure).sum();
            avg[id] = node
                .children
                .iter()
                .map(|&c| tree.nodes[c].measure / total * avg[c])
                .sum();
            sub[id] = node.children.iter().map(|&c| sub[c]).fold(own, f64::max);
        }
        Self {
            stats,
            signed,
            avg_maximal: avg,
            sub_bmo: sub,
            kind,
        }
    }
}

/// Bellman induction at `node`: `A(⟨φ⟩, ⟨φ²⟩; inf N φ) − ⟨N φ⟩`.
///
/// For the classical operator the inequality is applied to `|φ|`, whose BMO
/// norm does not exceed that of `φ`.
pub fn verify_induction(
    tree: &AlphaTree,
    node: NodeId,
    ctx: &AlphaContext,
    kind: MaximalKind,
) -> Result<f64> {
    induction_margin(&Analysis::new(tree, kind), tree, node, ctx)
}

pub fn induction_margin(an: &Analysis, tree: &AlphaTree, node: NodeId, ctx: &AlphaContext) -> Result<f64> {
    let norm = an.sub_bmo[node];
    if norm > 1.0 + 1e-12 {
        return Err(Error::Precondition(format!(
            "BMO norm {norm} of the subtree at {} exceeds 1",
            tree.path(node)
        )));
    }
    let s = an.stats[node];
    let x = OmegaPoint::from_d(s.mean, s.var.clamp(0.0, 1.0));
    Ok(eval_a(x, s.ancestor_max, ctx)? - an.avg_maximal[node])
}

/// Both sides of the weak-form estimate at one node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MainTheoremCheck {
    /// `⟨N φ⟩_K`.
    pub lhs: f64,
    /// `L + λ F(t/λ)` with `λ` the subtree BMO norm.
    pub rhs: f64,
    pub l: f64,
    pub t: f64,
    pub norm: f64,
    pub margin: f64,
}

/// `⟨N φ⟩_K ≤ L + λ F_α(t/λ)` where `L = inf_K N φ`, `t = L − ⟨φ⟩_K` and `λ`
/// is the BMO norm of `φ` on the subtree at `K`.
pub fn verify_main_theorem(
    tree: &AlphaTree,
    node: NodeId,
    ctx: &AlphaContext,
    kind: MaximalKind,
) -> Result<MainTheoremCheck> {
    main_theorem_check(&Analysis::new(tree, kind), node, ctx)
}

pub fn main_theorem_check(an: &Analysis, node: NodeId, ctx: &AlphaContext) -> Result<MainTheoremCheck> {
    let s = an.stats[node];
    let l = s.ancestor_max;
    let t = (l - s.mean).max(0.0);
    let norm = an.sub_bmo[node];
    let rhs = if norm > 0.0 {
        l + norm * eval_decay(t / norm, ctx)?
    } else {
        l
    };
    let lhs = an.avg_maximal[node];
    Ok(MainTheoremCheck {
        lhs,
        rhs,
        l,
        t,
        norm,
        margin: rhs - lhs,
    })
}

/// `‖φ‖_BMO − ‖Nφ‖_BLO`, with `Nφ` read as a step function on the same tree.
pub fn blo_corollary_margin(tree: &AlphaTree, kind: MaximalKind) -> f64 {
    let n = maximal(tree, kind);
    bmo_norm(tree) - blo_norm(&tree.with_values(&n))
}

/// `⟨N φ_m⟩_K` for `φ_m`, the conditional expectation of `φ` on the nodes at
/// relative depth `m` below `K`.
pub fn truncated_maximal_average(tree: &AlphaTree, node: NodeId, m: usize) -> f64 {
    let st = stats(tree);
    let base = tree.nodes[node].depth;
    let total = tree.nodes[node].measure;
    let mut acc = 0.0;
    for l in tree.subtree(node).filter(|&j| tree.is_leaf(j)) {
        let mut best = f64::NEG_INFINITY;
        let mut cur = Some(l);
        while let Some(c) = cur {
            if tree.nodes[c].depth <= base + m {
                best = best.max(st[c].mean);
            }
            cur = tree.nodes[c].parent;
        }
        acc += tree.nodes[l].measure / total * best;
    }
    acc
}

/// Outcome of checking every node of a tree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeVerification {
    pub bmo: f64,
    pub blo: f64,
    pub key_obs_max_error: f64,
    pub induction_min_margin: f64,
    pub main_min_margin: f64,
    pub corollary_margin: f64,
}

impl TreeVerification {
    pub fn passed(&self) -> bool {
        self.key_obs_max_error <= 1e-12
            && self.induction_min_margin >= -1e-9
            && self.main_min_margin >= -1e-9
            && self.corollary_margin >= -1e-9
    }
}

/// Runs every check on every node; `φ` must have BMO norm at most 1.
pub fn verify_tree(tree: &AlphaTree, ctx: &AlphaContext, kind: MaximalKind) -> Result<TreeVerification> {
    let an = Analysis::new(tree, kind);
    let nmax = {
        let st = &an.stats;
        let mut v = vec![0.0; tree.len()];
        for l in tree.leaves() {
            v[l] = st[l].ancestor_max;
        }
        v
    };
    let mut key_obs = 0.0f64;
    let mut induction = f64::INFINITY;
    let mut main = f64::INFINITY;
    // brute-force minimum of the maximal function below each node
    let mut below = vec![f64::INFINITY; tree.len()];
    for id in (0..tree.len()).rev() {
        if tree.is_leaf(id) {
            below[id] = nmax[id];
        }
        if let Some(p) = tree.nodes[id].parent {
            below[p] = below[p].min(below[id]);
        }
    }
    for id in 0..tree.len() {
        key_obs = key_obs.max((below[id] - an.stats[id].ancestor_max).abs());
        induction = induction.min(induction_margin(&an, tree, id, ctx)?);
        main = main.min(main_theorem_check(&an, id, ctx)?.margin);
    }
    Ok(TreeVerification {
        bmo: bmo_norm(tree),
        blo: blo_norm(tree),
        key_obs_max_error: key_obs,
        induction_min_margin: induction,
        main_min_margin: main,
        corollary_margin: blo_corollary_margin(tree, kind),
    })
}

/// Random α-tree of depth at most `max_depth` with standard normal leaf values.
///
/// Arity is drawn from `2..=min(4, ⌊1/α⌋)`; child fractions are
/// `α + (1 − aα)·D` with `D` uniform on the simplex, so every child keeps at
/// least the fraction α.
pub fn random_tree<R: Rng + ?Sized>(rng: &mut R, alpha: f64, max_depth: usize) -> AlphaTree {
    fn grow<R: Rng + ?Sized>(rng: &mut R, alpha: f64, measure: f64, depth: usize, max_depth: usize) -> NodeSpec {
        let leaf = depth == max_depth || (depth > 0 && rng.random::<f64>() < 0.3);
        if leaf {
            return NodeSpec::leaf(measure, rng.sample(StandardNormal));
        }
        let max_arity = ((1.0 / alpha).floor() as usize).clamp(2, 4);
        let arity = rng.random_range(2..=max_arity);
        let e: Vec<f64> = (0..arity).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = e.iter().sum();
        let spare = 1.0 - arity as f64 * alpha;
        let children = e
            .iter()
            .map(|&ei| {
                let frac = alpha + spare * ei / total;
                grow(rng, alpha, measure * frac, depth + 1, max_depth)
            })
            .collect::<Vec<_>>();
        // parent measure is the exact sum so rounding never trips validation
        NodeSpec::join(children)
    }
    let root = grow(rng, alpha, 1.0, 0, max_depth);
    AlphaTree::from_spec(alpha, root)
}

/// Affine rescaling of the leaf values to BMO norm `target`.
pub fn normalize_bmo(tree: &AlphaTree, target: f64) -> AlphaTree {
    let norm = bmo_norm(tree);
    if norm == 0.0 {
        return tree.clone();
    }
    tree.map_values(|v| v * target / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pm_one(alpha: f64) -> AlphaTree {
        AlphaTree::new(alpha, NodeSpec::equal_leaves(1.0, &[1.0, -1.0])).unwrap()
    }

    /// Indicator of the left half on the dyadic tree of depth 2.
    fn left_indicator() -> AlphaTree {
        let q = |v| NodeSpec::equal_leaves(0.5, &[v, v]);
        AlphaTree::new(0.5, NodeSpec::internal(1.0, vec![q(1.0), q(0.0)])).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(pm_one(0.5).nodes().len() == 3);
        let quad = NodeSpec::equal_leaves(1.0, &[0.0, 1.0, 2.0, 3.0]);
        assert!(AlphaTree::new(0.25, quad).is_ok());
        let bad = NodeSpec::internal(1.0, vec![NodeSpec::leaf(0.2, 0.0), NodeSpec::leaf(0.8, 1.0)]);
        match AlphaTree::new(0.25, bad) {
            Err(Error::Structure { node, .. }) => assert_eq!(node, "root.children[0]"),
            other => panic!("{other:?}"),
        }
        let sum = NodeSpec::internal(1.0, vec![NodeSpec::leaf(0.5, 0.0), NodeSpec::leaf(0.6, 1.0)]);
        assert!(AlphaTree::new(0.25, sum).is_err());
    }

    #[test]
    fn stats_examples() {
        let t = pm_one(0.5);
        let st = stats(&t);
        assert_eq!(st[0].mean, 0.0);
        assert_eq!(st[0].mean_sq, 1.0);
        assert_eq!(st[0].var, 1.0);
        assert_eq!(st[1].mean, 1.0);
        assert_eq!(st[1].mean_sq, 1.0);
        let c = t.map_values(|_| 2.5);
        for s in stats(&c) {
            assert_eq!((s.mean, s.mean_sq), (2.5, 6.25));
        }
    }

    #[test]
    fn norm_examples() {
        let t = pm_one(0.5);
        assert_eq!(bmo_norm(&t), 1.0);
        assert_eq!(blo_norm(&t), 1.0);
        let c = t.map_values(|_| 3.0);
        assert_eq!(bmo_norm(&c), 0.0);
        assert_eq!(blo_norm(&c), 0.0);
    }

    #[test]
    fn maximal_examples() {
        let t = left_indicator();
        let n = maximal(&t, MaximalKind::Natural);
        assert_eq!(n, vec![1.0, 1.0, 0.5, 0.5]);
        assert_eq!(n, maximal(&t, MaximalKind::Classical));
        let c = t.map_values(|_| -0.7);
        assert!(maximal(&c, MaximalKind::Natural).iter().all(|&v| v == -0.7));
        assert!(maximal(&c, MaximalKind::Classical).iter().all(|&v| v == 0.7));
    }

    #[test]
    fn key_observation_examples() {
        let t = left_indicator();
        let leaf = t.leaves()[0];
        assert_eq!(inf_maximal(&t, leaf), 1.0);
        assert_eq!(inf_maximal_brute(&t, leaf), 1.0);
        assert_eq!(inf_maximal(&t, 0), inf_maximal_brute(&t, 0));
    }

    #[test]
    fn induction_examples() {
        let ctx = AlphaContext::new(0.5).unwrap();
        let t = pm_one(0.5);
        let m = verify_induction(&t, 0, &ctx, MaximalKind::Natural).unwrap();
        // ⟨Nφ⟩ = (1 + 0)/2, A((0, 1); 0) = 1
        assert!((m - 0.5).abs() < 1e-15);
        let c = t.map_values(|_| 0.3);
        for id in 0..c.len() {
            assert!(verify_induction(&c, id, &ctx, MaximalKind::Natural).unwrap().abs() < 1e-15);
        }
        let big = t.map_values(|v| 2.0 * v);
        assert!(matches!(
            verify_induction(&big, 0, &ctx, MaximalKind::Natural),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn main_theorem_examples() {
        let ctx = AlphaContext::new(0.5).unwrap();
        let t = pm_one(0.5);
        let r = verify_main_theorem(&t, 0, &ctx, MaximalKind::Natural).unwrap();
        assert_eq!((r.l, r.t, r.rhs), (0.0, 0.0, 1.0));
        assert!(r.margin >= 0.0);
        let c = t.map_values(|_| -4.0);
        let r = verify_main_theorem(&c, 1, &ctx, MaximalKind::Natural).unwrap();
        assert_eq!(r.margin, 0.0);
        assert!(blo_corollary_margin(&t, MaximalKind::Natural) >= 0.0);
    }

    #[test]
    fn json_round_trip() {
        let t = left_indicator();
        let back = AlphaTree::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        let bad = r#"{"alpha": 0.5, "root": {"measure": 1, "children": [{"measure": 0.5, "value": 1}, {"measure": 0.5}]}}"#;
        match AlphaTree::from_json(bad) {
            Err(Error::Structure { node, .. }) => assert_eq!(node, "root.children[1]"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn random_trees_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for alpha in [0.5, 0.25, 0.1] {
            for _ in 0..50 {
                let t = random_tree(&mut rng, alpha, 6);
                validate(&t).unwrap();
                assert!(t.nodes().iter().all(|n| n.depth <= 6));
            }
        }
    }

    #[test]
    fn truncation_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = normalize_bmo(&random_tree(&mut rng, 0.25, 5), 1.0);
        let an = Analysis::new(&t, MaximalKind::Natural);
        let mut prev = f64::NEG_INFINITY;
        for m in 0..=6 {
            let a = truncated_maximal_average(&t, 0, m);
            assert!(a >= prev - 1e-15);
            prev = a;
        }
        assert!((prev - an.avg_maximal[0]).abs() < 1e-12);
    }
}
