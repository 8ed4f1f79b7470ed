//! Tree inequalities on generated and hand-built α-trees.

use blo_bellman::error::Error;
use blo_bellman::geometry::AlphaContext;
use blo_bellman::trees::{
    inf_maximal, inf_maximal_brute, normalize_bmo, random_tree, truncated_maximal_average, verify_induction,
    verify_tree, AlphaTree, MaximalKind, NodeSpec,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn random_trees_satisfy_every_inequality() {
    for alpha in [0.5, 0.25] {
        let ctx = AlphaContext::new(alpha).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..200 {
            let tree = normalize_bmo(&random_tree(&mut rng, alpha, 6), 1.0);
            for kind in [MaximalKind::Natural, MaximalKind::Classical] {
                let r = verify_tree(&tree, &ctx, kind).unwrap();
                assert!(r.passed(), "alpha {alpha}, {kind:?}: {r:?}");
            }
        }
    }
}

#[test]
fn key_observation_on_every_node() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..100 {
        let tree = random_tree(&mut rng, 0.25, 5);
        for id in 0..tree.len() {
            assert_eq!(inf_maximal(&tree, id), inf_maximal_brute(&tree, id));
        }
    }
}

#[test]
fn truncations_increase_to_the_full_average() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..100 {
        let tree = random_tree(&mut rng, 0.25, 6);
        let an = blo_bellman::trees::Analysis::new(&tree, MaximalKind::Natural);
        for id in [0, tree.len() / 3, tree.len() / 2] {
            let mut prev = f64::NEG_INFINITY;
            for m in 0..=7 {
                let v = truncated_maximal_average(&tree, id, m);
                assert!(v >= prev - 1e-12);
                prev = v;
            }
            assert!((prev - an.avg_maximal[id]).abs() < 1e-12);
        }
    }
}

#[test]
fn induction_equality_is_approached() {
    // a small oscillation far below an ancestor average: N is constant on
    // the node while its point sits just above the lower boundary
    let ctx = AlphaContext::new(0.5).unwrap();
    let mut best = f64::INFINITY;
    for e in [1e-2, 1e-3, 1e-4] {
        let low = NodeSpec::equal_leaves(0.5, &[e, -e]);
        let tree = AlphaTree::new(0.5, NodeSpec::internal(1.0, vec![NodeSpec::leaf(0.5, 1.0), low])).unwrap();
        let m = verify_induction(&tree, 2, &ctx, MaximalKind::Natural).unwrap();
        assert!(m >= -1e-12);
        best = best.min(m);
    }
    assert!(best > 0.0 && best < 1e-6, "closest margin {best}");
}

#[test]
fn two_leaf_tree() {
    let ctx = AlphaContext::new(0.5).unwrap();
    let tree = AlphaTree::new(0.5, NodeSpec::equal_leaves(1.0, &[1.0, -1.0])).unwrap();
    let r = verify_tree(&tree, &ctx, MaximalKind::Natural).unwrap();
    assert!((r.bmo - 1.0).abs() < 1e-15);
    assert!(r.passed(), "{r:?}");
}

#[test]
fn precondition_violation_is_reported() {
    let ctx = AlphaContext::new(0.5).unwrap();
    let tree = AlphaTree::new(0.5, NodeSpec::equal_leaves(1.0, &[2.0, -2.0])).unwrap();
    assert!(matches!(
        verify_tree(&tree, &ctx, MaximalKind::Natural),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn json_errors_name_the_node() {
    let bad_sum = r#"{"alpha": 0.5, "root": {"measure": 1, "children": [
        {"measure": 0.5, "value": 1}, {"measure": 0.6, "value": 0}]}}"#;
    match AlphaTree::from_json(bad_sum) {
        Err(Error::Structure { node, .. }) => assert_eq!(node, "root"),
        other => panic!("{other:?}"),
    }
    let thin = r#"{"alpha": 0.25, "root": {"measure": 1, "children": [
        {"measure": 0.75, "children": [{"measure": 0.7, "value": 1}, {"measure": 0.05, "value": 2}]},
        {"measure": 0.25, "value": 0}]}}"#;
    match AlphaTree::from_json(thin) {
        Err(Error::Structure { node, reason }) => {
            assert_eq!(node, "root.children[0].children[1]", "{reason}");
        }
        other => panic!("{other:?}"),
    }
    let extra = r#"{"alpha": 0.5, "root": {"measure": 1, "value": 1, "weight": 2}}"#;
    assert!(matches!(AlphaTree::from_json(extra), Err(Error::Structure { .. })));
    assert!(matches!(AlphaTree::from_json("{"), Err(Error::Parse(_))));
}
