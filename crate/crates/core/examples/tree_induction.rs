//! Verifies the tree inequalities on a JSON tree, or on seeded random trees.
//!
//! ```text
//! cargo run --example tree_induction -- examples/data/ternary.json
//! cargo run --example tree_induction -- --random 20 [seed]
//! ```

use blo_bellman::trees::{normalize_bmo, random_tree, verify_tree, AlphaTree, MaximalKind};
use blo_bellman::AlphaContext;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn report(tree: &AlphaTree) -> Result<bool, Box<dyn std::error::Error>> {
    let ctx = AlphaContext::new(tree.alpha)?;
    let mut ok = true;
    for kind in [MaximalKind::Natural, MaximalKind::Classical] {
        let r = verify_tree(tree, &ctx, kind)?;
        println!(
            "  {kind:?}: bmo {:.4}, blo(N) margin {:+.3e}, induction {:+.3e}, main {:+.3e}, key obs err {:.1e}",
            r.bmo, r.corollary_margin, r.induction_min_margin, r.main_min_margin, r.key_obs_max_error
        );
        ok &= r.passed();
    }
    Ok(ok)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.first().map(String::as_str) == Some("--random") {
        let count: usize = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(20);
        let seed: u64 = args.get(2).map(|s| s.parse()).transpose()?.unwrap_or(1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..count {
            let alpha = if i % 2 == 0 { 0.5 } else { 0.25 };
            let tree = normalize_bmo(&random_tree(&mut rng, alpha, 6), 1.0);
            println!("tree {i}: alpha {alpha}, {} nodes", tree.len());
            report(&tree)?;
        }
        return Ok(());
    }
    let path = args.first().map(String::as_str).unwrap_or("examples/data/two_leaf.json");
    let tree = AlphaTree::from_json(&std::fs::read_to_string(path)?)?;
    println!("{path}: alpha {}, {} nodes", tree.alpha, tree.len());
    let ok = report(&tree)?;
    println!("{}", if ok { "all inequalities hold" } else { "violation" });
    Ok(())
}
