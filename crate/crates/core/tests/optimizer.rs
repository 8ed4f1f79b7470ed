//! The norm-optimizing sequence against brute-force evaluations.

use blo_bellman::optimizers::{
    build_psi, dyadic_tree, m_norm_report, psi_params, tensor_bmo_brute_force, tensor_stats,
};
use blo_bellman::trees::{bmo_norm, maximal, stats, MaximalKind};

#[test]
fn maximal_averages_increase_towards_one() {
    let rows = m_norm_report(1..=12, 24).unwrap();
    let mut prev = 0.0;
    for r in &rows {
        let s = &r.stats;
        assert!(r.targets_enclosed(), "j = {}: {s:?}", r.params.j);
        let lo = s.mean_n.lo;
        assert!(lo > prev, "j = {}", r.params.j);
        assert!(lo > 1.0 - (-(r.params.j as f64)).exp2() - s.mean_n.width());
        assert!(s.blo_difference().lo >= r.params.gamma - 1e-3);
        prev = lo;
    }
    let g12 = psi_params(12).unwrap().gamma;
    assert!((g12 - 1.0 / (1.0 + 2f64.powi(-11)).sqrt()).abs() < 1e-16);
    assert!((g12 - 0.999756).abs() < 1e-6);
}

#[test]
fn deeper_expansions_keep_targets() {
    for j in [2, 5, 9] {
        let mut prev_mass = 1.0;
        for depth in [j, j + 4, j + 8, 24] {
            let psi = build_psi(j, depth).unwrap();
            let s = psi.stats();
            assert!(s.targets_enclosed(psi.params.gamma), "j {j}, D {depth}");
            assert!(psi.unresolved_mass <= prev_mass);
            prev_mass = psi.unresolved_mass;
        }
    }
}

/// Unresolved cells carry their exact mean, so the materialized tree keeps
/// ⟨ψ⟩ = 0 up to rounding.
#[test]
fn materialized_tree_agrees_with_closure() {
    for j in 1..=4 {
        let psi = build_psi(j, 12).unwrap();
        let tree = psi.to_tree().unwrap();
        let st = stats(&tree);
        assert!(st[0].mean.abs() < 1e-13, "{}", st[0].mean);
        // N on resolved cells is ψ + γ
        let n = maximal(&tree, MaximalKind::Natural);
        for (c, nv) in psi.cells().unwrap().iter().zip(&n) {
            if let Some(v) = c.value {
                assert!((nv.max(0.0) - v - psi.params.gamma).abs() < 1e-14);
            }
        }
        // the truncated function oscillates no more than ψ itself
        assert!(bmo_norm(&tree) <= psi.stats().bmo.hi + 1e-12);
    }
}

#[test]
fn square_lattice_reduces_to_the_line() {
    for j in 1..=3 {
        let psi = build_psi(j, 6).unwrap();
        let vals = psi.grid_values(6).unwrap();
        let line = bmo_norm(&dyadic_tree(&vals).unwrap());
        let square = tensor_bmo_brute_force(&vals, 2).unwrap();
        assert!((line - square).abs() < 1e-12, "j {j}: {line} vs {square}");
        assert_eq!(tensor_stats(&psi, 3).unwrap(), psi.stats());
    }
}
