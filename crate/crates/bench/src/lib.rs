//! Benchmark fixtures.

use poipg::{random_dag, CiSet, CiStatement, Dag, DiscreteNetwork, Role};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Sparse random DAG with `n` observed, two latent and one selection vertex.
pub fn sparse_dag(n: usize, seed: u64) -> Dag {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = (2.0 / n as f64).min(0.5);
    random_dag(&mut rng, n, 2, 1, p).expect("valid sizes")
}

/// `A -> C <- B`, `C -> D`, binary with strong dependences.
pub fn collider_chain() -> DiscreteNetwork {
    let g = Dag::from_names(
        &[
            ("A", Role::Observed),
            ("B", Role::Observed),
            ("C", Role::Observed),
            ("D", Role::Observed),
        ],
        &[("A", "C"), ("B", "C"), ("C", "D")],
    )
    .expect("acyclic");
    DiscreteNetwork::binary(g, |v, pa| match v {
        0 | 1 => 0.5,
        2 => 0.05 + 0.45 * pa[0] as f64 + 0.45 * pa[1] as f64,
        _ => 0.15 + 0.7 * pa[0] as f64,
    })
    .expect("valid tables")
}

/// `D ⊥ {A,B} | C` and `A ⊥ B` over `A..D`.
pub fn collider_chain_ci() -> CiSet {
    let stmts = [
        CiStatement::independence(&[3], &[0, 1], &[2]).expect("disjoint"),
        CiStatement::independence(&[0], &[1], &[]).expect("disjoint"),
    ];
    CiSet::from_statements(["A", "B", "C", "D"].map(String::from).to_vec(), stmts).expect("valid")
}
