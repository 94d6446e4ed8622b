//! Forward sampling from discrete Bayesian networks over a role-tagged DAG.
//!
//! Rows are drawn from the full population and kept only when every
//! selection variable equals 1; only observed columns are returned.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Dag, DagBuilder, Role};
use crate::oracle::Dataset;

/// A DAG with one conditional probability table per vertex.
///
/// `cpts[v][config]` is the distribution of `v` given the parent
/// configuration `config`, a mixed-radix index over the parents in
/// ascending id order (first parent least significant).
#[derive(Debug, Clone)]
pub struct DiscreteNetwork {
    dag: Dag,
    arities: Vec<u32>,
    cpts: Vec<Vec<Vec<f64>>>,
}

impl DiscreteNetwork {
    pub fn new(dag: Dag, arities: Vec<u32>, cpts: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let n = dag.n();
        if arities.len() != n || cpts.len() != n {
            return Err(Error::InvalidArgument(format!(
                "{n} vertices but {} arities and {} tables",
                arities.len(),
                cpts.len()
            )));
        }
        for v in 0..n {
            let name = dag.name(v);
            if arities[v] < 2 {
                return Err(Error::InvalidArgument(format!("`{name}` needs arity at least 2")));
            }
            if dag.role(v) == Role::Selection && arities[v] != 2 {
                return Err(Error::InvalidArgument(format!(
                    "selection variable `{name}` must be binary"
                )));
            }
            let configs: usize = dag.parents(v)?.iter().map(|&p| arities[p] as usize).product();
            if cpts[v].len() != configs {
                return Err(Error::InvalidArgument(format!(
                    "`{name}` has {} rows, expected {configs}",
                    cpts[v].len()
                )));
            }
            for row in &cpts[v] {
                let sum: f64 = row.iter().sum();
                let valid = row.len() == arities[v] as usize
                    && row.iter().all(|&p| (0.0..=1.0).contains(&p))
                    && (sum - 1.0).abs() < 1e-9;
                if !valid {
                    return Err(Error::InvalidArgument(format!(
                        "`{name}` has an invalid distribution {row:?}"
                    )));
                }
            }
        }
        Ok(DiscreteNetwork { dag, arities, cpts })
    }

    /// All-binary network; `p_one(v, parent_values)` gives `P(v = 1)`.
    pub fn binary(dag: Dag, p_one: impl Fn(usize, &[u32]) -> f64) -> Result<Self> {
        let n = dag.n();
        let mut cpts = Vec::with_capacity(n);
        for v in 0..n {
            let k = dag.parents(v)?.len();
            let rows = (0..1u32 << k)
                .map(|cfg| {
                    let vals: Vec<u32> = (0..k).map(|i| (cfg >> i) & 1).collect();
                    let p = p_one(v, &vals);
                    vec![1.0 - p, p]
                })
                .collect();
            cpts.push(rows);
        }
        DiscreteNetwork::new(dag, vec![2; n], cpts)
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    fn draw<R: Rng + ?Sized>(&self, order: &[usize], row: &mut [u32], rng: &mut R) {
        for &v in order {
            let mut cfg = 0usize;
            let mut radix = 1usize;
            for &p in self.dag.parents(v).expect("valid vertex") {
                cfg += row[p] as usize * radix;
                radix *= self.arities[p] as usize;
            }
            let u: f64 = rng.random();
            let dist = &self.cpts[v][cfg];
            let mut acc = 0.0;
            let mut value = dist.len() - 1;
            for (i, &p) in dist.iter().enumerate() {
                acc += p;
                if u < acc {
                    value = i;
                    break;
                }
            }
            row[v] = value as u32;
        }
    }

    /// `n` selected rows over the observed variables. Fails when fewer than
    /// one draw in a thousand passes selection.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Dataset> {
        let order = self.dag.topological_order();
        let observed = self.dag.observed();
        let selection = self.dag.selection();
        let mut columns: Vec<Vec<u32>> = vec![Vec::with_capacity(n); observed.len()];
        let mut row = vec![0u32; self.dag.n()];
        let budget = n.saturating_mul(1000).max(1000);
        let mut kept = 0;
        for _ in 0..budget {
            if kept == n {
                break;
            }
            self.draw(&order, &mut row, rng);
            if selection.iter().all(|&s| row[s] == 1) {
                for (col, &v) in columns.iter_mut().zip(&observed) {
                    col.push(row[v]);
                }
                kept += 1;
            }
        }
        if kept < n {
            return Err(Error::Dataset(format!(
                "selection kept only {kept} of {budget} draws, {n} requested"
            )));
        }
        let decl = observed
            .iter()
            .map(|&v| (self.dag.name(v).to_string(), self.arities[v]))
            .collect();
        Dataset::from_columns(decl, columns)
    }
}

/// A random DAG: observed `A`, `B`, ..., latent `L1`, ..., selection `S`
/// (or `S1`, ... when there are several), in that id order; selection names
/// gain a `_` suffix when `S` is taken by an observed variable. Edges follow a
/// uniformly random topological order, each present with probability `p`.
pub fn random_dag<R: Rng + ?Sized>(
    rng: &mut R,
    n_observed: usize,
    n_latent: usize,
    n_selection: usize,
    p: f64,
) -> Result<Dag> {
    if n_observed > 26 {
        return Err(Error::InvalidArgument("at most 26 observed variables".into()));
    }
    let mut b = DagBuilder::new();
    for i in 0..n_observed {
        b.add_vertex(&char::from(b'A' + i as u8).to_string(), Role::Observed)?;
    }
    for i in 1..=n_latent {
        b.add_vertex(&format!("L{i}"), Role::Latent)?;
    }
    let prefix = if n_observed > 18 { "S_" } else { "S" };
    for i in 1..=n_selection {
        let name = if n_selection == 1 {
            prefix.to_string()
        } else {
            format!("{prefix}{i}")
        };
        b.add_vertex(&name, Role::Selection)?;
    }
    let n = n_observed + n_latent + n_selection;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                b.add_edge(order[i], order[j])?;
            }
        }
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Role::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn marginals_match() {
        let g = Dag::from_names(&[("A", Observed), ("B", Observed)], &[("A", "B")]).unwrap();
        let net = DiscreteNetwork::binary(g, |v, pa| {
            if v == 0 {
                0.3
            } else if pa[0] == 1 {
                0.9
            } else {
                0.1
            }
        })
        .unwrap();
        let d = net.sample(20_000, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let mean = |c: usize| d.column(c).iter().map(|&x| x as f64).sum::<f64>() / d.n() as f64;
        assert!((mean(0) - 0.3).abs() < 0.02);
        assert!((mean(1) - (0.3 * 0.9 + 0.7 * 0.1)).abs() < 0.02);
    }

    #[test]
    fn selection_filters_rows() {
        let g = Dag::from_names(&[("A", Observed), ("S", Selection)], &[("A", "S")]).unwrap();
        let net = DiscreteNetwork::binary(g, |v, pa| {
            if v == 0 {
                0.5
            } else if pa[0] == 1 {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let d = net.sample(500, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert_eq!(d.names(), &["A".to_string()]);
        assert!(d.column(0).iter().all(|&x| x == 1));

        let g = Dag::from_names(&[("A", Observed), ("S", Selection)], &[]).unwrap();
        let never = DiscreteNetwork::binary(g, |v, _| if v == 0 { 0.5 } else { 0.0 }).unwrap();
        assert!(never.sample(10, &mut ChaCha8Rng::seed_from_u64(3)).is_err());
    }

    #[test]
    fn rejects_bad_tables() {
        let g = Dag::from_names(&[("A", Observed)], &[]).unwrap();
        assert!(DiscreteNetwork::new(g.clone(), vec![2], vec![vec![vec![0.5, 0.6]]]).is_err());
        assert!(
            DiscreteNetwork::new(g.clone(), vec![2], vec![vec![vec![0.5, 0.5], vec![0.5, 0.5]]]).is_err()
        );
        assert!(DiscreteNetwork::new(g, vec![3], vec![vec![vec![0.2, 0.3, 0.5]]]).is_ok());
    }

    #[test]
    fn random_dag_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = random_dag(&mut rng, 3, 2, 1, 1.0).unwrap();
        assert_eq!(g.n(), 6);
        assert_eq!(g.edge_count(), 15);
        assert_eq!(
            (g.observed().len(), g.latent(), g.selection()),
            (3, vec![3, 4], vec![5])
        );
        assert_eq!(random_dag(&mut rng, 4, 0, 0, 0.0).unwrap().edge_count(), 0);
        let wide = random_dag(&mut rng, 20, 1, 2, 0.1).unwrap();
        assert_eq!(wide.name(18), "S");
        assert_eq!((wide.name(21), wide.name(22)), ("S_1", "S_2"));
    }

    #[test]
    fn deterministic_given_seed() {
        let g = Dag::from_names(&[("A", Observed), ("B", Observed)], &[("A", "B")]).unwrap();
        let net = DiscreteNetwork::binary(g, |_, pa| if pa.first() == Some(&1) { 0.8 } else { 0.4 }).unwrap();
        let a = net.sample(100, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = net.sample(100, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }
}
