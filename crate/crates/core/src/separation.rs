//! d-separation, observable independence under selection, and inducing paths.
//!
//! Every observable query conditions on the full selection set: the sample
//! only contains units for which all observed variables were recorded.

use std::collections::{BTreeSet, VecDeque};

use rayon::prelude::*;

use crate::ci::{all_statements, set_of, CiSet, CiStatement};
use crate::error::{Error, Result};
use crate::graph::{bfs_reach, Dag, Path, Role, VertexSet};

/// Default cap on the number of observed variables for exhaustive CI enumeration.
pub const DEFAULT_CI_LIMIT: usize = 8;

/// Terminal-edge orientation of one inducing path between `a` and `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InducingPathOrientation {
    pub into_a: bool,
    pub into_b: bool,
}

fn check_sets(g: &Dag, sets: [&VertexSet; 3]) -> Result<()> {
    for s in sets {
        for &v in s {
            g.check_vertex(v)?;
        }
    }
    let [x, z, y] = sets;
    let mut overlap: BTreeSet<usize> = x.intersection(z).copied().collect();
    overlap.extend(x.intersection(y));
    overlap.extend(z.intersection(y));
    if overlap.is_empty() {
        Ok(())
    } else {
        Err(Error::OverlappingSets {
            overlap: overlap.into_iter().collect(),
        })
    }
}

/// Whether `y` d-separates `x` from `z` in `g`.
///
/// Reachability over `(vertex, arrived-from-child?)` states: a trail may
/// leave a non-conditioned vertex freely when it arrived from below, and may
/// bounce back up only at colliders that are ancestors of `y`.
pub fn d_separated(g: &Dag, x: &VertexSet, z: &VertexSet, y: &VertexSet) -> Result<bool> {
    check_sets(g, [x, z, y])?;
    let n = g.n();
    let in_y = indicator(n, y);
    let anc_y = g.ancestor_mask(y);
    // state index: 2*v + up, up = 1 when we arrived at v from one of its children
    let mut seen = vec![false; 2 * n];
    let mut queue = VecDeque::new();
    for &v in x {
        seen[2 * v + 1] = true;
        queue.push_back((v, true));
    }
    let mut push = |queue: &mut VecDeque<(usize, bool)>, v: usize, up: bool| {
        let s = 2 * v + up as usize;
        if !seen[s] {
            seen[s] = true;
            queue.push_back((v, up));
        }
    };
    while let Some((v, up)) = queue.pop_front() {
        if !in_y[v] && z.contains(&v) {
            return Ok(false);
        }
        if up {
            if !in_y[v] {
                for &p in g.parents_of(v) {
                    push(&mut queue, p, true);
                }
                for &c in g.children_of(v) {
                    push(&mut queue, c, false);
                }
            }
        } else {
            if !in_y[v] {
                for &c in g.children_of(v) {
                    push(&mut queue, c, false);
                }
            }
            if anc_y[v] {
                for &p in g.parents_of(v) {
                    push(&mut queue, p, true);
                }
            }
        }
    }
    Ok(true)
}

/// Independent second route: separation in the moral graph of the ancestral
/// set of `x ∪ z ∪ y`, with `y` removed.
pub fn d_separated_moral(g: &Dag, x: &VertexSet, z: &VertexSet, y: &VertexSet) -> Result<bool> {
    check_sets(g, [x, z, y])?;
    let n = g.n();
    let anc = g.ancestor_mask(x.iter().chain(z).chain(y));
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for v in (0..n).filter(|&v| anc[v]) {
        let ps = g.parents_of(v);
        for (i, &p) in ps.iter().enumerate() {
            adj[v].insert(p);
            adj[p].insert(v);
            for &q in &ps[i + 1..] {
                adj[p].insert(q);
                adj[q].insert(p);
            }
        }
    }
    let in_y = indicator(n, y);
    let start: Vec<usize> = x.iter().copied().collect();
    let reach = bfs_reach(n, &start, |u| {
        adj[u].iter().copied().filter(|&w| !in_y[w]).collect()
    });
    Ok(!z.iter().any(|&v| reach[v]))
}

fn indicator(n: usize, s: &VertexSet) -> Vec<bool> {
    let mut m = vec![false; n];
    for &v in s {
        m[v] = true;
    }
    m
}

fn check_observed(g: &Dag, s: &VertexSet) -> Result<()> {
    for &v in s {
        let var = g.variable(v)?;
        if var.role() != Role::Observed {
            return Err(Error::NotObserved {
                name: var.name().to_string(),
                role: var.role().as_str(),
            });
        }
    }
    Ok(())
}

/// `x ⊥ z | y ∪ (S = 1)`: d-separation given `y` plus every selection vertex.
pub fn observable_independent(g: &Dag, x: &VertexSet, z: &VertexSet, y: &VertexSet) -> Result<bool> {
    for s in [x, z, y] {
        check_observed(g, s)?;
    }
    let mut cond = y.clone();
    cond.extend(g.selection());
    d_separated(g, x, z, &cond)
}

fn check_pair(g: &Dag, a: usize, b: usize) -> Result<()> {
    check_observed(g, &[a, b].into_iter().collect())?;
    if a == b {
        return Err(Error::InvalidQuery(format!(
            "inducing paths need two distinct endpoints, got `{}` twice",
            g.name(a)
        )));
    }
    Ok(())
}

/// Colliders must be ancestors of this mask.
fn collider_targets(g: &Dag, a: usize, b: usize) -> Vec<bool> {
    let mut seeds = vec![a, b];
    seeds.extend(g.selection());
    g.ancestor_mask(&seeds)
}

/// Checks the inducing-path conditions on a concrete path from `a` to `b`.
pub fn is_inducing_path(g: &Dag, path: &Path, a: usize, b: usize) -> Result<bool> {
    check_pair(g, a, b)?;
    if path.first() != a || path.last() != b {
        return Err(Error::InvalidPath(format!(
            "path runs from `{}` to `{}`, expected `{}` to `{}`",
            g.name(path.first()),
            g.name(path.last()),
            g.name(a),
            g.name(b)
        )));
    }
    let targets = collider_targets(g, a, b);
    let vs = path.vertices();
    for i in 1..vs.len().saturating_sub(1) {
        let v = vs[i];
        let collider = g.has_edge(vs[i - 1], v) && g.has_edge(vs[i + 1], v);
        let ok = if collider {
            targets[v]
        } else {
            g.role(v) == Role::Latent
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

struct InducingSearch<'a> {
    g: &'a Dag,
    b: usize,
    targets: Vec<bool>,
    on_path: Vec<bool>,
    found: BTreeSet<InducingPathOrientation>,
    stop_at_first: bool,
}

impl InducingSearch<'_> {
    fn done(&self) -> bool {
        (self.stop_at_first && !self.found.is_empty()) || self.found.len() == 4
    }

    /// At interior vertex `v`, reached over an edge that is into `v` iff `arrived_into`.
    fn extend(&mut self, v: usize, arrived_into: bool, into_a: bool) {
        let g = self.g;
        let nbrs = g
            .parents_of(v)
            .iter()
            .map(|&u| (u, true))
            .chain(g.children_of(v).iter().map(|&u| (u, false)));
        for (u, u_into_v) in nbrs {
            if self.done() {
                return;
            }
            if self.on_path[u] {
                continue;
            }
            let legal = if arrived_into && u_into_v {
                self.targets[v]
            } else {
                g.role(v) == Role::Latent
            };
            if !legal {
                continue;
            }
            if u == self.b {
                self.found.insert(InducingPathOrientation {
                    into_a,
                    into_b: !u_into_v,
                });
                continue;
            }
            self.on_path[u] = true;
            self.extend(u, !u_into_v, into_a);
            self.on_path[u] = false;
        }
    }
}

fn search_inducing(
    g: &Dag,
    a: usize,
    b: usize,
    stop_at_first: bool,
) -> Result<BTreeSet<InducingPathOrientation>> {
    check_pair(g, a, b)?;
    let mut s = InducingSearch {
        g,
        b,
        targets: collider_targets(g, a, b),
        on_path: vec![false; g.n()],
        found: BTreeSet::new(),
        stop_at_first,
    };
    s.on_path[a] = true;
    let nbrs: Vec<(usize, bool)> = g
        .parents_of(a)
        .iter()
        .map(|&u| (u, true))
        .chain(g.children_of(a).iter().map(|&u| (u, false)))
        .collect();
    for (w, into_a) in nbrs {
        if s.done() {
            break;
        }
        if w == b {
            s.found.insert(InducingPathOrientation {
                into_a,
                into_b: !into_a,
            });
            continue;
        }
        s.on_path[w] = true;
        s.extend(w, !into_a, into_a);
        s.on_path[w] = false;
    }
    Ok(s.found)
}

/// The orientations realised by at least one inducing path between `a` and `b`.
///
/// Depth-first over acyclic paths, pruned as soon as an interior vertex
/// violates the collider or latent-non-collider condition.
pub fn inducing_path_orientations(g: &Dag, a: usize, b: usize) -> Result<BTreeSet<InducingPathOrientation>> {
    search_inducing(g, a, b, false)
}

pub fn exists_inducing_path(g: &Dag, a: usize, b: usize) -> Result<bool> {
    Ok(!search_inducing(g, a, b, true)?.is_empty())
}

/// The subset characterisation: `a` and `b` stay dependent given every
/// `X ⊆ O \ {a, b}` (plus the selection set). Exponential in `|O|`.
pub fn dependent_given_every_subset(g: &Dag, a: usize, b: usize) -> Result<bool> {
    check_pair(g, a, b)?;
    let rest: Vec<usize> = g.observed().into_iter().filter(|&v| v != a && v != b).collect();
    let xa: VertexSet = [a].into_iter().collect();
    let xb: VertexSet = [b].into_iter().collect();
    for mask in 0u64..(1u64 << rest.len()) {
        let y: VertexSet = rest
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &v)| v)
            .collect();
        if observable_independent(g, &xa, &xb, &y)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every true observable independence over disjoint observed sets.
///
/// Statements are indexed by position in the observed universe (observed
/// vertices in id order). Errors when `|O| > limit`.
pub fn observable_ci_set(g: &Dag, limit: usize) -> Result<CiSet> {
    let observed = g.observed();
    if observed.len() > limit {
        return Err(Error::GuardExceeded(format!(
            "{} observed variables exceed the CI enumeration limit of {limit}; raise the limit explicitly",
            observed.len()
        )));
    }
    if observed.len() > 16 {
        return Err(Error::GuardExceeded(format!(
            "{} observed variables exceed the hard limit of 16",
            observed.len()
        )));
    }
    let universe: Vec<String> = observed.iter().map(|&v| g.name(v).to_string()).collect();
    let sel = g.selection();
    let to_dag = |mask: u32| -> VertexSet { set_of(mask).into_iter().map(|i| observed[i]).collect() };
    let statements: Vec<CiStatement> = all_statements(observed.len())
        .into_par_iter()
        .filter_map(|(x, z, y)| {
            let mut cond = to_dag(y);
            cond.extend(sel.iter().copied());
            let indep = d_separated(g, &to_dag(x), &to_dag(z), &cond).expect("sets are disjoint");
            indep.then(|| CiStatement::new(set_of(x), set_of(z), set_of(y), true).expect("canonical"))
        })
        .collect();
    CiSet::from_statements(universe, statements)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Role::*;

    fn set(v: &[usize]) -> VertexSet {
        v.iter().copied().collect()
    }

    fn dag(vars: &[(&str, Role)], edges: &[(&str, &str)]) -> Dag {
        Dag::from_names(vars, edges).unwrap()
    }

    fn ids(g: &Dag, names: &[&str]) -> VertexSet {
        names.iter().map(|n| g.id_of(n).unwrap()).collect()
    }

    fn both(g: &Dag, x: &[&str], z: &[&str], y: &[&str]) -> bool {
        let (x, z, y) = (ids(g, x), ids(g, z), ids(g, y));
        let a = d_separated(g, &x, &z, &y).unwrap();
        let b = d_separated_moral(g, &x, &z, &y).unwrap();
        assert_eq!(a, b, "routes disagree");
        a
    }

    #[test]
    fn chain_blocked_by_middle() {
        let g = dag(
            &[("A", Observed), ("B", Observed), ("C", Observed)],
            &[("A", "B"), ("B", "C")],
        );
        assert!(both(&g, &["A"], &["C"], &["B"]));
        assert!(!both(&g, &["A"], &["C"], &[]));
    }

    #[test]
    fn collider_opens_when_conditioned() {
        let g = dag(
            &[("X", Observed), ("Y", Observed), ("Z", Observed)],
            &[("X", "Z"), ("Y", "Z")],
        );
        assert!(both(&g, &["X"], &["Y"], &[]));
        assert!(!both(&g, &["X"], &["Y"], &["Z"]));
    }

    #[test]
    fn selection_on_common_effects_opens_path() {
        let g = dag(
            &[
                ("T", Observed),
                ("A", Observed),
                ("B", Observed),
                ("S", Selection),
            ],
            &[("T", "A"), ("T", "B"), ("A", "S"), ("B", "S")],
        );
        assert!(both(&g, &["A"], &["B"], &["T"]));
        assert!(!both(&g, &["A"], &["B"], &["T", "S"]));
        let (a, b, t) = (ids(&g, &["A"]), ids(&g, &["B"]), ids(&g, &["T"]));
        assert!(!observable_independent(&g, &a, &b, &t).unwrap());
    }

    #[test]
    fn overlap_is_reported() {
        let g = dag(&[("A", Observed), ("B", Observed)], &[]);
        let err = d_separated(&g, &set(&[0]), &set(&[1]), &set(&[1])).unwrap_err();
        assert!(matches!(err, Error::OverlappingSets { overlap } if overlap == vec![1]));
    }

    #[test]
    fn observable_examples() {
        let g = dag(
            &[("A", Observed), ("B", Observed), ("S", Selection)],
            &[("A", "S"), ("B", "S")],
        );
        assert!(!observable_independent(&g, &set(&[0]), &set(&[1]), &set(&[])).unwrap());

        let g = dag(&[("A", Observed), ("B", Observed)], &[("A", "B")]);
        assert!(!observable_independent(&g, &set(&[0]), &set(&[1]), &set(&[])).unwrap());

        let g = dag(&[("A", Observed), ("B", Observed)], &[]);
        assert!(observable_independent(&g, &set(&[0]), &set(&[1]), &set(&[])).unwrap());
        assert!(observable_independent(&g, &set(&[1]), &set(&[0]), &set(&[])).unwrap());
    }

    #[test]
    fn observable_rejects_hidden_vertices() {
        let g = dag(
            &[("A", Observed), ("T", Latent), ("B", Observed)],
            &[("T", "A"), ("T", "B")],
        );
        assert!(matches!(
            observable_independent(&g, &set(&[0]), &set(&[2]), &set(&[1])),
            Err(Error::NotObserved { .. })
        ));
    }

    #[test]
    fn single_edge_is_inducing() {
        let g = dag(&[("A", Observed), ("B", Observed)], &[("A", "B")]);
        let p = Path::from_names(&g, &["A", "B"]).unwrap();
        assert!(is_inducing_path(&g, &p, 0, 1).unwrap());
        assert!(is_inducing_path(&g, &p, 1, 0).is_err());
    }

    #[test]
    fn inducing_path_through_selection_and_latent() {
        let g = dag(
            &[("A", Observed), ("B", Observed), ("S", Selection), ("T", Latent)],
            &[("A", "S"), ("T", "S"), ("T", "B")],
        );
        let p = Path::from_names(&g, &["A", "S", "T", "B"]).unwrap();
        assert!(is_inducing_path(&g, &p, 0, 1).unwrap());
        let o = inducing_path_orientations(&g, 0, 1).unwrap();
        assert_eq!(
            o.into_iter().collect::<Vec<_>>(),
            vec![InducingPathOrientation {
                into_a: false,
                into_b: true
            }]
        );
    }

    #[test]
    fn collider_without_endpoint_descendant() {
        let g = dag(
            &[("A", Observed), ("B", Observed), ("C", Observed), ("D", Observed)],
            &[("A", "C"), ("B", "C"), ("C", "D")],
        );
        let p = Path::from_names(&g, &["A", "C", "B"]).unwrap();
        assert!(!is_inducing_path(&g, &p, 0, 1).unwrap());
        assert!(!exists_inducing_path(&g, 0, 1).unwrap());
        let o = inducing_path_orientations(&g, 2, 3).unwrap();
        assert_eq!(
            o.into_iter().collect::<Vec<_>>(),
            vec![InducingPathOrientation {
                into_a: false,
                into_b: true
            }]
        );
    }

    #[test]
    fn two_variable_orientations() {
        let iii = dag(
            &[("A", Observed), ("B", Observed), ("T", Latent)],
            &[("T", "A"), ("T", "B")],
        );
        let o: Vec<_> = inducing_path_orientations(&iii, 0, 1)
            .unwrap()
            .into_iter()
            .collect();
        assert_eq!(
            o,
            vec![InducingPathOrientation {
                into_a: true,
                into_b: true
            }]
        );

        let i = dag(&[("A", Observed), ("B", Observed)], &[("A", "B")]);
        let o: Vec<_> = inducing_path_orientations(&i, 0, 1)
            .unwrap()
            .into_iter()
            .collect();
        assert_eq!(
            o,
            vec![InducingPathOrientation {
                into_a: false,
                into_b: true
            }]
        );

        let iv = dag(
            &[("A", Observed), ("B", Observed), ("S", Selection)],
            &[("A", "S"), ("B", "S")],
        );
        let o: Vec<_> = inducing_path_orientations(&iv, 0, 1)
            .unwrap()
            .into_iter()
            .collect();
        assert_eq!(
            o,
            vec![InducingPathOrientation {
                into_a: false,
                into_b: false
            }]
        );

        let vi = dag(
            &[("A", Observed), ("B", Observed), ("T", Latent), ("U", Latent)],
            &[("T", "A"), ("T", "B"), ("U", "A"), ("U", "B")],
        );
        assert!(exists_inducing_path(&vi, 0, 1).unwrap());

        let empty = dag(&[("A", Observed), ("B", Observed)], &[]);
        assert!(!exists_inducing_path(&empty, 0, 1).unwrap());
        assert!(inducing_path_orientations(&empty, 0, 1).unwrap().is_empty());
    }

    #[test]
    fn observed_non_collider_blocks_inducing_path() {
        // A -> M -> B with M observed: no inducing path between A and B.
        let g = dag(
            &[("A", Observed), ("M", Observed), ("B", Observed)],
            &[("A", "M"), ("M", "B")],
        );
        assert!(!exists_inducing_path(&g, 0, 2).unwrap());
        assert!(!dependent_given_every_subset(&g, 0, 2).unwrap());
    }

    #[test]
    fn inducing_pair_validation() {
        let g = dag(&[("A", Observed), ("T", Latent)], &[("T", "A")]);
        assert!(exists_inducing_path(&g, 0, 0).is_err());
        assert!(exists_inducing_path(&g, 0, 1).is_err());
    }

    #[test]
    fn ci_set_of_single_edge_is_empty() {
        let g = dag(&[("A", Observed), ("B", Observed)], &[("A", "B")]);
        assert!(observable_ci_set(&g, DEFAULT_CI_LIMIT).unwrap().is_empty());
    }

    #[test]
    fn ci_set_guard() {
        let vars: Vec<(String, Role)> = (0..9).map(|i| (format!("V{i}"), Observed)).collect();
        let refs: Vec<(&str, Role)> = vars.iter().map(|(n, r)| (n.as_str(), *r)).collect();
        let g = Dag::from_names(&refs, &[]).unwrap();
        assert!(matches!(
            observable_ci_set(&g, DEFAULT_CI_LIMIT),
            Err(Error::GuardExceeded(_))
        ));
        assert!(observable_ci_set(&g, 9).is_ok());
    }
}
