//! Bounded enumeration of DAGs and exhaustive checking of a POIPG against
//! every DAG in a bounded equivalence class.
//!
//! The true equivalence class is infinite; everything here is relative to
//! explicit bounds on the number of latent and selection vertices, and the
//! bounds are printed with every report.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::ci::CiSet;
use crate::error::{Error, Result};
use crate::graph::{Dag, DagBuilder, EndpointMark, Poipg, Role, VertexSet};
use crate::io::emit_graph_compact;
use crate::query::{all_claims, ClaimKind};
use crate::separation::{dependent_given_every_subset, inducing_path_orientations, InducingPathOrientation};

/// Hard cap on the total vertex count of enumerated DAGs.
pub const MAX_VERTICES: usize = 8;

const MAX_PREFIX_PAIRS: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeConstraint {
    #[default]
    None,
    /// Selection vertices have no children.
    SelectionSinks,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumBounds {
    n_observed: usize,
    max_latent: usize,
    max_selection: usize,
    edge_constraint: EdgeConstraint,
}

impl EnumBounds {
    pub fn new(n_observed: usize, max_latent: usize, max_selection: usize) -> Result<Self> {
        if n_observed == 0 {
            return Err(Error::InvalidArgument(
                "at least one observed variable is required".into(),
            ));
        }
        let total = n_observed + max_latent + max_selection;
        if total > MAX_VERTICES {
            return Err(Error::GuardExceeded(format!(
                "{n_observed} observed + {max_latent} latent + {max_selection} selection = {total} vertices (limit {MAX_VERTICES})"
            )));
        }
        Ok(EnumBounds {
            n_observed,
            max_latent,
            max_selection,
            edge_constraint: EdgeConstraint::None,
        })
    }

    pub fn with_constraint(mut self, c: EdgeConstraint) -> Self {
        self.edge_constraint = c;
        self
    }

    pub fn n_observed(&self) -> usize {
        self.n_observed
    }

    pub fn max_latent(&self) -> usize {
        self.max_latent
    }

    pub fn max_selection(&self) -> usize {
        self.max_selection
    }

    pub fn edge_constraint(&self) -> EdgeConstraint {
        self.edge_constraint
    }

    /// `(latent, selection)` counts in enumeration order.
    fn blocks(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for k in 0..=self.max_latent {
            for m in 0..=self.max_selection {
                out.push((k, m));
            }
        }
        out
    }

    fn names(&self, observed: &[String], k: usize, m: usize) -> Vec<(String, Role)> {
        let mut v: Vec<(String, Role)> = observed.iter().map(|n| (n.clone(), Role::Observed)).collect();
        v.extend((1..=k).map(|i| (format!("L{i}"), Role::Latent)));
        if self.max_selection == 1 {
            v.extend((0..m).map(|_| ("S".to_string(), Role::Selection)));
        } else {
            v.extend((1..=m).map(|i| (format!("S{i}"), Role::Selection)));
        }
        v
    }
}

impl fmt::Display for EnumBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{})",
            self.n_observed, self.max_latent, self.max_selection
        )?;
        if self.edge_constraint == EdgeConstraint::SelectionSinks {
            f.write_str(" selection-sinks")?;
        }
        Ok(())
    }
}

/// Default observed names `A`, `B`, ...
pub fn default_observed_names(n: usize) -> Vec<String> {
    (0..n).map(|i| char::from(b'A' + i as u8).to_string()).collect()
}

/// One vertex layout: which pairs exist and which orientations each may take.
#[derive(Clone)]
struct Layout {
    n: usize,
    vars: Vec<(String, Role)>,
    pairs: Vec<(usize, usize)>,
    /// allowed[p][c]: c = 0 none, 1 forward (i -> j), 2 backward (j -> i)
    allowed: Vec<[bool; 3]>,
    sel_mask: u16,
}

impl Layout {
    fn new(
        vars: Vec<(String, Role)>,
        constraint: EdgeConstraint,
        forbidden: &BTreeSet<(usize, usize)>,
    ) -> Self {
        let n = vars.len();
        let is_sel = |v: usize| vars[v].1 == Role::Selection;
        let mut pairs = Vec::new();
        let mut allowed = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                pairs.push((i, j));
                let mut a = [true; 3];
                if forbidden.contains(&(i, j)) {
                    a[1] = false;
                    a[2] = false;
                }
                if constraint == EdgeConstraint::SelectionSinks {
                    a[1] &= !is_sel(i);
                    a[2] &= !is_sel(j);
                }
                allowed.push(a);
            }
        }
        let sel_mask = (0..n).filter(|&v| is_sel(v)).fold(0u16, |m, v| m | (1 << v));
        Layout {
            n,
            vars,
            pairs,
            allowed,
            sel_mask,
        }
    }

    fn build(&self, choice: &[u8]) -> Dag {
        let mut b = DagBuilder::new();
        for (name, role) in &self.vars {
            b.add_vertex(name, *role).expect("layout names are unique");
        }
        for (p, &c) in choice.iter().enumerate() {
            let (i, j) = self.pairs[p];
            match c {
                1 => b.add_edge(i, j).expect("valid edge"),
                2 => b.add_edge(j, i).expect("valid edge"),
                _ => {}
            }
        }
        b.build().expect("enumerated edge sets are acyclic")
    }
}

/// Per-candidate masks: `reach[v]` holds `v` and its descendants.
#[derive(Clone, Copy)]
struct Masks {
    reach: [u16; MAX_VERTICES],
    parents: [u16; MAX_VERTICES],
}

/// Depth-first enumeration of acyclic edge assignments below a fixed prefix.
struct EdgeSets {
    limit: usize,
    choice: Vec<u8>,
    next: Vec<u8>,
    masks: Vec<Masks>,
    depth: usize,
    floor: usize,
    done: bool,
}

impl EdgeSets {
    fn new(layout: &Layout, limit: usize, prefix: &[u8]) -> Self {
        let mut init = Masks {
            reach: [0; MAX_VERTICES],
            parents: [0; MAX_VERTICES],
        };
        for v in 0..layout.n {
            init.reach[v] = 1 << v;
        }
        let mut s = EdgeSets {
            limit,
            choice: vec![0; limit],
            next: vec![0; limit + 1],
            masks: vec![init; limit + 1],
            depth: 0,
            floor: prefix.len(),
            done: false,
        };
        for (d, &c) in prefix.iter().enumerate() {
            match s.extend(layout, d, c) {
                Some(m) => {
                    s.masks[d + 1] = m;
                    s.choice[d] = c;
                }
                None => s.done = true,
            }
        }
        s.depth = prefix.len();
        s
    }

    fn extend(&self, layout: &Layout, d: usize, c: u8) -> Option<Masks> {
        if !layout.allowed[d][c as usize] {
            return None;
        }
        let mut m = self.masks[d];
        if c == 0 {
            return Some(m);
        }
        let (i, j) = layout.pairs[d];
        let (u, v) = if c == 1 { (i, j) } else { (j, i) };
        if m.reach[v] & (1 << u) != 0 {
            return None;
        }
        let add = m.reach[v];
        for w in 0..layout.n {
            if m.reach[w] & (1 << u) != 0 {
                m.reach[w] |= add;
            }
        }
        m.parents[v] |= 1 << u;
        Some(m)
    }

    fn next_candidate(&mut self, layout: &Layout) -> Option<(&[u8], Masks)> {
        loop {
            if self.done {
                return None;
            }
            if self.depth == self.limit {
                let m = self.masks[self.limit];
                if self.depth == self.floor {
                    self.done = true;
                } else {
                    self.depth -= 1;
                }
                return Some((&self.choice[..self.limit], m));
            }
            let d = self.depth;
            if self.next[d] >= 3 {
                self.next[d] = 0;
                if d == self.floor {
                    self.done = true;
                    return None;
                }
                self.depth -= 1;
                continue;
            }
            let c = self.next[d];
            self.next[d] += 1;
            if let Some(m) = self.extend(layout, d, c) {
                self.masks[d + 1] = m;
                self.choice[d] = c;
                self.depth += 1;
            }
        }
    }
}

/// Every valid assignment of the first `k` pairs, in enumeration order.
fn prefixes(layout: &Layout, k: usize) -> Vec<Vec<u8>> {
    let mut it = EdgeSets::new(layout, k, &[]);
    let mut out = Vec::new();
    while let Some((c, _)) = it.next_candidate(layout) {
        out.push(c.to_vec());
    }
    out
}

/// Streaming iterator over enumerated DAGs.
pub struct DagIter {
    layouts: VecDeque<Layout>,
    current: Option<(Layout, EdgeSets)>,
}

impl Iterator for DagIter {
    type Item = Dag;

    fn next(&mut self) -> Option<Dag> {
        loop {
            if self.current.is_none() {
                let layout = self.layouts.pop_front()?;
                let sets = EdgeSets::new(&layout, layout.pairs.len(), &[]);
                self.current = Some((layout, sets));
            }
            let (layout, sets) = self.current.as_mut().expect("set above");
            if let Some((c, _)) = sets.next_candidate(layout) {
                return Some(layout.build(c));
            }
            self.current = None;
        }
    }
}

/// Every labeled DAG within the bounds, block by block: latent count
/// ascending, then selection count ascending; within a block, edge
/// assignments in lexicographic pair order (none, forward, backward).
pub fn enumerate_dags(b: &EnumBounds) -> Result<DagIter> {
    let observed = default_observed_names(b.n_observed);
    let layouts = b
        .blocks()
        .into_iter()
        .map(|(k, m)| Layout::new(b.names(&observed, k, m), b.edge_constraint, &BTreeSet::new()))
        .collect();
    Ok(DagIter {
        layouts,
        current: None,
    })
}

/// Expected pairwise atoms, indexed `[pair][y-mask]` over observed positions.
struct AtomTable {
    n_obs: usize,
    pairs: Vec<(usize, usize)>,
    expected: Vec<Vec<bool>>,
}

impl AtomTable {
    fn new(cond: &CiSet) -> Result<Self> {
        let n = cond.universe().len();
        let atoms: BTreeSet<(usize, usize, u32)> = cond.closed_atoms()?.into_iter().collect();
        let mut pairs = Vec::new();
        let mut expected = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                pairs.push((a, b));
                expected.push((0..1u32 << n).map(|y| atoms.contains(&(a, b, y))).collect());
            }
        }
        Ok(AtomTable {
            n_obs: n,
            pairs,
            expected,
        })
    }

    /// Observed pairs that can never be adjacent.
    fn forbidden(&self) -> BTreeSet<(usize, usize)> {
        self.pairs
            .iter()
            .zip(&self.expected)
            .filter(|(_, e)| e.iter().any(|&x| x))
            .map(|(&p, _)| p)
            .collect()
    }

    fn matches(&self, n: usize, sel: u16, m: &Masks) -> bool {
        // Independences first: they fail fastest on dense candidates.
        for want in [true, false] {
            for (pi, &(a, b)) in self.pairs.iter().enumerate() {
                let others = ((1u16 << self.n_obs) - 1) & !(1 << a) & !(1 << b);
                let mut y = others;
                loop {
                    if self.expected[pi][y as usize] == want && mask_dsep(n, m, a, b, y | sel) != want {
                        return false;
                    }
                    if y == 0 {
                        break;
                    }
                    y = (y - 1) & others;
                }
            }
        }
        true
    }
}

/// `a ⊥ b | cond` by separation in the moralised ancestral graph.
fn mask_dsep(n: usize, m: &Masks, a: usize, b: usize, cond: u16) -> bool {
    let targets = cond | (1 << a) | (1 << b);
    let mut anc = 0u16;
    for w in 0..n {
        if m.reach[w] & targets != 0 {
            anc |= 1 << w;
        }
    }
    let mut nbr = [0u16; MAX_VERTICES];
    for v in 0..n {
        if anc & (1 << v) == 0 {
            continue;
        }
        let ps = m.parents[v];
        nbr[v] |= ps;
        let mut rest = ps;
        while rest != 0 {
            let p = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            nbr[p] |= (1 << v) | (ps & !(1 << p));
        }
    }
    let mut seen = 1u16 << a;
    let mut frontier = seen;
    while frontier != 0 {
        let mut next = 0u16;
        let mut f = frontier;
        while f != 0 {
            let u = f.trailing_zeros() as usize;
            f &= f - 1;
            next |= nbr[u];
        }
        next &= !seen & !cond;
        if next & (1 << b) != 0 {
            return false;
        }
        seen |= next;
        frontier = next;
    }
    true
}

/// Every enumerated DAG whose observable independencies are exactly the
/// closure of `cond`. Observed vertices take `cond`'s names, in order.
pub fn equiv_members(cond: &CiSet, b: &EnumBounds) -> Result<Vec<Dag>> {
    if cond.universe().len() != b.n_observed {
        return Err(Error::UniverseMismatch(format!(
            "CI set has {} variables, bounds expect {}",
            cond.universe().len(),
            b.n_observed
        )));
    }
    let table = AtomTable::new(cond)?;
    let forbidden = table.forbidden();
    let mut out = Vec::new();
    for (k, m) in b.blocks() {
        let layout = Layout::new(b.names(cond.universe(), k, m), b.edge_constraint, &forbidden);
        let split = layout.pairs.len().min(MAX_PREFIX_PAIRS);
        let chunks: Vec<Vec<Dag>> = prefixes(&layout, split)
            .par_iter()
            .map(|pre| {
                let mut it = EdgeSets::new(&layout, layout.pairs.len(), pre);
                let mut found = Vec::new();
                while let Some((c, masks)) = it.next_candidate(&layout) {
                    if table.matches(layout.n, layout.sel_mask, &masks) {
                        found.push(layout.build(c));
                    }
                }
                found
            })
            .collect();
        out.extend(chunks.into_iter().flatten());
    }
    Ok(out)
}

/// Outcome of one named check across all class members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub id: &'static str,
    pub checked: u64,
    pub failure: Option<Failure>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub detail: String,
    pub counterexample: Dag,
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub class_size: usize,
    pub bounds: Option<EnumBounds>,
    pub min_latent: usize,
    pub checks: Vec<CheckOutcome>,
    pub elapsed: Duration,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CheckOutcome::passed)
    }

    pub fn check(&self, id: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.id == id)
    }

    /// Line-oriented rendering without timing, so identical inputs give
    /// identical text.
    pub fn to_text(&self) -> String {
        let mut out = format!("CLASS size={} min_latent={}", self.class_size, self.min_latent);
        if let Some(b) = &self.bounds {
            out.push_str(&format!(" bounds={b}"));
        }
        out.push('\n');
        for c in &self.checks {
            match &c.failure {
                None => out.push_str(&format!("CHECK id={} status=pass checked={}\n", c.id, c.checked)),
                Some(f) => out.push_str(&format!(
                    "CHECK id={} status=fail checked={} detail=\"{}\" counterexample={}\n",
                    c.id,
                    c.checked,
                    f.detail,
                    emit_graph_compact(&f.counterexample)
                )),
            }
        }
        out.push_str(&format!(
            "RESULT {}\n",
            if self.all_passed() { "pass" } else { "fail" }
        ));
        out
    }
}

const CHECK_IDS: [&str; 9] = [
    "iii",
    "v",
    "vi",
    "vii",
    "theorem1",
    "theorem2",
    "theorem3",
    "theorem4-6",
    "theorem5",
];

/// Per-member tallies, merged in member order.
type Tally = Vec<(u64, Option<String>)>;

fn directed_reach(g: &Dag, from: usize, blocked: &dyn Fn(usize) -> bool) -> Vec<bool> {
    let mut seen = vec![false; g.n()];
    seen[from] = true;
    let mut stack = vec![from];
    while let Some(u) = stack.pop() {
        for &c in g.children(u).expect("valid vertex") {
            if !seen[c] && !blocked(c) {
                seen[c] = true;
                stack.push(c);
            }
        }
    }
    seen
}

fn check_member(p: &Poipg, g: &Dag, claims: &[crate::query::CausalClaim]) -> Result<Tally> {
    let n = p.n();
    let obs: Vec<usize> = p
        .names()
        .iter()
        .map(|name| g.id_of(name))
        .collect::<Result<_>>()?;
    let sel = g.selection();
    let is_sel = |v: usize| g.role(v) == Role::Selection;
    let mut tally: Tally = vec![(0, None); CHECK_IDS.len()];
    let mut record = |idx: usize, ok: bool, detail: &dyn Fn() -> String| {
        tally[idx].0 += 1;
        if !ok && tally[idx].1.is_none() {
            tally[idx].1 = Some(detail());
        }
    };

    let mut ori: BTreeMap<(usize, usize), BTreeSet<InducingPathOrientation>> = BTreeMap::new();
    for a in 0..n {
        for b in a + 1..n {
            ori.insert((a, b), inducing_path_orientations(g, obs[a], obs[b])?);
        }
    }
    // Orientations as seen from (x, y): (into x, into y).
    let seen_from = |x: usize, y: usize| -> Vec<(bool, bool)> {
        let (lo, hi) = (x.min(y), x.max(y));
        ori[&(lo, hi)]
            .iter()
            .map(|o| {
                if x < y {
                    (o.into_a, o.into_b)
                } else {
                    (o.into_b, o.into_a)
                }
            })
            .collect()
    };
    let nm = |v: usize| p.name(v);

    for a in 0..n {
        for b in a + 1..n {
            let exists = !ori[&(a, b)].is_empty();
            let adjacent = p.graph().is_adjacent(a, b);
            record(0, adjacent == exists, &|| {
                format!(
                    "{}-{}: adjacent={adjacent} but inducing path exists={exists}",
                    nm(a),
                    nm(b)
                )
            });
            let dep = dependent_given_every_subset(g, obs[a], obs[b])?;
            record(4, dep == exists, &|| {
                format!(
                    "{}-{}: inducing path={exists} but always dependent={dep}",
                    nm(a),
                    nm(b)
                )
            });
        }
    }
    for (a, b, _, _) in p.edges() {
        for (x, y) in [(a, b), (b, a)] {
            // mark at y on x - y
            match p.graph().mark(x, y) {
                Some(EndpointMark::Tail) => {
                    let ok = seen_from(x, y).iter().all(|&(_, into_y)| !into_y);
                    record(1, ok, &|| {
                        format!(
                            "tail at {} on {}-{} but an inducing path is into it",
                            nm(y),
                            nm(x),
                            nm(y)
                        )
                    });
                }
                Some(EndpointMark::Arrow) => {
                    let ok = seen_from(x, y).iter().all(|&(_, into_y)| into_y);
                    record(2, ok, &|| {
                        format!(
                            "arrow at {} on {}-{} but an inducing path is out of it",
                            nm(y),
                            nm(x),
                            nm(y)
                        )
                    });
                }
                _ => {}
            }
        }
    }
    for &(x, y, z) in p.noncolliders() {
        let u = seen_from(x, y).iter().any(|&(_, into_y)| into_y);
        let v = seen_from(z, y).iter().any(|&(_, into_y)| into_y);
        record(3, !(u && v), &|| {
            format!(
                "non-collider <{},{},{}> has inducing paths into {} from both sides",
                nm(x),
                nm(y),
                nm(z),
                nm(y)
            )
        });
    }

    for c in claims {
        let (a, b) = (obs[c.subject()], obs[c.object()]);
        let line = c.to_string();
        match c.kind() {
            ClaimKind::DefiniteCause => {
                let reach = directed_reach(g, a, &|_| false);
                let ok = reach[b] && !sel.iter().any(|&s| reach[s]);
                record(5, ok, &|| format!("{line} fails"));
            }
            ClaimKind::NoCauseEitherWay => {
                let ok = !directed_reach(g, a, &|_| false)[b] && !directed_reach(g, b, &|_| false)[a];
                record(6, ok, &|| format!("{line} fails"));
            }
            ClaimKind::LatentConfounder => {
                record(6, !g.latent().is_empty(), &|| {
                    format!("{line} fails: no latent variable")
                });
            }
            ClaimKind::AllPathsHitS => {
                let ok = !directed_reach(g, a, &is_sel)[b];
                record(8, ok, &|| format!("{line} fails"));
            }
            ClaimKind::PathsThroughCHitS => {
                let from_a = directed_reach(g, a, &is_sel);
                let blocker: Vec<usize> = c.blocker().into_iter().flatten().map(|&v| obs[v]).collect();
                let ok = blocker
                    .iter()
                    .all(|&cv| !from_a[cv] || !directed_reach(g, cv, &is_sel)[b]);
                record(7, ok, &|| format!("{line} fails"));
            }
            ClaimKind::AllPathsHitSorC => {
                let blocker: VertexSet = c.blocker().into_iter().flatten().map(|&v| obs[v]).collect();
                let ok = !directed_reach(g, a, &|v| is_sel(v) || blocker.contains(&v))[b];
                record(7, ok, &|| format!("{line} fails"));
            }
        }
    }
    Ok(tally)
}

/// Checks `p` against every member: adjacency and mark conditions,
/// non-collider triples, the subset characterisation of inducing paths, and
/// every claim derivable from `p`.
pub fn verify_poipg(p: &Poipg, members: &[Dag]) -> Result<VerificationReport> {
    let start = Instant::now();
    if members.is_empty() {
        return Err(Error::InvalidArgument(
            "no class members to verify against".into(),
        ));
    }
    let want: BTreeSet<&str> = p.names().iter().map(String::as_str).collect();
    for g in members {
        let have: BTreeSet<&str> = g.observed().into_iter().map(|v| g.name(v)).collect();
        if have != want {
            return Err(Error::UniverseMismatch(format!(
                "member observes {{{}}}, POIPG has {{{}}}",
                have.into_iter().collect::<Vec<_>>().join(","),
                want.into_iter().collect::<Vec<_>>().join(",")
            )));
        }
    }
    let claims = all_claims(p)?;
    let tallies: Vec<Tally> = members
        .par_iter()
        .map(|g| check_member(p, g, &claims))
        .collect::<Result<_>>()?;
    let mut checks: Vec<CheckOutcome> = CHECK_IDS
        .iter()
        .map(|&id| CheckOutcome {
            id,
            checked: 0,
            failure: None,
        })
        .collect();
    for (g, t) in members.iter().zip(tallies) {
        for (c, (count, fail)) in checks.iter_mut().zip(t) {
            c.checked += count;
            if c.failure.is_none() {
                if let Some(detail) = fail {
                    c.failure = Some(Failure {
                        detail,
                        counterexample: g.clone(),
                    });
                }
            }
        }
    }
    Ok(VerificationReport {
        class_size: members.len(),
        bounds: None,
        min_latent: members.iter().map(|g| g.latent().len()).min().unwrap_or(0),
        checks,
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ci::CiStatement;
    use crate::fci::{fci, FciConfig};
    use crate::graph::MixedGraph;
    use crate::oracle::table_oracle;
    use crate::separation::observable_ci_set;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn st(x: &[usize], z: &[usize], y: &[usize]) -> CiStatement {
        CiStatement::independence(x, z, y).unwrap()
    }

    fn cond1() -> CiSet {
        CiSet::new(names(&["A", "B"])).unwrap()
    }

    #[test]
    fn labeled_dag_counts() {
        let counts: Vec<usize> = (1..=5)
            .map(|n| {
                enumerate_dags(&EnumBounds::new(n, 0, 0).unwrap())
                    .unwrap()
                    .count()
            })
            .collect();
        assert_eq!(counts, vec![1, 3, 25, 543, 29281]);
    }

    #[test]
    fn two_vertex_enumeration() {
        let dags: Vec<Dag> = enumerate_dags(&EnumBounds::new(2, 0, 0).unwrap())
            .unwrap()
            .collect();
        assert_eq!(dags.len(), 3);
        assert_eq!(dags[0].edge_count(), 0);
        assert_eq!(dags[1].edges(), vec![(0, 1)]);
        assert_eq!(dags[2].edges(), vec![(1, 0)]);
    }

    #[test]
    fn guard_and_constraints() {
        assert!(matches!(EnumBounds::new(5, 2, 2), Err(Error::GuardExceeded(_))));
        assert!(EnumBounds::new(0, 0, 0).is_err());
        let free = enumerate_dags(&EnumBounds::new(1, 0, 1).unwrap())
            .unwrap()
            .count();
        let sinks = enumerate_dags(
            &EnumBounds::new(1, 0, 1)
                .unwrap()
                .with_constraint(EdgeConstraint::SelectionSinks),
        )
        .unwrap()
        .count();
        assert_eq!((free, sinks), (1 + 3, 1 + 2));
    }

    #[test]
    fn selection_names() {
        let last: Dag = enumerate_dags(&EnumBounds::new(1, 1, 1).unwrap())
            .unwrap()
            .last()
            .unwrap();
        assert_eq!(last.name(1), "L1");
        assert_eq!(last.name(2), "S");
        let last: Dag = enumerate_dags(&EnumBounds::new(1, 0, 2).unwrap())
            .unwrap()
            .last()
            .unwrap();
        assert_eq!(last.name(2), "S2");
    }

    #[test]
    fn cond1_members() {
        let m = equiv_members(&cond1(), &EnumBounds::new(2, 0, 0).unwrap()).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[0].edges(), vec![(0, 1)]);
        assert_eq!(m[1].edges(), vec![(1, 0)]);

        let m = equiv_members(&cond1(), &EnumBounds::new(2, 1, 1).unwrap()).unwrap();
        let has = |edges: &[(&str, &str)], roles: &[(&str, Role)]| {
            m.iter().any(|g| {
                g.n() == roles.len()
                    && roles
                        .iter()
                        .all(|(n, r)| g.id_of(n).is_ok_and(|v| g.role(v) == *r))
                    && g.edge_count() == edges.len()
                    && edges
                        .iter()
                        .all(|(p, c)| g.has_edge(g.id_of(p).unwrap(), g.id_of(c).unwrap()))
            })
        };
        let latent_fork = has(
            &[("L1", "A"), ("L1", "B")],
            &[("A", Role::Observed), ("B", Role::Observed), ("L1", Role::Latent)],
        );
        let selection_collider = has(
            &[("A", "S"), ("B", "S")],
            &[
                ("A", Role::Observed),
                ("B", Role::Observed),
                ("S", Role::Selection),
            ],
        );
        assert!(latent_fork && selection_collider);
    }

    #[test]
    fn cond3_has_no_latent_free_member() {
        let cond3 = CiSet::from_statements(
            names(&["A", "B", "C", "D"]),
            [st(&[3], &[0, 1], &[]), st(&[0], &[2, 3], &[])],
        )
        .unwrap();
        assert!(equiv_members(&cond3, &EnumBounds::new(4, 0, 0).unwrap())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn universe_mismatch() {
        assert!(matches!(
            equiv_members(&cond1(), &EnumBounds::new(3, 0, 0).unwrap()),
            Err(Error::UniverseMismatch(_))
        ));
    }

    #[test]
    fn membership_second_pass_and_closure() {
        let b = EnumBounds::new(3, 1, 1).unwrap();
        let mut seen = 0;
        for g in enumerate_dags(&b).unwrap().step_by(97) {
            let ci = observable_ci_set(&g, 8).unwrap();
            let members = equiv_members(&ci, &b).unwrap();
            assert!(members.contains(&g));
            let closed = ci.closure().unwrap();
            for m in members.iter().step_by(7) {
                assert_eq!(observable_ci_set(m, 8).unwrap().closure().unwrap(), closed);
            }
            seen += 1;
        }
        assert!(seen > 10);
    }

    #[test]
    fn mask_dsep_agrees() {
        use crate::separation::d_separated;
        let b = EnumBounds::new(3, 1, 1).unwrap();
        let layout = Layout::new(
            b.names(&default_observed_names(3), 1, 1),
            EdgeConstraint::None,
            &BTreeSet::new(),
        );
        let mut it = EdgeSets::new(&layout, layout.pairs.len(), &[]);
        let mut n = 0;
        while let Some((c, masks)) = it.next_candidate(&layout) {
            let g = layout.build(c);
            for cond in (0..32u16).filter(|y| y & 3 == 0) {
                let cs: VertexSet = (0..5).filter(|v| cond & (1 << v) != 0).collect();
                let fast = mask_dsep(5, &masks, 0, 1, cond);
                let slow = d_separated(&g, &[0].into(), &[1].into(), &cs).unwrap();
                assert_eq!(fast, slow);
            }
            n += 1;
        }
        assert_eq!(n, 29281);
    }

    #[test]
    fn report_on_cond1() {
        let p = fci(&table_oracle(cond1()), &FciConfig::exact()).unwrap().poipg;
        let members = equiv_members(&cond1(), &EnumBounds::new(2, 1, 1).unwrap()).unwrap();
        let r = verify_poipg(&p, &members).unwrap();
        assert!(r.all_passed(), "{}", r.to_text());
        assert!(r.to_text().ends_with("RESULT pass\n"));
    }

    #[test]
    fn corrupted_cond2_fails_with_generator() {
        let cond2 = CiSet::from_statements(
            names(&["A", "B", "C", "D"]),
            [st(&[3], &[0, 1], &[2]), st(&[0], &[1], &[])],
        )
        .unwrap();
        let members = equiv_members(&cond2, &EnumBounds::new(4, 0, 0).unwrap()).unwrap();
        assert_eq!(members.len(), 1);
        let mut g = MixedGraph::empty(4);
        g.add_edge(0, 2, EndpointMark::Circle, EndpointMark::Arrow);
        g.add_edge(1, 2, EndpointMark::Circle, EndpointMark::Arrow);
        g.add_edge(2, 3, EndpointMark::Arrow, EndpointMark::Tail);
        let bad = Poipg::new(names(&["A", "B", "C", "D"]), g, []).unwrap();
        let r = verify_poipg(&bad, &members).unwrap();
        assert!(!r.all_passed());
        let collider_chain = Dag::from_names(
            &[
                ("A", Role::Observed),
                ("B", Role::Observed),
                ("C", Role::Observed),
                ("D", Role::Observed),
            ],
            &[("A", "C"), ("B", "C"), ("C", "D")],
        )
        .unwrap();
        for c in r.checks.iter().filter(|c| !c.passed()) {
            assert_eq!(c.failure.as_ref().unwrap().counterexample, collider_chain);
        }
        assert!(!r.check("theorem2").unwrap().passed());
    }
}
