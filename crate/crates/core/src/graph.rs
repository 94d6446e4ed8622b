//! Role-tagged DAGs, mixed graphs with endpoint marks, and paths.
//!
//! Vertices are dense `usize` ids `0..n`. Names only matter at I/O
//! boundaries. Every graph is immutable once built; the only mutable graph
//! type is [`MixedGraph`], the working graph of the discovery procedure.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// A set of vertex ids with deterministic iteration order.
pub type VertexSet = BTreeSet<usize>;

/// The part a variable plays in the causal model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Observed,
    Latent,
    Selection,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Observed => "observed",
            Role::Latent => "latent",
            Role::Selection => "selection",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Variable {
    id: usize,
    name: String,
    role: Role,
}

impl Variable {
    pub fn id(&self) -> usize {
        self.id
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn role(&self) -> Role {
        self.role
    }
}

/// Accumulates vertices and edges; [`DagBuilder::build`] validates the batch.
#[derive(Debug, Default, Clone)]
pub struct DagBuilder {
    vars: Vec<Variable>,
    by_name: BTreeMap<String, usize>,
    edges: Vec<(usize, usize)>,
    collapse_selection: bool,
}

impl DagBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Merge every selection variable into a single selection vertex `S` on build.
    pub fn collapse_selection(mut self, yes: bool) -> Self {
        self.collapse_selection = yes;
        self
    }

    pub fn add_vertex(&mut self, name: &str, role: Role) -> Result<usize> {
        if name.is_empty() {
            return Err(Error::EmptyName);
        }
        if self.by_name.contains_key(name) {
            return Err(Error::DuplicateName(name.to_string()));
        }
        let id = self.vars.len();
        self.vars.push(Variable {
            id,
            name: name.to_string(),
            role,
        });
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn add_edge(&mut self, parent: usize, child: usize) -> Result<()> {
        let n = self.vars.len();
        for v in [parent, child] {
            if v >= n {
                return Err(Error::UnknownVertex(v));
            }
        }
        self.edges.push((parent, child));
        Ok(())
    }

    pub fn add_edge_by_name(&mut self, parent: &str, child: &str) -> Result<()> {
        let p = self.lookup(parent)?;
        let c = self.lookup(child)?;
        self.add_edge(p, c)
    }

    fn lookup(&self, name: &str) -> Result<usize> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    pub fn build(self) -> Result<Dag> {
        let n = self.vars.len();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        for &(p, c) in &self.edges {
            if p == c {
                return Err(Error::SelfLoop(self.vars[p].name.clone()));
            }
            if !seen.insert((p, c)) {
                return Err(Error::DuplicateEdge(
                    self.vars[p].name.clone(),
                    self.vars[c].name.clone(),
                ));
            }
            parents[c].push(p);
            children[p].push(c);
        }
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort_unstable();
        }
        let dag = Dag {
            vars: self.vars,
            parents,
            children,
        };
        if let Some(v) = dag.find_cycle_vertex() {
            return Err(Error::Cycle(dag.vars[v].name.clone()));
        }
        if self.collapse_selection {
            dag.collapse_selection()
        } else {
            Ok(dag)
        }
    }
}

/// A directed acyclic graph whose vertices carry a [`Role`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    vars: Vec<Variable>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
}

impl Dag {
    /// Convenience constructor from `(name, role)` pairs and `(parent, child)` names.
    pub fn from_names(vars: &[(&str, Role)], edges: &[(&str, &str)]) -> Result<Dag> {
        let mut b = DagBuilder::new();
        for &(name, role) in vars {
            b.add_vertex(name, role)?;
        }
        for &(p, c) in edges {
            b.add_edge_by_name(p, c)?;
        }
        b.build()
    }

    pub fn n(&self) -> usize {
        self.vars.len()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn variable(&self, v: usize) -> Result<&Variable> {
        self.vars.get(v).ok_or(Error::UnknownVertex(v))
    }

    pub fn name(&self, v: usize) -> &str {
        &self.vars[v].name
    }

    pub fn role(&self, v: usize) -> Role {
        self.vars[v].role
    }

    pub fn id_of(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    pub fn vertices_with_role(&self, role: Role) -> Vec<usize> {
        self.vars
            .iter()
            .filter(|v| v.role == role)
            .map(|v| v.id)
            .collect()
    }

    pub fn observed(&self) -> Vec<usize> {
        self.vertices_with_role(Role::Observed)
    }

    pub fn latent(&self) -> Vec<usize> {
        self.vertices_with_role(Role::Latent)
    }

    pub fn selection(&self) -> Vec<usize> {
        self.vertices_with_role(Role::Selection)
    }

    pub fn parents(&self, v: usize) -> Result<&[usize]> {
        self.check_vertex(v)?;
        Ok(&self.parents[v])
    }

    pub fn children(&self, v: usize) -> Result<&[usize]> {
        self.check_vertex(v)?;
        Ok(&self.children[v])
    }

    pub(crate) fn parents_of(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    pub(crate) fn children_of(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn has_edge(&self, parent: usize, child: usize) -> bool {
        self.children
            .get(parent)
            .is_some_and(|c| c.binary_search(&child).is_ok())
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.has_edge(u, v) || self.has_edge(v, u)
    }

    /// All edges as `(parent, child)`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (p, cs) in self.children.iter().enumerate() {
            out.extend(cs.iter().map(|&c| (p, c)));
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.children.iter().map(Vec::len).sum()
    }

    /// `v` together with everything reachable along directed edges.
    pub fn descendants(&self, v: usize) -> Result<VertexSet> {
        self.check_vertex(v)?;
        Ok(self.reach(&[v], |u| &self.children[u]).into_iter().collect())
    }

    /// `v` together with everything that reaches it along directed edges.
    pub fn ancestors(&self, v: usize) -> Result<VertexSet> {
        self.check_vertex(v)?;
        Ok(self.reach(&[v], |u| &self.parents[u]).into_iter().collect())
    }

    /// Indicator vector of the ancestors of `seeds` (seeds included).
    pub(crate) fn ancestor_mask<'a, I>(&self, seeds: I) -> Vec<bool>
    where
        I: IntoIterator<Item = &'a usize>,
    {
        let seeds: Vec<usize> = seeds.into_iter().copied().collect();
        let mut mask = vec![false; self.n()];
        for v in self.reach(&seeds, |u| &self.parents[u]) {
            mask[v] = true;
        }
        mask
    }

    fn reach<'a, F>(&'a self, seeds: &[usize], next: F) -> Vec<usize>
    where
        F: Fn(usize) -> &'a [usize],
    {
        let mut seen = vec![false; self.n()];
        let mut stack: Vec<usize> = Vec::new();
        for &s in seeds {
            if !seen[s] {
                seen[s] = true;
                stack.push(s);
            }
        }
        let mut out = Vec::new();
        while let Some(u) = stack.pop() {
            out.push(u);
            for &w in next(u) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        out
    }

    /// Kahn's algorithm with the smallest ready id taken first.
    pub fn topological_order(&self) -> Vec<usize> {
        self.kahn().0
    }

    fn kahn(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.n();
        let mut indeg: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &c in &self.children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        (order, indeg)
    }

    fn find_cycle_vertex(&self) -> Option<usize> {
        let (order, indeg) = self.kahn();
        if order.len() == self.n() {
            None
        } else {
            indeg.iter().position(|&d| d > 0)
        }
    }

    /// Merge all selection vertices into one vertex named `S`, appended after
    /// the non-selection vertices. Graphs with at most one selection vertex
    /// are returned unchanged.
    pub fn collapse_selection(&self) -> Result<Dag> {
        let sel = self.selection();
        if sel.len() <= 1 {
            return Ok(self.clone());
        }
        let mut b = DagBuilder::new();
        let mut map = vec![0usize; self.n()];
        for v in &self.vars {
            if v.role != Role::Selection {
                map[v.id] = b.add_vertex(&v.name, v.role)?;
            }
        }
        let mut s_name = "S".to_string();
        while b.by_name.contains_key(&s_name) {
            s_name.push('_');
        }
        let s = b.add_vertex(&s_name, Role::Selection)?;
        for &v in &sel {
            map[v] = s;
        }
        let mut edges = BTreeSet::new();
        for (p, c) in self.edges() {
            let (p, c) = (map[p], map[c]);
            if p != c {
                edges.insert((p, c));
            }
        }
        for (p, c) in edges {
            b.add_edge(p, c)?;
        }
        b.build()
    }
}

/// One end of an edge in a mixed graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EndpointMark {
    Tail,
    Arrow,
    Circle,
}

impl EndpointMark {
    pub fn symbol(self) -> char {
        match self {
            EndpointMark::Tail => '-',
            EndpointMark::Arrow => '>',
            EndpointMark::Circle => 'o',
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EndpointMark::Tail => "tail",
            EndpointMark::Arrow => "arrow",
            EndpointMark::Circle => "circle",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "tail" => Some(EndpointMark::Tail),
            "arrow" => Some(EndpointMark::Arrow),
            "circle" => Some(EndpointMark::Circle),
            _ => None,
        }
    }
}

impl fmt::Display for EndpointMark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// Whether a pair of marks may sit on one edge: a tail only ever faces an arrow.
pub fn legal_mark_pair(a: EndpointMark, b: EndpointMark) -> bool {
    use EndpointMark::*;
    !matches!((a, b), (Tail, Tail) | (Tail, Circle) | (Circle, Tail))
}

/// Mixed graph with endpoint marks, stored as a dense mark matrix.
///
/// `mark(a, b)` is the mark at `b` on the edge between `a` and `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedGraph {
    n: usize,
    ends: Vec<Option<EndpointMark>>,
}

impl MixedGraph {
    pub fn empty(n: usize) -> Self {
        MixedGraph {
            n,
            ends: vec![None; n * n],
        }
    }

    pub fn complete(n: usize, mark: EndpointMark) -> Self {
        let mut g = Self::empty(n);
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    g.ends[a * n + b] = Some(mark);
                }
            }
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.ends[a * self.n + b].is_some()
    }

    /// The mark at `b` on the edge `a - b`, if the edge exists.
    pub fn mark(&self, a: usize, b: usize) -> Option<EndpointMark> {
        self.ends[a * self.n + b]
    }

    pub fn mark_is(&self, a: usize, b: usize, m: EndpointMark) -> bool {
        self.mark(a, b) == Some(m)
    }

    pub fn add_edge(&mut self, a: usize, b: usize, mark_a: EndpointMark, mark_b: EndpointMark) {
        self.ends[b * self.n + a] = Some(mark_a);
        self.ends[a * self.n + b] = Some(mark_b);
    }

    /// Sets the mark at `b` on an existing edge `a - b`.
    pub fn set_mark(&mut self, a: usize, b: usize, m: EndpointMark) {
        debug_assert!(self.is_adjacent(a, b));
        self.ends[a * self.n + b] = Some(m);
    }

    pub fn remove_edge(&mut self, a: usize, b: usize) {
        self.ends[a * self.n + b] = None;
        self.ends[b * self.n + a] = None;
    }

    pub fn reset_marks(&mut self, m: EndpointMark) {
        for e in self.ends.iter_mut().filter(|e| e.is_some()) {
            *e = Some(m);
        }
    }

    /// Sorted neighbours of `a`.
    pub fn neighbors(&self, a: usize) -> Vec<usize> {
        (0..self.n).filter(|&b| self.is_adjacent(a, b)).collect()
    }

    /// All edges as `(a, b, mark at a, mark at b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize, EndpointMark, EndpointMark)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                if let (Some(ma), Some(mb)) = (self.mark(b, a), self.mark(a, b)) {
                    out.push((a, b, ma, mb));
                }
            }
        }
        out
    }

    /// `b` is a collider on the path segment `a - b - c`.
    pub fn is_collider(&self, a: usize, b: usize, c: usize) -> bool {
        self.mark_is(a, b, EndpointMark::Arrow) && self.mark_is(c, b, EndpointMark::Arrow)
    }
}

/// A partially oriented inducing path graph over observed variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poipg {
    names: Vec<String>,
    graph: MixedGraph,
    noncolliders: BTreeSet<(usize, usize, usize)>,
}

impl Poipg {
    /// Validates names, mark legality and non-collider adjacency.
    pub fn new(
        names: Vec<String>,
        graph: MixedGraph,
        noncolliders: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Result<Poipg> {
        if names.len() != graph.n() {
            return Err(Error::InvalidGraph(format!(
                "{} names for {} vertices",
                names.len(),
                graph.n()
            )));
        }
        let mut seen = BTreeSet::new();
        for name in &names {
            if name.is_empty() {
                return Err(Error::EmptyName);
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        for (a, b, ma, mb) in graph.edges() {
            if !legal_mark_pair(ma, mb) {
                return Err(Error::IllegalMarks {
                    a: names[a].clone(),
                    b: names[b].clone(),
                    mark_a: ma.symbol(),
                    mark_b: mb.symbol(),
                });
            }
        }
        let mut set = BTreeSet::new();
        for (x, y, z) in noncolliders {
            let (x, z) = if x <= z { (x, z) } else { (z, x) };
            for v in [x, y, z] {
                graph.check_vertex(v)?;
            }
            if x == z || x == y || y == z {
                return Err(Error::InvalidGraph(format!(
                    "degenerate non-collider triple ({x}, {y}, {z})"
                )));
            }
            if !graph.is_adjacent(x, y) || !graph.is_adjacent(y, z) {
                return Err(Error::InvalidGraph(format!(
                    "non-collider triple <{}, {}, {}> is not a path",
                    names[x], names[y], names[z]
                )));
            }
            set.insert((x, y, z));
        }
        Ok(Poipg {
            names,
            graph,
            noncolliders: set,
        })
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn id_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    /// Every POIPG vertex is an observed variable.
    pub fn variables(&self) -> Vec<Variable> {
        self.names
            .iter()
            .enumerate()
            .map(|(id, name)| Variable {
                id,
                name: name.clone(),
                role: Role::Observed,
            })
            .collect()
    }

    pub fn graph(&self) -> &MixedGraph {
        &self.graph
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        self.graph.check_vertex(v)
    }

    /// `(mark at a, mark at b)` for the edge `a - b`.
    pub fn edge(&self, a: usize, b: usize) -> Option<(EndpointMark, EndpointMark)> {
        Some((self.graph.mark(b, a)?, self.graph.mark(a, b)?))
    }

    pub fn edges(&self) -> Vec<(usize, usize, EndpointMark, EndpointMark)> {
        self.graph.edges()
    }

    pub fn noncolliders(&self) -> &BTreeSet<(usize, usize, usize)> {
        &self.noncolliders
    }

    pub fn is_noncollider(&self, x: usize, y: usize, z: usize) -> bool {
        let (x, z) = if x <= z { (x, z) } else { (z, x) };
        self.noncolliders.contains(&(x, y, z))
    }

    /// Human-readable edge list, e.g. `A o-> C`.
    pub fn edge_strings(&self) -> Vec<String> {
        self.edges()
            .into_iter()
            .map(|(a, b, ma, mb)| {
                let left = match ma {
                    EndpointMark::Tail => '-',
                    EndpointMark::Arrow => '<',
                    EndpointMark::Circle => 'o',
                };
                format!("{} {}-{} {}", self.names[a], left, mb.symbol(), self.names[b])
            })
            .collect()
    }
}

/// A nonempty acyclic sequence of vertices, consecutive ones adjacent in a [`Dag`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path(Vec<usize>);

impl Path {
    pub fn new(g: &Dag, vertices: Vec<usize>) -> Result<Path> {
        if vertices.is_empty() {
            return Err(Error::InvalidPath("empty path".into()));
        }
        let mut seen = BTreeSet::new();
        for &v in &vertices {
            g.check_vertex(v)?;
            if !seen.insert(v) {
                return Err(Error::InvalidPath(format!("vertex `{}` repeated", g.name(v))));
            }
        }
        for w in vertices.windows(2) {
            if !g.adjacent(w[0], w[1]) {
                return Err(Error::InvalidPath(format!(
                    "`{}` and `{}` are not adjacent",
                    g.name(w[0]),
                    g.name(w[1])
                )));
            }
        }
        Ok(Path(vertices))
    }

    pub fn from_names(g: &Dag, names: &[&str]) -> Result<Path> {
        let ids = names.iter().map(|n| g.id_of(n)).collect::<Result<Vec<_>>>()?;
        Path::new(g, ids)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> usize {
        self.0[0]
    }

    pub fn last(&self) -> usize {
        self.0[self.0.len() - 1]
    }
}

/// Whether both path edges at interior vertex `v` point into `v`.
pub fn is_collider_on(g: &Dag, path: &Path, v: usize) -> Result<bool> {
    let vs = path.vertices();
    let pos = vs
        .iter()
        .position(|&u| u == v)
        .ok_or_else(|| Error::InvalidPath(format!("vertex {v} is not on the path")))?;
    if pos == 0 || pos + 1 == vs.len() {
        return Err(Error::EndpointCollider(v));
    }
    Ok(g.has_edge(vs[pos - 1], v) && g.has_edge(vs[pos + 1], v))
}

/// Breadth-first reachability helper shared by the undirected searches.
pub(crate) fn bfs_reach(n: usize, start: &[usize], mut next: impl FnMut(usize) -> Vec<usize>) -> Vec<bool> {
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for &s in start {
        if !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        for w in next(u) {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}
