//! Discovery of a partially oriented inducing path graph from CI answers.
//!
//! The procedure runs in six fixed stages:
//!
//! 1. start from the complete graph over the oracle universe, all marks `o`;
//! 2. adjacency search with conditioning sets drawn from current neighbours,
//!    sizes ascending, removing an edge at the first independence found;
//! 3. orient unshielded colliders from the recorded separating sets;
//! 4. retest surviving adjacencies with subsets of their possible-d-sep sets;
//! 5. reset every mark to `o`, re-orient colliders and record non-colliders;
//! 6. apply the orientation rules R1-R3 until nothing changes.
//!
//! All iteration is in ascending id order so separating sets, and hence
//! orientations, are reproducible.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{Dag, EndpointMark, MixedGraph, Poipg, VertexSet};
use crate::oracle::{caching_oracle, describe_query, graphical_oracle, CiOracle};

use EndpointMark::{Arrow, Circle, Tail};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConflictPolicy {
    /// Abort with [`Error::OrientationConflict`].
    #[default]
    FailFast,
    /// Keep the mark already in place and record the conflict in the trace.
    WarnKeepFirst,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FciConfig {
    /// Upper bound on conditioning-set size; `None` means unbounded.
    pub max_cond_size: Option<usize>,
    pub conflict_policy: ConflictPolicy,
    /// Merge all selection variables into one before building a graphical oracle.
    pub collapse_selection: bool,
}

impl FciConfig {
    /// Settings for exact (graphical or tabular) oracles.
    pub fn exact() -> Self {
        FciConfig::default()
    }

    /// Settings for statistical oracles: conditioning sets of at most 3,
    /// conflicts tolerated.
    pub fn for_data() -> Self {
        FciConfig {
            max_cond_size: Some(3),
            conflict_policy: ConflictPolicy::WarnKeepFirst,
            collapse_selection: false,
        }
    }
}

/// Separating sets keyed by unordered pair; the first recorded set wins.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SepsetTable {
    map: BTreeMap<(usize, usize), VertexSet>,
}

impl SepsetTable {
    fn key(a: usize, b: usize) -> (usize, usize) {
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// Records `sepset` for `{a, b}` unless one is already present. Returns
    /// whether the entry was new.
    pub fn insert(&mut self, a: usize, b: usize, sepset: VertexSet) -> bool {
        debug_assert!(!sepset.contains(&a) && !sepset.contains(&b));
        match self.map.entry(Self::key(a, b)) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(sepset);
                true
            }
            std::collections::btree_map::Entry::Occupied(_) => false,
        }
    }

    pub fn get(&self, a: usize, b: usize) -> Option<&VertexSet> {
        self.map.get(&Self::key(a, b))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &VertexSet)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Adjacency,
    PossibleDsep,
}

impl Phase {
    fn as_str(self) -> &'static str {
        match self {
            Phase::Adjacency => "adjacency",
            Phase::PossibleDsep => "possible-dsep",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "adjacency" => Some(Phase::Adjacency),
            "possible-dsep" => Some(Phase::PossibleDsep),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    R1,
    R2,
    R3,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::R1 => "R1",
            Rule::R2 => "R2",
            Rule::R3 => "R3",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FciEvent {
    EdgeRemoved {
        a: usize,
        b: usize,
        sepset: VertexSet,
        phase: Phase,
    },
    /// `a *-> c <-* b`
    ColliderOriented {
        a: usize,
        c: usize,
        b: usize,
    },
    /// Every mark back to `o`; recorded non-colliders dropped.
    MarksReset,
    NonCollider {
        a: usize,
        c: usize,
        b: usize,
    },
    /// `mark` placed at `to` on the edge `from - to`.
    RuleFired {
        rule: Rule,
        from: usize,
        to: usize,
        mark: EndpointMark,
    },
    Conflict {
        description: String,
    },
}

/// Ordered log of every structural change made by [`fci`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FciTrace {
    names: Vec<String>,
    events: Vec<FciEvent>,
}

impl FciTrace {
    pub fn events(&self) -> &[FciEvent] {
        &self.events
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Rebuilds the output graph from the initial complete graph.
    pub fn replay(&self) -> Result<Poipg> {
        let n = self.names.len();
        let mut g = MixedGraph::complete(n, Circle);
        let mut noncolliders = BTreeSet::new();
        for e in &self.events {
            match *e {
                FciEvent::EdgeRemoved { a, b, .. } => g.remove_edge(a, b),
                FciEvent::ColliderOriented { a, c, b } => {
                    for x in [a, b] {
                        if g.mark(x, c) != Some(Tail) {
                            g.set_mark(x, c, Arrow);
                        }
                    }
                }
                FciEvent::MarksReset => {
                    g.reset_marks(Circle);
                    noncolliders.clear();
                }
                FciEvent::NonCollider { a, c, b } => {
                    noncolliders.insert((a.min(b), c, a.max(b)));
                }
                FciEvent::RuleFired { from, to, mark, .. } => g.set_mark(from, to, mark),
                FciEvent::Conflict { .. } => {}
            }
        }
        Poipg::new(self.names.clone(), g, noncolliders)
    }

    /// Line-oriented rendering, one event per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&self.render(e));
            out.push('\n');
        }
        out
    }

    fn render(&self, e: &FciEvent) -> String {
        let nm = |v: usize| self.names[v].as_str();
        match e {
            FciEvent::EdgeRemoved { a, b, sepset, phase } => format!(
                "REMOVE edge={}-{} phase={} sepset={{{}}}",
                nm(*a),
                nm(*b),
                phase.as_str(),
                sepset.iter().map(|&v| nm(v)).collect::<Vec<_>>().join(",")
            ),
            FciEvent::ColliderOriented { a, c, b } => {
                format!("COLLIDER triple={},{},{}", nm(*a), nm(*c), nm(*b))
            }
            FciEvent::MarksReset => "RESET".to_string(),
            FciEvent::NonCollider { a, c, b } => {
                format!("NONCOLLIDER triple={},{},{}", nm(*a), nm(*c), nm(*b))
            }
            FciEvent::RuleFired { rule, from, to, mark } => format!(
                "RULE rule={rule} edge={}-{} at={} mark={}",
                nm(*from),
                nm(*to),
                nm(*to),
                mark.as_str()
            ),
            FciEvent::Conflict { description } => format!("CONFLICT {description}"),
        }
    }

    /// Parses [`FciTrace::to_text`] output back into events.
    pub fn parse(names: Vec<String>, text: &str) -> Result<FciTrace> {
        let idx = |s: &str, line: usize| -> Result<usize> {
            names.iter().position(|n| n == s).ok_or_else(|| Error::Parse {
                line,
                message: format!("unknown variable `{s}`"),
            })
        };
        let mut events = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let raw = raw.trim();
            if raw.is_empty() {
                continue;
            }
            let bad = |m: &str| Error::Parse {
                line,
                message: m.to_string(),
            };
            let (kind, rest) = raw.split_once(' ').unwrap_or((raw, ""));
            if kind == "CONFLICT" {
                events.push(FciEvent::Conflict {
                    description: rest.to_string(),
                });
                continue;
            }
            let fields: BTreeMap<&str, &str> = rest
                .split_whitespace()
                .filter_map(|f| f.split_once('='))
                .collect();
            let field = |k: &str| {
                fields
                    .get(k)
                    .copied()
                    .ok_or_else(|| bad(&format!("missing field `{k}`")))
            };
            let pair = |s: &str| -> Result<(usize, usize)> {
                let (a, b) = s.split_once('-').ok_or_else(|| bad("malformed edge"))?;
                Ok((idx(a, line)?, idx(b, line)?))
            };
            let triple = |s: &str| -> Result<(usize, usize, usize)> {
                let v: Vec<&str> = s.split(',').collect();
                if v.len() != 3 {
                    return Err(bad("malformed triple"));
                }
                Ok((idx(v[0], line)?, idx(v[1], line)?, idx(v[2], line)?))
            };
            let ev = match kind {
                "REMOVE" => {
                    let (a, b) = pair(field("edge")?)?;
                    let phase = Phase::parse(field("phase")?).ok_or_else(|| bad("unknown phase"))?;
                    let inner = field("sepset")?
                        .strip_prefix('{')
                        .and_then(|s| s.strip_suffix('}'))
                        .ok_or_else(|| bad("malformed sepset"))?;
                    let sepset = inner
                        .split(',')
                        .filter(|s| !s.is_empty())
                        .map(|s| idx(s, line))
                        .collect::<Result<VertexSet>>()?;
                    FciEvent::EdgeRemoved { a, b, sepset, phase }
                }
                "COLLIDER" => {
                    let (a, c, b) = triple(field("triple")?)?;
                    FciEvent::ColliderOriented { a, c, b }
                }
                "RESET" => FciEvent::MarksReset,
                "NONCOLLIDER" => {
                    let (a, c, b) = triple(field("triple")?)?;
                    FciEvent::NonCollider { a, c, b }
                }
                "RULE" => {
                    let rule = match field("rule")? {
                        "R1" => Rule::R1,
                        "R2" => Rule::R2,
                        "R3" => Rule::R3,
                        _ => return Err(bad("unknown rule")),
                    };
                    let (from, to) = pair(field("edge")?)?;
                    let mark = EndpointMark::parse(field("mark")?).ok_or_else(|| bad("unknown mark"))?;
                    FciEvent::RuleFired { rule, from, to, mark }
                }
                other => return Err(bad(&format!("unknown event `{other}`"))),
            };
            events.push(ev);
        }
        Ok(FciTrace { names, events })
    }
}

/// The mutable state threaded through the orientation stages.
#[derive(Debug, Clone)]
pub struct WorkingGraph {
    pub graph: MixedGraph,
    pub noncolliders: BTreeSet<(usize, usize, usize)>,
    policy: ConflictPolicy,
    names: Vec<String>,
    events: Vec<FciEvent>,
}

/// Counts of what one orientation stage changed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MutationReport {
    pub marks_set: usize,
    pub colliders: usize,
    pub noncolliders: usize,
    pub conflicts: usize,
}

impl MutationReport {
    pub fn changed(&self) -> bool {
        self.marks_set > 0
    }
}

impl WorkingGraph {
    pub fn new(names: Vec<String>, graph: MixedGraph, policy: ConflictPolicy) -> Self {
        WorkingGraph {
            graph,
            noncolliders: BTreeSet::new(),
            policy,
            names,
            events: Vec::new(),
        }
    }

    pub fn events(&self) -> &[FciEvent] {
        &self.events
    }

    fn conflict(
        &mut self,
        report: &mut MutationReport,
        from: usize,
        to: usize,
        existing: EndpointMark,
        requested: EndpointMark,
        rule: &str,
    ) -> Result<()> {
        let edge = format!("{}-{}", self.names[from], self.names[to]);
        if self.policy == ConflictPolicy::FailFast {
            return Err(Error::OrientationConflict {
                edge,
                at: self.names[to].clone(),
                existing: existing.symbol(),
                requested: requested.symbol(),
                rule: rule.to_string(),
            });
        }
        report.conflicts += 1;
        self.events.push(FciEvent::Conflict {
            description: format!(
                "edge={edge} at={} existing={} requested={} by={rule}",
                self.names[to],
                existing.as_str(),
                requested.as_str()
            ),
        });
        Ok(())
    }

    /// Places `mark` at `to` on `from - to`; only a circle may be overwritten.
    fn orient(
        &mut self,
        report: &mut MutationReport,
        rule: Rule,
        from: usize,
        to: usize,
        mark: EndpointMark,
    ) -> Result<()> {
        match self.graph.mark(from, to) {
            Some(m) if m == mark => Ok(()),
            Some(Circle) => {
                self.graph.set_mark(from, to, mark);
                report.marks_set += 1;
                self.events.push(FciEvent::RuleFired { rule, from, to, mark });
                Ok(())
            }
            Some(existing) => self.conflict(report, from, to, existing, mark, &rule.to_string()),
            None => Err(Error::InvalidGraph(format!(
                "no edge between `{}` and `{}`",
                self.names[from], self.names[to]
            ))),
        }
    }

    fn into_poipg(self) -> Result<(Poipg, Vec<FciEvent>)> {
        let p = Poipg::new(self.names, self.graph, self.noncolliders)?;
        Ok((p, self.events))
    }
}

/// Orients every unshielded triple `a *-* c *-* b`: a collider when `c` is
/// outside `Sepset{a, b}`, otherwise a recorded non-collider.
pub fn orient_colliders(w: &mut WorkingGraph, sepsets: &SepsetTable) -> Result<MutationReport> {
    let mut report = MutationReport::default();
    let n = w.graph.n();
    for c in 0..n {
        let nbrs = w.graph.neighbors(c);
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                if w.graph.is_adjacent(a, b) {
                    continue;
                }
                let sep = sepsets.get(a, b).ok_or_else(|| {
                    Error::InvalidGraph(format!(
                        "`{}` and `{}` are nonadjacent without a separating set",
                        w.names[a], w.names[b]
                    ))
                })?;
                if sep.contains(&c) {
                    w.noncolliders.insert((a, c, b));
                    w.events.push(FciEvent::NonCollider { a, c, b });
                    report.noncolliders += 1;
                    continue;
                }
                report.colliders += 1;
                w.events.push(FciEvent::ColliderOriented { a, c, b });
                for x in [a, b] {
                    match w.graph.mark(x, c) {
                        Some(Arrow) => {}
                        Some(Circle) => {
                            w.graph.set_mark(x, c, Arrow);
                            report.marks_set += 1;
                        }
                        Some(existing) => w.conflict(&mut report, x, c, existing, Arrow, "collider")?,
                        None => unreachable!("neighbours are adjacent"),
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Applies R1-R3 in order, repeatedly, until no mark changes.
pub fn apply_orientation_rules(w: &mut WorkingGraph) -> Result<MutationReport> {
    let mut total = MutationReport::default();
    loop {
        let mut round = MutationReport::default();
        rule_away_from_collider(w, &mut round)?;
        rule_avoid_cycle(w, &mut round)?;
        rule_double_triangle(w, &mut round)?;
        total.marks_set += round.marks_set;
        total.conflicts += round.conflicts;
        if !round.changed() {
            return Ok(total);
        }
    }
}

/// R1: `a *-> b o-* c`, `a`, `c` nonadjacent  =>  `b -> c`.
fn rule_away_from_collider(w: &mut WorkingGraph, report: &mut MutationReport) -> Result<()> {
    let n = w.graph.n();
    for b in 0..n {
        for a in w.graph.neighbors(b) {
            if !w.graph.mark_is(a, b, Arrow) {
                continue;
            }
            for c in w.graph.neighbors(b) {
                if c == a || w.graph.is_adjacent(a, c) || !w.graph.mark_is(c, b, Circle) {
                    continue;
                }
                w.orient(report, Rule::R1, c, b, Tail)?;
                w.orient(report, Rule::R1, b, c, Arrow)?;
            }
        }
    }
    Ok(())
}

/// R2: `a -> b *-> c` or `a *-> b -> c`, with `a *-o c`  =>  `a *-> c`.
fn rule_avoid_cycle(w: &mut WorkingGraph, report: &mut MutationReport) -> Result<()> {
    let n = w.graph.n();
    let g = |w: &WorkingGraph, x: usize, y: usize, m: EndpointMark| w.graph.mark_is(x, y, m);
    for a in 0..n {
        for c in w.graph.neighbors(a) {
            if !g(w, a, c, Circle) {
                continue;
            }
            let fires = w.graph.neighbors(a).into_iter().any(|b| {
                b != c
                    && w.graph.is_adjacent(b, c)
                    && g(w, a, b, Arrow)
                    && g(w, b, c, Arrow)
                    && (g(w, b, a, Tail) || g(w, c, b, Tail))
            });
            if fires {
                w.orient(report, Rule::R2, a, c, Arrow)?;
            }
        }
    }
    Ok(())
}

/// R3: `a *-> b <-* c`, `a *-o d o-* c`, `a`, `c` nonadjacent, `d *-o b`  =>  `d *-> b`.
fn rule_double_triangle(w: &mut WorkingGraph, report: &mut MutationReport) -> Result<()> {
    let n = w.graph.n();
    for b in 0..n {
        for d in w.graph.neighbors(b) {
            if !w.graph.mark_is(d, b, Circle) {
                continue;
            }
            let common: Vec<usize> = w
                .graph
                .neighbors(b)
                .into_iter()
                .filter(|&x| x != d && w.graph.is_adjacent(x, d))
                .collect();
            let fires = common.iter().enumerate().any(|(i, &a)| {
                common[i + 1..].iter().any(|&c| {
                    !w.graph.is_adjacent(a, c)
                        && w.graph.mark_is(a, b, Arrow)
                        && w.graph.mark_is(c, b, Arrow)
                        && w.graph.mark_is(a, d, Circle)
                        && w.graph.mark_is(c, d, Circle)
                })
            });
            if fires {
                w.orient(report, Rule::R3, d, b, Arrow)?;
            }
        }
    }
    Ok(())
}

/// Vertices reachable from `a` along paths on which every interior vertex is
/// either a collider or has adjacent path neighbours.
///
/// Breadth-first over directed edge states `(previous, current)`.
pub fn possible_d_sep(g: &MixedGraph, a: usize, b: usize) -> Result<VertexSet> {
    g.check_vertex(a)?;
    g.check_vertex(b)?;
    if a == b {
        return Err(Error::InvalidQuery(
            "possible-d-sep needs two distinct vertices".into(),
        ));
    }
    let n = g.n();
    let mut result = VertexSet::new();
    let mut seen = vec![false; n * n];
    let mut queue = VecDeque::new();
    for v in g.neighbors(a) {
        result.insert(v);
        seen[a * n + v] = true;
        queue.push_back((a, v));
    }
    while let Some((x, y)) = queue.pop_front() {
        for z in g.neighbors(y) {
            if z == x || z == a {
                continue;
            }
            if g.is_collider(x, y, z) || g.is_adjacent(x, z) {
                result.insert(z);
                if !seen[y * n + z] {
                    seen[y * n + z] = true;
                    queue.push_back((y, z));
                }
            }
        }
    }
    Ok(result)
}

/// Output of [`fci`].
#[derive(Debug, Clone)]
pub struct FciResult {
    pub poipg: Poipg,
    pub sepsets: SepsetTable,
    pub trace: FciTrace,
}

/// Lexicographic `k`-subsets of a sorted slice.
struct Subsets<'a> {
    items: &'a [usize],
    idx: Vec<usize>,
    done: bool,
}

impl<'a> Subsets<'a> {
    fn new(items: &'a [usize], k: usize) -> Self {
        Subsets {
            items,
            idx: (0..k).collect(),
            done: k > items.len(),
        }
    }
}

impl Iterator for Subsets<'_> {
    type Item = VertexSet;

    fn next(&mut self) -> Option<VertexSet> {
        if self.done {
            return None;
        }
        let out = self.idx.iter().map(|&i| self.items[i]).collect();
        let k = self.idx.len();
        let m = self.items.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < m - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

fn independent(oracle: &dyn CiOracle, a: usize, b: usize, y: &VertexSet) -> Result<bool> {
    let x: VertexSet = [a].into_iter().collect();
    let z: VertexSet = [b].into_iter().collect();
    oracle
        .query(&x, &z, y)
        .map(|r| r.is_independent())
        .map_err(|e| match e {
            e @ Error::Oracle { .. } => e,
            e => Error::Oracle {
                query: describe_query(oracle.universe(), &x, &z, y),
                source: Box::new(e),
            },
        })
}

/// Runs the full discovery procedure against `oracle`.
pub fn fci(oracle: &dyn CiOracle, config: &FciConfig) -> Result<FciResult> {
    let names: Vec<String> = oracle.universe().to_vec();
    let n = names.len();
    if n == 0 {
        return Err(Error::InvalidArgument("oracle universe is empty".into()));
    }
    let within_cap = |size: usize| config.max_cond_size.is_none_or(|m| size <= m);

    let mut w = WorkingGraph::new(
        names.clone(),
        MixedGraph::complete(n, Circle),
        config.conflict_policy,
    );
    let mut sepsets = SepsetTable::default();

    // Adjacency search.
    let mut size = 0;
    while within_cap(size) {
        let mut any_large = false;
        for a in 0..n {
            for b in 0..n {
                if a == b || !w.graph.is_adjacent(a, b) {
                    continue;
                }
                let cands: Vec<usize> = w.graph.neighbors(a).into_iter().filter(|&v| v != b).collect();
                if cands.len() < size {
                    continue;
                }
                any_large = true;
                for y in Subsets::new(&cands, size) {
                    if independent(oracle, a, b, &y)? {
                        w.graph.remove_edge(a, b);
                        w.events.push(FciEvent::EdgeRemoved {
                            a,
                            b,
                            sepset: y.clone(),
                            phase: Phase::Adjacency,
                        });
                        sepsets.insert(a, b, y);
                        break;
                    }
                }
            }
        }
        if !any_large {
            break;
        }
        size += 1;
    }

    orient_colliders(&mut w, &sepsets)?;

    // Possible-d-sep retests, against the post-collider snapshot.
    let snapshot = w.graph.clone();
    let pds: Vec<VertexSet> = (0..n)
        .map(|a| {
            let other = if a == 0 { 1.min(n - 1) } else { 0 };
            if other == a {
                Ok(VertexSet::new())
            } else {
                possible_d_sep(&snapshot, a, other)
            }
        })
        .collect::<Result<_>>()?;
    for a in 0..n {
        for b in a + 1..n {
            if !w.graph.is_adjacent(a, b) {
                continue;
            }
            'sides: for side in [a, b] {
                let cands: Vec<usize> = pds[side].iter().copied().filter(|&v| v != a && v != b).collect();
                for k in 0..=cands.len() {
                    if !within_cap(k) {
                        break;
                    }
                    for y in Subsets::new(&cands, k) {
                        if independent(oracle, a, b, &y)? {
                            w.graph.remove_edge(a, b);
                            w.events.push(FciEvent::EdgeRemoved {
                                a,
                                b,
                                sepset: y.clone(),
                                phase: Phase::PossibleDsep,
                            });
                            sepsets.insert(a, b, y);
                            break 'sides;
                        }
                    }
                }
            }
        }
    }

    w.graph.reset_marks(Circle);
    w.noncolliders.clear();
    w.events.push(FciEvent::MarksReset);
    orient_colliders(&mut w, &sepsets)?;
    apply_orientation_rules(&mut w)?;

    let (poipg, events) = w.into_poipg()?;
    Ok(FciResult {
        poipg,
        sepsets,
        trace: FciTrace { names, events },
    })
}

/// Runs [`fci`] on the observable independencies of a known DAG, optionally
/// collapsing its selection variables first.
pub fn fci_from_dag(dag: &Dag, config: &FciConfig) -> Result<FciResult> {
    let dag = if config.collapse_selection {
        dag.collapse_selection()?
    } else {
        dag.clone()
    };
    let oracle = caching_oracle(graphical_oracle(dag)?);
    fci(&oracle, config)
}
