//! Causal claims read off a POIPG.
//!
//! Every claim is stated at exactly the strength its theorem licenses,
//! including the qualification by selection variables.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{EndpointMark, Poipg, VertexSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClaimKind {
    /// A directed path `subject -> object` exists and `subject` has no descendant in S.
    DefiniteCause,
    /// No directed path in either direction.
    NoCauseEitherWay,
    /// Some latent variable is present.
    LatentConfounder,
    /// Every directed path `subject -> object` contains a member of S.
    AllPathsHitS,
    /// Every directed path `subject -> object` contains a member of S or the blocker.
    AllPathsHitSorC,
    /// Every directed path `subject -> object` through the blocker also contains a member of S.
    PathsThroughCHitS,
}

impl ClaimKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClaimKind::DefiniteCause => "DefiniteCause",
            ClaimKind::NoCauseEitherWay => "NoCauseEitherWay",
            ClaimKind::LatentConfounder => "LatentConfounder",
            ClaimKind::AllPathsHitS => "AllPathsHitS",
            ClaimKind::AllPathsHitSorC => "AllPathsHitSorC",
            ClaimKind::PathsThroughCHitS => "PathsThroughCHitS",
        }
    }

    fn needs_blocker(self) -> bool {
        matches!(self, ClaimKind::AllPathsHitSorC | ClaimKind::PathsThroughCHitS)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalClaim {
    kind: ClaimKind,
    subject: usize,
    object: usize,
    blocker: Option<VertexSet>,
    theorem: u8,
    names: (String, String, Vec<String>),
}

impl CausalClaim {
    fn new(
        p: &Poipg,
        kind: ClaimKind,
        subject: usize,
        object: usize,
        blocker: Option<VertexSet>,
        theorem: u8,
    ) -> Self {
        debug_assert_eq!(kind.needs_blocker(), blocker.is_some());
        let blocker_names = blocker.iter().flatten().map(|&v| p.name(v).to_string()).collect();
        CausalClaim {
            kind,
            subject,
            object,
            blocker,
            theorem,
            names: (
                p.name(subject).to_string(),
                p.name(object).to_string(),
                blocker_names,
            ),
        }
    }

    pub fn kind(&self) -> ClaimKind {
        self.kind
    }

    pub fn subject(&self) -> usize {
        self.subject
    }

    pub fn object(&self) -> usize {
        self.object
    }

    pub fn blocker(&self) -> Option<&VertexSet> {
        self.blocker.as_ref()
    }

    pub fn theorem(&self) -> u8 {
        self.theorem
    }
}

/// `THEOREM=<n> KIND=<kind> FROM=<a> TO=<b> [C={...}]`
impl fmt::Display for CausalClaim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "THEOREM={} KIND={} FROM={} TO={}",
            self.theorem,
            self.kind.as_str(),
            self.names.0,
            self.names.1
        )?;
        if self.blocker.is_some() {
            write!(f, " C={{{}}}", self.names.2.join(","))?;
        }
        Ok(())
    }
}

fn check_distinct(p: &Poipg, a: usize, b: usize) -> Result<()> {
    p.check_vertex(a)?;
    p.check_vertex(b)?;
    if a == b {
        return Err(Error::InvalidQuery(format!(
            "query needs two distinct variables, got `{}` twice",
            p.name(a)
        )));
    }
    Ok(())
}

/// A path using only `x -> y` edges, all pointing away from `a`.
pub fn exists_directed_path(p: &Poipg, a: usize, b: usize) -> Result<bool> {
    p.check_vertex(a)?;
    p.check_vertex(b)?;
    let g = p.graph();
    let mut seen = vec![false; p.n()];
    seen[a] = true;
    let mut queue = VecDeque::from([a]);
    while let Some(x) = queue.pop_front() {
        if x == b {
            return Ok(true);
        }
        for y in g.neighbors(x) {
            if !seen[y] && g.mark_is(y, x, EndpointMark::Tail) && g.mark_is(x, y, EndpointMark::Arrow) {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    Ok(false)
}

pub fn definite_cause(p: &Poipg, a: usize, b: usize) -> Result<Option<CausalClaim>> {
    check_distinct(p, a, b)?;
    Ok(exists_directed_path(p, a, b)?.then(|| CausalClaim::new(p, ClaimKind::DefiniteCause, a, b, None, 2)))
}

fn bidirected(p: &Poipg, a: usize, b: usize) -> bool {
    p.edge(a, b) == Some((EndpointMark::Arrow, EndpointMark::Arrow))
}

/// Neither variable causes the other, when `a <-> b`.
pub fn no_cause_either_way(p: &Poipg, a: usize, b: usize) -> Result<Option<CausalClaim>> {
    check_distinct(p, a, b)?;
    Ok(bidirected(p, a, b).then(|| CausalClaim::new(p, ClaimKind::NoCauseEitherWay, a, b, None, 3)))
}

/// The latent-variable half of the same theorem, when `a <-> b`.
pub fn latent_confounder(p: &Poipg, a: usize, b: usize) -> Result<Option<CausalClaim>> {
    check_distinct(p, a, b)?;
    Ok(bidirected(p, a, b).then(|| CausalClaim::new(p, ClaimKind::LatentConfounder, a, b, None, 3)))
}

struct SemiSearch<'a> {
    p: &'a Poipg,
    target: usize,
    through: Option<&'a VertexSet>,
    avoiding: Option<&'a VertexSet>,
    on_path: Vec<bool>,
}

impl SemiSearch<'_> {
    fn dfs(&mut self, x: usize, hit: bool) -> bool {
        if x == self.target {
            return hit;
        }
        let g = self.p.graph();
        for y in g.neighbors(x) {
            if self.on_path[y] || g.mark_is(y, x, EndpointMark::Arrow) {
                continue;
            }
            if self.avoiding.is_some_and(|s| s.contains(&y)) {
                continue;
            }
            let hit_y = hit || self.through.is_some_and(|s| s.contains(&y));
            self.on_path[y] = true;
            let found = self.dfs(y, hit_y);
            self.on_path[y] = false;
            if found {
                return true;
            }
        }
        false
    }
}

/// An acyclic path from `a` to `b` with no arrowhead at the end of any edge
/// nearer `a`, optionally required to visit `through` and to skip `avoiding`.
pub fn exists_semi_directed_path(
    p: &Poipg,
    a: usize,
    b: usize,
    through: Option<&VertexSet>,
    avoiding: Option<&VertexSet>,
) -> Result<bool> {
    check_distinct(p, a, b)?;
    for s in through.into_iter().chain(avoiding) {
        for &v in s {
            p.check_vertex(v)?;
        }
        if s.contains(&a) {
            return Err(Error::InvalidQuery(format!(
                "`{}` is the path origin and cannot be listed in a through/avoiding set",
                p.name(a)
            )));
        }
    }
    if avoiding.is_some_and(|s| s.contains(&b)) {
        return Ok(false);
    }
    let mut s = SemiSearch {
        p,
        target: b,
        through,
        avoiding,
        on_path: vec![false; p.n()],
    };
    s.on_path[a] = true;
    let hit = through.is_none_or(|t| t.contains(&b));
    Ok(s.dfs(a, hit))
}

/// Path-exclusion claims for `a -> b`, in the order: no semi-directed path
/// at all; none through `c`; all through `c`.
///
/// The claims involving `c` are omitted when `c` is empty, since they are
/// then vacuous or repeat the first.
pub fn blocking_claims(p: &Poipg, a: usize, b: usize, c: &VertexSet) -> Result<Vec<CausalClaim>> {
    check_distinct(p, a, b)?;
    for &v in c {
        p.check_vertex(v)?;
    }
    if c.contains(&a) || c.contains(&b) {
        return Err(Error::OverlappingSets {
            overlap: c.iter().copied().filter(|&v| v == a || v == b).collect(),
        });
    }
    let mut out = Vec::new();
    if !exists_semi_directed_path(p, a, b, None, None)? {
        out.push(CausalClaim::new(p, ClaimKind::AllPathsHitS, a, b, None, 5));
    }
    if c.is_empty() {
        return Ok(out);
    }
    if !exists_semi_directed_path(p, a, b, Some(c), None)? {
        out.push(CausalClaim::new(
            p,
            ClaimKind::PathsThroughCHitS,
            a,
            b,
            Some(c.clone()),
            4,
        ));
    }
    if !exists_semi_directed_path(p, a, b, None, Some(c))? {
        out.push(CausalClaim::new(
            p,
            ClaimKind::AllPathsHitSorC,
            a,
            b,
            Some(c.clone()),
            6,
        ));
    }
    Ok(out)
}

/// Every claim derivable from `p` over ordered pairs, with singleton
/// blockers for the path-exclusion claims.
pub fn all_claims(p: &Poipg) -> Result<Vec<CausalClaim>> {
    let n = p.n();
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            out.extend(definite_cause(p, a, b)?);
            if a < b {
                out.extend(no_cause_either_way(p, a, b)?);
                out.extend(latent_confounder(p, a, b)?);
            }
            out.extend(blocking_claims(p, a, b, &VertexSet::new())?);
            for c in 0..n {
                if c != a && c != b {
                    let cs: VertexSet = [c].into_iter().collect();
                    out.extend(
                        blocking_claims(p, a, b, &cs)?
                            .into_iter()
                            .filter(|cl| cl.theorem != 5),
                    );
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::MixedGraph;
    use std::collections::BTreeSet;
    use EndpointMark::*;

    fn poipg(
        names: &[&str],
        edges: &[(usize, usize, EndpointMark, EndpointMark)],
        nc: &[(usize, usize, usize)],
    ) -> Poipg {
        let mut g = MixedGraph::empty(names.len());
        for &(a, b, ma, mb) in edges {
            g.add_edge(a, b, ma, mb);
        }
        Poipg::new(
            names.iter().map(|s| s.to_string()).collect(),
            g,
            nc.iter().copied().collect::<BTreeSet<_>>(),
        )
        .unwrap()
    }

    fn cond1() -> Poipg {
        poipg(&["A", "B"], &[(0, 1, Circle, Circle)], &[])
    }

    fn cond2() -> Poipg {
        poipg(
            &["A", "B", "C", "D"],
            &[(0, 2, Circle, Arrow), (1, 2, Circle, Arrow), (2, 3, Tail, Arrow)],
            &[(0, 2, 3), (1, 2, 3)],
        )
    }

    fn cond3() -> Poipg {
        poipg(
            &["A", "B", "C", "D"],
            &[(0, 1, Circle, Arrow), (1, 2, Arrow, Arrow), (2, 3, Arrow, Circle)],
            &[],
        )
    }

    fn set(v: &[usize]) -> VertexSet {
        v.iter().copied().collect()
    }

    #[test]
    fn directed_paths() {
        let p = cond2();
        assert!(exists_directed_path(&p, 2, 3).unwrap());
        assert!(!exists_directed_path(&p, 0, 2).unwrap());
        assert!(exists_directed_path(&p, 1, 1).unwrap());
        assert!(exists_directed_path(&p, 0, 9).is_err());
    }

    #[test]
    fn definite_cause_examples() {
        let c = definite_cause(&cond2(), 2, 3).unwrap().unwrap();
        assert_eq!(c.to_string(), "THEOREM=2 KIND=DefiniteCause FROM=C TO=D");
        assert!(definite_cause(&cond2(), 3, 2).unwrap().is_none());
        assert!(definite_cause(&cond1(), 0, 1).unwrap().is_none());
        assert!(definite_cause(&cond1(), 0, 0).is_err());
    }

    #[test]
    fn confounding_examples() {
        let c = no_cause_either_way(&cond3(), 1, 2).unwrap().unwrap();
        assert_eq!(c.theorem(), 3);
        assert_eq!(
            latent_confounder(&cond3(), 1, 2).unwrap().unwrap().to_string(),
            "THEOREM=3 KIND=LatentConfounder FROM=B TO=C"
        );
        assert!(no_cause_either_way(&cond2(), 0, 2).unwrap().is_none());
        assert!(no_cause_either_way(&cond1(), 0, 1).unwrap().is_none());
    }

    #[test]
    fn semi_directed_examples() {
        assert!(!exists_semi_directed_path(&cond2(), 3, 0, None, None).unwrap());
        assert!(exists_semi_directed_path(&cond2(), 0, 3, None, None).unwrap());
        assert!(!exists_semi_directed_path(&cond3(), 1, 2, None, None).unwrap());
        assert!(exists_semi_directed_path(&cond2(), 0, 3, Some(&set(&[2])), None).unwrap());
        assert!(!exists_semi_directed_path(&cond2(), 0, 3, None, Some(&set(&[2]))).unwrap());
        assert!(exists_semi_directed_path(&cond2(), 0, 3, Some(&set(&[0])), None).is_err());
    }

    #[test]
    fn blocking_examples() {
        let claims = blocking_claims(&cond2(), 3, 0, &VertexSet::new()).unwrap();
        assert_eq!(claims.len(), 1);
        assert_eq!(claims[0].to_string(), "THEOREM=5 KIND=AllPathsHitS FROM=D TO=A");

        let claims = blocking_claims(&cond2(), 0, 3, &set(&[2])).unwrap();
        assert_eq!(claims.len(), 1);
        assert_eq!(
            claims[0].to_string(),
            "THEOREM=6 KIND=AllPathsHitSorC FROM=A TO=D C={C}"
        );

        assert!(blocking_claims(&cond2(), 2, 3, &VertexSet::new())
            .unwrap()
            .is_empty());
        assert!(matches!(
            blocking_claims(&cond2(), 2, 3, &set(&[3])),
            Err(Error::OverlappingSets { .. })
        ));
    }

    #[test]
    fn theorem4_when_c_is_off_every_path() {
        // C --> D, A o-> C, B isolated: no semi-directed path A -> D visits B.
        let claims = blocking_claims(&cond2(), 0, 3, &set(&[1])).unwrap();
        assert_eq!(claims.len(), 1);
        assert_eq!(claims[0].kind(), ClaimKind::PathsThroughCHitS);
        assert_eq!(claims[0].blocker(), Some(&set(&[1])));
    }

    #[test]
    fn directed_implies_semi_directed() {
        for p in [cond1(), cond2(), cond3()] {
            for a in 0..p.n() {
                for b in 0..p.n() {
                    if a != b && exists_directed_path(&p, a, b).unwrap() {
                        assert!(exists_semi_directed_path(&p, a, b, None, None).unwrap());
                    }
                }
            }
        }
    }
}
