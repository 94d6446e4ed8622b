//! Conditional-independence statements over observed variables.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::VertexSet;

/// `x ⊥ z | y` (or its negation) over observed-universe indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CiStatement {
    x: VertexSet,
    z: VertexSet,
    y: VertexSet,
    independent: bool,
}

impl CiStatement {
    /// Builds a statement in canonical form (`min(x) < min(z)`).
    pub fn new(x: VertexSet, z: VertexSet, y: VertexSet, independent: bool) -> Result<Self> {
        check_disjoint(&x, &z, &y)?;
        let (x, z) = canonical_pair(x, z);
        Ok(CiStatement { x, z, y, independent })
    }

    pub fn independence(x: &[usize], z: &[usize], y: &[usize]) -> Result<Self> {
        Self::new(
            x.iter().copied().collect(),
            z.iter().copied().collect(),
            y.iter().copied().collect(),
            true,
        )
    }

    pub fn x(&self) -> &VertexSet {
        &self.x
    }

    pub fn z(&self) -> &VertexSet {
        &self.z
    }

    pub fn y(&self) -> &VertexSet {
        &self.y
    }

    pub fn is_independent(&self) -> bool {
        self.independent
    }

    fn max_vertex(&self) -> usize {
        self.x
            .iter()
            .chain(&self.z)
            .chain(&self.y)
            .copied()
            .max()
            .unwrap_or(0)
    }

    /// Whether this statement implies `x' ⊥ z' | y` by decomposition.
    pub fn covers(&self, x: &VertexSet, z: &VertexSet, y: &VertexSet) -> bool {
        self.independent
            && &self.y == y
            && ((x.is_subset(&self.x) && z.is_subset(&self.z))
                || (x.is_subset(&self.z) && z.is_subset(&self.x)))
    }
}

/// Rejects empty `x`/`z` and overlapping sets.
pub fn check_disjoint(x: &VertexSet, z: &VertexSet, y: &VertexSet) -> Result<()> {
    if x.is_empty() || z.is_empty() {
        return Err(Error::InvalidQuery(
            "both sides of an independence statement must be nonempty".into(),
        ));
    }
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

/// Orders the two sides so the smaller minimum comes first.
pub fn canonical_pair(x: VertexSet, z: VertexSet) -> (VertexSet, VertexSet) {
    if x.first() <= z.first() {
        (x, z)
    } else {
        (z, x)
    }
}

/// A set of independence statements over a named universe, read closed-world:
/// anything not listed (or implied by decomposition) is a dependence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CiSet {
    universe: Vec<String>,
    statements: BTreeSet<CiStatement>,
}

impl CiSet {
    pub fn new(universe: Vec<String>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for name in &universe {
            if name.is_empty() {
                return Err(Error::EmptyName);
            }
            if !seen.insert(name) {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        Ok(CiSet {
            universe,
            statements: BTreeSet::new(),
        })
    }

    pub fn from_statements(
        universe: Vec<String>,
        statements: impl IntoIterator<Item = CiStatement>,
    ) -> Result<Self> {
        let mut set = CiSet::new(universe)?;
        for s in statements {
            set.insert(s)?;
        }
        Ok(set)
    }

    pub fn insert(&mut self, s: CiStatement) -> Result<()> {
        if !s.independent {
            return Err(Error::InvalidQuery(
                "a CI set only records independence statements".into(),
            ));
        }
        if s.max_vertex() >= self.universe.len() {
            return Err(Error::UnknownVertex(s.max_vertex()));
        }
        self.statements.insert(s);
        Ok(())
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn statements(&self) -> &BTreeSet<CiStatement> {
        &self.statements
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    pub fn contains(&self, s: &CiStatement) -> bool {
        self.statements.contains(s)
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.universe
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    /// Whether the set answers `x ⊥ z | y` with independence, directly or by decomposition.
    pub fn implies(&self, x: &VertexSet, z: &VertexSet, y: &VertexSet) -> bool {
        self.statements.iter().any(|s| s.covers(x, z, y))
    }

    /// Closure under symmetry, decomposition, weak union, contraction and
    /// composition.
    ///
    /// With composition, `X ⊥ Z | Y` holds iff every pair `x ⊥ z | Y` holds,
    /// so the closure is computed on pairwise atoms and expanded back into
    /// set-valued statements. Limited to universes of at most 16 variables.
    pub fn closure(&self) -> Result<CiSet> {
        let n = self.universe.len();
        if n > 16 {
            return Err(Error::GuardExceeded(format!(
                "closure over {n} variables (limit 16)"
            )));
        }
        let mut atoms = PairAtoms::new(n);
        for s in &self.statements {
            let y = mask_of(&s.y);
            for &a in &s.x {
                for &b in &s.z {
                    atoms.set(a, b, y);
                }
            }
        }
        atoms.close();
        let statements = all_statements(n)
            .into_iter()
            .filter(|(x, z, y)| atoms.holds_set(*x, *z, *y))
            .map(|(x, z, y)| CiStatement {
                x: set_of(x),
                z: set_of(z),
                y: set_of(y),
                independent: true,
            })
            .collect();
        Ok(CiSet {
            universe: self.universe.clone(),
            statements,
        })
    }

    /// Closed pairwise atoms `(a, b, y)` with `a < b` and `y` a bitmask, sorted.
    pub(crate) fn closed_atoms(&self) -> Result<Vec<(usize, usize, u32)>> {
        let n = self.universe.len();
        if n > 16 {
            return Err(Error::GuardExceeded(format!(
                "closure over {n} variables (limit 16)"
            )));
        }
        let mut atoms = PairAtoms::new(n);
        for s in &self.statements {
            let y = mask_of(&s.y);
            for &a in &s.x {
                for &b in &s.z {
                    atoms.set(a, b, y);
                }
            }
        }
        atoms.close();
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for y in 0..(1u32 << n) {
                    if atoms.get(a, b, y) {
                        out.push((a, b, y));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Whether two sets describe the same independencies after closure.
    pub fn equivalent(&self, other: &CiSet) -> Result<bool> {
        Ok(self.universe == other.universe && self.closure()? == other.closure()?)
    }
}

impl fmt::Display for CiStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |s: &VertexSet| s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
        let rel = if self.independent { "_||_" } else { "not _||_" };
        write!(
            f,
            "{{{}}} {} {{{}}} | {{{}}}",
            show(&self.x),
            rel,
            show(&self.z),
            show(&self.y)
        )
    }
}

pub(crate) fn mask_of(s: &VertexSet) -> u32 {
    s.iter().fold(0u32, |m, &v| m | (1 << v))
}

pub(crate) fn set_of(mask: u32) -> VertexSet {
    (0..32).filter(|&v| mask & (1 << v) != 0).collect()
}

/// Every canonical disjoint triple `(x, z, y)` of masks over `n` variables,
/// sorted in [`CiStatement`] order.
pub(crate) fn all_statements(n: usize) -> Vec<(u32, u32, u32)> {
    let mut out = Vec::new();
    // Assign each variable to x (1), z (2), y (3) or nothing (0).
    let total = 4usize.pow(n as u32);
    for code in 0..total {
        let (mut x, mut z, mut y) = (0u32, 0u32, 0u32);
        let mut c = code;
        for v in 0..n {
            match c % 4 {
                1 => x |= 1 << v,
                2 => z |= 1 << v,
                3 => y |= 1 << v,
                _ => {}
            }
            c /= 4;
        }
        if x != 0 && z != 0 && x.trailing_zeros() < z.trailing_zeros() {
            out.push((x, z, y));
        }
    }
    out.sort_by_cached_key(|t| (set_of(t.0), set_of(t.1), set_of(t.2)));
    out
}

/// Pairwise independence atoms `a ⊥ b | Y` for `Y` a bitmask.
struct PairAtoms {
    n: usize,
    bits: Vec<bool>,
}

impl PairAtoms {
    fn new(n: usize) -> Self {
        PairAtoms {
            n,
            bits: vec![false; (n * n) << n],
        }
    }

    fn idx(&self, a: usize, b: usize, y: u32) -> usize {
        ((a * self.n + b) << self.n) | y as usize
    }

    fn get(&self, a: usize, b: usize, y: u32) -> bool {
        self.bits[self.idx(a, b, y)]
    }

    /// Returns true if the atom was new.
    fn set(&mut self, a: usize, b: usize, y: u32) -> bool {
        let i = self.idx(a, b, y);
        let j = self.idx(b, a, y);
        let fresh = !self.bits[i];
        self.bits[i] = true;
        self.bits[j] = true;
        fresh
    }

    fn holds_set(&self, x: u32, z: u32, y: u32) -> bool {
        (0..self.n).filter(|&a| x & (1 << a) != 0).all(|a| {
            (0..self.n)
                .filter(|&b| z & (1 << b) != 0)
                .all(|b| self.get(a, b, y))
        })
    }

    fn close(&mut self) {
        let n = self.n;
        let full: u32 = if n == 0 { 0 } else { (1u32 << n) - 1 };
        loop {
            let mut changed = false;
            for a in 0..n {
                for y in 0..=full {
                    if y & (1 << a) != 0 {
                        continue;
                    }
                    // t with a ⊥ t | y
                    let sep: u32 = (0..n)
                        .filter(|&t| t != a && y & (1 << t) == 0 && self.get(a, t, y))
                        .fold(0, |m, t| m | (1 << t));
                    // Weak union: a ⊥ T | y  =>  a ⊥ t | y ∪ W for W ⊆ T \ {t}.
                    for t in 0..n {
                        if sep & (1 << t) == 0 {
                            continue;
                        }
                        let rest = sep & !(1 << t);
                        let mut w = rest;
                        while w != 0 {
                            changed |= self.set(a, t, y | w);
                            w = (w - 1) & rest;
                        }
                    }
                    // Contraction: a ⊥ W | y and a ⊥ b | y ∪ W  =>  a ⊥ b | y.
                    let mut w = sep;
                    while w != 0 {
                        for b in 0..n {
                            let used = y | w | (1 << a);
                            if used & (1 << b) != 0 || self.get(a, b, y) {
                                continue;
                            }
                            if self.get(a, b, y | w) {
                                changed |= self.set(a, b, y);
                            }
                        }
                        w = (w - 1) & sep;
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn s(x: &[usize], z: &[usize], y: &[usize]) -> CiStatement {
        CiStatement::independence(x, z, y).unwrap()
    }

    #[test]
    fn canonical_form_swaps_sides() {
        let a = s(&[2], &[0, 1], &[3]);
        assert_eq!(a.x(), &[0, 1].into_iter().collect());
        assert_eq!(a, s(&[0, 1], &[2], &[3]));
    }

    #[test]
    fn rejects_overlap_and_empty() {
        assert!(matches!(
            CiStatement::independence(&[0], &[0], &[]),
            Err(Error::OverlappingSets { .. })
        ));
        assert!(CiStatement::independence(&[], &[1], &[]).is_err());
        assert!(matches!(
            CiStatement::independence(&[0], &[1], &[1]),
            Err(Error::OverlappingSets { overlap }) if overlap == vec![1]
        ));
    }

    #[test]
    fn decomposition_lookup() {
        // Cond3 over A,B,C,D: D ⊥ {A,B}, A ⊥ {C,D}
        let cond = CiSet::from_statements(
            names(&["A", "B", "C", "D"]),
            [s(&[3], &[0, 1], &[]), s(&[0], &[2, 3], &[])],
        )
        .unwrap();
        let one = |v: usize| -> VertexSet { [v].into_iter().collect() };
        let none = VertexSet::new();
        assert!(cond.implies(&one(0), &one(2), &none));
        assert!(cond.implies(&one(2), &one(0), &none));
        assert!(!cond.implies(&one(1), &one(2), &none));
        assert!(!cond.implies(&one(0), &one(2), &one(1)));
    }

    #[test]
    fn statement_outside_universe_rejected() {
        let mut c = CiSet::new(names(&["A", "B"])).unwrap();
        assert!(c.insert(s(&[0], &[2], &[])).is_err());
    }

    #[test]
    fn closure_of_cond2() {
        let cond = CiSet::from_statements(
            names(&["A", "B", "C", "D"]),
            [s(&[3], &[0, 1], &[2]), s(&[0], &[1], &[])],
        )
        .unwrap();
        let c = cond.closure().unwrap();
        assert!(c.contains(&s(&[0], &[3], &[1, 2])));
        assert!(c.contains(&s(&[1], &[3], &[0, 2])));
        assert!(c.contains(&s(&[0, 1], &[3], &[2])));
        assert!(c.contains(&s(&[0], &[1], &[])));
        assert!(!c.contains(&s(&[0], &[1], &[2])));
        assert!(!c.contains(&s(&[0], &[1], &[3])));
        assert!(!c.contains(&s(&[0], &[3], &[])));
        // Closure is idempotent.
        assert_eq!(c.closure().unwrap(), c);
    }

    #[test]
    fn all_statements_count() {
        // For n=2 only {0} ⊥ {1} | {} survives canonicalisation.
        assert_eq!(all_statements(2).len(), 1);
        // n=3: pairs with optional third in y, plus 1-vs-2 splits.
        assert_eq!(all_statements(3).len(), 3 * 2 + 3);
    }
}
