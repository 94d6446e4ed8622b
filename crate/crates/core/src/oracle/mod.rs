//! Conditional-independence oracles.
//!
//! Every discovery routine talks to one [`CiOracle`]. Queries are over
//! indices into the oracle's observed universe.

mod data;

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

pub use data::{
    data_oracle, g2_test, DataOracle, Dataset, G2Options, InsufficientPolicy, TestResult, Verdict,
};

use crate::ci::{canonical_pair, check_disjoint, CiSet};
use crate::error::{Error, Result};
use crate::graph::{Dag, VertexSet};
use crate::separation::observable_independent;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Independence {
    Independent,
    Dependent,
}

impl Independence {
    pub fn is_independent(self) -> bool {
        self == Independence::Independent
    }

    fn from_bool(indep: bool) -> Self {
        if indep {
            Independence::Independent
        } else {
            Independence::Dependent
        }
    }
}

/// Answers `x ⊥ z | y ∪ (S = 1)` over an observed universe.
///
/// Implementations must be deterministic and safe to share across threads.
pub trait CiOracle: Send + Sync {
    fn universe(&self) -> &[String];

    fn query(&self, x: &VertexSet, z: &VertexSet, y: &VertexSet) -> Result<Independence>;

    /// Number of queries answered so far.
    fn query_count(&self) -> u64;
}

impl<T: CiOracle + ?Sized> CiOracle for &T {
    fn universe(&self) -> &[String] {
        (**self).universe()
    }
    fn query(&self, x: &VertexSet, z: &VertexSet, y: &VertexSet) -> Result<Independence> {
        (**self).query(x, z, y)
    }
    fn query_count(&self) -> u64 {
        (**self).query_count()
    }
}

impl<T: CiOracle + ?Sized> CiOracle for Box<T> {
    fn universe(&self) -> &[String] {
        (**self).universe()
    }
    fn query(&self, x: &VertexSet, z: &VertexSet, y: &VertexSet) -> Result<Independence> {
        (**self).query(x, z, y)
    }
    fn query_count(&self) -> u64 {
        (**self).query_count()
    }
}

/// Validates a query against a universe of size `n`.
pub fn check_query(n: usize, x: &VertexSet, z: &VertexSet, y: &VertexSet) -> Result<()> {
    for s in [x, z, y] {
        if let Some(&v) = s.iter().find(|&&v| v >= n) {
            return Err(Error::InvalidQuery(format!(
                "vertex {v} is outside the observed universe of size {n}"
            )));
        }
    }
    check_disjoint(x, z, y)
}

/// Renders a query with universe names, for error context.
pub fn describe_query(universe: &[String], x: &VertexSet, z: &VertexSet, y: &VertexSet) -> String {
    let show = |s: &VertexSet| {
        s.iter()
            .map(|&v| universe.get(v).map_or_else(|| v.to_string(), Clone::clone))
            .collect::<Vec<_>>()
            .join(",")
    };
    format!("{{{}}} _||_ {{{}}} | {{{}}}", show(x), show(z), show(y))
}

/// d-separation oracle over a known DAG; faithful by construction.
#[derive(Debug)]
pub struct GraphicalOracle {
    dag: Dag,
    observed: Vec<usize>,
    names: Vec<String>,
    count: AtomicU64,
}

pub fn graphical_oracle(dag: Dag) -> Result<GraphicalOracle> {
    let observed = dag.observed();
    if observed.is_empty() {
        return Err(Error::InvalidGraph("graph has no observed variables".into()));
    }
    let names = observed.iter().map(|&v| dag.name(v).to_string()).collect();
    Ok(GraphicalOracle {
        dag,
        observed,
        names,
        count: AtomicU64::new(0),
    })
}

impl GraphicalOracle {
    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    fn lift(&self, s: &VertexSet) -> VertexSet {
        s.iter().map(|&i| self.observed[i]).collect()
    }
}

impl CiOracle for GraphicalOracle {
    fn universe(&self) -> &[String] {
        &self.names
    }

    fn query(&self, x: &VertexSet, z: &VertexSet, y: &VertexSet) -> Result<Independence> {
        check_query(self.names.len(), x, z, y)?;
        self.count.fetch_add(1, Ordering::Relaxed);
        let indep = observable_independent(&self.dag, &self.lift(x), &self.lift(z), &self.lift(y))?;
        Ok(Independence::from_bool(indep))
    }

    fn query_count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }
}

/// Closed-world lookup in an explicit CI set, honouring decomposition.
#[derive(Debug)]
pub struct TableOracle {
    cond: CiSet,
    count: AtomicU64,
}

pub fn table_oracle(cond: CiSet) -> TableOracle {
    TableOracle {
        cond,
        count: AtomicU64::new(0),
    }
}

impl TableOracle {
    pub fn cond(&self) -> &CiSet {
        &self.cond
    }
}

impl CiOracle for TableOracle {
    fn universe(&self) -> &[String] {
        self.cond.universe()
    }

    fn query(&self, x: &VertexSet, z: &VertexSet, y: &VertexSet) -> Result<Independence> {
        check_query(self.cond.universe().len(), x, z, y)?;
        self.count.fetch_add(1, Ordering::Relaxed);
        Ok(Independence::from_bool(self.cond.implies(x, z, y)))
    }

    fn query_count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }
}

type QueryKey = (VertexSet, VertexSet, VertexSet);

/// Memoises an inner oracle on the canonical (side-swapped) query.
pub struct CachingOracle<O> {
    inner: O,
    cache: Mutex<HashMap<QueryKey, Independence>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

pub fn caching_oracle<O: CiOracle>(inner: O) -> CachingOracle<O> {
    CachingOracle {
        inner,
        cache: Mutex::new(HashMap::new()),
        hits: AtomicU64::new(0),
        misses: AtomicU64::new(0),
    }
}

impl<O: CiOracle> CachingOracle<O> {
    pub fn inner(&self) -> &O {
        &self.inner
    }

    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }
}

impl<O: CiOracle> CiOracle for CachingOracle<O> {
    fn universe(&self) -> &[String] {
        self.inner.universe()
    }

    fn query(&self, x: &VertexSet, z: &VertexSet, y: &VertexSet) -> Result<Independence> {
        check_query(self.universe().len(), x, z, y)?;
        let (cx, cz) = canonical_pair(x.clone(), z.clone());
        let key = (cx, cz, y.clone());
        if let Some(&ans) = self.cache.lock().expect("cache poisoned").get(&key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(ans);
        }
        // Ask with the canonical orientation so the inner oracle sees one form per query.
        let ans = self.inner.query(&key.0, &key.1, &key.2)?;
        self.misses.fetch_add(1, Ordering::Relaxed);
        self.cache
            .lock()
            .expect("cache poisoned")
            .entry(key)
            .or_insert(ans);
        Ok(ans)
    }

    fn query_count(&self) -> u64 {
        self.hits() + self.misses()
    }
}
