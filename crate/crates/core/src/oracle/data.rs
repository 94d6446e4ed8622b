//! Discrete datasets and the G² likelihood-ratio independence test.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicU64, Ordering};

use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::{check_query, describe_query, CiOracle, Independence};
use crate::error::{Error, Result};
use crate::graph::VertexSet;

/// Complete-case discrete data; column-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    names: Vec<String>,
    arities: Vec<u32>,
    columns: Vec<Vec<u32>>,
    n: usize,
}

impl Dataset {
    /// `rows[i][j]` is the value of column `j` in row `i`.
    pub fn from_rows(columns: Vec<(String, u32)>, rows: &[Vec<u32>]) -> Result<Dataset> {
        let mut data: Vec<Vec<u32>> = vec![Vec::with_capacity(rows.len()); columns.len()];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != columns.len() {
                return Err(Error::Dataset(format!(
                    "row {i} has {} cells, expected {}",
                    row.len(),
                    columns.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                data[j].push(v);
            }
        }
        Self::from_columns(columns, data)
    }

    pub fn from_columns(columns: Vec<(String, u32)>, data: Vec<Vec<u32>>) -> Result<Dataset> {
        if columns.is_empty() {
            return Err(Error::Dataset("no columns".into()));
        }
        if data.len() != columns.len() {
            return Err(Error::Dataset(format!(
                "{} value columns for {} declared columns",
                data.len(),
                columns.len()
            )));
        }
        let n = data[0].len();
        if n == 0 {
            return Err(Error::Dataset("dataset has no rows".into()));
        }
        let mut seen = BTreeSet::new();
        for ((name, arity), values) in columns.iter().zip(&data) {
            if name.is_empty() {
                return Err(Error::EmptyName);
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateName(name.clone()));
            }
            if *arity < 2 {
                return Err(Error::Dataset(format!("column `{name}` has arity {arity} < 2")));
            }
            if values.len() != n {
                return Err(Error::Dataset(format!(
                    "column `{name}` has {} rows, expected {n}",
                    values.len()
                )));
            }
            if let Some(pos) = values.iter().position(|&v| v >= *arity) {
                return Err(Error::Dataset(format!(
                    "column `{name}` row {pos}: value {} outside arity {arity}",
                    values[pos]
                )));
            }
        }
        let (names, arities) = columns.into_iter().unzip();
        Ok(Dataset {
            names,
            arities,
            columns: data,
            n,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn arity(&self, col: usize) -> u32 {
        self.arities[col]
    }

    pub fn column(&self, col: usize) -> &[u32] {
        &self.columns[col]
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    /// Mixed-radix code of `cols` in each row, and the composite arity.
    fn composite(&self, cols: &[usize]) -> Result<(Vec<u64>, u64)> {
        let mut codes = vec![0u64; self.n];
        let mut arity = 1u64;
        for &c in cols {
            let a = self.arities[c] as u64;
            for (code, &v) in codes.iter_mut().zip(&self.columns[c]) {
                *code = *code * a + v as u64;
            }
            arity = arity
                .checked_mul(a)
                .filter(|&m| m <= u32::MAX as u64)
                .ok_or_else(|| Error::Dataset("composite state space too large".into()))?;
        }
        Ok((codes, arity))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Independent,
    Dependent,
    InsufficientData,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    pub statistic: f64,
    pub dof: u64,
    pub p_value: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct G2Options {
    /// Drop `(|x|-1)(|z|-1)` degrees of freedom for every empty stratum.
    pub reduce_empty_strata: bool,
}

impl Default for G2Options {
    fn default() -> Self {
        G2Options {
            reduce_empty_strata: true,
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )))
    }
}

/// G² test of `x ⊥ z | y`. Multi-column sides are coded as one composite column.
pub fn g2_test(
    data: &Dataset,
    x: &[usize],
    z: &[usize],
    y: &[usize],
    alpha: f64,
    opts: G2Options,
) -> Result<TestResult> {
    check_alpha(alpha)?;
    if x.is_empty() || z.is_empty() {
        return Err(Error::InvalidQuery("both tested sides must be nonempty".into()));
    }
    let mut seen = BTreeSet::new();
    for &c in x.iter().chain(z).chain(y) {
        if c >= data.names.len() {
            return Err(Error::InvalidQuery(format!("unknown column {c}")));
        }
        if !seen.insert(c) {
            return Err(Error::InvalidQuery(format!(
                "column `{}` used twice",
                data.names[c]
            )));
        }
    }

    let (xc, rx) = data.composite(x)?;
    let (zc, rz) = data.composite(z)?;
    let (yc, _) = data.composite(y)?;

    // stratum -> (cell counts, x margins, z margins, total)
    #[derive(Default)]
    struct Stratum {
        cells: BTreeMap<(u64, u64), u64>,
        xm: BTreeMap<u64, u64>,
        zm: BTreeMap<u64, u64>,
        n: u64,
    }
    let mut strata: BTreeMap<u64, Stratum> = BTreeMap::new();
    for i in 0..data.n {
        let s = strata.entry(yc[i]).or_default();
        *s.cells.entry((xc[i], zc[i])).or_default() += 1;
        *s.xm.entry(xc[i]).or_default() += 1;
        *s.zm.entry(zc[i]).or_default() += 1;
        s.n += 1;
    }

    let mut statistic = 0.0;
    for s in strata.values() {
        let ns = s.n as f64;
        for (&(xv, zv), &obs) in &s.cells {
            let obs = obs as f64;
            let expected = s.xm[&xv] as f64 * s.zm[&zv] as f64 / ns;
            statistic += obs * (obs / expected).ln();
        }
    }
    statistic = (2.0 * statistic).max(0.0);

    let per_stratum = (rx - 1) * (rz - 1);
    let dof = if opts.reduce_empty_strata {
        per_stratum * strata.len() as u64
    } else {
        let full: u64 = y.iter().map(|&c| data.arities[c] as u64).product();
        per_stratum * full
    };
    let p_value = if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .sf(statistic)
            .clamp(0.0, 1.0)
    };
    let verdict = if (data.n as u64) < 10 * dof {
        Verdict::InsufficientData
    } else if p_value > alpha {
        Verdict::Independent
    } else {
        Verdict::Dependent
    };
    Ok(TestResult {
        statistic,
        dof,
        p_value,
        verdict,
    })
}

/// How an underpowered test is resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InsufficientPolicy {
    #[default]
    AssumeDependent,
    AssumeIndependent,
}

/// Oracle backed by [`g2_test`] on a dataset; the universe is its columns.
#[derive(Debug)]
pub struct DataOracle {
    data: Dataset,
    alpha: f64,
    policy: InsufficientPolicy,
    options: G2Options,
    count: AtomicU64,
}

pub fn data_oracle(data: Dataset, alpha: f64, policy: InsufficientPolicy) -> Result<DataOracle> {
    check_alpha(alpha)?;
    Ok(DataOracle {
        data,
        alpha,
        policy,
        options: G2Options::default(),
        count: AtomicU64::new(0),
    })
}

impl DataOracle {
    pub fn with_options(mut self, options: G2Options) -> Self {
        self.options = options;
        self
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn test(&self, x: &VertexSet, z: &VertexSet, y: &VertexSet) -> Result<TestResult> {
        let v = |s: &VertexSet| s.iter().copied().collect::<Vec<_>>();
        g2_test(&self.data, &v(x), &v(z), &v(y), self.alpha, self.options)
    }
}

impl CiOracle for DataOracle {
    fn universe(&self) -> &[String] {
        &self.data.names
    }

    fn query(&self, x: &VertexSet, z: &VertexSet, y: &VertexSet) -> Result<Independence> {
        check_query(self.data.names.len(), x, z, y)?;
        self.count.fetch_add(1, Ordering::Relaxed);
        let result = self.test(x, z, y).map_err(|e| Error::Oracle {
            query: describe_query(&self.data.names, x, z, y),
            source: Box::new(e),
        })?;
        Ok(match result.verdict {
            Verdict::Independent => Independence::Independent,
            Verdict::Dependent => Independence::Dependent,
            Verdict::InsufficientData => match self.policy {
                InsufficientPolicy::AssumeDependent => Independence::Dependent,
                InsufficientPolicy::AssumeIndependent => Independence::Independent,
            },
        })
    }

    fn query_count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cols(names: &[&str]) -> Vec<(String, u32)> {
        names.iter().map(|n| (n.to_string(), 2)).collect()
    }

    fn fair_pair(n: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<u32>> = (0..n)
            .map(|_| vec![rng.random_range(0..2), rng.random_range(0..2)])
            .collect();
        Dataset::from_rows(cols(&["A", "B"]), &rows).unwrap()
    }

    fn bern(rng: &mut ChaCha8Rng, p: f64) -> u32 {
        (rng.random::<f64>() < p) as u32
    }

    #[test]
    fn independent_fair_coins() {
        let d = fair_pair(10_000, 1);
        let r = g2_test(&d, &[0], &[1], &[], 0.01, G2Options::default()).unwrap();
        assert_eq!(r.dof, 1);
        assert_eq!(r.verdict, Verdict::Independent);
        assert!(r.p_value > 0.01);
    }

    #[test]
    fn collider_conditioning_creates_dependence() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rows: Vec<Vec<u32>> = (0..10_000)
            .map(|_| {
                let a = bern(&mut rng, 0.5);
                let b = bern(&mut rng, 0.5);
                let c = bern(&mut rng, [0.05, 0.5, 0.5, 0.95][(a * 2 + b) as usize]);
                vec![a, b, c]
            })
            .collect();
        let d = Dataset::from_rows(cols(&["A", "B", "C"]), &rows).unwrap();
        let marginal = g2_test(&d, &[0], &[1], &[], 0.01, G2Options::default()).unwrap();
        assert_eq!(marginal.verdict, Verdict::Independent);
        let r = g2_test(&d, &[0], &[1], &[2], 0.01, G2Options::default()).unwrap();
        assert_eq!(r.dof, 2);
        assert_eq!(r.verdict, Verdict::Dependent);
    }

    #[test]
    fn tiny_sample_is_insufficient() {
        let d = fair_pair(5, 3);
        let r = g2_test(&d, &[0], &[1], &[], 0.05, G2Options::default()).unwrap();
        assert_eq!(r.verdict, Verdict::InsufficientData);
        let oracle = data_oracle(d.clone(), 0.05, InsufficientPolicy::AssumeDependent).unwrap();
        let one = |v: usize| -> VertexSet { [v].into_iter().collect() };
        assert_eq!(
            oracle.query(&one(0), &one(1), &VertexSet::new()).unwrap(),
            Independence::Dependent
        );
        let oracle = data_oracle(d, 0.05, InsufficientPolicy::AssumeIndependent).unwrap();
        assert_eq!(
            oracle.query(&one(0), &one(1), &VertexSet::new()).unwrap(),
            Independence::Independent
        );
    }

    #[test]
    fn symmetric_in_sides() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rows: Vec<Vec<u32>> = (0..2_000)
            .map(|_| {
                let a = rng.random_range(0..3);
                let b = if rng.random::<f64>() < 0.3 {
                    a % 2
                } else {
                    rng.random_range(0..2)
                };
                vec![a, b, rng.random_range(0..2)]
            })
            .collect();
        let d = Dataset::from_rows(vec![("A".into(), 3), ("B".into(), 2), ("C".into(), 2)], &rows).unwrap();
        let r1 = g2_test(&d, &[0], &[1], &[2], 0.05, G2Options::default()).unwrap();
        let r2 = g2_test(&d, &[1], &[0], &[2], 0.05, G2Options::default()).unwrap();
        assert!((r1.statistic - r2.statistic).abs() < 1e-9);
        assert_eq!(r1.dof, r2.dof);
        assert_eq!(r1.verdict, r2.verdict);
        assert_eq!(r1.dof, 2 * 2);
    }

    #[test]
    fn empty_strata_reduce_dof() {
        // C never takes value 1, so only one of its two strata is populated.
        let rows: Vec<Vec<u32>> = (0..100).map(|i| vec![i % 2, (i / 2) % 2, 0]).collect();
        let d = Dataset::from_rows(cols(&["A", "B", "C"]), &rows).unwrap();
        let r = g2_test(&d, &[0], &[1], &[2], 0.05, G2Options::default()).unwrap();
        assert_eq!(r.dof, 1);
        let r = g2_test(
            &d,
            &[0],
            &[1],
            &[2],
            0.05,
            G2Options {
                reduce_empty_strata: false,
            },
        )
        .unwrap();
        assert_eq!(r.dof, 2);
    }

    #[test]
    fn argument_errors() {
        let d = fair_pair(50, 5);
        assert!(g2_test(&d, &[0], &[1], &[], 0.0, G2Options::default()).is_err());
        assert!(g2_test(&d, &[0], &[1], &[], 1.0, G2Options::default()).is_err());
        assert!(g2_test(&d, &[0], &[2], &[], 0.05, G2Options::default()).is_err());
        assert!(g2_test(&d, &[0], &[0], &[], 0.05, G2Options::default()).is_err());
        assert!(data_oracle(d, 1.5, InsufficientPolicy::AssumeDependent).is_err());
    }

    #[test]
    fn dataset_validation() {
        assert!(Dataset::from_rows(vec![("A".into(), 1)], &[vec![0]]).is_err());
        assert!(Dataset::from_rows(vec![("A".into(), 2)], &[vec![2]]).is_err());
        assert!(Dataset::from_rows(vec![("A".into(), 2)], &[]).is_err());
        assert!(Dataset::from_rows(cols(&["A", "A"]), &[vec![0, 0]]).is_err());
        assert!(Dataset::from_rows(cols(&["A", "B"]), &[vec![0]]).is_err());
    }

    #[test]
    fn composite_sides() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rows: Vec<Vec<u32>> = (0..4_000)
            .map(|_| (0..3).map(|_| rng.random_range(0..2)).collect())
            .collect();
        let d = Dataset::from_rows(cols(&["A", "B", "C"]), &rows).unwrap();
        let r = g2_test(&d, &[0, 1], &[2], &[], 0.01, G2Options::default()).unwrap();
        assert_eq!(r.dof, 3);
    }
}
