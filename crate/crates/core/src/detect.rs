//! Two-sample chi-square change detection on variable marginals and the
//! per-variable change tags of a transition sequence.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::simulate::{exact_marginals, Dataset, TransitionDatasets, TransitionScenario};
use crate::special::chi_square_upper_quantile;

/// State tallies of one variable in one dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarginalCounts {
    variable: usize,
    counts: Vec<u64>,
    total: u64,
}

impl MarginalCounts {
    pub fn new(variable: usize, counts: Vec<u64>) -> Self {
        let total = counts.iter().sum();
        Self {
            variable,
            counts,
            total,
        }
    }

    pub fn from_dataset(data: &Dataset, variable: usize) -> Self {
        Self::new(variable, data.state_counts(variable))
    }

    pub fn variable(&self) -> usize {
        self.variable
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

/// Homogeneity statistic
/// `N1 N2 sum_x (N1x/N1 - N2x/N2)^2 / (N1x + N2x)` over states with a
/// nonzero combined count, and its degrees of freedom (those states minus
/// one; zero when only one state occurs).
pub fn chi_square_statistic<T: Scalar>(c1: &MarginalCounts, c2: &MarginalCounts) -> Result<(T, usize)> {
    if c1.counts.len() != c2.counts.len() {
        return Err(Error::InvalidArgument(format!(
            "state counts differ: {} vs {}",
            c1.counts.len(),
            c2.counts.len()
        )));
    }
    if c1.total == 0 || c2.total == 0 {
        return Err(Error::EmptyData("both samples must contain cases".into()));
    }
    let n1 = T::from_count(c1.total);
    let n2 = T::from_count(c2.total);
    let mut sum = T::zero();
    let mut occupied = 0usize;
    for (&a, &b) in c1.counts.iter().zip(&c2.counts) {
        if a + b == 0 {
            continue;
        }
        occupied += 1;
        let diff = T::from_count(a) / n1 - T::from_count(b) / n2;
        sum = sum + diff * diff / T::from_count(a + b);
    }
    Ok((n1 * n2 * sum, occupied - 1))
}

/// Upper-`alpha` critical value of the chi-square distribution.
pub fn chi_square_threshold<T: Scalar>(alpha: T, dof: usize) -> Result<T> {
    chi_square_upper_quantile(alpha, dof)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Change,
    NoChange,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChangeDecision<T> {
    pub statistic: T,
    pub threshold: T,
    pub dof: usize,
    pub verdict: Verdict,
}

impl<T: Scalar> ChangeDecision<T> {
    fn decide(statistic: T, dof: usize, alpha: T) -> Result<Self> {
        // a single occupied state gives statistic 0; test it on one dof
        let dof = dof.max(1);
        let threshold = chi_square_threshold(alpha, dof)?;
        Ok(Self {
            statistic,
            threshold,
            dof,
            verdict: if statistic > threshold {
                Verdict::Change
            } else {
                Verdict::NoChange
            },
        })
    }

    pub fn changed(&self) -> bool {
        self.verdict == Verdict::Change
    }
}

/// Decides whether the marginal of `v` differs between the datasets.
pub fn detect_change<T: Scalar>(d1: &Dataset, d2: &Dataset, v: usize, alpha: T) -> Result<ChangeDecision<T>> {
    if d1.is_empty() || d2.is_empty() {
        return Err(Error::EmptyData("change detection needs non-empty datasets".into()));
    }
    if v >= d1.variables().len() {
        return Err(Error::VariableOutOfRange(v));
    }
    let (stat, dof) = chi_square_statistic(
        &MarginalCounts::from_dataset(d1, v),
        &MarginalCounts::from_dataset(d2, v),
    )?;
    ChangeDecision::decide(stat, dof, alpha)
}

/// Change bits `a_1..a_k` for every variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagMatrix {
    rows: Vec<Vec<bool>>,
    k: usize,
}

impl TagMatrix {
    pub fn new(rows: Vec<Vec<bool>>) -> Result<Self> {
        let k = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidArgument("tag rows have different lengths".into()));
        }
        Ok(Self { rows, k })
    }

    /// Parses rows written as bit strings, e.g. `["10", "01"]`.
    pub fn from_bits(rows: &[&str]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| {
                r.chars()
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        other => Err(Error::InvalidArgument(format!("bad tag bit `{other}`"))),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(parsed)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_variables(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, v: usize) -> &[bool] {
        &self.rows[v]
    }

    pub fn get(&self, v: usize, transition: usize) -> bool {
        self.rows[v][transition]
    }

    pub fn bits(&self, v: usize) -> String {
        self.rows[v].iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    /// Header line, then one line per variable: `name<TAB>bits`.
    pub fn to_tsv(&self, names: &[&str]) -> String {
        let mut out = String::from("variable\ttag\n");
        for (v, name) in names.iter().enumerate() {
            let _ = writeln!(out, "{name}\t{}", self.bits(v));
        }
        out
    }
}

/// Tags from chi-square tests between consecutive datasets.
pub fn build_tag_matrix<T: Scalar>(ts: &TransitionDatasets, alpha: T) -> Result<TagMatrix> {
    let k = ts.k();
    if k == 0 {
        return Err(Error::InvalidArgument("tags need at least one transition".into()));
    }
    let n = ts.variables().len();
    let data = ts.datasets();
    if data.iter().any(Dataset::is_empty) {
        return Err(Error::EmptyData(
            "every dataset of the sequence must contain cases".into(),
        ));
    }
    let mut thresholds: BTreeMap<usize, T> = BTreeMap::new();
    let mut rows = vec![vec![false; k]; n];
    for v in 0..n {
        let counts: Vec<MarginalCounts> = data.iter().map(|d| MarginalCounts::from_dataset(d, v)).collect();
        for i in 0..k {
            let (stat, dof) = chi_square_statistic::<T>(&counts[i], &counts[i + 1])?;
            let dof = dof.max(1);
            let threshold = match thresholds.get(&dof) {
                Some(&t) => t,
                None => {
                    let t = chi_square_threshold(alpha, dof)?;
                    thresholds.insert(dof, t);
                    t
                }
            };
            rows[v][i] = stat > threshold;
        }
    }
    TagMatrix::new(rows)
}

/// Tags from exact marginals of the ground-truth models: a bit is set
/// when the max-norm change exceeds `tol`.
pub fn exact_tag_matrix<T: Scalar>(scenario: &TransitionScenario<T>, tol: T) -> Result<TagMatrix> {
    let marginals = scenario
        .models()
        .iter()
        .map(exact_marginals)
        .collect::<Result<Vec<_>>>()?;
    let n = scenario.models()[0].len();
    let rows = (0..n)
        .map(|v| {
            (0..scenario.k())
                .map(|i| marginals[i][v].distance(&marginals[i + 1][v]) > tol)
                .collect()
        })
        .collect();
    TagMatrix::new(rows)
}
