//! Bayesian scoring of causal diagrams against transition datasets.
//!
//! Non-focal families pool every dataset into one Dirichlet-multinomial
//! block. A variable that is focal at transition `l` contributes two
//! blocks with the same prior: one over `D^0..D^{l-1}` and one over
//! `D^l..D^k`.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{enumerate_dags, CausalDiagram, VariableSpec};
use crate::scalar::Scalar;
use crate::simulate::{Dataset, TransitionDatasets};
use crate::special::ln_gamma;

/// Counts `N^j` of one family `(v, pa)`, one table per dataset, indexed
/// `config * r + state`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyCounts {
    cardinality: usize,
    configs: usize,
    per_dataset: Vec<Vec<u64>>,
}

impl FamilyCounts {
    fn tally(data: &[Dataset], cards: &[usize], v: usize, parents: &[usize]) -> Self {
        let r = cards[v];
        let q: usize = parents.iter().map(|&p| cards[p]).product();
        let per_dataset = data
            .iter()
            .map(|d| {
                let mut t = vec![0u64; r * q];
                for case in d.cases() {
                    let cfg = parents.iter().fold(0, |acc, &p| acc * cards[p] + case[p]);
                    t[cfg * r + case[v]] += 1;
                }
                t
            })
            .collect();
        Self {
            cardinality: r,
            configs: q,
            per_dataset,
        }
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    pub fn configs(&self) -> usize {
        self.configs
    }

    /// `N^j` table of dataset `j`.
    pub fn dataset(&self, j: usize) -> &[u64] {
        &self.per_dataset[j]
    }

    /// Summed table over datasets `range`.
    fn summed(&self, range: std::ops::Range<usize>) -> Vec<u64> {
        let mut t = vec![0u64; self.cardinality * self.configs];
        for table in &self.per_dataset[range] {
            for (a, b) in t.iter_mut().zip(table) {
                *a += b;
            }
        }
        t
    }
}

/// Count tables of every family of a diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SufficientStats {
    families: Vec<FamilyCounts>,
    datasets: usize,
}

impl SufficientStats {
    /// Number of transitions `k`.
    pub fn k(&self) -> usize {
        self.datasets - 1
    }

    pub fn family(&self, v: usize) -> &FamilyCounts {
        &self.families[v]
    }

    /// `N^j_{v=s, pa=c}`.
    pub fn count(&self, j: usize, v: usize, config: usize, state: usize) -> u64 {
        let f = &self.families[v];
        f.per_dataset[j][config * f.cardinality + state]
    }

    /// `M^l = sum_{j < l} N^j` for the whole family.
    pub fn pre(&self, l: usize, v: usize) -> Vec<u64> {
        self.families[v].summed(0..l.min(self.datasets))
    }

    /// `L^l = sum_{j >= l} N^j`.
    pub fn post(&self, l: usize, v: usize) -> Vec<u64> {
        self.families[v].summed(l.min(self.datasets)..self.datasets)
    }

    /// `M = M^{k+1}`, every dataset pooled.
    pub fn pooled(&self, v: usize) -> Vec<u64> {
        self.families[v].summed(0..self.datasets)
    }
}

fn cardinalities(vars: &[VariableSpec]) -> Vec<usize> {
    vars.iter().map(VariableSpec::cardinality).collect()
}

pub fn sufficient_stats(ts: &TransitionDatasets, diagram: &CausalDiagram) -> Result<SufficientStats> {
    if ts.variables() != diagram.variables() {
        return Err(Error::VariableMismatch);
    }
    let cards = cardinalities(diagram.variables());
    let families = (0..diagram.len())
        .map(|v| FamilyCounts::tally(ts.datasets(), &cards, v, diagram.parents(v)))
        .collect();
    Ok(SufficientStats {
        families,
        datasets: ts.datasets().len(),
    })
}

/// Dirichlet hyperparameters `alpha_{v;pa}` of every family, indexed
/// like [`FamilyCounts`].
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletPrior<T> {
    ess: T,
    alphas: Vec<Vec<T>>,
}

impl<T: Scalar> DirichletPrior<T> {
    /// Explicit hyperparameters; every one must be positive and each
    /// family table must match the diagram's `r * q`.
    pub fn new(diagram: &CausalDiagram, ess: T, alphas: Vec<Vec<T>>) -> Result<Self> {
        if alphas.len() != diagram.len() {
            return Err(Error::InvalidArgument(format!(
                "{} prior tables for {} variables",
                alphas.len(),
                diagram.len()
            )));
        }
        for (v, a) in alphas.iter().enumerate() {
            let size = diagram.cardinality(v) * diagram.parent_configurations(v);
            if a.len() != size {
                return Err(Error::InvalidArgument(format!(
                    "prior table of `{}` has {} entries, expected {size}",
                    diagram.name(v),
                    a.len()
                )));
            }
            if a.iter().any(|&x| !(x > T::zero()) || !x.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "prior table of `{}` has a non-positive entry",
                    diagram.name(v)
                )));
            }
        }
        Ok(Self { ess, alphas })
    }

    pub fn ess(&self) -> T {
        self.ess
    }

    /// `alpha_{v=s; pa=c}`.
    pub fn alpha(&self, v: usize, config: usize, state: usize, cardinality: usize) -> T {
        self.alphas[v][config * cardinality + state]
    }

    pub fn family(&self, v: usize) -> &[T] {
        &self.alphas[v]
    }
}

/// BDeu hyperparameters `ess / (r_i q_i)`.
pub fn bde_prior<T: Scalar>(diagram: &CausalDiagram, ess: T) -> Result<DirichletPrior<T>> {
    check_ess(ess)?;
    let alphas = (0..diagram.len())
        .map(|v| {
            let r = diagram.cardinality(v);
            let q = diagram.parent_configurations(v);
            vec![ess / T::from_count((r * q) as u64); r * q]
        })
        .collect();
    Ok(DirichletPrior { ess, alphas })
}

fn check_ess<T: Scalar>(ess: T) -> Result<()> {
    if ess > T::zero() && ess.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "equivalent sample size must be positive, got {ess}"
        )))
    }
}

/// Log marginal likelihood with per-variable terms.
#[derive(Debug, Clone, PartialEq)]
pub struct TsScore<T> {
    pub total: T,
    pub per_variable: Vec<T>,
}

/// Log Dirichlet-multinomial likelihood of one count table.
fn dirichlet_block<T: Scalar>(counts: &[u64], alphas: &[T], r: usize) -> T {
    let mut s = T::zero();
    for (cnt, a) in counts.chunks(r).zip(alphas.chunks(r)) {
        let n: u64 = cnt.iter().sum();
        if n == 0 {
            continue;
        }
        let a_pa: T = a.iter().copied().sum();
        s = s + ln_gamma(a_pa) - ln_gamma(a_pa + T::from_count(n));
        for (&c, &ai) in cnt.iter().zip(a) {
            if c > 0 {
                s = s + ln_gamma(ai + T::from_count(c)) - ln_gamma(ai);
            }
        }
    }
    s
}

/// Family term: pooled for non-focal variables, split at the change
/// point for a variable focal at 0-based transition `focal_at`.
fn family_score<T: Scalar>(f: &FamilyCounts, alphas: &[T], focal_at: Option<usize>) -> T {
    let n = f.per_dataset.len();
    match focal_at {
        None => dirichlet_block(&f.summed(0..n), alphas, f.cardinality),
        Some(j) => {
            dirichlet_block(&f.summed(0..j + 1), alphas, f.cardinality)
                + dirichlet_block(&f.summed(j + 1..n), alphas, f.cardinality)
        }
    }
}

/// Maps each variable to the 0-based transition at which it is focal.
fn focal_positions(focal_ids: &[usize], k: usize, n: usize) -> Result<Vec<Option<usize>>> {
    if focal_ids.len() != k {
        return Err(Error::InvalidArgument(format!(
            "{} focal variables for {k} transitions",
            focal_ids.len()
        )));
    }
    let mut pos = vec![None; n];
    for (j, &v) in focal_ids.iter().enumerate() {
        if v >= n {
            return Err(Error::VariableOutOfRange(v));
        }
        if pos[v].replace(j).is_some() {
            return Err(Error::InvalidArgument(format!(
                "variable {v} is focal in more than one transition"
            )));
        }
    }
    Ok(pos)
}

/// Log marginal likelihood of the transition datasets given `diagram`.
/// `focal_ids[j]` is the variable changed between `D^j` and `D^{j+1}`.
pub fn log_marginal_likelihood<T: Scalar>(
    stats: &SufficientStats,
    prior: &DirichletPrior<T>,
    diagram: &CausalDiagram,
    focal_ids: &[usize],
) -> Result<TsScore<T>> {
    let n = diagram.len();
    if stats.families.len() != n || prior.alphas.len() != n {
        return Err(Error::InvalidArgument(
            "statistics, prior and diagram disagree in size".into(),
        ));
    }
    let pos = focal_positions(focal_ids, stats.k(), n)?;
    let mut per_variable = Vec::with_capacity(n);
    for v in 0..n {
        let f = &stats.families[v];
        if f.cardinality * f.configs != prior.alphas[v].len()
            || f.cardinality != diagram.cardinality(v)
            || f.configs != diagram.parent_configurations(v)
        {
            return Err(Error::InvalidArgument(format!(
                "dimension mismatch in the family of `{}`",
                diagram.name(v)
            )));
        }
        per_variable.push(family_score(f, &prior.alphas[v], pos[v]));
    }
    let total = per_variable.iter().copied().sum();
    Ok(TsScore { total, per_variable })
}

/// Convenience wrapper: statistics, BDeu prior and score in one call.
pub fn score_diagram<T: Scalar>(
    ts: &TransitionDatasets,
    diagram: &CausalDiagram,
    focal_ids: &[usize],
    ess: T,
) -> Result<TsScore<T>> {
    let stats = sufficient_stats(ts, diagram)?;
    let prior = bde_prior(diagram, ess)?;
    log_marginal_likelihood(&stats, &prior, diagram, focal_ids)
}

/// Prior over diagrams, given as an unnormalized log weight.
#[derive(Clone, Default)]
pub enum GraphPrior<T> {
    #[default]
    Uniform,
    Custom(Arc<dyn Fn(&CausalDiagram) -> T + Send + Sync>),
}

impl<T: Scalar> GraphPrior<T> {
    fn log_weight(&self, g: &CausalDiagram) -> T {
        match self {
            GraphPrior::Uniform => T::zero(),
            GraphPrior::Custom(f) => f(g),
        }
    }
}

impl<T> std::fmt::Debug for GraphPrior<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GraphPrior::Uniform => f.write_str("Uniform"),
            GraphPrior::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorEntry<T> {
    pub diagram: CausalDiagram,
    pub log_score: T,
    pub posterior: T,
}

/// Posterior over a finite set of diagrams.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphPosterior<T> {
    entries: Vec<PosteriorEntry<T>>,
}

impl<T: Scalar> GraphPosterior<T> {
    pub fn entries(&self) -> &[PosteriorEntry<T>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn posterior_of(&self, g: &CausalDiagram) -> Option<T> {
        self.entries.iter().find(|e| &e.diagram == g).map(|e| e.posterior)
    }

    pub fn log_score_of(&self, g: &CausalDiagram) -> Option<T> {
        self.entries.iter().find(|e| &e.diagram == g).map(|e| e.log_score)
    }

    /// Highest-posterior entry; ties go to the earliest.
    pub fn map_estimate(&self) -> Option<&PosteriorEntry<T>> {
        self.entries
            .iter()
            .fold(None, |best: Option<&PosteriorEntry<T>>, e| match best {
                Some(b) if b.posterior >= e.posterior => Some(b),
                _ => Some(e),
            })
    }

    /// `diagram-id<TAB>log-score<TAB>posterior`, one row per diagram.
    pub fn to_report(&self) -> String {
        let mut s = String::from("diagram-id\tlog-score\tposterior\n");
        for e in &self.entries {
            s.push_str(&format!(
                "{}\t{:.10}\t{:.10e}\n",
                e.diagram.canonical_id(),
                e.log_score.as_f64(),
                e.posterior.as_f64()
            ));
        }
        s
    }
}

/// Posterior over the given diagrams, normalized among them. Family
/// terms are computed once per distinct `(variable, parent set)`.
pub fn posterior_over<T: Scalar>(
    ts: &TransitionDatasets,
    diagrams: Vec<CausalDiagram>,
    focal_ids: &[usize],
    ess: T,
    graph_prior: &GraphPrior<T>,
) -> Result<GraphPosterior<T>> {
    check_ess(ess)?;
    let vars = ts.variables();
    let n = vars.len();
    if diagrams.iter().any(|g| g.variables() != vars) {
        return Err(Error::VariableMismatch);
    }
    let pos = focal_positions(focal_ids, ts.k(), n)?;
    let cards = cardinalities(vars);

    let mut families: Vec<(usize, Vec<usize>)> = diagrams
        .iter()
        .flat_map(|g| (0..n).map(move |v| (v, g.parents(v).to_vec())))
        .collect();
    families.sort();
    families.dedup();
    let scores: Vec<T> = families
        .par_iter()
        .map(|(v, pa)| {
            let f = FamilyCounts::tally(ts.datasets(), &cards, *v, pa);
            let a = ess / T::from_count((f.cardinality * f.configs) as u64);
            family_score(&f, &vec![a; f.cardinality * f.configs], pos[*v])
        })
        .collect();
    let cache: HashMap<(usize, Vec<usize>), T> = families.into_iter().zip(scores).collect();

    let log_post: Vec<(T, T)> = diagrams
        .iter()
        .map(|g| {
            let ls: T = (0..n).map(|v| cache[&(v, g.parents(v).to_vec())]).sum();
            (ls, ls + graph_prior.log_weight(g))
        })
        .collect();
    let max = log_post.iter().map(|p| p.1).fold(T::neg_infinity(), T::max);
    let norm = max + log_post.iter().map(|p| (p.1 - max).exp()).sum::<T>().ln();
    let entries = diagrams
        .into_iter()
        .zip(log_post)
        .map(|(diagram, (log_score, lp))| PosteriorEntry {
            diagram,
            log_score,
            posterior: (lp - norm).exp(),
        })
        .collect();
    Ok(GraphPosterior { entries })
}

/// Exhaustive posterior over every DAG on the variables (at most five).
pub fn posterior_over_dags<T: Scalar>(
    ts: &TransitionDatasets,
    focal_ids: &[usize],
    ess: T,
    graph_prior: &GraphPrior<T>,
) -> Result<GraphPosterior<T>> {
    let dags = enumerate_dags(ts.variables())?;
    posterior_over(ts, dags, focal_ids, ess, graph_prior)
}
