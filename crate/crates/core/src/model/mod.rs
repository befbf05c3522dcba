//! Causal diagrams, conditional probability tables and causal models.
//!
//! Variables are identified by position. Names and state labels are
//! metadata used by the file formats and reports.

mod equivalence;
mod graph;
pub mod random;

pub use equivalence::{independence_equivalent, transition_equivalent};
pub use graph::{enumerate_dags, MAX_ENUMERATION_VARIABLES};

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-sum tolerance every stored CPT row satisfies.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;
/// Rows whose sums deviate by at most this much are renormalized on
/// construction; anything worse is rejected.
pub const ROW_NORMALIZE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VariableSpec {
    name: String,
    states: Vec<String>,
}

impl VariableSpec {
    pub fn new<S: Into<String>>(name: S, states: Vec<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::InvalidDiagram("variable name is empty".into()));
        }
        if states.len() < 2 {
            return Err(Error::InvalidDiagram(format!(
                "variable `{name}` needs at least two states"
            )));
        }
        let unique: BTreeSet<&String> = states.iter().collect();
        if unique.len() != states.len() {
            return Err(Error::InvalidDiagram(format!(
                "variable `{name}` has duplicate state labels"
            )));
        }
        Ok(Self { name, states })
    }

    /// Binary variable with states `0` and `1`.
    pub fn binary<S: Into<String>>(name: S) -> Self {
        Self::with_cardinality(name, 2)
    }

    /// Variable with states `0`, `1`, ..., `r - 1`.
    pub fn with_cardinality<S: Into<String>>(name: S, r: usize) -> Self {
        assert!(r >= 2, "cardinality must be at least 2");
        Self::new(name, (0..r).map(|s| s.to_string()).collect()).expect("valid generated spec")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn cardinality(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }
}

/// A DAG over an ordered variable list.
///
/// Parent lists keep their declared order because CPT rows are indexed
/// row-major over the parents in that order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CausalDiagram {
    variables: Vec<VariableSpec>,
    parents: Vec<Vec<usize>>,
}

impl CausalDiagram {
    pub fn new(variables: Vec<VariableSpec>, parents: Vec<Vec<usize>>) -> Result<Self> {
        let n = variables.len();
        if parents.len() != n {
            return Err(Error::InvalidDiagram(format!(
                "{} parent lists for {} variables",
                parents.len(),
                n
            )));
        }
        let names: BTreeSet<&str> = variables.iter().map(|v| v.name()).collect();
        if names.len() != n {
            return Err(Error::InvalidDiagram("duplicate variable names".into()));
        }
        for (i, pa) in parents.iter().enumerate() {
            let mut seen = BTreeSet::new();
            for &p in pa {
                if p >= n {
                    return Err(Error::VariableOutOfRange(p));
                }
                if p == i {
                    return Err(Error::InvalidDiagram(format!(
                        "`{}` is its own parent",
                        variables[i].name()
                    )));
                }
                if !seen.insert(p) {
                    return Err(Error::InvalidDiagram(format!(
                        "`{}` lists parent `{}` twice",
                        variables[i].name(),
                        variables[p].name()
                    )));
                }
            }
        }
        let diagram = Self { variables, parents };
        if diagram.try_topological_order().is_none() {
            return Err(Error::InvalidDiagram("graph contains a directed cycle".into()));
        }
        Ok(diagram)
    }

    /// Builds a diagram from `(from, to)` edges. Parent lists are sorted.
    pub fn from_edges(variables: Vec<VariableSpec>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = variables.len();
        let mut parents = vec![Vec::new(); n];
        for &(from, to) in edges {
            if from >= n || to >= n {
                return Err(Error::VariableOutOfRange(from.max(to)));
            }
            parents[to].push(from);
        }
        for pa in &mut parents {
            pa.sort_unstable();
        }
        Self::new(variables, parents)
    }

    /// Diagram over binary variables named by `names`.
    pub fn binary(names: &[&str], edges: &[(usize, usize)]) -> Result<Self> {
        let vars = names.iter().map(|n| VariableSpec::binary(*n)).collect();
        Self::from_edges(vars, edges)
    }

    /// Edgeless diagram.
    pub fn empty(variables: Vec<VariableSpec>) -> Self {
        let n = variables.len();
        Self::new(variables, vec![Vec::new(); n]).expect("edgeless graph is valid")
    }

    /// Same variables, different parent sets.
    pub fn with_parents(&self, parents: Vec<Vec<usize>>) -> Result<Self> {
        Self::new(self.variables.clone(), parents)
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn variables(&self) -> &[VariableSpec] {
        &self.variables
    }

    pub fn variable(&self, i: usize) -> &VariableSpec {
        &self.variables[i]
    }

    pub fn name(&self, i: usize) -> &str {
        self.variables[i].name()
    }

    pub fn cardinality(&self, i: usize) -> usize {
        self.variables[i].cardinality()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name() == name)
    }

    pub fn parents(&self, i: usize) -> &[usize] {
        &self.parents[i]
    }

    pub fn parent_lists(&self) -> &[Vec<usize>] {
        &self.parents
    }

    /// Parents of `i` as a sorted set, independent of declaration order.
    pub fn parent_set(&self, i: usize) -> BTreeSet<usize> {
        self.parents[i].iter().copied().collect()
    }

    pub fn children(&self, i: usize) -> Vec<usize> {
        (0..self.len()).filter(|&c| self.parents[c].contains(&i)).collect()
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.parents[to].contains(&from)
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.has_edge(a, b) || self.has_edge(b, a)
    }

    /// All edges `(from, to)`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<_> = self
            .parents
            .iter()
            .enumerate()
            .flat_map(|(to, pa)| pa.iter().map(move |&from| (from, to)))
            .collect();
        edges.sort_unstable();
        edges
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    /// Number of parent configurations `q_i`.
    pub fn parent_configurations(&self, i: usize) -> usize {
        self.parents[i].iter().map(|&p| self.cardinality(p)).product()
    }

    /// Row index of the parent configuration of `i` in a full assignment.
    pub fn parent_config_index(&self, i: usize, assignment: &[usize]) -> usize {
        self.parents[i]
            .iter()
            .fold(0, |acc, &p| acc * self.cardinality(p) + assignment[p])
    }

    /// True when both diagrams declare identical variable lists.
    pub fn same_variables(&self, other: &Self) -> bool {
        self.variables == other.variables
    }

    /// Canonical text form: `name:parent,parent;...` with sorted parent
    /// names. Equal strings mean equal graphs.
    pub fn canonical_id(&self) -> String {
        let mut parts = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            let mut pa: Vec<&str> = self.parents[i].iter().map(|&p| self.name(p)).collect();
            pa.sort_unstable();
            parts.push(format!("{}:{}", self.name(i), pa.join(",")));
        }
        parts.join(";")
    }
}

/// Conditional probability table of one variable.
///
/// Rows are indexed row-major over the parent states in declared parent
/// order: the last parent varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt<T> {
    cardinality: usize,
    rows: usize,
    probs: Vec<T>,
}

impl<T: Scalar> Cpt<T> {
    /// Validates and stores `rows`. Rows off by at most
    /// [`ROW_NORMALIZE_TOLERANCE`] are renormalized.
    pub fn new(variable: &str, cardinality: usize, expected_rows: usize, rows: Vec<Vec<T>>) -> Result<Self> {
        let err = |reason: String| Error::InvalidCpt {
            variable: variable.to_string(),
            reason,
        };
        if rows.len() != expected_rows {
            return Err(err(format!("expected {expected_rows} rows, got {}", rows.len())));
        }
        let mut probs = Vec::with_capacity(expected_rows * cardinality);
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != cardinality {
                return Err(err(format!(
                    "row {r} has {} entries, expected {cardinality}",
                    row.len()
                )));
            }
            if row.iter().any(|p| !p.is_finite() || *p < T::zero() || *p > T::one()) {
                return Err(err(format!("row {r} has an entry outside [0, 1]")));
            }
            let sum: T = row.iter().copied().sum();
            let dev = (sum - T::one()).abs();
            if dev > T::lit(ROW_NORMALIZE_TOLERANCE) {
                return Err(err(format!("row {r} sums to {sum}")));
            }
            if dev > T::zero() {
                probs.extend(row.iter().map(|&p| p / sum));
            } else {
                probs.extend(row);
            }
        }
        Ok(Self {
            cardinality,
            rows: expected_rows,
            probs,
        })
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    pub fn num_rows(&self) -> usize {
        self.rows
    }

    pub fn row(&self, config: usize) -> &[T] {
        &self.probs[config * self.cardinality..(config + 1) * self.cardinality]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.probs.chunks(self.cardinality)
    }

    pub fn prob(&self, config: usize, state: usize) -> T {
        self.probs[config * self.cardinality + state]
    }

    pub fn cast<U: Scalar>(&self) -> Cpt<U> {
        Cpt {
            cardinality: self.cardinality,
            rows: self.rows,
            probs: self.probs.iter().map(|p| U::lit(p.as_f64())).collect(),
        }
    }

    pub(crate) fn from_raw(cardinality: usize, probs: Vec<T>) -> Self {
        let rows = probs.len() / cardinality;
        Self {
            cardinality,
            rows,
            probs,
        }
    }
}

/// A diagram plus one CPT per variable.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalModel<T> {
    diagram: CausalDiagram,
    cpts: Vec<Cpt<T>>,
}

impl<T: Scalar> CausalModel<T> {
    pub fn new(diagram: CausalDiagram, cpts: Vec<Cpt<T>>) -> Result<Self> {
        if cpts.len() != diagram.len() {
            return Err(Error::InvalidDiagram(format!(
                "{} CPTs for {} variables",
                cpts.len(),
                diagram.len()
            )));
        }
        for (i, cpt) in cpts.iter().enumerate() {
            if cpt.cardinality() != diagram.cardinality(i) || cpt.num_rows() != diagram.parent_configurations(i) {
                return Err(Error::InvalidCpt {
                    variable: diagram.name(i).to_string(),
                    reason: format!(
                        "table is {}x{}, diagram requires {}x{}",
                        cpt.num_rows(),
                        cpt.cardinality(),
                        diagram.parent_configurations(i),
                        diagram.cardinality(i)
                    ),
                });
            }
        }
        Ok(Self { diagram, cpts })
    }

    /// Builds a model from plain rows per variable.
    pub fn from_rows(diagram: CausalDiagram, rows: Vec<Vec<Vec<T>>>) -> Result<Self> {
        if rows.len() != diagram.len() {
            return Err(Error::InvalidDiagram("one row list per variable required".into()));
        }
        let cpts = rows
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                Cpt::new(
                    diagram.name(i),
                    diagram.cardinality(i),
                    diagram.parent_configurations(i),
                    r,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(diagram, cpts)
    }

    pub fn diagram(&self) -> &CausalDiagram {
        &self.diagram
    }

    pub fn cpt(&self, i: usize) -> &Cpt<T> {
        &self.cpts[i]
    }

    pub fn cpts(&self) -> &[Cpt<T>] {
        &self.cpts
    }

    pub fn len(&self) -> usize {
        self.diagram.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagram.is_empty()
    }

    /// Replaces the CPT of `i`, keeping every other table.
    pub fn with_cpt(&self, i: usize, cpt: Cpt<T>) -> Result<Self> {
        let mut cpts = self.cpts.clone();
        cpts[i] = cpt;
        Self::new(self.diagram.clone(), cpts)
    }

    /// `P(v) = prod_i theta(v_i | pa_i)` for a full assignment of state
    /// indices.
    pub fn joint_probability(&self, assignment: &[usize]) -> Result<T> {
        self.check_assignment(assignment)?;
        Ok(self.joint_unchecked(assignment))
    }

    pub(crate) fn joint_unchecked(&self, assignment: &[usize]) -> T {
        (0..self.len()).fold(T::one(), |acc, i| {
            let config = self.diagram.parent_config_index(i, assignment);
            acc * self.cpts[i].prob(config, assignment[i])
        })
    }

    pub fn check_assignment(&self, assignment: &[usize]) -> Result<()> {
        if assignment.len() != self.len() {
            return Err(Error::InvalidArgument(format!(
                "assignment has {} entries for {} variables",
                assignment.len(),
                self.len()
            )));
        }
        for (i, &s) in assignment.iter().enumerate() {
            if s >= self.diagram.cardinality(i) {
                return Err(Error::InvalidState {
                    variable: self.diagram.name(i).to_string(),
                    state: s.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Joint probability of an assignment given as state labels.
    pub fn joint_probability_labels(&self, labels: &[&str]) -> Result<T> {
        if labels.len() != self.len() {
            return Err(Error::InvalidArgument("assignment length mismatch".into()));
        }
        let assignment = labels
            .iter()
            .enumerate()
            .map(|(i, l)| {
                self.diagram
                    .variable(i)
                    .state_index(l)
                    .ok_or_else(|| Error::InvalidState {
                        variable: self.diagram.name(i).to_string(),
                        state: (*l).to_string(),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        self.joint_probability(&assignment)
    }

    /// Number of full assignments.
    pub fn state_space_size(&self) -> u128 {
        self.diagram
            .variables()
            .iter()
            .map(|v| v.cardinality() as u128)
            .product()
    }

    pub fn cast<U: Scalar>(&self) -> CausalModel<U> {
        CausalModel {
            diagram: self.diagram.clone(),
            cpts: self.cpts.iter().map(Cpt::cast).collect(),
        }
    }
}

/// Iterates every full assignment in lexicographic order (last variable
/// fastest).
pub(crate) struct Assignments {
    cards: Vec<usize>,
    current: Option<Vec<usize>>,
}

impl Assignments {
    pub(crate) fn new(cards: Vec<usize>) -> Self {
        let current = Some(vec![0; cards.len()]);
        Self { cards, current }
    }
}

impl Iterator for Assignments {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let mut next = out.clone();
        let mut i = next.len();
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            next[i] += 1;
            if next[i] < self.cards[i] {
                self.current = Some(next);
                break;
            }
            next[i] = 0;
        }
        Some(out)
    }
}
