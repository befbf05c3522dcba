//! Forward sampling, mechanism changes and transition-sequence generation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Assignments, CausalModel, Cpt, VariableSpec};
use crate::scalar::Scalar;

/// Largest joint state space [`exact_marginal`] will enumerate.
pub const ENUMERATION_BOUND: u128 = 1 << 24;

/// Default tolerance for deciding that an exact marginal changed.
pub const INFLUENCE_TOLERANCE: f64 = 1e-9;

/// Perturbation of one variable's mechanism: the first state's
/// probability moves by `delta` in every row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanismChangeSpec<T> {
    focal: usize,
    delta: T,
}

impl<T: Scalar> MechanismChangeSpec<T> {
    /// `delta` must lie in `(0, 0.5]`.
    pub fn new(focal: usize, delta: T) -> Result<Self> {
        if !(delta > T::zero() && delta <= T::lit(0.5)) {
            return Err(Error::InvalidArgument(format!(
                "change magnitude {delta} outside (0, 0.5]"
            )));
        }
        Ok(Self { focal, delta })
    }

    pub fn focal(&self) -> usize {
        self.focal
    }

    pub fn delta(&self) -> T {
        self.delta
    }
}

/// Cases as state indices, one entry per variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    variables: Vec<VariableSpec>,
    cases: Vec<Vec<usize>>,
}

impl Dataset {
    pub fn new(variables: Vec<VariableSpec>, cases: Vec<Vec<usize>>) -> Result<Self> {
        for (c, case) in cases.iter().enumerate() {
            if case.len() != variables.len() {
                return Err(Error::InvalidArgument(format!(
                    "case {c} has {} values for {} variables",
                    case.len(),
                    variables.len()
                )));
            }
            for (v, &s) in case.iter().enumerate() {
                if s >= variables[v].cardinality() {
                    return Err(Error::InvalidState {
                        variable: variables[v].name().to_string(),
                        state: s.to_string(),
                    });
                }
            }
        }
        Ok(Self { variables, cases })
    }

    pub fn empty(variables: Vec<VariableSpec>) -> Self {
        Self {
            variables,
            cases: Vec::new(),
        }
    }

    pub fn variables(&self) -> &[VariableSpec] {
        &self.variables
    }

    pub fn cases(&self) -> &[Vec<usize>] {
        &self.cases
    }

    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }

    /// Per-state tallies of variable `v`.
    pub fn state_counts(&self, v: usize) -> Vec<u64> {
        let mut counts = vec![0u64; self.variables[v].cardinality()];
        for case in &self.cases {
            counts[case[v]] += 1;
        }
        counts
    }
}

/// Datasets `D^0..D^k` with the optional focal sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionDatasets {
    datasets: Vec<Dataset>,
    focal_ids: Option<Vec<usize>>,
}

impl TransitionDatasets {
    pub fn new(datasets: Vec<Dataset>, focal_ids: Option<Vec<usize>>) -> Result<Self> {
        let first = datasets
            .first()
            .ok_or_else(|| Error::EmptyData("a transition sequence needs at least one dataset".into()))?;
        if datasets.iter().any(|d| d.variables() != first.variables()) {
            return Err(Error::VariableMismatch);
        }
        if let Some(f) = &focal_ids {
            if f.len() != datasets.len() - 1 {
                return Err(Error::InvalidArgument(format!(
                    "{} focal variables for {} transitions",
                    f.len(),
                    datasets.len() - 1
                )));
            }
            if let Some(&bad) = f.iter().find(|&&v| v >= first.variables().len()) {
                return Err(Error::VariableOutOfRange(bad));
            }
        }
        Ok(Self { datasets, focal_ids })
    }

    pub fn datasets(&self) -> &[Dataset] {
        &self.datasets
    }

    pub fn focal_ids(&self) -> Option<&[usize]> {
        self.focal_ids.as_deref()
    }

    /// Same datasets without focal identities.
    pub fn without_focal_ids(&self) -> Self {
        Self {
            datasets: self.datasets.clone(),
            focal_ids: None,
        }
    }

    /// Number of transitions.
    pub fn k(&self) -> usize {
        self.datasets.len() - 1
    }

    pub fn variables(&self) -> &[VariableSpec] {
        self.datasets[0].variables()
    }
}

/// Ground truth: the successive models of a transition sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionScenario<T> {
    models: Vec<CausalModel<T>>,
    focal_ids: Vec<usize>,
}

impl<T: Scalar> TransitionScenario<T> {
    pub fn models(&self) -> &[CausalModel<T>] {
        &self.models
    }

    pub fn focal_ids(&self) -> &[usize] {
        &self.focal_ids
    }

    pub fn k(&self) -> usize {
        self.focal_ids.len()
    }

    /// Scenario from explicit models `M^0..M^k` over one diagram.
    pub fn from_models(models: Vec<CausalModel<T>>, focal_ids: Vec<usize>) -> Result<Self> {
        if models.len() != focal_ids.len() + 1 {
            return Err(Error::InvalidArgument(format!(
                "{} models for {} transitions",
                models.len(),
                focal_ids.len()
            )));
        }
        if models.iter().any(|m| m.diagram() != models[0].diagram()) {
            return Err(Error::InvalidArgument("models must share one diagram".into()));
        }
        if let Some(&bad) = focal_ids.iter().find(|&&f| f >= models[0].len()) {
            return Err(Error::VariableOutOfRange(bad));
        }
        Ok(Self { models, focal_ids })
    }

    /// Builds a scenario by applying `changes` in sequence to `model`.
    pub fn from_changes(model: &CausalModel<T>, changes: &[MechanismChangeSpec<T>]) -> Result<Self> {
        let mut models = vec![model.clone()];
        for change in changes {
            let next = apply_mechanism_change(models.last().expect("non-empty"), change)?;
            models.push(next);
        }
        Ok(Self {
            models,
            focal_ids: changes.iter().map(|c| c.focal()).collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Marginal<T> {
    pub variable: usize,
    pub probs: Vec<T>,
}

impl<T: Scalar> Marginal<T> {
    /// Max-norm distance between two marginals of the same variable.
    pub fn distance(&self, other: &Self) -> T {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), T::max)
    }
}

fn draw_state<T: Scalar, R: Rng>(row: &[T], rng: &mut R) -> usize {
    let u = T::lit(rng.gen::<f64>());
    let mut cum = T::zero();
    for (s, &p) in row.iter().enumerate() {
        cum = cum + p;
        if u < cum {
            return s;
        }
    }
    // rounding left u above the last partial sum
    row.iter().rposition(|&p| p > T::zero()).unwrap_or(row.len() - 1)
}

/// `n` independent cases by ancestral sampling. Deterministic in `seed`.
pub fn forward_sample<T: Scalar>(model: &CausalModel<T>, n: usize, seed: u64) -> Dataset {
    forward_sample_stream(model, n, seed, 0)
}

/// Like [`forward_sample`], drawing from ChaCha stream `stream` of `seed`
/// so that several datasets from one seed are independent.
pub fn forward_sample_stream<T: Scalar>(model: &CausalModel<T>, n: usize, seed: u64, stream: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let diagram = model.diagram();
    let order = diagram.topological_order();
    let mut cases = Vec::with_capacity(n);
    for _ in 0..n {
        let mut case = vec![0usize; model.len()];
        for &v in &order {
            let config = diagram.parent_config_index(v, &case);
            case[v] = draw_state(model.cpt(v).row(config), &mut rng);
        }
        cases.push(case);
    }
    Dataset {
        variables: diagram.variables().to_vec(),
        cases,
    }
}

/// Moves the first entry of `row` by `+delta` when it is at most 0.5 and
/// by `-delta` otherwise, rescaling the remaining entries by
/// `(1 - new) / (1 - old)`. `delta = 0` returns the row unchanged.
pub fn perturb_row<T: Scalar>(row: &[T], delta: T) -> Result<Vec<T>> {
    let old = row[0];
    if old >= T::one() {
        return Err(Error::MechanismChange(
            "first-state probability is 1, the rescale factor is undefined".into(),
        ));
    }
    let new = if old <= T::lit(0.5) { old + delta } else { old - delta };
    if new < T::zero() || new > T::one() {
        return Err(Error::MechanismChange(format!(
            "perturbed probability {new} leaves [0, 1]"
        )));
    }
    let scale = (T::one() - new) / (T::one() - old);
    let mut out = Vec::with_capacity(row.len());
    out.push(new);
    out.extend(row[1..].iter().map(|&p| p * scale));
    Ok(out)
}

/// Perturbs every row of the focal CPT with `delta` in `[0, 0.5]`.
pub(crate) fn perturb_model<T: Scalar>(model: &CausalModel<T>, focal: usize, delta: T) -> Result<CausalModel<T>> {
    if focal >= model.len() {
        return Err(Error::VariableOutOfRange(focal));
    }
    let cpt = model.cpt(focal);
    let mut probs = Vec::with_capacity(cpt.num_rows() * cpt.cardinality());
    for row in cpt.rows() {
        probs.extend(perturb_row(row, delta)?);
    }
    model.with_cpt(focal, Cpt::from_raw(cpt.cardinality(), probs))
}

/// Applies the change to every parent configuration of the focal
/// variable. All other tables are shared unchanged.
pub fn apply_mechanism_change<T: Scalar>(
    model: &CausalModel<T>,
    spec: &MechanismChangeSpec<T>,
) -> Result<CausalModel<T>> {
    perturb_model(model, spec.focal(), spec.delta())
}

/// `M^0 = model`, `M^j` = change of `M^{j-1}` at `focal_ids[j-1]`; `D^j`
/// holds `n` cases of `M^j` drawn from stream `j` of `seed`.
pub fn generate_transition_sequence<T: Scalar>(
    model: &CausalModel<T>,
    focal_ids: &[usize],
    delta: T,
    n: usize,
    seed: u64,
) -> Result<(TransitionDatasets, TransitionScenario<T>)> {
    if focal_ids.is_empty() {
        return Err(Error::InvalidArgument("at least one focal variable is required".into()));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("datasets need at least one case".into()));
    }
    let changes = focal_ids
        .iter()
        .map(|&f| MechanismChangeSpec::new(f, delta))
        .collect::<Result<Vec<_>>>()?;
    let scenario = TransitionScenario::from_changes(model, &changes)?;
    let datasets = scenario
        .models()
        .iter()
        .enumerate()
        .map(|(j, m)| forward_sample_stream(m, n, seed, j as u64))
        .collect();
    let ts = TransitionDatasets::new(datasets, Some(focal_ids.to_vec()))?;
    Ok((ts, scenario))
}

/// Exact `P(V_v)`, summing the factorization over the ancestral set of
/// `v` only. The bound applies to that set's joint state space.
pub fn exact_marginal<T: Scalar>(model: &CausalModel<T>, v: usize) -> Result<Marginal<T>> {
    if v >= model.len() {
        return Err(Error::VariableOutOfRange(v));
    }
    let diagram = model.diagram();
    let mut members: Vec<usize> = diagram.ancestors(v).into_iter().collect();
    members.push(v);
    members.sort_unstable();
    let cards: Vec<usize> = members.iter().map(|&m| diagram.cardinality(m)).collect();
    let size: u128 = cards.iter().map(|&c| c as u128).product();
    if size > ENUMERATION_BOUND {
        return Err(Error::StateSpaceTooLarge {
            size,
            bound: ENUMERATION_BOUND,
        });
    }
    let mut probs = vec![T::zero(); diagram.cardinality(v)];
    let mut full = vec![0usize; model.len()];
    let v_pos = members.iter().position(|&m| m == v).expect("v is a member");
    for sub in Assignments::new(cards) {
        for (&m, &s) in members.iter().zip(&sub) {
            full[m] = s;
        }
        let p = members.iter().fold(T::one(), |acc, &m| {
            acc * model.cpt(m).prob(diagram.parent_config_index(m, &full), full[m])
        });
        probs[sub[v_pos]] = probs[sub[v_pos]] + p;
    }
    Ok(Marginal { variable: v, probs })
}

/// Exact marginals of every variable.
pub fn exact_marginals<T: Scalar>(model: &CausalModel<T>) -> Result<Vec<Marginal<T>>> {
    (0..model.len()).map(|v| exact_marginal(model, v)).collect()
}

/// True iff every descendant of `focal` has an exact marginal that moved
/// by more than `tol` (max norm). Vacuously true for leaves.
pub fn is_influential_step<T: Scalar>(
    before: &CausalModel<T>,
    after: &CausalModel<T>,
    focal: usize,
    tol: T,
) -> Result<bool> {
    if before.diagram() != after.diagram() {
        return Err(Error::InvalidArgument("models must share one diagram".into()));
    }
    if focal >= before.len() {
        return Err(Error::VariableOutOfRange(focal));
    }
    for y in before.diagram().descendants(focal) {
        let d = exact_marginal(before, y)?.distance(&exact_marginal(after, y)?);
        if d <= tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether every step of the scenario is influential.
pub fn is_influential_scenario<T: Scalar>(scenario: &TransitionScenario<T>, tol: T) -> Result<bool> {
    for (j, &f) in scenario.focal_ids().iter().enumerate() {
        if !is_influential_step(&scenario.models()[j], &scenario.models()[j + 1], f, tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}
