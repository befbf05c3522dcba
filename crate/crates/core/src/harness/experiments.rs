//! Error-rate experiments: change-detection type errors and the
//! correctness of order-graph claims.

use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::detect::{build_tag_matrix, detect_change, exact_tag_matrix};
use crate::discovery::{build_marked_order_graph, mog_claims, noninfluential_claims, noninfluential_relations, Claim};
use crate::error::{Error, Result};
use crate::hybrid::{focal_partition, FocalMode};
use crate::model::{CausalDiagram, CausalModel};
use crate::simulate::{
    forward_sample_stream, generate_transition_sequence, perturb_model, MechanismChangeSpec, TransitionScenario,
    INFLUENCE_TOLERANCE,
};

/// Parameters of one experiment cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub delta: f64,
    pub alpha: f64,
    /// Cases per dataset.
    pub n: usize,
    /// Focal variables per run (claim experiment only).
    pub k: usize,
    pub runs: usize,
    pub seed: u64,
    /// Exact marginals replace the chi-square test.
    pub oracle: bool,
    pub focal: FocalMode,
    pub influential: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            delta: 0.1,
            alpha: 0.01,
            n: 500,
            k: 5,
            runs: 100,
            seed: 1,
            oracle: false,
            focal: FocalMode::Known,
            influential: true,
        }
    }
}

impl RunConfig {
    pub fn validate(&self, num_variables: usize) -> Result<()> {
        if !(self.delta > 0.0 && self.delta <= 0.5) {
            return Err(Error::InvalidArgument(format!(
                "delta must lie in (0, 0.5], got {}",
                self.delta
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.n == 0 || self.runs == 0 {
            return Err(Error::InvalidArgument("n and runs must be positive".into()));
        }
        if self.k > num_variables {
            return Err(Error::InvalidArgument(format!(
                "k = {} exceeds the {num_variables} variables",
                self.k
            )));
        }
        Ok(())
    }
}

/// Seed of run `run` under master seed `master`.
pub fn run_seed(master: u64, run: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(run as u64);
    rng.next_u64()
}

/// Tallies for one focal variable `V_i`: descendants `Dec_i`,
/// nondescendants `NDec_i`, missed changes among descendants `c2nc_i`,
/// false changes among nondescendants `nc2c_i`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VariableTally {
    pub dec: usize,
    pub ndec: usize,
    pub c2nc: usize,
    pub nc2c: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeErrorRun {
    pub tallies: Vec<VariableTally>,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl TypeErrorRun {
    /// `sum_i c2nc_i / sum_i Dec_i`.
    pub fn c2nc_rate(&self) -> f64 {
        ratio(
            self.tallies.iter().map(|t| t.c2nc).sum(),
            self.tallies.iter().map(|t| t.dec).sum(),
        )
    }

    /// `sum_i nc2c_i / sum_i NDec_i`.
    pub fn nc2c_rate(&self) -> f64 {
        ratio(
            self.tallies.iter().map(|t| t.nc2c).sum(),
            self.tallies.iter().map(|t| t.ndec).sum(),
        )
    }
}

/// One run: for each variable, change it in the original model, sample
/// before and after, and test every other variable. `delta = 0` gives a
/// null change.
pub fn type_error_run(model: &CausalModel<f64>, delta: f64, alpha: f64, n: usize, seed: u64) -> Result<TypeErrorRun> {
    let g = model.diagram();
    let mut tallies = Vec::with_capacity(g.len());
    for i in 0..g.len() {
        let changed = perturb_model(model, i, delta)?;
        let before = forward_sample_stream(model, n, seed, 2 * i as u64);
        let after = forward_sample_stream(&changed, n, seed, 2 * i as u64 + 1);
        let desc = g.descendants(i);
        let mut t = VariableTally::default();
        for v in (0..g.len()).filter(|&v| v != i) {
            let detected = detect_change(&before, &after, v, alpha)?.changed();
            if desc.contains(&v) {
                t.dec += 1;
                t.c2nc += usize::from(!detected);
            } else {
                t.ndec += 1;
                t.nc2c += usize::from(detected);
            }
        }
        tallies.push(t);
    }
    Ok(TypeErrorRun { tallies })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeErrorReport {
    pub config: RunConfig,
    pub runs: Vec<TypeErrorRun>,
}

impl TypeErrorReport {
    /// Per-run C2NC rate averaged over runs.
    pub fn c2nc_rate(&self) -> f64 {
        self.runs.iter().map(TypeErrorRun::c2nc_rate).sum::<f64>() / self.runs.len() as f64
    }

    pub fn nc2c_rate(&self) -> f64 {
        self.runs.iter().map(TypeErrorRun::nc2c_rate).sum::<f64>() / self.runs.len() as f64
    }

    pub const TSV_HEADER: &'static str = "delta\talpha\tN\truns\tC2NC\tNC2C";

    pub fn tsv_row(&self) -> String {
        let c = &self.config;
        format!(
            "{}\t{}\t{}\t{}\t{:.4}\t{:.4}",
            c.delta,
            c.alpha,
            c.n,
            self.runs.len(),
            self.c2nc_rate(),
            self.nc2c_rate()
        )
    }
}

pub fn type_error_experiment(model: &CausalModel<f64>, config: &RunConfig) -> Result<TypeErrorReport> {
    config.validate(model.len())?;
    let runs = (0..config.runs)
        .into_par_iter()
        .map(|r| type_error_run(model, config.delta, config.alpha, config.n, run_seed(config.seed, r)))
        .collect::<Result<Vec<_>>>()?;
    Ok(TypeErrorReport { config: *config, runs })
}

/// Claim counts of one run, checked against the true diagram. Claims
/// are counted between variables.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClaimTally {
    /// Buckets.
    pub m: usize,
    pub orders: usize,
    /// Order claims `x` before `y` with a directed path `y ~> x`.
    pub order_errors: usize,
    pub ndp: usize,
    /// NDP claims with a directed path either way.
    pub ndp_path_errors: usize,
    /// NDP claims whose pair is adjacent.
    pub ndp_edge_errors: usize,
    pub edges: usize,
    pub edge_errors: usize,
    pub paths: usize,
    pub path_errors: usize,
    pub unknown: usize,
}

impl ClaimTally {
    pub fn total_errors(&self) -> usize {
        self.order_errors + self.ndp_path_errors + self.edge_errors + self.path_errors
    }
}

pub fn evaluate_claims(claims: &[Claim], truth: &CausalDiagram, buckets: usize) -> ClaimTally {
    let reach = truth.reachability();
    let mut t = ClaimTally {
        m: buckets,
        ..Default::default()
    };
    for c in claims {
        match *c {
            Claim::Order(x, y) => {
                t.orders += 1;
                t.order_errors += usize::from(reach[y][x]);
            }
            Claim::Ndp(x, y) => {
                t.ndp += 1;
                t.ndp_path_errors += usize::from(reach[x][y] || reach[y][x]);
                t.ndp_edge_errors += usize::from(truth.adjacent(x, y));
            }
            Claim::Edge(x, y) => {
                t.edges += 1;
                t.edge_errors += usize::from(!truth.has_edge(x, y));
            }
            Claim::Path(x, y) => {
                t.paths += 1;
                t.path_errors += usize::from(!reach[x][y]);
            }
            Claim::Unknown(..) => t.unknown += 1,
        }
    }
    t
}

/// One claim run: a random sequence of `k` distinct focal variables, a
/// transition sequence, its tags, buckets and claims.
pub fn og_claim_run(model: &CausalModel<f64>, config: &RunConfig, seed: u64) -> Result<ClaimTally> {
    let g = model.diagram();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..g.len()).collect();
    order.shuffle(&mut rng);
    let focal = &order[..config.k];
    let tags = if config.oracle {
        let changes = focal
            .iter()
            .map(|&f| MechanismChangeSpec::new(f, config.delta))
            .collect::<Result<Vec<_>>>()?;
        exact_tag_matrix(&TransitionScenario::from_changes(model, &changes)?, INFLUENCE_TOLERANCE)?
    } else {
        let (ts, _) = generate_transition_sequence(model, focal, config.delta, config.n, rng.next_u64())?;
        build_tag_matrix(&ts, config.alpha)?
    };
    let (partition, _) = focal_partition(&tags, Some(focal), config.focal)?;
    let claims = if config.influential {
        mog_claims(&build_marked_order_graph(&partition))
    } else {
        noninfluential_claims(&noninfluential_relations(&tags, focal)?)
    };
    Ok(evaluate_claims(&claims, g, partition.len()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OgClaimReport {
    pub config: RunConfig,
    pub runs: Vec<ClaimTally>,
}

impl OgClaimReport {
    fn mean(&self, f: impl Fn(&ClaimTally) -> usize) -> f64 {
        self.runs.iter().map(|t| f(t) as f64).sum::<f64>() / self.runs.len() as f64
    }

    fn pooled(&self, num: impl Fn(&ClaimTally) -> usize, den: impl Fn(&ClaimTally) -> usize) -> f64 {
        ratio(self.runs.iter().map(&num).sum(), self.runs.iter().map(&den).sum())
    }

    pub fn mean_buckets(&self) -> f64 {
        self.mean(|t| t.m)
    }

    pub fn mean_orders(&self) -> f64 {
        self.mean(|t| t.orders)
    }

    pub fn mean_ndp(&self) -> f64 {
        self.mean(|t| t.ndp)
    }

    pub fn mean_unknown(&self) -> f64 {
        self.mean(|t| t.unknown)
    }

    /// Fraction of wrong order claims over all runs.
    pub fn e_o(&self) -> f64 {
        self.pooled(|t| t.order_errors, |t| t.orders)
    }

    /// Fraction of NDP claims contradicted by a directed path.
    pub fn e_p(&self) -> f64 {
        self.pooled(|t| t.ndp_path_errors, |t| t.ndp)
    }

    /// Fraction of NDP claims contradicted by an edge.
    pub fn e_e(&self) -> f64 {
        self.pooled(|t| t.ndp_edge_errors, |t| t.ndp)
    }

    pub const TSV_HEADER: &'static str = "k\tdelta\talpha\tN\tm\torders\tE_o\tndp\tE_p\tE_e\tu";

    pub fn tsv_row(&self) -> String {
        let c = &self.config;
        format!(
            "{}\t{}\t{}\t{}\t{:.2}\t{:.2}\t{:.4}\t{:.2}\t{:.4}\t{:.4}\t{:.2}",
            c.k,
            c.delta,
            c.alpha,
            c.n,
            self.mean_buckets(),
            self.mean_orders(),
            self.e_o(),
            self.mean_ndp(),
            self.e_p(),
            self.e_e(),
            self.mean_unknown()
        )
    }
}

pub fn og_claim_experiment(model: &CausalModel<f64>, config: &RunConfig) -> Result<OgClaimReport> {
    config.validate(model.len())?;
    if config.k == 0 {
        return Err(Error::InvalidArgument("the claim experiment needs k >= 1".into()));
    }
    let runs = (0..config.runs)
        .into_par_iter()
        .map(|r| og_claim_run(model, config, run_seed(config.seed, r)))
        .collect::<Result<Vec<_>>>()?;
    Ok(OgClaimReport { config: *config, runs })
}

/// Header plus one row per report.
pub fn reports_to_tsv<R>(header: &str, reports: &[R], row: impl Fn(&R) -> String) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{header}");
    for r in reports {
        let _ = writeln!(s, "{}", row(r));
    }
    s
}
