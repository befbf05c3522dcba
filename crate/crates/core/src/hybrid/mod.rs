//! Constraint-based learning over a transition sequence, steered by the
//! knowledge extracted from marginal changes.

mod ci;
mod orient;
mod pipeline;
mod skeleton;

pub use ci::{g2_statistic, pooled_ci_test, CiDecision, CiOracle, CiStatistic, DSeparationOracle, PooledG2Test};
pub use orient::{orient_edges, Conflict, Cpdag, MAX_EXTENSION_EDGES};
pub use pipeline::{discover, discover_with, focal_partition, DiscoverOptions, Discovery, FocalMode, DEFAULT_MAX_COND};
pub use skeleton::{learn_skeleton, Skeleton};

use crate::discovery::BackgroundKnowledge;

/// `before[x][y]`: the knowledge places `x` ahead of `y`, directly or
/// through a chain of constraints. Assumes validated knowledge.
pub(crate) fn order_closure(k: &BackgroundKnowledge, n: usize) -> Vec<Vec<bool>> {
    let mut before = vec![vec![false; n]; n];
    for &(a, b) in k
        .order_constraints
        .iter()
        .chain(&k.required_edges)
        .chain(&k.required_paths)
    {
        before[a][b] = true;
    }
    for via in 0..n {
        for a in 0..n {
            if before[a][via] {
                for b in 0..n {
                    if before[via][b] {
                        before[a][b] = true;
                    }
                }
            }
        }
    }
    before
}
