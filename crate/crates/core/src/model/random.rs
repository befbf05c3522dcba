//! Random diagrams and models for experiments and property tests.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{CausalDiagram, CausalModel, Cpt, VariableSpec};
use crate::scalar::Scalar;

/// Random DAG over `variables`: a random permutation fixes the order and
/// each forward pair becomes an edge with probability `edge_prob`, capped
/// at `max_parents` parents per node.
pub fn random_dag<R: Rng + ?Sized>(
    variables: Vec<VariableSpec>,
    edge_prob: f64,
    max_parents: usize,
    rng: &mut R,
) -> CausalDiagram {
    let n = variables.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut parents = vec![Vec::new(); n];
    for (pos, &child) in order.iter().enumerate() {
        let mut candidates: Vec<usize> = order[..pos].to_vec();
        candidates.shuffle(rng);
        for p in candidates {
            if parents[child].len() >= max_parents {
                break;
            }
            if rng.gen_bool(edge_prob) {
                parents[child].push(p);
            }
        }
        parents[child].sort_unstable();
    }
    CausalDiagram::new(variables, parents).expect("forward edges form a DAG")
}

/// `n` binary variables named `V0`, `V1`, ...
pub fn binary_variables(n: usize) -> Vec<VariableSpec> {
    (0..n).map(|i| VariableSpec::binary(format!("V{i}"))).collect()
}

/// Variables named `V0`, ... with cardinalities drawn from `2..=max_states`.
pub fn random_variables<R: Rng + ?Sized>(n: usize, max_states: usize, rng: &mut R) -> Vec<VariableSpec> {
    (0..n)
        .map(|i| VariableSpec::with_cardinality(format!("V{i}"), rng.gen_range(2..=max_states.max(2))))
        .collect()
}

/// Random CPT rows with every entry at least `floor` before normalization,
/// so no row is deterministic.
pub fn random_model<T: Scalar, R: Rng + ?Sized>(diagram: CausalDiagram, floor: f64, rng: &mut R) -> CausalModel<T> {
    let cpts = (0..diagram.len())
        .map(|i| {
            let r = diagram.cardinality(i);
            let rows = diagram.parent_configurations(i);
            let mut probs = Vec::with_capacity(r * rows);
            for _ in 0..rows {
                let raw: Vec<f64> = (0..r).map(|_| floor + rng.gen::<f64>()).collect();
                let sum: f64 = raw.iter().sum();
                probs.extend(raw.iter().map(|x| T::lit(x / sum)));
            }
            Cpt::from_raw(r, probs)
        })
        .collect();
    CausalModel::new(diagram, cpts).expect("dimensions follow the diagram")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_models_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let vars = random_variables(6, 3, &mut rng);
            let g = random_dag(vars, 0.5, 3, &mut rng);
            assert!(g.parent_lists().iter().all(|p| p.len() <= 3));
            let m: CausalModel<f64> = random_model(g, 0.1, &mut rng);
            for cpt in m.cpts() {
                for row in cpt.rows() {
                    let s: f64 = row.iter().sum();
                    assert!((s - 1.0).abs() < 1e-12);
                }
            }
        }
    }
}
