#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use tscause::model::random::{binary_variables, random_dag, random_model};
use tscause::model::{transition_equivalent, CausalDiagram};
use tscause::simulate::{is_influential_scenario, INFLUENCE_TOLERANCE};
use tscause::{CausalModel, MechanismChangeSpec, TransitionScenario};

/// Random binary model with a random influential focal sequence of
/// distinct variables (`1..=k_max` changes).
pub fn influential_scenario<R: Rng>(rng: &mut R, n_min: usize, n_max: usize, k_max: usize) -> TransitionScenario {
    influential_scenario_with(rng, n_min, n_max, |n, rng| rng.gen_range(1..=k_max.min(n)))
}

/// As [`influential_scenario`], with every variable changed once.
pub fn influential_all_focal<R: Rng>(rng: &mut R, n_min: usize, n_max: usize) -> TransitionScenario {
    influential_scenario_with(rng, n_min, n_max, |n, _| n)
}

fn influential_scenario_with<R: Rng>(
    rng: &mut R,
    n_min: usize,
    n_max: usize,
    pick_k: impl Fn(usize, &mut R) -> usize,
) -> TransitionScenario {
    loop {
        let n = rng.gen_range(n_min..=n_max);
        let g = random_dag(binary_variables(n), 0.45, 3, rng);
        let m: CausalModel = random_model(g, 0.1, rng);
        let k = pick_k(n, rng);
        let mut vars: Vec<usize> = (0..n).collect();
        vars.shuffle(rng);
        let changes: Vec<MechanismChangeSpec> = vars[..k]
            .iter()
            .map(|&f| MechanismChangeSpec::new(f, rng.gen_range(0.1..=0.5)).unwrap())
            .collect();
        let sc = TransitionScenario::from_changes(&m, &changes).unwrap();
        if is_influential_scenario(&sc, INFLUENCE_TOLERANCE).unwrap() {
            return sc;
        }
    }
}

/// Every DAG on `g`'s skeleton that is transition equivalent to `g`.
pub fn transition_class(g: &CausalDiagram, focal: &[usize]) -> BTreeSet<String> {
    let skel: Vec<(usize, usize)> = g.skeleton().into_iter().collect();
    let mut out = BTreeSet::new();
    for mask in 0u64..(1 << skel.len()) {
        let edges: Vec<(usize, usize)> = skel
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| if mask >> i & 1 == 1 { (b, a) } else { (a, b) })
            .collect();
        if let Ok(h) = CausalDiagram::from_edges(g.variables().to_vec(), &edges) {
            if transition_equivalent(&h, g, focal).unwrap() {
                out.insert(h.canonical_id());
            }
        }
    }
    out
}
