use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tscause::model::random::{random_dag, random_model, random_variables};
use tscause::model::CausalDiagram;
use tscause::score::{posterior_over_dags, score_diagram, GraphPrior};
use tscause::simulate::{generate_transition_sequence, Dataset, TransitionDatasets};
use tscause::CausalModel;

fn pooled(ds: &[Dataset]) -> Dataset {
    let cases = ds.iter().flat_map(|d| d.cases().iter().cloned()).collect();
    Dataset::new(ds[0].variables().to_vec(), cases).unwrap()
}

fn plain(d: Dataset) -> TransitionDatasets {
    TransitionDatasets::new(vec![d], None).unwrap()
}

#[test]
fn focal_families_split_and_others_pool() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..30 {
        let n = rng.gen_range(2..=5);
        let g = random_dag(random_variables(n, 3, &mut rng), 0.5, 2, &mut rng);
        let m: CausalModel = random_model(g.clone(), 0.1, &mut rng);
        let f = rng.gen_range(0..n);
        let (ts, _) = generate_transition_sequence(&m, &[f], 0.3, rng.gen_range(5..80), rng.gen()).unwrap();
        let s = score_diagram(&ts, &g, &[f], 2.0f64).unwrap();
        assert!((s.total - s.per_variable.iter().sum::<f64>()).abs() < 1e-9);

        let whole = score_diagram(&plain(pooled(ts.datasets())), &g, &[], 2.0f64).unwrap();
        let before = score_diagram(&plain(ts.datasets()[0].clone()), &g, &[], 2.0f64).unwrap();
        let after = score_diagram(&plain(ts.datasets()[1].clone()), &g, &[], 2.0f64).unwrap();
        for v in 0..n {
            let want = if v == f {
                before.per_variable[v] + after.per_variable[v]
            } else {
                whole.per_variable[v]
            };
            assert!((s.per_variable[v] - want).abs() < 1e-9, "variable {v}");
        }
    }
}

#[test]
fn family_terms_depend_only_on_the_family() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..30 {
        let g = random_dag(random_variables(4, 3, &mut rng), 0.5, 3, &mut rng);
        let m: CausalModel = random_model(g.clone(), 0.1, &mut rng);
        let (ts, _) = generate_transition_sequence(&m, &[0, 1], 0.2, 40, rng.gen()).unwrap();
        // drop every parent of variable 3; others keep their families
        let mut parents = g.parent_lists().to_vec();
        parents[3].clear();
        let h = g.with_parents(parents).unwrap();
        let a = score_diagram(&ts, &g, &[0, 1], 1.0f64).unwrap();
        let b = score_diagram(&ts, &h, &[0, 1], 1.0f64).unwrap();
        for v in 0..3 {
            assert_eq!(a.per_variable[v], b.per_variable[v]);
        }
    }
}

#[test]
fn posterior_over_all_dags_is_normalized() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let g = CausalDiagram::binary(&["A", "B", "C"], &[(0, 1), (1, 2)]).unwrap();
    let m: CausalModel = random_model(g, 0.1, &mut rng);
    let (ts, _) = generate_transition_sequence(&m, &[1], 0.4, 200, 5).unwrap();
    let p = posterior_over_dags(&ts, &[1], 1.0f64, &GraphPrior::Uniform).unwrap();
    assert_eq!(p.len(), 25);
    let total: f64 = p.entries().iter().map(|e| e.posterior).sum();
    assert!((total - 1.0).abs() < 1e-12);
    let map = p.map_estimate().unwrap();
    assert!(p.entries().iter().all(|e| e.log_score <= map.log_score));
}

#[test]
fn single_precision_tracks_double() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let g = random_dag(random_variables(4, 3, &mut rng), 0.5, 2, &mut rng);
    let m: CausalModel = random_model(g.clone(), 0.1, &mut rng);
    let (ts, _) = generate_transition_sequence(&m, &[2], 0.3, 100, 9).unwrap();
    let d = score_diagram(&ts, &g, &[2], 1.0f64).unwrap().total;
    let s = score_diagram(&ts, &g, &[2], 1.0f32).unwrap().total;
    assert!(((s as f64) - d).abs() < 1e-3 * d.abs());
}
