use tscause::hybrid::{discover, pooled_ci_test, DiscoverOptions};
use tscause::model::CausalDiagram;
use tscause::simulate::generate_transition_sequence;
use tscause::CausalModel;

fn model(edges: &[(usize, usize)], rows: Vec<Vec<Vec<f64>>>) -> CausalModel {
    CausalModel::from_rows(CausalDiagram::binary(&["A", "B", "C"], edges).unwrap(), rows).unwrap()
}

#[test]
fn chain_with_focal_root() {
    let m = model(
        &[(0, 1), (1, 2)],
        vec![
            vec![vec![0.3, 0.7]],
            vec![vec![0.85, 0.15], vec![0.2, 0.8]],
            vec![vec![0.8, 0.2], vec![0.15, 0.85]],
        ],
    );
    let mut good = 0;
    for seed in 0..20 {
        let (ts, _) = generate_transition_sequence(&m, &[0], 0.5, 3000, seed).unwrap();
        let d = discover(&ts, 0.01, &DiscoverOptions::default()).unwrap();
        let c = &d.cpdag;
        if c.has_directed(0, 1) && c.has_directed(1, 2) && !c.adjacent(0, 2) && c.conflicts().is_empty() {
            good += 1;
        }
    }
    assert!(good >= 18, "{good}/20");
}

#[test]
fn collider_orientation() {
    let m = model(
        &[(0, 2), (1, 2)],
        vec![
            vec![vec![0.3, 0.7]],
            vec![vec![0.4, 0.6]],
            vec![vec![0.9, 0.1], vec![0.5, 0.5], vec![0.45, 0.55], vec![0.1, 0.9]],
        ],
    );
    let mut good = 0;
    for seed in 0..20 {
        let (ts, _) = generate_transition_sequence(&m, &[1], 0.5, 3000, 100 + seed).unwrap();
        let d = discover(&ts, 0.01, &DiscoverOptions::default()).unwrap();
        let c = &d.cpdag;
        if c.has_directed(0, 2) && c.has_directed(1, 2) && !c.adjacent(0, 1) {
            good += 1;
        }
    }
    assert!(good >= 18, "{good}/20");
}

#[test]
fn pooled_test_rejects_dependence_in_every_regime() {
    let m = model(
        &[(0, 1)],
        vec![
            vec![vec![0.3, 0.7]],
            vec![vec![0.85, 0.15], vec![0.2, 0.8]],
            vec![vec![0.5, 0.5]],
        ],
    );
    let (ts, _) = generate_transition_sequence(&m, &[0], 0.5, 2000, 4).unwrap();
    let dep = pooled_ci_test(&ts, 0, 1, &[], 0.01).unwrap();
    assert!(!dep.independent);
    assert_eq!(dep.statistics.len(), 2);
    let indep = pooled_ci_test(&ts, 0, 2, &[], 0.01).unwrap();
    assert!(indep.independent);
}
