//! Growth kernels against exact attachment distributions.

use growthlab::exact::{attachment_distribution, node_weights};
use growthlab::validate::{grower_kernel, oracle_gap, oracle_params, random_small_trees};
use growthlab::{Alpha, GrowingTree, ModelParams};

#[test]
fn process_and_weight_routes_agree_on_random_trees() {
    let trees = random_small_trees(1000, 12, 77);
    for t in &trees {
        for p in oracle_params() {
            let gap = oracle_gap(t, &p);
            assert!(gap <= 1e-12, "{p} on {:?}: gap {gap:e}", t.parents());
        }
    }
}

/// Every labelled recursive tree on up to 7 nodes.
fn all_recursive_trees(max_nodes: usize) -> Vec<GrowingTree> {
    let mut out = vec![GrowingTree::new_seed()];
    let mut frontier = vec![vec![0u32]];
    while let Some(parents) = frontier.pop() {
        if parents.len() + 1 >= max_nodes {
            continue;
        }
        for p in 0..=parents.len() as u32 {
            let mut next = parents.clone();
            next.push(p);
            out.push(GrowingTree::from_parents(&next).unwrap());
            frontier.push(next);
        }
    }
    out
}

#[test]
fn exhaustive_small_trees_match_weights() {
    let trees = all_recursive_trees(7);
    assert_eq!(trees.len(), 1 + 2 + 6 + 24 + 120 + 720);
    for t in &trees {
        for p in oracle_params() {
            assert!(oracle_gap(t, &p) <= 1e-12);
        }
    }
}

#[test]
fn weight_vectors_sum_to_total() {
    for t in random_small_trees(200, 12, 5) {
        for p in oracle_params() {
            let w = node_weights(&t, &p);
            let sum: f64 = w.weights.iter().sum();
            assert!((sum - w.total).abs() <= 1e-12 * w.total.max(1.0), "{p}");
        }
    }
}

fn max_sigma(tree: &GrowingTree, params: &ModelParams, seed: u64, trials: usize) -> f64 {
    let counts = grower_kernel(tree, params, seed, trials);
    let expected = attachment_distribution(tree, params);
    counts
        .iter()
        .zip(&expected)
        .map(|(&c, &p)| {
            let mean = trials as f64 * p;
            let sd = (trials as f64 * p * (1.0 - p)).sqrt();
            if sd == 0.0 {
                assert_eq!(c as f64, mean, "{params}: impossible target hit");
                0.0
            } else {
                (c as f64 - mean).abs() / sd
            }
        })
        .fold(0.0, f64::max)
}

#[test]
fn sampled_attachments_match_exact_distribution() {
    let trees = [
        GrowingTree::from_parents(&[0, 0, 1, 1, 2, 0, 3, 3, 3, 6, 10]).unwrap(),
        GrowingTree::star(9),
        GrowingTree::path(8),
    ];
    let params = [
        ModelParams::qpa(1.0),
        ModelParams::qpa(-2.0),
        ModelParams::qpa(Alpha::PosInf),
        ModelParams::qpa(Alpha::NegInf),
        ModelParams::cr(2.0, 0.3).unwrap(),
        ModelParams::cr(0.0, 0.7).unwrap(),
        ModelParams::cr(Alpha::PosInf, 0.5).unwrap(),
    ];
    for (i, t) in trees.iter().enumerate() {
        for (j, p) in params.iter().enumerate() {
            let s = max_sigma(t, p, 1000 + (i * 10 + j) as u64, 1_000_000);
            assert!(s <= 4.0, "{p} on tree {i}: {s:.2} sigma");
        }
    }
}

#[test]
fn a_wrong_redirect_rule_is_detected() {
    // CR(alpha, r) with r misread as 1 - r.
    let t = GrowingTree::from_parents(&[0, 0, 1, 1, 2, 0, 3, 3]).unwrap();
    let right = ModelParams::cr(2.0, 0.3).unwrap();
    let wrong = ModelParams::cr(2.0, 0.7).unwrap();
    let trials = 1_000_000;
    let counts = grower_kernel(&t, &wrong, 3, trials);
    let expected = attachment_distribution(&t, &right);
    let worst = counts
        .iter()
        .zip(&expected)
        .map(|(&c, &p)| (c as f64 - trials as f64 * p).abs() / (trials as f64 * p * (1.0 - p)).sqrt())
        .fold(0.0, f64::max);
    assert!(worst > 4.0);
}
