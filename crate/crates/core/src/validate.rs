//! Fast self-check suite comparing the kernels against exact oracles.

use std::collections::VecDeque;

use crate::alpha::Alpha;
use crate::exact::{attachment_distribution, cr_weight, node_weights};
use crate::growth::{grow_step, Grower};
use crate::master_eq::{self, solve_q};
use crate::model::ModelParams;
use crate::observables::diameter;
use crate::rng::GrowthRng;
use crate::tree::{GrowingTree, NodeId};

/// Attachment counts of `trials` independent proposals on a fixed tree.
pub type Kernel = dyn Fn(&GrowingTree, &ModelParams, u64, usize) -> Vec<u64> + Sync;

/// The production kernel: [`Grower::propose`] on a copy of the tree.
pub fn grower_kernel(tree: &GrowingTree, params: &ModelParams, seed: u64, trials: usize) -> Vec<u64> {
    let mut grower = Grower::new(tree.clone(), *params, GrowthRng::from_seed(seed)).expect("valid params");
    let mut counts = vec![0u64; tree.len()];
    for _ in 0..trials {
        counts[grower.propose().attached.index()] += 1;
    }
    counts
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Parameter grid used by the exact equivalence checks.
pub fn oracle_params() -> Vec<ModelParams> {
    let alphas = [
        Alpha::NegInf,
        Alpha::Finite(-2.0),
        Alpha::Finite(0.0),
        Alpha::Finite(0.5),
        Alpha::Finite(1.0),
        Alpha::Finite(2.0),
        Alpha::PosInf,
    ];
    let mut out = Vec::new();
    for &a in &alphas {
        out.push(ModelParams::qpa(a));
        for r in [0.0, 0.3, 1.0] {
            out.push(ModelParams::cr(a, r).unwrap());
        }
    }
    out
}

/// `count` random trees with 2 to `max_nodes` nodes, grown under a mix of models.
pub fn random_small_trees(count: usize, max_nodes: usize, seed: u64) -> Vec<GrowingTree> {
    let mut rng = GrowthRng::from_seed(seed);
    let models = [
        ModelParams::qpa(0.0),
        ModelParams::qpa(2.0),
        ModelParams::cr(1.0, 0.5).unwrap(),
        ModelParams::cr(-1.0, 0.0).unwrap(),
        ModelParams::cr(3.0, 0.0).unwrap(),
        ModelParams::cr(0.0, 1.0).unwrap(),
    ];
    (0..count)
        .map(|_| {
            let n = 2 + rng.below(max_nodes - 1);
            let params = models[rng.below(models.len())];
            let mut t = GrowingTree::new_seed();
            while t.len() < n {
                grow_step(&mut t, &params, &mut rng);
            }
            t
        })
        .collect()
}

/// Largest per-node gap between enumeration and normalised weights.
pub fn oracle_gap(tree: &GrowingTree, params: &ModelParams) -> f64 {
    let enumerated = attachment_distribution(tree, params);
    let weights = node_weights(tree, params).normalized();
    enumerated
        .iter()
        .zip(&weights)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Diameter by BFS from every node.
pub fn all_pairs_diameter(tree: &GrowingTree) -> u32 {
    let n = tree.len();
    let mut best = 0;
    let mut dist = vec![u32::MAX; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        dist.fill(u32::MAX);
        dist[s] = 0;
        queue.push_back(NodeId::new(s));
        while let Some(u) = queue.pop_front() {
            for &v in tree.neighbors(u) {
                if dist[v.index()] == u32::MAX {
                    dist[v.index()] = dist[u.index()] + 1;
                    best = best.max(dist[v.index()]);
                    queue.push_back(v);
                }
            }
        }
    }
    best
}

fn check(name: &'static str, passed: bool, detail: String) -> CheckResult {
    CheckResult { name, passed, detail }
}

pub fn run_validation() -> ValidationReport {
    run_validation_with(&grower_kernel)
}

/// Run the suite against an arbitrary sampling kernel.
pub fn run_validation_with(kernel: &Kernel) -> ValidationReport {
    let trees = random_small_trees(300, 12, 0x5EED);
    let mut checks = Vec::new();

    let params = oracle_params();
    let mut worst = 0.0f64;
    for t in &trees {
        for p in &params {
            worst = worst.max(oracle_gap(t, p));
        }
    }
    checks.push(check(
        "process_weight_equivalence",
        worst <= 1e-12,
        format!("max |enumeration - weights| = {worst:e}"),
    ));

    let mut exact_ok = true;
    let mut dist_gap = 0.0f64;
    for t in &trees {
        for r in [0.0, 0.3, 0.7, 1.0] {
            exact_ok &= t
                .nodes()
                .all(|i| cr_weight(t, i, Alpha::Finite(1.0), r) == f64::from(t.degree(i)));
        }
        let ba = attachment_distribution(t, &ModelParams::cr(1.0, 0.0).unwrap());
        let redirected = attachment_distribution(t, &ModelParams::cr(1.0, 0.7).unwrap());
        for (a, b) in ba.iter().zip(&redirected) {
            dist_gap = dist_gap.max((a - b).abs());
        }
    }
    checks.push(check(
        "linear_cr_is_ba_exact",
        exact_ok && dist_gap <= 1e-12,
        format!("weights exact: {exact_ok}; max distribution gap {dist_gap:e}"),
    ));

    let identical = trees.iter().all(|t| {
        attachment_distribution(t, &ModelParams::qpa(Alpha::NegInf))
            == attachment_distribution(t, &ModelParams::cr(Alpha::NegInf, 0.5).unwrap())
    });
    checks.push(check(
        "qpa_neg_inf_is_cr_half",
        identical,
        format!("identical on {} trees: {identical}", trees.len()),
    ));

    let grid = solve_q(master_eq::DEFAULT_KMAX, master_eq::DEFAULT_LMAX).expect("valid bounds");
    let residual = grid.max_residual();
    let initial_ok = grid.get(0, 1) == 0.5 && (grid.get(1, 1) - 1.0 / 6.0).abs() <= 1e-16;
    checks.push(check(
        "master_equation_recurrence",
        residual <= 1e-14 && initial_ok,
        format!("max residual {residual:e}; q01 = {}, q11 = {}", grid.get(0, 1), grid.get(1, 1)),
    ));

    let dtrees = random_small_trees(100, 200, 0xD1A);
    let bad = dtrees.iter().filter(|t| diameter(t) != all_pairs_diameter(t)).count();
    checks.push(check(
        "diameter_double_sweep",
        bad == 0,
        format!("{bad} of {} trees disagree with all-pairs BFS", dtrees.len()),
    ));

    // The linear CR kernel must reproduce degree-proportional attachment for any r.
    let fixed = GrowingTree::from_parents(&[0, 0, 1, 1, 1, 2, 5, 0, 7]).unwrap();
    let mut worst_z = 0.0f64;
    let trials = 400_000;
    let mut stochastic = vec![
        ModelParams::cr(1.0, 0.0).unwrap(),
        ModelParams::cr(1.0, 0.7).unwrap(),
        ModelParams::cr(1.0, 1.0).unwrap(),
    ];
    stochastic.extend([ModelParams::qpa(1.0), ModelParams::qpa(Alpha::NegInf), ModelParams::cr(2.0, 0.3).unwrap()]);
    for (s, p) in stochastic.iter().enumerate() {
        let exact = attachment_distribution(&fixed, p);
        let counts = kernel(&fixed, p, 1000 + s as u64, trials);
        for (c, q) in counts.iter().zip(&exact) {
            let sd = (q * (1.0 - q) / trials as f64).sqrt().max(1e-12);
            worst_z = worst_z.max((*c as f64 / trials as f64 - q).abs() / sd);
        }
    }
    checks.push(check(
        "kernel_matches_exact_distribution",
        worst_z <= 5.0,
        format!("largest deviation {worst_z:.2} standard deviations"),
    ));

    ValidationReport { checks }
}
