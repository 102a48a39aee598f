//! Exact node weights and attachment probabilities.
//!
//! These are closed-form evaluations over a fixed tree and serve as the
//! reference for the stochastic kernels in [`crate::growth`].
//!
//! For the limits `alpha = ±inf`, `d^alpha` is replaced by its normalised
//! limit: 1 on the extreme (maximum or minimum) occupied degree, 0 elsewhere.
//! Weights at the limits are therefore relative weights.

use crate::alpha::Alpha;
use crate::model::{Family, ModelParams};
use crate::tree::{GrowingTree, NodeId};

/// Above this `|alpha|`, powers are evaluated in log space relative to the
/// extreme degree before normalisation.
const LOG_SPACE_ALPHA: f64 = 30.0;

/// Degree powers `d^alpha` (and `d^(alpha-1)`) for one tree.
#[derive(Debug, Clone, Copy)]
struct Powers {
    alpha: Alpha,
    extreme: u32,
    log_shift: f64,
}

impl Powers {
    /// Unscaled powers for finite `alpha`; limit indicators otherwise.
    fn raw(tree: &GrowingTree, alpha: Alpha) -> Self {
        Self::with_shift(tree, alpha, false)
    }

    /// Powers scaled by a common positive factor so they stay representable.
    fn scaled(tree: &GrowingTree, alpha: Alpha) -> Self {
        Self::with_shift(tree, alpha, true)
    }

    fn with_shift(tree: &GrowingTree, alpha: Alpha, allow_shift: bool) -> Self {
        let index = tree.degree_index();
        let extreme = match alpha {
            Alpha::NegInf => index.min_degree(),
            Alpha::Finite(a) if a < 0.0 => index.min_degree(),
            _ => index.max_degree(),
        }
        .expect("tree is never empty");
        let log_shift = match alpha {
            Alpha::Finite(a) if allow_shift && a.abs() > LOG_SPACE_ALPHA => a * f64::from(extreme).ln(),
            _ => 0.0,
        };
        Powers {
            alpha,
            extreme,
            log_shift,
        }
    }

    fn pow(&self, d: u32) -> f64 {
        match self.alpha {
            Alpha::Finite(a) if self.log_shift == 0.0 => f64::from(d).powf(a),
            Alpha::Finite(a) => (a * f64::from(d).ln() - self.log_shift).exp(),
            _ => f64::from(u8::from(d == self.extreme)),
        }
    }

    /// `d^(alpha - 1)` on the same scale as [`Powers::pow`].
    fn pow_minus_one(&self, d: u32) -> f64 {
        match self.alpha {
            Alpha::Finite(a) if self.log_shift == 0.0 => f64::from(d).powf(a - 1.0),
            _ => self.pow(d) / f64::from(d),
        }
    }
}

fn qpa_weight_with(tree: &GrowingTree, i: NodeId, p: &Powers) -> f64 {
    let term = |j: NodeId| {
        let d = tree.degree(j);
        p.pow(d) / (f64::from(d) + 1.0)
    };
    term(i) + tree.neighbors(i).iter().map(|&j| term(j)).sum::<f64>()
}

fn cr_weight_with(tree: &GrowingTree, i: NodeId, r: f64, p: &Powers) -> f64 {
    let own = p.pow(tree.degree(i));
    let via: f64 = tree.neighbors(i).iter().map(|&j| p.pow_minus_one(tree.degree(j))).sum();
    // (1 - r)·own + r·via, arranged so that own == via gives own exactly.
    own + r * (via - own)
}

/// QPA weight `d_i^a/(d_i+1) + Σ_{j~i} d_j^a/(d_j+1)`.
pub fn qpa_weight(tree: &GrowingTree, i: NodeId, alpha: Alpha) -> f64 {
    qpa_weight_with(tree, i, &Powers::raw(tree, alpha))
}

/// CR weight `(1-r)·d_i^a + r·Σ_{j~i} d_j^(a-1)`.
pub fn cr_weight(tree: &GrowingTree, i: NodeId, alpha: Alpha, r: f64) -> f64 {
    cr_weight_with(tree, i, r, &Powers::raw(tree, alpha))
}

/// Total graph weight `Σ_i d_i^alpha`, shared by both families.
pub fn total_weight(tree: &GrowingTree, alpha: Alpha) -> f64 {
    let p = Powers::raw(tree, alpha);
    tree.degrees().iter().map(|&d| p.pow(d)).sum()
}

/// Per-node weights with their sum.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeWeightVector {
    pub weights: Vec<f64>,
    pub total: f64,
}

impl NodeWeightVector {
    fn new(weights: Vec<f64>) -> Self {
        let total = weights.iter().sum();
        NodeWeightVector { weights, total }
    }

    pub fn normalized(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w / self.total).collect()
    }
}

/// Weights of every node under `params`, on a common scale.
pub fn node_weights(tree: &GrowingTree, params: &ModelParams) -> NodeWeightVector {
    let p = Powers::scaled(tree, params.alpha);
    let weights = tree
        .nodes()
        .map(|i| match params.family {
            Family::Qpa => qpa_weight_with(tree, i, &p),
            Family::Cr => cr_weight_with(tree, i, params.r, &p),
        })
        .collect();
    NodeWeightVector::new(weights)
}

/// Attachment probabilities obtained by enumerating every (target, outcome)
/// pair of the two-stage rule.
pub fn attachment_distribution(tree: &GrowingTree, params: &ModelParams) -> Vec<f64> {
    let p = Powers::scaled(tree, params.alpha);
    let target_w: Vec<f64> = tree.degrees().iter().map(|&d| p.pow(d)).collect();
    let total: f64 = target_w.iter().sum();
    let mut out = vec![0.0; tree.len()];
    for t in tree.nodes() {
        let pt = target_w[t.index()] / total;
        if pt == 0.0 {
            continue;
        }
        let nbrs = tree.neighbors(t);
        let d = nbrs.len() as f64;
        match params.family {
            Family::Qpa => {
                let share = pt / (d + 1.0);
                out[t.index()] += share;
                for &j in nbrs {
                    out[j.index()] += share;
                }
            }
            Family::Cr => {
                out[t.index()] += pt * (1.0 - params.r);
                if params.r > 0.0 {
                    let share = pt * params.r / d;
                    for &j in nbrs {
                        out[j.index()] += share;
                    }
                }
            }
        }
    }
    out
}

/// Balance quantity `η_i = Σ_{j~i} d_j^(alpha-1) / d_i`.
pub fn eta(tree: &GrowingTree, i: NodeId, alpha: f64) -> f64 {
    let s: f64 = tree
        .neighbors(i)
        .iter()
        .map(|&j| f64::from(tree.degree(j)).powf(alpha - 1.0))
        .sum();
    s / f64::from(tree.degree(i))
}

/// `2·alpha·Σ_{edges (i,j)} (d_i·d_j)^(alpha-1)`.
pub fn gamma_alpha(tree: &GrowingTree, alpha: f64) -> f64 {
    let s: f64 = tree
        .edges()
        .map(|(u, v)| (f64::from(tree.degree(u)) * f64::from(tree.degree(v))).powf(alpha - 1.0))
        .sum();
    2.0 * alpha * s
}
