//! Attachment kernels and the growth driver.
//!
//! One growth step draws from the run's [`GrowthRng`] in a fixed order:
//!
//! 1. target class: one uniform real (finite `alpha` only; the limits pick
//!    the maximum or minimum occupied degree without a draw),
//! 2. member of the class: one uniform integer below the class size,
//! 3. redirection: for QPA one uniform integer in `0..=d` (the value `d`
//!    keeps the target), for CR one uniform real compared against `r`,
//! 4. neighbour: for CR, when redirected, one uniform integer below `d`.

use crate::alpha::Alpha;
use crate::degree_index::DegreeClassIndex;
use crate::error::{Error, Result};
use crate::model::{Family, ModelParams};
use crate::observables::{self, KingTracker, RunSummary};
use crate::rng::GrowthRng;
use crate::tree::{GrowingTree, NodeId};

/// Outcome of the two-stage rule before it is applied to the tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Attachment {
    pub target: NodeId,
    pub attached: NodeId,
    pub redirected: bool,
}

/// Record of one growth step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AttachEvent {
    pub new_node: NodeId,
    pub target: NodeId,
    pub attached: NodeId,
    pub redirected: bool,
}

fn uniform_member(index: &DegreeClassIndex, d: u32, rng: &mut GrowthRng) -> NodeId {
    let k = rng.below(index.count(d));
    index.member(d, k)
}

/// Draw an initial target with probability proportional to `d^alpha`.
///
/// Class weights `n_d * d^alpha` are evaluated in log space relative to the
/// largest one, so any finite `alpha` is safe.
pub fn sample_target(tree: &GrowingTree, alpha: Alpha, rng: &mut GrowthRng) -> NodeId {
    let index = tree.degree_index();
    let class = match alpha {
        Alpha::PosInf => index.max_degree().expect("tree is never empty"),
        Alpha::NegInf => index.min_degree().expect("tree is never empty"),
        Alpha::Finite(a) => {
            let logw: Vec<(u32, f64)> = index
                .occupied()
                .map(|d| (d, (index.count(d) as f64).ln() + a * f64::from(d).ln()))
                .collect();
            let top = logw.iter().map(|&(_, w)| w).fold(f64::NEG_INFINITY, f64::max);
            let weights: Vec<f64> = logw.iter().map(|&(_, w)| (w - top).exp()).collect();
            let total: f64 = weights.iter().sum();
            let mut x = rng.uniform() * total;
            let mut chosen = logw.last().unwrap().0;
            for (&(d, _), &w) in logw.iter().zip(&weights) {
                if x < w {
                    chosen = d;
                    break;
                }
                x -= w;
            }
            chosen
        }
    };
    uniform_member(index, class, rng)
}

/// QPA redirection: a uniform member of the target's closed neighbourhood.
pub fn redirect_qpa(tree: &GrowingTree, target: NodeId, rng: &mut GrowthRng) -> NodeId {
    let nbrs = tree.neighbors(target);
    let k = rng.below(nbrs.len() + 1);
    if k == nbrs.len() {
        target
    } else {
        nbrs[k]
    }
}

/// CR redirection: a uniform neighbour with probability `r`, else the target.
pub fn redirect_cr(tree: &GrowingTree, target: NodeId, r: f64, rng: &mut GrowthRng) -> NodeId {
    if rng.uniform() < r {
        let nbrs = tree.neighbors(target);
        nbrs[rng.below(nbrs.len())]
    } else {
        target
    }
}

fn redirect(tree: &GrowingTree, params: &ModelParams, target: NodeId, rng: &mut GrowthRng) -> Attachment {
    let attached = match params.family {
        Family::Qpa => redirect_qpa(tree, target, rng),
        Family::Cr => redirect_cr(tree, target, params.r, rng),
    };
    Attachment {
        target,
        attached,
        redirected: attached != target,
    }
}

/// One growth step using the reference class scan.
pub fn grow_step(tree: &mut GrowingTree, params: &ModelParams, rng: &mut GrowthRng) -> AttachEvent {
    let target = sample_target(tree, params.alpha, rng);
    let a = redirect(tree, params, target, rng);
    let new_node = tree.add_leaf(a.attached).expect("attached node exists");
    AttachEvent {
        new_node,
        target: a.target,
        attached: a.attached,
        redirected: a.redirected,
    }
}

/// Largest `alpha * ln d` for which `d^alpha` stays comfortably finite.
const MAX_LOG_POWER: f64 = 600.0;

/// Sum tree over degree values holding the class weights `n_d * d^alpha`.
///
/// Internal nodes are recomputed from their children on every update, so the
/// stored sums never drift.
#[derive(Debug, Clone)]
struct ClassSampler {
    alpha: f64,
    leaves: usize,
    sums: Vec<f64>,
    pow: Vec<f64>,
}

impl ClassSampler {
    fn fits(alpha: f64, max_degree: usize) -> bool {
        alpha <= 0.0 || alpha * (max_degree.max(1) as f64).ln() <= MAX_LOG_POWER
    }

    fn build(alpha: f64, index: &DegreeClassIndex, min_leaves: usize) -> Option<Self> {
        let need = (index.max_degree().unwrap_or(1) as usize + 2).max(min_leaves);
        let leaves = need.next_power_of_two();
        if !Self::fits(alpha, leaves) {
            return None;
        }
        let pow: Vec<f64> = (0..leaves).map(|d| (d as f64).powf(alpha)).collect();
        let mut sums = vec![0.0; 2 * leaves];
        for d in index.occupied() {
            sums[leaves + d as usize] = index.count(d) as f64 * pow[d as usize];
        }
        for i in (1..leaves).rev() {
            sums[i] = sums[2 * i] + sums[2 * i + 1];
        }
        Some(ClassSampler {
            alpha,
            leaves,
            sums,
            pow,
        })
    }

    /// Refresh the weight of degree class `d`; false if `d` is out of capacity.
    fn set(&mut self, d: u32, count: usize) -> bool {
        let d = d as usize;
        if d >= self.leaves {
            return false;
        }
        let mut i = self.leaves + d;
        self.sums[i] = count as f64 * self.pow[d];
        while i > 1 {
            i /= 2;
            self.sums[i] = self.sums[2 * i] + self.sums[2 * i + 1];
        }
        true
    }

    fn sample(&self, u: f64) -> u32 {
        let mut x = u * self.sums[1];
        let mut i = 1;
        while i < self.leaves {
            let left = self.sums[2 * i];
            let right = self.sums[2 * i + 1];
            if (x < left && left > 0.0) || right <= 0.0 {
                i *= 2;
            } else {
                x -= left;
                i = 2 * i + 1;
            }
        }
        (i - self.leaves) as u32
    }
}

/// Stateful growth driver for one run.
///
/// Finite `alpha` uses an incrementally maintained sum tree over degree
/// classes; when `d^alpha` could overflow it falls back to the log-space scan
/// of [`sample_target`]. Both draw one uniform real for the class.
#[derive(Debug, Clone)]
pub struct Grower {
    tree: GrowingTree,
    params: ModelParams,
    rng: GrowthRng,
    sampler: Option<ClassSampler>,
    king: KingTracker,
    eta_dmin: u32,
}

impl Grower {
    pub fn new(tree: GrowingTree, params: ModelParams, rng: GrowthRng) -> Result<Self> {
        params.validate()?;
        let sampler = match params.alpha {
            Alpha::Finite(a) => ClassSampler::build(a, tree.degree_index(), 16),
            _ => None,
        };
        let mut king = KingTracker::new();
        king.observe(&tree);
        Ok(Grower {
            tree,
            params,
            rng,
            sampler,
            king,
            eta_dmin: observables::DEFAULT_ETA_DMIN,
        })
    }

    /// Override the minimum degree used for the η dispersion in summaries.
    pub fn with_eta_dmin(mut self, dmin: u32) -> Self {
        self.eta_dmin = dmin;
        self
    }

    pub fn tree(&self) -> &GrowingTree {
        &self.tree
    }

    pub fn into_tree(self) -> GrowingTree {
        self.tree
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn lead_changes(&self) -> u64 {
        self.king.changes()
    }

    /// Draw an attachment without modifying the tree.
    pub fn propose(&mut self) -> Attachment {
        let index = self.tree.degree_index();
        let target = match (self.params.alpha, &self.sampler) {
            (Alpha::Finite(_), Some(sampler)) => {
                let d = sampler.sample(self.rng.uniform());
                uniform_member(index, d, &mut self.rng)
            }
            (alpha, _) => sample_target(&self.tree, alpha, &mut self.rng),
        };
        redirect(&self.tree, &self.params, target, &mut self.rng)
    }

    pub fn step(&mut self) -> AttachEvent {
        let a = self.propose();
        let old = self.tree.degree(a.attached);
        let new_node = self.tree.add_leaf(a.attached).expect("attached node exists");
        self.refresh_sampler(old);
        self.king.observe(&self.tree);
        AttachEvent {
            new_node,
            target: a.target,
            attached: a.attached,
            redirected: a.redirected,
        }
    }

    fn refresh_sampler(&mut self, old: u32) {
        let Some(sampler) = self.sampler.as_mut() else {
            return;
        };
        let index = self.tree.degree_index();
        let ok = sampler.set(old, index.count(old))
            && sampler.set(old + 1, index.count(old + 1))
            && sampler.set(1, index.count(1));
        if !ok {
            let alpha = sampler.alpha;
            let leaves = 2 * sampler.leaves;
            self.sampler = ClassSampler::build(alpha, index, leaves);
        }
    }

    /// Grow to `n_target` nodes, summarising the tree at each snapshot size.
    pub fn grow_to(&mut self, n_target: usize, snapshots: &[usize]) -> Result<Vec<RunSummary>> {
        self.grow_to_with(n_target, snapshots, |_, s| s)
    }

    /// Like [`Grower::grow_to`], passing each snapshot through `inspect`
    /// while the tree is at that size.
    pub fn grow_to_with<T>(
        &mut self,
        n_target: usize,
        snapshots: &[usize],
        mut inspect: impl FnMut(&GrowingTree, RunSummary) -> T,
    ) -> Result<Vec<T>> {
        if n_target < self.tree.len() {
            return Err(Error::Config(format!(
                "target size {n_target} is below the current size {}",
                self.tree.len()
            )));
        }
        if snapshots.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Config("snapshot sizes must be sorted".into()));
        }
        if let Some(&s) = snapshots.iter().find(|&&s| s > n_target || s < self.tree.len()) {
            return Err(Error::Config(format!(
                "snapshot size {s} is outside [{}, {n_target}]",
                self.tree.len()
            )));
        }
        let alpha = self.params.alpha;
        let mut out = Vec::with_capacity(snapshots.len());
        let mut next = snapshots.iter().peekable();
        loop {
            while next.peek().is_some_and(|&&s| s == self.tree.len()) {
                next.next();
                let summary = observables::summarize(&self.tree, alpha, self.eta_dmin, &self.king);
                out.push(inspect(&self.tree, summary));
            }
            if self.tree.len() >= n_target {
                break;
            }
            self.step();
        }
        Ok(out)
    }
}

/// Grow a fresh seed edge to `n_target` nodes with a single rng stream.
pub fn grow_to(
    params: ModelParams,
    n_target: usize,
    seed: u64,
    snapshots: &[usize],
) -> Result<(GrowingTree, Vec<RunSummary>)> {
    let mut grower = Grower::new(
        GrowingTree::with_capacity(n_target.max(2)),
        params,
        GrowthRng::from_seed(seed),
    )?;
    let summaries = grower.grow_to(n_target, snapshots)?;
    Ok((grower.into_tree(), summaries))
}
