//! Measured quantities of grown trees.

use std::collections::VecDeque;

use serde::Serialize;

use crate::alpha::Alpha;
use crate::error::{Error, Result};
use crate::exact;
use crate::tree::{GrowingTree, NodeId};

/// Default minimum degree for the η dispersion; leaves are excluded.
pub const DEFAULT_ETA_DMIN: u32 = 5;

/// Node counts per degree value.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DegreeHistogram {
    counts: Vec<u64>,
    n: u64,
}

impl DegreeHistogram {
    pub fn from_tree(tree: &GrowingTree) -> Self {
        let index = tree.degree_index();
        let max = index.max_degree().unwrap_or(0) as usize;
        let mut counts = vec![0u64; max + 1];
        for d in index.occupied() {
            counts[d as usize] = index.count(d) as u64;
        }
        DegreeHistogram {
            counts,
            n: tree.len() as u64,
        }
    }

    /// Build from `(degree, count)` pairs; repeated degrees accumulate.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, u64)>) -> Self {
        let mut h = DegreeHistogram::default();
        for (d, c) in pairs {
            h.add(d, c);
        }
        h
    }

    pub fn add(&mut self, degree: u32, count: u64) {
        let d = degree as usize;
        if self.counts.len() <= d {
            self.counts.resize(d + 1, 0);
        }
        self.counts[d] += count;
        self.n += count;
    }

    /// Pool another histogram into this one.
    pub fn merge(&mut self, other: &DegreeHistogram) {
        for (d, c) in other.iter() {
            self.add(d, c);
        }
    }

    pub fn count(&self, degree: u32) -> u64 {
        self.counts.get(degree as usize).copied().unwrap_or(0)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn max_degree(&self) -> u32 {
        self.iter().last().map_or(0, |(d, _)| d)
    }

    /// Non-zero `(degree, count)` pairs in ascending degree order.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (u32, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c > 0)
            .map(|(d, &c)| (d as u32, c))
    }

    /// Every count multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> Self {
        DegreeHistogram {
            counts: self.counts.iter().map(|c| c * factor).collect(),
            n: self.n * factor,
        }
    }

    /// Empirical `p_d` indexed by degree (index 0 is always 0).
    pub fn distribution(&self) -> Vec<f64> {
        let n = self.n.max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// `Σ d · count(d)`.
    pub fn degree_sum(&self) -> u64 {
        self.iter().map(|(d, c)| u64::from(d) * c).sum()
    }
}

/// Observables of a tree at one size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub n: usize,
    pub leaf_fraction: f64,
    pub d1: u32,
    pub d2: u32,
    pub argmax_id: NodeId,
    pub diameter: u32,
    pub lead_changes: u64,
    pub eta_cv: Option<f64>,
    #[serde(skip)]
    pub histogram: DegreeHistogram,
}

/// Counts changes of the unique maximum-degree node during growth.
///
/// Steps without a unique king leave the record untouched; a change is
/// counted when the next unique king differs from the last one seen.
#[derive(Debug, Clone, Default)]
pub struct KingTracker {
    last: Option<NodeId>,
    changes: u64,
}

impl KingTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn observe(&mut self, tree: &GrowingTree) {
        let index = tree.degree_index();
        let Some(max) = index.max_degree() else {
            return;
        };
        if index.count(max) != 1 {
            return;
        }
        let king = index.member(max, 0);
        if self.last.is_some_and(|k| k != king) {
            self.changes += 1;
        }
        self.last = Some(king);
    }

    pub fn changes(&self) -> u64 {
        self.changes
    }

    pub fn current(&self) -> Option<NodeId> {
        self.last
    }
}

pub fn degree_histogram(tree: &GrowingTree) -> DegreeHistogram {
    DegreeHistogram::from_tree(tree)
}

pub fn leaf_fraction(tree: &GrowingTree) -> f64 {
    tree.degree_index().count(1) as f64 / tree.len() as f64
}

fn bfs_farthest(tree: &GrowingTree, start: NodeId, dist: &mut [u32], queue: &mut VecDeque<NodeId>) -> (NodeId, u32) {
    dist.fill(u32::MAX);
    queue.clear();
    dist[start.index()] = 0;
    queue.push_back(start);
    let mut far = (start, 0);
    while let Some(u) = queue.pop_front() {
        let du = dist[u.index()];
        if du > far.1 {
            far = (u, du);
        }
        for &v in tree.neighbors(u) {
            if dist[v.index()] == u32::MAX {
                dist[v.index()] = du + 1;
                queue.push_back(v);
            }
        }
    }
    far
}

/// Exact diameter by two breadth-first sweeps.
pub fn diameter(tree: &GrowingTree) -> u32 {
    let mut dist = vec![u32::MAX; tree.len()];
    let mut queue = VecDeque::with_capacity(tree.len());
    let (far, _) = bfs_farthest(tree, NodeId::new(0), &mut dist, &mut queue);
    bfs_farthest(tree, far, &mut dist, &mut queue).1
}

/// Largest and second-largest degree and the lowest-id node of maximum degree.
pub fn extreme_degrees(tree: &GrowingTree) -> (u32, u32, NodeId) {
    let index = tree.degree_index();
    let d1 = index.max_degree().expect("tree is never empty");
    let top = index.bucket(d1);
    let argmax = *top.iter().min().unwrap();
    let d2 = if top.len() > 1 {
        d1
    } else {
        index.occupied().rev().nth(1).unwrap_or(d1)
    };
    (d1, d2, argmax)
}

/// Coefficient of variation of η over nodes with degree at least `dmin`.
pub fn eta_dispersion(tree: &GrowingTree, alpha: f64, dmin: u32) -> Result<f64> {
    let etas: Vec<f64> = tree
        .nodes()
        .filter(|&i| tree.degree(i) >= dmin)
        .map(|i| exact::eta(tree, i, alpha))
        .collect();
    if etas.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} node(s) with degree >= {dmin}; need at least 2",
            etas.len()
        )));
    }
    let n = etas.len() as f64;
    let mean = etas.iter().sum::<f64>() / n;
    let var = etas.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / n;
    Ok(var.sqrt() / mean)
}

pub fn summarize(tree: &GrowingTree, alpha: Alpha, eta_dmin: u32, king: &KingTracker) -> RunSummary {
    let (d1, d2, argmax_id) = extreme_degrees(tree);
    let eta_cv = match alpha {
        Alpha::Finite(a) => eta_dispersion(tree, a, eta_dmin).ok(),
        _ => None,
    };
    RunSummary {
        n: tree.len(),
        leaf_fraction: leaf_fraction(tree),
        d1,
        d2,
        argmax_id,
        diameter: diameter(tree),
        lead_changes: king.changes(),
        eta_cv,
        histogram: DegreeHistogram::from_tree(tree),
    }
}

/// Degree distribution of the neighbours of the lowest-id maximum-degree node.
pub fn king_neighbor_histogram(tree: &GrowingTree) -> DegreeHistogram {
    let (_, _, king) = extreme_degrees(tree);
    DegreeHistogram::from_pairs(tree.neighbors(king).iter().map(|&j| (tree.degree(j), 1)))
}

/// Two-parameter Weibull tail `S(d) = exp(-(d/scale)^shape)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeibullFit {
    pub shape: f64,
    pub scale: f64,
    pub d_lo: u32,
    pub d_hi: u32,
    /// Root-mean-square residual of the fit in `(ln d, ln(-ln S))` coordinates.
    pub rms: f64,
    pub points: usize,
}

/// Minimum number of nodes strictly above the upper end of the fit window.
pub const WEIBULL_TAIL_MIN_COUNT: u64 = 10;

/// Fit a Weibull tail to the empirical `S(d) = P(D > d)` over `[d_lo, d_hi]`,
/// with `d_hi` the largest degree that still has at least
/// [`WEIBULL_TAIL_MIN_COUNT`] nodes above it.
pub fn weibull_tail_fit(hist: &DegreeHistogram, d_lo: u32) -> Result<WeibullFit> {
    let mut above = hist.n();
    let mut d_hi = None;
    for (d, c) in hist.iter() {
        above -= c;
        if above >= WEIBULL_TAIL_MIN_COUNT {
            d_hi = Some(d);
        }
    }
    let d_hi = d_hi.ok_or_else(|| Error::InsufficientData("tail too thin for a fit window".into()))?;
    weibull_tail_fit_window(hist, d_lo, d_hi)
}

/// Least-squares fit of `ln(-ln S(d))` against `ln d` on observed degrees in
/// `[d_lo, d_hi]`. The slope is the shape and the intercept is `-shape·ln(scale)`.
pub fn weibull_tail_fit_window(hist: &DegreeHistogram, d_lo: u32, d_hi: u32) -> Result<WeibullFit> {
    let n = hist.n() as f64;
    let mut above = hist.n();
    let mut pts = Vec::new();
    for (d, c) in hist.iter() {
        above -= c;
        if d < d_lo || d > d_hi || above == 0 {
            continue;
        }
        let s = above as f64 / n;
        if s < 1.0 {
            pts.push((f64::from(d).ln(), (-s.ln()).ln()));
        }
    }
    if pts.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "fit window [{d_lo}, {d_hi}] holds {} degree values; need at least 5",
            pts.len()
        )));
    }
    let line = least_squares(&pts);
    let shape = line.slope;
    if shape <= 0.0 {
        return Err(Error::Domain(format!("fitted shape {shape} is not positive")));
    }
    Ok(WeibullFit {
        shape,
        scale: (-line.intercept / shape).exp(),
        d_lo,
        d_hi,
        rms: (line.ssr / pts.len() as f64).sqrt(),
        points: pts.len(),
    })
}

struct Line {
    slope: f64,
    intercept: f64,
    ssr: f64,
    sxx: f64,
}

fn least_squares(pts: &[(f64, f64)]) -> Line {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    Line {
        slope,
        intercept,
        ssr,
        sxx,
    }
}

/// Slope of `ln v` against `ln N` and its standard error.
pub fn scaling_exponent(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} point(s); need at least 3",
            points.len()
        )));
    }
    if let Some(p) = points.iter().find(|p| !(p.0 > 0.0 && p.1 > 0.0)) {
        return Err(Error::Domain(format!("non-positive point ({}, {})", p.0, p.1)));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let line = least_squares(&logs);
    if line.sxx <= 0.0 {
        return Err(Error::Domain("all sizes are equal".into()));
    }
    let stderr = (line.ssr / (logs.len() as f64 - 2.0) / line.sxx).sqrt();
    Ok((line.slope, stderr))
}

/// Total-variation distance between two distributions on `0, 1, 2, ...`.
///
/// Mass missing from either input (a truncated distribution) is treated as
/// sitting on a point outside both supports, so it adds to the distance.
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    let len = p.len().max(q.len());
    let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    let diff: f64 = (0..len).map(|i| (at(p, i) - at(q, i)).abs()).sum();
    let missing_p = (1.0 - p.iter().sum::<f64>()).max(0.0);
    let missing_q = (1.0 - q.iter().sum::<f64>()).max(0.0);
    0.5 * (diff + missing_p + missing_q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histograms_of_small_trees() {
        let star = DegreeHistogram::from_tree(&GrowingTree::star(4));
        assert_eq!(star.iter().collect::<Vec<_>>(), vec![(1, 3), (3, 1)]);
        let path = DegreeHistogram::from_tree(&GrowingTree::path(4));
        assert_eq!(path.iter().collect::<Vec<_>>(), vec![(1, 2), (2, 2)]);
        assert_eq!(path.degree_sum(), 6);
    }

    #[test]
    fn leaf_fractions() {
        assert_eq!(leaf_fraction(&GrowingTree::star(10)), 0.9);
        assert_eq!(leaf_fraction(&GrowingTree::path(10)), 0.2);
        assert_eq!(leaf_fraction(&GrowingTree::new_seed()), 1.0);
    }

    #[test]
    fn diameters() {
        assert_eq!(diameter(&GrowingTree::path(4)), 3);
        assert_eq!(diameter(&GrowingTree::star(50)), 2);
        assert_eq!(diameter(&GrowingTree::new_seed()), 1);
    }

    #[test]
    fn extremes() {
        assert_eq!(extreme_degrees(&GrowingTree::star(4)), (3, 1, NodeId::new(0)));
        assert_eq!(extreme_degrees(&GrowingTree::path(5)), (2, 2, NodeId::new(1)));
        assert_eq!(extreme_degrees(&GrowingTree::new_seed()), (1, 1, NodeId::new(0)));
    }

    #[test]
    fn eta_dispersion_cases() {
        let t = GrowingTree::from_parents(&[0, 1, 1, 0, 2, 2, 2]).unwrap();
        assert!(eta_dispersion(&t, 1.0, 1).unwrap().abs() < 1e-15);

        // Star of 4 at alpha = 2: eta values {1, 3, 3, 3}.
        let cv = eta_dispersion(&GrowingTree::star(4), 2.0, 1).unwrap();
        let (mean, var) = (2.5, (1.5f64.powi(2) + 3.0 * 0.25) / 4.0);
        assert!((cv - var.sqrt() / mean).abs() < 1e-12);

        assert!(matches!(
            eta_dispersion(&GrowingTree::star(4), 2.0, 2),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn balanced_two_layer_hierarchy_has_zero_dispersion() {
        // Two adjacent hubs of degree 3, each with two leaves: every non-leaf
        // node sees one degree-3 neighbour and two leaves.
        let t = GrowingTree::from_parents(&[0, 0, 1, 1, 0]).unwrap();
        assert_eq!(t.degree(NodeId::new(0)), 3);
        assert_eq!(t.degree(NodeId::new(1)), 3);
        for alpha in [0.5, 2.0, 3.0] {
            let cv = eta_dispersion(&t, alpha, 2).unwrap();
            assert!(cv.abs() < 1e-15, "cv = {cv}");
        }
    }

    #[test]
    fn scaling_exponent_cases() {
        let (s, e) = scaling_exponent(&[(1e3, 31.62), (1e4, 100.0), (1e5, 316.2)]).unwrap();
        assert!((s - 0.5).abs() < 1e-3 && e < 1e-3);
        let (s, _) = scaling_exponent(&[(1e3, 1e3), (1e4, 1e4), (1e5, 1e5)]).unwrap();
        assert!((s - 1.0).abs() < 1e-12);
        assert!(matches!(scaling_exponent(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]), Err(Error::Domain(_))));
        assert!(scaling_exponent(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
    }

    #[test]
    fn tv_distance_cases() {
        assert_eq!(tv_distance(&[0.5, 0.5], &[0.5, 0.5]), 0.0);
        assert_eq!(tv_distance(&[1.0, 0.0], &[0.0, 1.0]), 1.0);
        assert_eq!(tv_distance(&[0.5, 0.5], &[1.0]), 0.5);
        // 0.1 of mass missing from q counts fully against the distance.
        assert!((tv_distance(&[0.5, 0.5], &[0.5, 0.4]) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn king_tracker_counts_changes_of_unique_king() {
        let mut t = GrowingTree::new_seed();
        let mut k = KingTracker::new();
        k.observe(&t); // tie: nothing recorded
        assert_eq!(k.current(), None);
        t.add_leaf(NodeId::new(1)).unwrap();
        k.observe(&t);
        assert_eq!(k.current(), Some(NodeId::new(1)));
        t.add_leaf(NodeId::new(0)).unwrap(); // tie at degree 2
        k.observe(&t);
        t.add_leaf(NodeId::new(0)).unwrap();
        k.observe(&t);
        assert_eq!(k.current(), Some(NodeId::new(0)));
        assert_eq!(k.changes(), 1);
    }

    #[test]
    fn weibull_needs_enough_points() {
        let h = DegreeHistogram::from_pairs([(1, 100), (2, 50), (3, 20)]);
        assert!(matches!(weibull_tail_fit(&h, 1), Err(Error::InsufficientData(_))));
    }
}
