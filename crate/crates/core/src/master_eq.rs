//! Stationary degree distribution of QPA at `alpha = -inf`.
//!
//! `q[k][l]` is the asymptotic fraction of nodes with `k` leaf neighbours and
//! `l` non-leaf neighbours. It solves
//!
//! ```text
//! (2k + 1) q[k][l] = (k - 1) q[k-1][l] + (k + 1) q[k+1][l-1]
//!                    + ½·[k = 0, l = 1] + ½·[k = 1, l = 1],   l >= 1,
//! ```
//!
//! with `q[k][0] = 0`. The `(k+1, l-1)` term lives in the previous `l` layer
//! and the `(k-1, l)` term earlier in the current one, so a sweep over `l`
//! ascending and then `k` ascending is a forward substitution.

use crate::error::{Error, Result};

pub const DEFAULT_KMAX: usize = 400;
pub const DEFAULT_LMAX: usize = 400;

#[derive(Debug, Clone, PartialEq)]
pub struct QGrid {
    kmax: usize,
    lmax: usize,
    q: Vec<f64>,
}

impl QGrid {
    pub fn kmax(&self) -> usize {
        self.kmax
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    /// `q[k][l]`, zero outside the grid.
    pub fn get(&self, k: isize, l: isize) -> f64 {
        if k < 0 || l < 0 || k as usize > self.kmax || l as usize > self.lmax {
            0.0
        } else {
            self.q[k as usize * (self.lmax + 1) + l as usize]
        }
    }

    fn set(&mut self, k: usize, l: usize, v: f64) {
        self.q[k * (self.lmax + 1) + l] = v;
    }

    pub fn total(&self) -> f64 {
        self.q.iter().sum()
    }

    /// Cells as `(k, l, q)` in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let w = self.lmax + 1;
        self.q.iter().enumerate().map(move |(i, &v)| (i / w, i % w, v))
    }

    /// Largest absolute residual of the recurrence over cells whose
    /// `(k+1, l-1)` neighbour is inside the grid.
    pub fn max_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for l in 1..=self.lmax {
            for k in 0..self.kmax {
                let (ki, li) = (k as isize, l as isize);
                let lhs = (2.0 * k as f64 + 1.0) * self.get(ki, li);
                let rhs = (k as f64 - 1.0) * self.get(ki - 1, li)
                    + (k as f64 + 1.0) * self.get(ki + 1, li - 1)
                    + source(k, l);
                worst = worst.max((lhs - rhs).abs());
            }
        }
        worst
    }
}

fn source(k: usize, l: usize) -> f64 {
    if l == 1 && k <= 1 {
        0.5
    } else {
        0.0
    }
}

/// Solve the recurrence on `0 <= k <= kmax`, `0 <= l <= lmax`.
pub fn solve_q(kmax: usize, lmax: usize) -> Result<QGrid> {
    if kmax < 1 || lmax < 1 {
        return Err(Error::Domain(format!(
            "grid bounds must be at least 1 (got kmax = {kmax}, lmax = {lmax})"
        )));
    }
    let mut grid = QGrid {
        kmax,
        lmax,
        q: vec![0.0; (kmax + 1) * (lmax + 1)],
    };
    for l in 1..=lmax {
        for k in 0..=kmax {
            let (ki, li) = (k as isize, l as isize);
            let v = ((k as f64 - 1.0) * grid.get(ki - 1, li)
                + (k as f64 + 1.0) * grid.get(ki + 1, li - 1)
                + source(k, l))
                / (2.0 * k as f64 + 1.0);
            grid.set(k, l, v);
        }
    }
    Ok(grid)
}

/// `p_x = Σ_{k+l=x} q[k][l]` for `x = 1..=xmax`; index 0 of the result is 0.
///
/// A diagonal only depends on diagonals at or below it, so `p_x` is exact
/// whenever `x <= min(kmax, lmax)`.
pub fn degree_distribution(grid: &QGrid, xmax: usize) -> Result<Vec<f64>> {
    if xmax > grid.kmax || xmax > grid.lmax {
        return Err(Error::IncompleteDiagonal {
            xmax,
            kmax: grid.kmax,
            lmax: grid.lmax,
        });
    }
    let mut p = vec![0.0; xmax + 1];
    for (x, px) in p.iter_mut().enumerate().skip(1) {
        *px = (0..=x)
            .map(|k| grid.get(k as isize, (x - k) as isize))
            .sum();
    }
    Ok(p)
}

/// Probability mass not captured by the grid.
pub fn truncation_mass(grid: &QGrid) -> f64 {
    (1.0 - grid.total()).clamp(0.0, 1.0)
}
