//! Closed-form asymptotic values for the CR and QPA models.
//!
//! Only points where an exact limit or exponent is known return a value;
//! everything else is `None`.

use serde::Serialize;

use crate::alpha::Alpha;
use crate::error::{Error, Result};
use crate::model::{Family, ModelParams};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub quantity: &'static str,
    pub params: ModelParams,
    pub value: f64,
    pub source: &'static str,
}

fn in_open_unit(r: f64) -> bool {
    r > 0.0 && r < 1.0
}

/// Asymptotic leaf fraction of CR(alpha, r).
pub fn leaf_fraction_closed(alpha: Alpha, r: f64) -> Option<f64> {
    match alpha {
        Alpha::NegInf => Some(r),
        Alpha::PosInf if in_open_unit(r) => Some(1.0 - r + r * r),
        Alpha::PosInf if r == 0.0 => Some(1.0),
        Alpha::Finite(a) if a == 1.0 => Some(2.0 / 3.0),
        Alpha::Finite(a) if a == 0.0 && in_open_unit(r) => Some((1.0 - (1.0 - r).sqrt()) / r),
        Alpha::Finite(a) if a == 0.0 && r == 0.0 => Some(0.5),
        _ => None,
    }
}

/// Exponent `beta` in `D1(N) ~ N^beta` for CR(alpha, r).
pub fn dmax_exponent_closed(alpha: Alpha, r: f64) -> Option<f64> {
    match alpha {
        Alpha::Finite(a) if a == 1.0 => Some(0.5),
        Alpha::Finite(a) if a > 1.0 && r == 1.0 => Some(a / (2.0 * a - 1.0)),
        Alpha::Finite(a) if a > 1.0 && r == 0.0 => Some(1.0),
        Alpha::PosInf if r == 1.0 => Some(0.5),
        Alpha::PosInf => Some(1.0),
        Alpha::NegInf if r == 1.0 => Some(1.0),
        Alpha::NegInf if r == 0.0 => Some(0.0),
        _ => None,
    }
}

/// Exponent of the second hierarchy layer, `(alpha-1)/(2 alpha-1)`, for `alpha > 1`.
pub fn second_layer_exponent_closed(alpha: Alpha) -> Result<f64> {
    match alpha {
        Alpha::Finite(a) if a > 1.0 => Ok((a - 1.0) / (2.0 * a - 1.0)),
        Alpha::PosInf => Ok(0.5),
        other => Err(Error::Domain(format!(
            "second-layer exponent needs alpha > 1 (got {other})"
        ))),
    }
}

/// Limiting fraction of the king's neighbours with degree `k` at `alpha = inf`.
pub fn king_neighbor_degree_dist(r: f64, k: u32) -> Result<f64> {
    if !in_open_unit(r) || k == 0 {
        return Err(Error::Domain(format!("need r in (0, 1) and k >= 1 (got r = {r}, k = {k})")));
    }
    Ok((1.0 - r) * r.powi(k as i32 - 1))
}

/// Upper bound on the limiting leaf fraction of QPA at `alpha = 1`.
pub fn qba_leaf_upper_bound() -> f64 {
    12.0 / 19.0
}

/// All available predictions at one model point.
pub fn predictions_at(params: &ModelParams) -> Vec<Prediction> {
    let mut out = Vec::new();
    let mut push = |quantity, value: Option<f64>, source| {
        if let Some(value) = value {
            out.push(Prediction {
                quantity,
                params: *params,
                value,
                source,
            });
        }
    };
    match params.family {
        Family::Cr => {
            let (a, r) = (params.alpha, params.r);
            push("leaf_fraction", leaf_fraction_closed(a, r), leaf_source(a));
            push("dmax_exponent", dmax_exponent_closed(a, r), "layered hierarchy / table");
            if r == 1.0 {
                push("second_layer_exponent", second_layer_exponent_closed(a).ok(), "layered hierarchy");
            }
        }
        Family::Qpa => match params.alpha {
            Alpha::NegInf => {
                push("leaf_fraction", Some(0.5), "equivalent to CR(-inf, 1/2)");
            }
            Alpha::Finite(a) if a == 1.0 => {
                push("leaf_fraction_upper_bound", Some(qba_leaf_upper_bound()), "QBA leaf bound");
            }
            Alpha::Finite(a) if a > 1.0 => {
                push("dmax_exponent", Some(a / (2.0 * a - 1.0)), "layered hierarchy");
            }
            Alpha::PosInf => push("dmax_exponent", Some(0.5), "rich club"),
            _ => {}
        },
    }
    out
}

fn leaf_source(alpha: Alpha) -> &'static str {
    match alpha {
        Alpha::NegInf => "leaves at alpha = -inf",
        Alpha::PosInf => "geometric king neighbourhood",
        Alpha::Finite(a) if a == 0.0 => "leaves at alpha = 0",
        _ => "Barabasi-Albert tree",
    }
}
