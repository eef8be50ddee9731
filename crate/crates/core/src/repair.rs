//! Turning a bracket estimate into a genuine metric.
//!
//! The repair adds the largest triangle violation `t` to every off-diagonal
//! entry. Afterwards every triangle has slack `t - violation >= 0`, and the
//! sup-deviation from the input is exactly `t`. If the input is within `e`
//! of a metric in sup norm, `t <= 3e`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::reconstruction::ReconstructionResult;

/// Default absolute tolerance of metric checks.
pub const METRIC_TOLERANCE: f64 = 1e-12;

/// Which estimate is turned into a metric.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RepairTarget {
    /// The upper bracket `d+`.
    #[default]
    DPlus,
    /// `(d+ + d-) / 2`.
    MidpointOfBrackets,
}

impl RepairTarget {
    pub fn estimate(self, result: &ReconstructionResult) -> SquareMatrix {
        match self {
            RepairTarget::DPlus => result.brackets.upper_matrix(),
            RepairTarget::MidpointOfBrackets => {
                let b = &result.brackets;
                SquareMatrix::from_fn(b.n(), |u, v| 0.5 * (b.upper(u, v).value() + b.lower(u, v).value()))
            }
        }
    }
}

/// A repaired distance matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricMatrix {
    pub values: SquareMatrix,
    /// The constant added off the diagonal.
    pub repair_t: f64,
    /// Off-diagonal pairs left at zero (only when `repair_t == 0`); the result
    /// is then a pseudo-metric.
    pub zero_pairs: Vec<(usize, usize)>,
}

/// `max over (u, w, v) of M(u, v) - M(u, w) - M(w, v)`, clamped at 0.
pub fn max_triangle_violation(m: &SquareMatrix) -> Result<f64> {
    m.check_dissimilarity()?;
    let n = m.n();
    Ok((0..n)
        .into_par_iter()
        .map(|u| {
            let row_u = m.row(u);
            let mut worst = 0.0f64;
            for w in 0..n {
                let uw = row_u[w];
                let row_w = m.row(w);
                for v in 0..n {
                    worst = worst.max(row_u[v] - uw - row_w[v]);
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max))
}

/// Adds the largest triangle violation to all off-diagonal entries.
pub fn repair_additive(estimate: &SquareMatrix) -> Result<MetricMatrix> {
    let n = estimate.n();
    if let Some(bad) = estimate
        .values()
        .iter()
        .find(|&&x| !(0.0..=1.0 + METRIC_TOLERANCE).contains(&x))
    {
        return Err(Error::Argument(format!("estimate entry {bad} outside [0, 1]")));
    }
    let t = max_triangle_violation(estimate)?;
    let values = SquareMatrix::from_fn(n, |u, v| if u == v { 0.0 } else { estimate.get(u, v) + t });
    let mut zero_pairs = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if values.get(u, v) == 0.0 {
                zero_pairs.push((u, v));
            }
        }
    }
    Ok(MetricMatrix { values, repair_t: t, zero_pairs })
}

/// First reason a matrix fails to be a metric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MetricViolation {
    NonzeroDiagonal { u: usize, value: f64 },
    Asymmetric { u: usize, v: usize, excess: f64 },
    Negative { u: usize, v: usize, value: f64 },
    /// `M(u, v) > M(u, w) + M(w, v) + tol`.
    Triangle { u: usize, w: usize, v: usize, excess: f64 },
}

/// `Ok(())` if `m` is a (pseudo-)metric within `tol`, else the first violation.
pub fn is_metric(m: &SquareMatrix, tol: f64) -> Result<(), MetricViolation> {
    let n = m.n();
    for u in 0..n {
        let value = m.get(u, u);
        if value.abs() > tol {
            return Err(MetricViolation::NonzeroDiagonal { u, value });
        }
    }
    for u in 0..n {
        for v in (u + 1)..n {
            let excess = (m.get(u, v) - m.get(v, u)).abs();
            if excess > tol {
                return Err(MetricViolation::Asymmetric { u, v, excess });
            }
            let value = m.get(u, v).min(m.get(v, u));
            if value < -tol {
                return Err(MetricViolation::Negative { u, v, value });
            }
        }
    }
    let found = (0..n).into_par_iter().find_map_first(|u| {
        let row_u = m.row(u);
        for v in 0..n {
            for w in 0..n {
                let excess = row_u[v] - row_u[w] - m.get(w, v);
                if excess > tol {
                    return Some(MetricViolation::Triangle { u, w, v, excess });
                }
            }
        }
        None
    });
    match found {
        Some(v) => Err(v),
        None => Ok(()),
    }
}
