//! Pathway entry penalties, `lambda_max`, and lasso penalties matched to a
//! target number of selected features.

use log::debug;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{PathwayMap, StandardizedData};
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::solver::{lasso_lambda_max, pathway_columns, LassoPath};

const ROOT_TOL: f64 = 1e-10;
const ROOT_MAX_ITERS: usize = 200;

/// Number of log-spaced penalties on the cardinality-matching grid.
pub const LASSO_GRID_STEPS: usize = 400;
/// Smallest grid penalty as a fraction of the lasso `lambda_max`.
pub const LASSO_GRID_MIN_RATIO: f64 = 0.01;
const REFINE_ITERS: usize = 60;

/// Entry penalties for every pathway.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaGrid {
    pub lambda_max: f64,
    /// `max_j |x_j' y| / alpha`; absent when `alpha = 0`.
    pub lambda_star: Vec<Option<f64>>,
    pub lambda_min: Vec<f64>,
    /// Fractions of `lambda_max` at which fits are requested.
    pub multipliers: Vec<f64>,
}

impl LambdaGrid {
    pub fn lambdas(&self) -> Vec<f64> {
        self.multipliers.iter().map(|m| m * self.lambda_max).collect()
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} is outside [0, 1]")));
    }
    Ok(())
}

/// `max_j |a_j| / alpha` for pathway scores `a = X_l' y`.
pub fn lambda_star_from_scores(scores: &[f64], alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if alpha == 0.0 {
        return Err(Error::AlphaZero);
    }
    Ok(scores.iter().fold(0.0, |m: f64, a| m.max(a.abs())) / alpha)
}

/// `||S(a, alpha lambda)||^2 - (1 - alpha)^2 lambda^2 w^2`
fn entry_quadratic(scores: &[f64], alpha: f64, weight: f64, lambda: f64) -> f64 {
    let t = alpha * lambda;
    let st: f64 = scores
        .iter()
        .map(|a| (a.abs() - t).max(0.0).powi(2))
        .sum();
    let g = (1.0 - alpha) * lambda * weight;
    st - g * g
}

/// Smallest penalty at which a pathway with scores `a = X_l' y` stays out of
/// the model.
pub fn lambda_min_from_scores(scores: &[f64], alpha: f64, weight: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(weight > 0.0) {
        return Err(Error::InvalidParameter(format!("weight {weight} is not positive")));
    }
    let max_abs = scores.iter().fold(0.0, |m: f64, a| m.max(a.abs()));
    if max_abs == 0.0 {
        return Ok(0.0);
    }
    if alpha == 0.0 {
        return Ok(scores.iter().map(|a| a * a).sum::<f64>().sqrt() / weight);
    }
    if alpha == 1.0 {
        return Ok(max_abs);
    }
    let f = |lambda: f64| entry_quadratic(scores, alpha, weight, lambda);
    let (mut lo, mut hi) = (0.0, max_abs / alpha);
    let (mut f_lo, mut f_hi) = (f(lo), f(hi));
    debug_assert!(f_lo > 0.0 && f_hi < 0.0);
    for _ in 0..ROOT_MAX_ITERS {
        if hi - lo <= ROOT_TOL {
            break;
        }
        // secant step, falling back to bisection when it leaves the middle
        // of the bracket
        let secant = hi - f_hi * (hi - lo) / (f_hi - f_lo);
        let width = hi - lo;
        let mid = if secant.is_finite()
            && secant > lo + 0.05 * width
            && secant < hi - 0.05 * width
        {
            secant
        } else {
            0.5 * (lo + hi)
        };
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm > 0.0 {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
            f_hi = fm;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn scores(data: &StandardizedData, cols: &[usize], y: &[f64]) -> Vec<f64> {
    cols.iter().map(|&j| dot(data.column(j), y)).collect()
}

/// `max_{j in cols} |x_j' y| / alpha`.
pub fn lambda_star(data: &StandardizedData, cols: &[usize], y: &[f64], alpha: f64) -> Result<f64> {
    lambda_star_from_scores(&scores(data, cols, y), alpha)
}

/// Entry penalty of the pathway with columns `cols` for response `y`.
pub fn lambda_min_for_pathway(
    data: &StandardizedData,
    cols: &[usize],
    y: &[f64],
    alpha: f64,
    weight: f64,
) -> Result<f64> {
    lambda_min_from_scores(&scores(data, cols, y), alpha, weight)
}

/// Entry penalties of all pathways for response `y`.
pub fn pathway_lambda_mins(
    data: &StandardizedData,
    map: &PathwayMap,
    y: &[f64],
    alpha: f64,
    weights: &[f64],
) -> Result<Vec<f64>> {
    if weights.len() != map.n_pathways() {
        return Err(Error::InvalidParameter(format!(
            "{} weights for {} pathways",
            weights.len(),
            map.n_pathways()
        )));
    }
    (0..map.n_pathways())
        .into_par_iter()
        .map(|l| {
            let cols = pathway_columns(data, map, l);
            lambda_min_for_pathway(data, &cols, y, alpha, weights[l])
        })
        .collect()
}

/// Smallest penalty at which no pathway is selected.
pub fn lambda_max(
    data: &StandardizedData,
    map: &PathwayMap,
    alpha: f64,
    weights: &[f64],
) -> Result<f64> {
    Ok(pathway_lambda_mins(data, map, data.y(), alpha, weights)?
        .into_iter()
        .fold(0.0, f64::max))
}

/// All entry penalties plus `lambda_max` and the requested multipliers.
pub fn lambda_grid(
    data: &StandardizedData,
    map: &PathwayMap,
    alpha: f64,
    weights: &[f64],
    multipliers: Vec<f64>,
) -> Result<LambdaGrid> {
    let lambda_min = pathway_lambda_mins(data, map, data.y(), alpha, weights)?;
    let lambda_star = (0..map.n_pathways())
        .map(|l| {
            let cols = pathway_columns(data, map, l);
            lambda_star(data, &cols, data.y(), alpha).ok()
        })
        .collect();
    Ok(LambdaGrid {
        lambda_max: lambda_min.iter().copied().fold(0.0, f64::max),
        lambda_star,
        lambda_min,
        multipliers,
    })
}

/// Lasso fit whose support size was matched to a target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CardinalityMatch {
    pub lambda: f64,
    pub beta: Vec<f64>,
    pub cardinality: usize,
    pub target: usize,
    /// False when no penalty reached the target exactly.
    pub exact: bool,
    /// Grid points where the support shrank as the penalty decreased.
    pub monotonicity_violations: usize,
}

/// Find a lasso penalty selecting exactly `target` features.
///
/// Walks a log-spaced grid down from the lasso `lambda_max` with warm starts.
/// When the support jumps past the target between two grid points the
/// bracket is bisected. If the target is still missed, the smallest support
/// at least as large as the target is returned with `exact = false`.
pub fn match_lasso_cardinality(data: &StandardizedData, target: usize) -> Result<CardinalityMatch> {
    let p = data.n_features();
    if target > p {
        return Err(Error::InvalidParameter(format!(
            "target {target} exceeds {p} features"
        )));
    }
    let lmax = lasso_lambda_max(data);
    let mut path = LassoPath::new(data);
    let done = |fit: crate::solver::LassoFit, exact: bool, violations: usize| CardinalityMatch {
        lambda: fit.lambda,
        cardinality: fit.cardinality(),
        beta: fit.beta,
        target,
        exact,
        monotonicity_violations: violations,
    };
    if target == 0 || lmax == 0.0 {
        let fit = path.fit(lmax)?;
        let exact = fit.cardinality() == target;
        return Ok(done(fit, exact, 0));
    }

    let ratio = LASSO_GRID_MIN_RATIO.powf(1.0 / (LASSO_GRID_STEPS - 1) as f64);
    let mut prev_lambda = lmax;
    let mut prev_card = 0;
    let mut violations = 0;
    let mut best_over: Option<crate::solver::LassoFit> = None;
    let mut last = None;
    for step in 0..LASSO_GRID_STEPS {
        let lambda = lmax * ratio.powi(step as i32);
        let fit = path.fit(lambda)?;
        let card = fit.cardinality();
        if card < prev_card {
            violations += 1;
        }
        if card == target {
            return Ok(done(fit, true, violations));
        }
        if card > target {
            if prev_card < target {
                // bisect the bracket (lambda, prev_lambda)
                let (mut lo, mut hi) = (lambda, prev_lambda);
                for _ in 0..REFINE_ITERS {
                    let mid = 0.5 * (lo + hi);
                    let mfit = path.fit(mid)?;
                    let mc = mfit.cardinality();
                    if mc == target {
                        debug!("cardinality {target} reached by refinement at {mid}");
                        return Ok(done(mfit, true, violations));
                    }
                    if mc > target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                path.fit(lambda)?;
            }
            let better = best_over
                .as_ref()
                .is_none_or(|b| card < b.cardinality());
            if better {
                best_over = Some(fit.clone());
            }
        }
        prev_lambda = lambda;
        prev_card = card;
        last = Some(fit);
    }
    let fit = best_over.or(last).expect("grid is nonempty");
    Ok(done(fit, false, violations))
}
