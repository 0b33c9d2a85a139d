//! Sparse group lasso estimation.
//!
//! Two drivers share one block minimiser:
//!
//! * [`fit_sgl_bcgd`] cycles over pathways in the overlap-expanded space.
//!   Each pathway is gated and fitted against its block partial residual, so
//!   pathways compete for signal.
//! * [`fit_sgl_cgd`] treats pathways as independent. Every pathway is gated
//!   and fitted against the full response, which removes the outer loop.
//!
//! [`fit_lasso`] is the plain lasso baseline.

mod block;
mod lasso;

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{ExpandedIndex, PathwayMap, StandardizedData};
use crate::error::{Error, Result};
use crate::linalg::{axpy, dot};

pub use block::{
    block_objective, group_statistic, solve_block, soft_threshold, BlockOutcome, BlockPenalty,
    MAX_HALVINGS,
};
pub use lasso::{fit_lasso, lasso_kkt_violation, lasso_lambda_max, LassoFit, LassoPath};

/// Default inner (coordinate) convergence threshold on coefficient change.
pub const DEFAULT_INNER_TOL: f64 = 1e-6;
/// Default outer (pathway sweep) convergence threshold for BCGD.
pub const DEFAULT_OUTER_TOL: f64 = 1e-5;
pub const DEFAULT_MAX_INNER_ITERS: usize = 10_000;
pub const DEFAULT_MAX_OUTER_ITERS: usize = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Block coordinate gradient descent; pathways compete.
    Bcgd,
    /// Coordinate gradient descent per pathway; pathways independent.
    Cgd,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Bcgd => "bcgd",
            Algorithm::Cgd => "cgd",
        })
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bcgd" => Ok(Algorithm::Bcgd),
            "cgd" => Ok(Algorithm::Cgd),
            other => Err(Error::InvalidParameter(format!("unknown algorithm {other:?}"))),
        }
    }
}

/// Regularisation and convergence settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SglConfig {
    pub lambda: f64,
    pub alpha: f64,
    /// One positive weight per pathway.
    pub weights: Vec<f64>,
    pub tol: f64,
    pub outer_tol: f64,
    pub max_outer_iters: usize,
    pub max_inner_iters: usize,
}

impl SglConfig {
    /// Uniform unit weights and default tolerances.
    pub fn new(lambda: f64, alpha: f64, n_pathways: usize) -> Self {
        Self {
            lambda,
            alpha,
            weights: vec![1.0; n_pathways],
            tol: DEFAULT_INNER_TOL,
            outer_tol: DEFAULT_OUTER_TOL,
            max_outer_iters: DEFAULT_MAX_OUTER_ITERS,
            max_inner_iters: DEFAULT_MAX_INNER_ITERS,
        }
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Self {
        self.weights = weights;
        self
    }

    pub fn validate(&self, n_pathways: usize) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidParameter(format!(
                "alpha = {} is outside [0, 1]",
                self.alpha
            )));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "lambda = {} must be finite and non-negative",
                self.lambda
            )));
        }
        if self.weights.len() != n_pathways {
            return Err(Error::InvalidParameter(format!(
                "{} weights for {n_pathways} pathways",
                self.weights.len()
            )));
        }
        if let Some(w) = self.weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParameter(format!("pathway weight {w} is not positive")));
        }
        if !(self.tol > 0.0) || !(self.outer_tol > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        Ok(())
    }

    pub fn penalty(&self, l: usize) -> BlockPenalty {
        BlockPenalty::new(self.alpha, self.lambda, self.weights[l])
    }
}

/// Fitted sparse group lasso state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SglFit {
    pub algorithm: Algorithm,
    pub lambda: f64,
    pub alpha: f64,
    /// Nonzero `(feature, coefficient)` pairs for each pathway, ascending by
    /// position within the pathway.
    pub coefficients: Vec<Vec<(usize, f64)>>,
    pub selected_pathways: Vec<usize>,
    pub selected_features: Vec<usize>,
    pub objective: f64,
    /// Coordinate sweeps summed over all block solves.
    pub inner_iterations: usize,
    /// Pathway sweeps (BCGD) or 1 (CGD).
    pub outer_iterations: usize,
    /// Pathways whose inner loop hit the iteration cap.
    pub nonconverged_pathways: Vec<usize>,
    /// BCGD only: whether the outer loop met its tolerance.
    pub outer_converged: bool,
    /// BCGD only: max coefficient change after each outer sweep.
    pub outer_changes: Vec<f64>,
}

impl SglFit {
    pub fn is_selected(&self, l: usize) -> bool {
        !self.coefficients[l].is_empty()
    }

    /// Selected features of pathway `l`, in the original feature space.
    pub fn selected_in(&self, l: usize) -> Vec<usize> {
        self.coefficients[l].iter().map(|&(j, _)| j).collect()
    }

    pub fn converged(&self) -> bool {
        self.nonconverged_pathways.is_empty() && self.outer_converged
    }

    fn assemble(
        algorithm: Algorithm,
        config: &SglConfig,
        coefficients: Vec<Vec<(usize, f64)>>,
    ) -> Self {
        let selected_pathways: Vec<usize> = coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_empty())
            .map(|(l, _)| l)
            .collect();
        let selected_features: BTreeSet<usize> =
            coefficients.iter().flatten().map(|&(j, _)| j).collect();
        Self {
            algorithm,
            lambda: config.lambda,
            alpha: config.alpha,
            coefficients,
            selected_pathways,
            selected_features: selected_features.into_iter().collect(),
            objective: f64::NAN,
            inner_iterations: 0,
            outer_iterations: 0,
            nonconverged_pathways: Vec::new(),
            outer_converged: true,
            outer_changes: Vec::new(),
        }
    }
}

/// Retained (nonconstant) member columns of pathway `l`.
pub fn pathway_columns(data: &StandardizedData, map: &PathwayMap, l: usize) -> Vec<usize> {
    map.pathway(l)
        .members
        .iter()
        .copied()
        .filter(|&j| data.is_retained(j))
        .collect()
}

/// `|| S(X_l' r, alpha lambda) ||_2`; the pathway enters when this exceeds
/// `(1 - alpha) lambda w_l`.
pub fn pathway_selection_stat(
    data: &StandardizedData,
    cols: &[usize],
    r: &[f64],
    alpha: f64,
    lambda: f64,
) -> f64 {
    group_statistic(data, cols, r, alpha * lambda)
}

fn sparse_pairs(cols: &[usize], beta: &[f64]) -> Vec<(usize, f64)> {
    cols.iter()
        .zip(beta)
        .filter(|(_, &b)| b != 0.0)
        .map(|(&j, &b)| (j, b))
        .collect()
}

/// Fit one pathway against the full response (independence assumption).
///
/// Returns the dense coefficient vector over `cols`. If the pathway gate is
/// closed the vector is all zero.
pub fn fit_pathway_cgd(
    data: &StandardizedData,
    cols: &[usize],
    alpha: f64,
    lambda: f64,
    weight: f64,
    tol: f64,
    max_inner_iters: usize,
) -> Result<Vec<f64>> {
    fit_pathway_cgd_detailed(data, cols, alpha, lambda, weight, tol, max_inner_iters).and_then(
        |out| {
            if out.converged {
                Ok(out.beta)
            } else {
                Err(Error::NonConvergence {
                    iterations: out.sweeps,
                    max_change: out.max_change,
                    last: out.beta,
                })
            }
        },
    )
}

fn fit_pathway_cgd_detailed(
    data: &StandardizedData,
    cols: &[usize],
    alpha: f64,
    lambda: f64,
    weight: f64,
    tol: f64,
    max_inner_iters: usize,
) -> Result<BlockOutcome> {
    let pen = BlockPenalty::new(alpha, lambda, weight);
    let zeros = vec![0.0; cols.len()];
    if cols.is_empty() || pathway_selection_stat(data, cols, data.y(), alpha, lambda) <= pen.group
    {
        return Ok(BlockOutcome {
            beta: zeros,
            sweeps: 0,
            converged: true,
            max_change: 0.0,
        });
    }
    Ok(solve_block(data, cols, data.y(), zeros, pen, tol, max_inner_iters))
}

/// Fit every pathway independently against the response.
pub fn fit_sgl_cgd(data: &StandardizedData, map: &PathwayMap, config: &SglConfig) -> Result<SglFit> {
    config.validate(map.n_pathways())?;
    let outcomes: Vec<(Vec<usize>, BlockOutcome)> = (0..map.n_pathways())
        .into_par_iter()
        .map(|l| {
            let cols = pathway_columns(data, map, l);
            let out = fit_pathway_cgd_detailed(
                data,
                &cols,
                config.alpha,
                config.lambda,
                config.weights[l],
                config.tol,
                config.max_inner_iters,
            )
            .expect("inputs validated");
            (cols, out)
        })
        .collect();

    let coefficients = outcomes
        .iter()
        .map(|(cols, out)| sparse_pairs(cols, &out.beta))
        .collect();
    let mut fit = SglFit::assemble(Algorithm::Cgd, config, coefficients);
    fit.inner_iterations = outcomes.iter().map(|(_, o)| o.sweeps).sum();
    fit.outer_iterations = 1;
    fit.nonconverged_pathways = outcomes
        .iter()
        .enumerate()
        .filter(|(_, (_, o))| !o.converged)
        .map(|(l, _)| l)
        .collect();
    fit.objective = objective(data, map, &fit, config);
    Ok(fit)
}

/// Block coordinate gradient descent over the overlap-expanded design.
pub fn fit_sgl_bcgd(
    data: &StandardizedData,
    map: &PathwayMap,
    expanded: &ExpandedIndex,
    config: &SglConfig,
) -> Result<SglFit> {
    config.validate(map.n_pathways())?;
    if expanded.n_groups() != map.n_pathways() {
        return Err(Error::InvalidParameter(
            "expanded index does not match the pathway map".into(),
        ));
    }
    let n_groups = expanded.n_groups();
    let group_cols: Vec<Vec<usize>> = (0..n_groups)
        .map(|l| {
            expanded
                .group(l)
                .map(|e| expanded.feature_of(e))
                .filter(|&j| data.is_retained(j))
                .collect()
        })
        .collect();
    let mut betas: Vec<Vec<f64>> = group_cols.iter().map(|c| vec![0.0; c.len()]).collect();
    let y = data.y();
    let mut inner_iterations = 0;
    let mut nonconverged = BTreeSet::new();
    let mut outer_changes = Vec::new();
    let mut outer_converged = false;

    let mut outer = 0;
    while outer < config.max_outer_iters {
        outer += 1;
        // fresh residual each sweep so rounding does not accumulate
        let mut r = y.to_vec();
        for (cols, beta) in group_cols.iter().zip(&betas) {
            for (&j, &b) in cols.iter().zip(beta) {
                if b != 0.0 {
                    axpy(-b, data.column(j), &mut r);
                }
            }
        }

        let mut max_change: f64 = 0.0;
        for l in 0..n_groups {
            let cols = &group_cols[l];
            if cols.is_empty() {
                continue;
            }
            let pen = config.penalty(l);
            // block partial residual
            for (&j, &b) in cols.iter().zip(&betas[l]) {
                if b != 0.0 {
                    axpy(b, data.column(j), &mut r);
                }
            }
            let stat = group_statistic(data, cols, &r, pen.l1);
            let new_beta = if stat <= pen.group {
                vec![0.0; cols.len()]
            } else {
                let start = betas[l].clone();
                let out = solve_block(
                    data,
                    cols,
                    &r,
                    start,
                    pen,
                    config.tol,
                    config.max_inner_iters,
                );
                inner_iterations += out.sweeps;
                if out.converged {
                    nonconverged.remove(&l);
                } else {
                    nonconverged.insert(l);
                }
                out.beta
            };
            for (old, new) in betas[l].iter().zip(&new_beta) {
                max_change = max_change.max((old - new).abs());
            }
            for (&j, &b) in cols.iter().zip(&new_beta) {
                if b != 0.0 {
                    axpy(-b, data.column(j), &mut r);
                }
            }
            betas[l] = new_beta;
        }
        outer_changes.push(max_change);
        if max_change < config.outer_tol {
            outer_converged = true;
            break;
        }
    }

    let coefficients = group_cols
        .iter()
        .zip(&betas)
        .map(|(cols, beta)| sparse_pairs(cols, beta))
        .collect();
    let mut fit = SglFit::assemble(Algorithm::Bcgd, config, coefficients);
    fit.inner_iterations = inner_iterations;
    fit.outer_iterations = outer;
    fit.outer_converged = outer_converged;
    fit.outer_changes = outer_changes;
    fit.nonconverged_pathways = nonconverged.into_iter().collect();
    fit.objective = objective(data, map, &fit, config);
    Ok(fit)
}

/// Objective value of a fit.
///
/// For BCGD this is the overlap-expanded objective
/// `1/2 ||y - X* b*||^2 + (1 - alpha) lambda sum_l w_l ||b_l|| + alpha lambda ||b*||_1`.
/// For CGD each pathway is its own problem against `y`, and the sum of the
/// per-pathway objectives is returned.
pub fn objective(
    data: &StandardizedData,
    map: &PathwayMap,
    fit: &SglFit,
    config: &SglConfig,
) -> f64 {
    let penalty = |l: usize| {
        let c = &fit.coefficients[l];
        let l2 = c.iter().map(|(_, b)| b * b).sum::<f64>().sqrt();
        let l1: f64 = c.iter().map(|(_, b)| b.abs()).sum();
        let pen = config.penalty(l);
        pen.group * l2 + pen.l1 * l1
    };
    let y = data.y();
    match fit.algorithm {
        Algorithm::Bcgd => {
            let mut r = y.to_vec();
            for c in &fit.coefficients {
                for &(j, b) in c {
                    axpy(-b, data.column(j), &mut r);
                }
            }
            0.5 * dot(&r, &r) + (0..map.n_pathways()).map(penalty).sum::<f64>()
        }
        Algorithm::Cgd => {
            let base = 0.5 * dot(y, y);
            (0..map.n_pathways())
                .map(|l| {
                    let c = &fit.coefficients[l];
                    if c.is_empty() {
                        return base;
                    }
                    let mut r = y.to_vec();
                    for &(j, b) in c {
                        axpy(-b, data.column(j), &mut r);
                    }
                    0.5 * dot(&r, &r) + penalty(l)
                })
                .sum()
        }
    }
}

#[cfg(test)]
mod tests;
