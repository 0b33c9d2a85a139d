//! Plain lasso by cyclic coordinate descent with an active-set inner loop.

use serde::{Deserialize, Serialize};

use super::soft_threshold;
use crate::data::StandardizedData;
use crate::error::{Error, Result};
use crate::linalg::{axpy, dot};

const LASSO_TOL: f64 = 1e-10;
const LASSO_MAX_SWEEPS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LassoFit {
    pub lambda: f64,
    /// Dense coefficient vector over all features.
    pub beta: Vec<f64>,
    pub sweeps: usize,
    /// `max_j` violation of the lasso optimality conditions.
    pub kkt_violation: f64,
}

impl LassoFit {
    pub fn support(&self) -> Vec<usize> {
        (0..self.beta.len()).filter(|&j| self.beta[j] != 0.0).collect()
    }

    pub fn cardinality(&self) -> usize {
        self.beta.iter().filter(|b| **b != 0.0).count()
    }
}

/// Smallest penalty giving the empty lasso model, `max_j |x_j' y|`.
pub fn lasso_lambda_max(data: &StandardizedData) -> f64 {
    data.xt_dot(data.y()).iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Lasso fit at `lambda` from a cold start.
pub fn fit_lasso(data: &StandardizedData, lambda: f64) -> Result<LassoFit> {
    LassoPath::new(data).fit(lambda)
}

/// Warm-started sequence of lasso fits on one design.
#[derive(Debug, Clone)]
pub struct LassoPath<'a> {
    data: &'a StandardizedData,
    beta: Vec<f64>,
    r: Vec<f64>,
    pub tol: f64,
    pub max_sweeps: usize,
}

impl<'a> LassoPath<'a> {
    pub fn new(data: &'a StandardizedData) -> Self {
        Self {
            data,
            beta: vec![0.0; data.n_features()],
            r: data.y().to_vec(),
            tol: LASSO_TOL,
            max_sweeps: LASSO_MAX_SWEEPS,
        }
    }

    fn update(&mut self, j: usize, lambda: f64) -> f64 {
        let x = self.data.column(j);
        let b = self.beta[j];
        let z = dot(x, &self.r) + b;
        let nb = soft_threshold(z, lambda);
        let delta = nb - b;
        if delta != 0.0 {
            axpy(-delta, x, &mut self.r);
            self.beta[j] = nb;
        }
        delta.abs()
    }

    /// Fit at `lambda` starting from the previous solution.
    pub fn fit(&mut self, lambda: f64) -> Result<LassoFit> {
        if !(lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!("lambda = {lambda} is negative")));
        }
        let p = self.data.n_features();
        let retained: Vec<usize> = (0..p).filter(|&j| self.data.is_retained(j)).collect();
        let mut sweeps = 0;
        loop {
            // full sweep, then iterate on the active set until it settles
            sweeps += 1;
            let mut change: f64 = 0.0;
            for &j in &retained {
                change = change.max(self.update(j, lambda));
            }
            if change < self.tol {
                break;
            }
            loop {
                let active: Vec<usize> =
                    retained.iter().copied().filter(|&j| self.beta[j] != 0.0).collect();
                let mut inner: f64 = 0.0;
                sweeps += 1;
                for &j in &active {
                    inner = inner.max(self.update(j, lambda));
                }
                if inner < self.tol || sweeps >= self.max_sweeps {
                    break;
                }
            }
            if sweeps >= self.max_sweeps {
                return Err(Error::NonConvergence {
                    iterations: sweeps,
                    max_change: change,
                    last: self.beta.clone(),
                });
            }
        }

        // resynchronise the residual before checking optimality
        let mut r = self.data.y().to_vec();
        for (j, &b) in self.beta.iter().enumerate() {
            if b != 0.0 {
                axpy(-b, self.data.column(j), &mut r);
            }
        }
        self.r = r;
        let kkt_violation = lasso_kkt_violation(self.data, &self.beta, lambda);
        Ok(LassoFit {
            lambda,
            beta: self.beta.clone(),
            sweeps,
            kkt_violation,
        })
    }
}

/// Largest deviation from the lasso optimality conditions.
pub fn lasso_kkt_violation(data: &StandardizedData, beta: &[f64], lambda: f64) -> f64 {
    let mut r = data.y().to_vec();
    for (j, &b) in beta.iter().enumerate() {
        if b != 0.0 {
            axpy(-b, data.column(j), &mut r);
        }
    }
    let c = data.xt_dot(&r);
    c.iter()
        .zip(beta)
        .map(|(&cj, &b)| {
            if b == 0.0 {
                (cj.abs() - lambda).max(0.0)
            } else {
                (cj - lambda * b.signum()).abs()
            }
        })
        .fold(0.0, f64::max)
}
