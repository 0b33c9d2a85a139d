//! Single-block minimiser shared by the CGD and BCGD drivers.
//!
//! Minimises, over the coefficients of one pathway,
//!
//! ```text
//! f(b) = 1/2 ||t - X_l b||^2 + g ||b||_2 + s ||b||_1
//! ```
//!
//! where `t` is the regression target (the response for CGD, the block
//! partial residual for BCGD), `g = (1 - alpha) lambda w_l` and
//! `s = alpha lambda`. Each coordinate takes one Newton step per sweep. At
//! `b_j = 0` the left and right directional derivatives decide whether the
//! coordinate may leave zero and in which direction. A step that increases
//! `f` is halved until it does not.

use crate::data::StandardizedData;
use crate::linalg::{axpy, dot};

/// Maximum number of step halvings per coordinate update.
pub const MAX_HALVINGS: usize = 50;

#[derive(Debug, Clone, Copy)]
pub struct BlockPenalty {
    /// `alpha * lambda`
    pub l1: f64,
    /// `(1 - alpha) * lambda * w_l`
    pub group: f64,
}

impl BlockPenalty {
    pub fn new(alpha: f64, lambda: f64, weight: f64) -> Self {
        Self {
            l1: alpha * lambda,
            group: (1.0 - alpha) * lambda * weight,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BlockOutcome {
    pub beta: Vec<f64>,
    pub sweeps: usize,
    pub converged: bool,
    pub max_change: f64,
}

#[inline]
pub fn soft_threshold(z: f64, t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// `|| S(X_c' v, l1) ||_2` over the columns `cols`.
pub fn group_statistic(data: &StandardizedData, cols: &[usize], v: &[f64], l1: f64) -> f64 {
    cols.iter()
        .map(|&j| soft_threshold(dot(data.column(j), v), l1))
        .map(|s| s * s)
        .sum::<f64>()
        .sqrt()
}

/// `f(b)` for one block.
pub fn block_objective(
    data: &StandardizedData,
    cols: &[usize],
    target: &[f64],
    beta: &[f64],
    pen: BlockPenalty,
) -> f64 {
    let mut r = target.to_vec();
    for (&j, &b) in cols.iter().zip(beta) {
        if b != 0.0 {
            axpy(-b, data.column(j), &mut r);
        }
    }
    let l2: f64 = beta.iter().map(|b| b * b).sum::<f64>().sqrt();
    let l1: f64 = beta.iter().map(|b| b.abs()).sum();
    0.5 * dot(&r, &r) + pen.group * l2 + pen.l1 * l1
}

/// Minimise the block objective starting from `beta`.
pub fn solve_block(
    data: &StandardizedData,
    cols: &[usize],
    target: &[f64],
    mut beta: Vec<f64>,
    pen: BlockPenalty,
    tol: f64,
    max_sweeps: usize,
) -> BlockOutcome {
    assert_eq!(cols.len(), beta.len());
    let mut r = target.to_vec();
    for (&j, &b) in cols.iter().zip(&beta) {
        if b != 0.0 {
            axpy(-b, data.column(j), &mut r);
        }
    }

    let mut sweeps = 0;
    let mut max_change = f64::INFINITY;
    while sweeps < max_sweeps {
        sweeps += 1;
        max_change = 0.0;
        let mut norm2: f64 = beta.iter().map(|b| b * b).sum();

        if norm2 == 0.0 {
            // The group norm is not differentiable at the zero block, so move
            // along the soft-thresholded gradient with an exact line search.
            let s: Vec<f64> = cols
                .iter()
                .map(|&j| soft_threshold(dot(data.column(j), &r), pen.l1))
                .collect();
            let ns = s.iter().map(|v| v * v).sum::<f64>().sqrt();
            if ns <= pen.group {
                return BlockOutcome {
                    beta,
                    sweeps,
                    converged: true,
                    max_change: 0.0,
                };
            }
            let mut v = vec![0.0; r.len()];
            for (&j, &sj) in cols.iter().zip(&s) {
                if sj != 0.0 {
                    axpy(sj / ns, data.column(j), &mut v);
                }
            }
            let vv = dot(&v, &v);
            if vv <= 0.0 {
                return BlockOutcome {
                    beta,
                    sweeps,
                    converged: true,
                    max_change: 0.0,
                };
            }
            let step = (ns - pen.group) / vv;
            for (b, &sj) in beta.iter_mut().zip(&s) {
                *b = step * sj / ns;
                max_change = max_change.max(b.abs());
            }
            axpy(-step, &v, &mut r);
            norm2 = beta.iter().map(|b| b * b).sum();
        }

        for (k, &j) in cols.iter().enumerate() {
            if norm2 <= 0.0 {
                // block collapsed to zero mid-sweep; reseed on the next sweep
                break;
            }
            let x = data.column(j);
            let g = dot(x, &r);
            let b = beta[k];
            let nrm = norm2.sqrt();

            let mut cand = if b != 0.0 {
                let d = -g + pen.group * b / nrm + pen.l1 * b.signum();
                let dd = 1.0 + pen.group / nrm * (1.0 - b * b / norm2);
                let c = b - d / dd;
                // do not step across the kink at zero in one move
                if c * b <= 0.0 {
                    0.0
                } else {
                    c
                }
            } else {
                let d_plus = -g + pen.l1;
                let d_minus = -g - pen.l1;
                let d = if d_minus > 0.0 {
                    d_minus
                } else if d_plus < 0.0 {
                    d_plus
                } else {
                    continue;
                };
                let dd = 1.0 + pen.group / nrm;
                -d / dd
            };

            let change_in_f = |c: f64| {
                let delta = c - b;
                let new_norm = (norm2 - b * b + c * c).max(0.0).sqrt();
                -delta * g + 0.5 * delta * delta + pen.group * (new_norm - nrm)
                    + pen.l1 * (c.abs() - b.abs())
            };
            let mut accepted = false;
            for _ in 0..=MAX_HALVINGS {
                if change_in_f(cand) <= 0.0 {
                    accepted = true;
                    break;
                }
                cand = 0.5 * (cand + b);
            }
            if !accepted {
                continue;
            }
            let delta = cand - b;
            if delta == 0.0 {
                continue;
            }
            axpy(-delta, x, &mut r);
            norm2 = (norm2 - b * b + cand * cand).max(0.0);
            beta[k] = cand;
            max_change = max_change.max(delta.abs());
        }

        if max_change < tol && beta.iter().any(|&b| b != 0.0) {
            return BlockOutcome {
                beta,
                sweeps,
                converged: true,
                max_change,
            };
        }
    }
    BlockOutcome {
        beta,
        sweeps,
        converged: false,
        max_change,
    }
}
