//! Pathway weight tuning against size-driven selection bias.
//!
//! Under a permuted phenotype every pathway should be the first to enter the
//! model equally often. Large pathways enter first more often than small ones
//! at equal weights, so weights are adjusted multiplicatively until the
//! empirical first-entry distribution is close to uniform.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use log::{debug, info};
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{PathwayMap, StandardizedData};
use crate::error::{Error, Result};
use crate::penalty::lambda_min_from_scores;
use crate::rng::substream;

pub const DEFAULT_ETA: f64 = 0.5;
pub const DEFAULT_EPSILON: f64 = 0.05;
pub const DEFAULT_PERMUTATIONS: usize = 500;
pub const DEFAULT_MAX_ITERS: usize = 50;

const PERMUTATION_TAG: &str = "weight-permutation";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuneConfig {
    pub alpha: f64,
    pub eta: f64,
    pub epsilon: f64,
    /// Permutations per iteration.
    pub permutations: usize,
    pub max_iters: usize,
    pub seed: u64,
}

impl TuneConfig {
    pub fn new(alpha: f64, seed: u64) -> Self {
        Self {
            alpha,
            eta: DEFAULT_ETA,
            epsilon: DEFAULT_EPSILON,
            permutations: DEFAULT_PERMUTATIONS,
            max_iters: DEFAULT_MAX_ITERS,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidParameter(format!("alpha = {} is outside [0, 1]", self.alpha)));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(Error::InvalidParameter(format!("eta = {} is outside (0, 1)", self.eta)));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParameter("epsilon must be positive".into()));
        }
        if self.permutations == 0 {
            return Err(Error::InvalidParameter("at least one permutation is required".into()));
        }
        Ok(())
    }
}

/// One tuning iteration: the weights evaluated and what they produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneIteration {
    pub iteration: usize,
    pub weights: Vec<f64>,
    pub distribution: Vec<f64>,
    pub deviations: Vec<f64>,
    pub total_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneResult {
    pub pathway_ids: Vec<String>,
    /// Converged weights, or the best iterate by total deviation.
    pub weights: Vec<f64>,
    pub converged: bool,
    pub best_iteration: usize,
    pub config: TuneConfig,
    pub trace: Vec<TuneIteration>,
}

impl TuneResult {
    /// `pathway_id<TAB>weight` per line.
    pub fn write_weights_tsv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_weights_tsv(path, &self.pathway_ids, &self.weights)
    }

    pub fn write_trace_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        serde_json::to_writer_pretty(&mut w, self)
            .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
        w.flush().map_err(|e| Error::io(path, e))
    }
}

pub fn write_weights_tsv(path: impl AsRef<Path>, ids: &[String], weights: &[f64]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    writeln!(w, "pathway_id\tweight").map_err(io)?;
    for (id, wt) in ids.iter().zip(weights) {
        writeln!(w, "{id}\t{wt}").map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Read a `pathway_id<TAB>weight` file and order it to match `map`.
pub fn read_weights_tsv(path: impl AsRef<Path>, map: &PathwayMap) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut found = std::collections::HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.starts_with("pathway_id")) {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        };
        let mut parts = line.split_whitespace();
        let (Some(id), Some(w), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(parse_err("expected pathway_id and weight".into()));
        };
        let w: f64 = w.parse().map_err(|_| parse_err(format!("bad weight {w:?}")))?;
        if !(w > 0.0) || !w.is_finite() {
            return Err(parse_err(format!("weight {w} is not positive")));
        }
        if found.insert(id.to_string(), w).is_some() {
            return Err(Error::DuplicateId(id.to_string()));
        }
    }
    map.pathways()
        .iter()
        .map(|p| {
            found.get(&p.id).copied().ok_or_else(|| {
                Error::InvalidParameter(format!("no weight given for pathway {}", p.id))
            })
        })
        .collect()
}

fn member_columns(data: &StandardizedData, map: &PathwayMap) -> Vec<Vec<usize>> {
    (0..map.n_pathways())
        .map(|l| crate::solver::pathway_columns(data, map, l))
        .collect()
}

fn first_selected_from_scores(
    scores: &[f64],
    cols: &[Vec<usize>],
    alpha: f64,
    weights: &[f64],
) -> Result<usize> {
    let mut best = 0;
    let mut best_lambda = f64::NEG_INFINITY;
    for (l, c) in cols.iter().enumerate() {
        let a: Vec<f64> = c.iter().map(|&j| scores[j]).collect();
        let lmin = lambda_min_from_scores(&a, alpha, weights[l])?;
        if lmin > best_lambda {
            best = l;
            best_lambda = lmin;
        } else if lmin == best_lambda {
            debug!("entry penalty tie between pathways {best} and {l}; keeping {best}");
        }
    }
    Ok(best)
}

/// The pathway with the largest entry penalty for `permuted_y`; exact ties
/// go to the lowest index.
pub fn first_selected_pathway(
    data: &StandardizedData,
    map: &PathwayMap,
    alpha: f64,
    weights: &[f64],
    permuted_y: &[f64],
) -> Result<usize> {
    check_weights(map, weights)?;
    let scores = data.xt_dot(permuted_y);
    first_selected_from_scores(&scores, &member_columns(data, map), alpha, weights)
}

fn check_weights(map: &PathwayMap, weights: &[f64]) -> Result<()> {
    if weights.len() != map.n_pathways() {
        return Err(Error::InvalidParameter(format!(
            "{} weights for {} pathways",
            weights.len(),
            map.n_pathways()
        )));
    }
    if map.n_pathways() == 0 {
        return Err(Error::InvalidParameter("no pathways".into()));
    }
    Ok(())
}

/// First-entry frequencies over permutations `batch * R .. (batch + 1) * R`
/// of the `seed` stream.
fn selection_distribution_batch(
    data: &StandardizedData,
    map: &PathwayMap,
    alpha: f64,
    weights: &[f64],
    permutations: usize,
    seed: u64,
    batch: u64,
) -> Result<Vec<f64>> {
    check_weights(map, weights)?;
    if permutations == 0 {
        return Err(Error::InvalidParameter("at least one permutation is required".into()));
    }
    let cols = member_columns(data, map);
    let winners: Vec<usize> = (0..permutations as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = substream(seed, PERMUTATION_TAG, batch * permutations as u64 + r);
            let mut y = data.y().to_vec();
            y.shuffle(&mut rng);
            let scores = data.xt_dot(&y);
            first_selected_from_scores(&scores, &cols, alpha, weights)
        })
        .collect::<Result<_>>()?;
    let mut counts = vec![0usize; map.n_pathways()];
    for w in winners {
        counts[w] += 1;
    }
    Ok(counts
        .into_iter()
        .map(|c| c as f64 / permutations as f64)
        .collect())
}

/// Empirical first-entry distribution over `permutations` phenotype
/// permutations.
pub fn empirical_selection_distribution(
    data: &StandardizedData,
    map: &PathwayMap,
    alpha: f64,
    weights: &[f64],
    permutations: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    selection_distribution_batch(data, map, alpha, weights, permutations, seed, 0)
}

/// Multiplicative weight factor for deviation `d = Pi* - 1/L`, clamped to
/// `[eta, 2 - eta]`.
pub fn weight_factor(deviation: f64, eta: f64, n_pathways: usize) -> f64 {
    let scaled = n_pathways as f64 * deviation;
    let raw = 1.0 - deviation.signum() * (eta - 1.0) * scaled * scaled;
    if deviation == 0.0 {
        1.0
    } else {
        raw.clamp(eta, 2.0 - eta)
    }
}

pub fn deviations(distribution: &[f64]) -> Vec<f64> {
    let target = 1.0 / distribution.len() as f64;
    distribution.iter().map(|p| p - target).collect()
}

/// Adjust weights until the first-entry distribution is within `epsilon`
/// (total absolute deviation) of uniform.
///
/// Starts from `initial` (unit weights when `None`). Each iteration draws
/// fresh permutations. When `max_iters` is reached without convergence the
/// result carries `converged = false` and the best iterate seen.
pub fn tune_weights(
    data: &StandardizedData,
    map: &PathwayMap,
    config: &TuneConfig,
    initial: Option<Vec<f64>>,
) -> Result<TuneResult> {
    config.validate()?;
    let n = map.n_pathways();
    let mut weights = initial.unwrap_or_else(|| vec![1.0; n]);
    check_weights(map, &weights)?;
    let mut trace = Vec::new();
    let mut converged = false;
    for iteration in 0..config.max_iters.max(1) {
        let distribution = selection_distribution_batch(
            data,
            map,
            config.alpha,
            &weights,
            config.permutations,
            config.seed,
            iteration as u64,
        )?;
        let d = deviations(&distribution);
        let total: f64 = d.iter().map(|v| v.abs()).sum();
        info!("weight tuning iteration {iteration}: total deviation {total:.4}");
        trace.push(TuneIteration {
            iteration,
            weights: weights.clone(),
            distribution,
            deviations: d.clone(),
            total_deviation: total,
        });
        if total < config.epsilon {
            converged = true;
            break;
        }
        if iteration + 1 == config.max_iters {
            break;
        }
        for (w, dl) in weights.iter_mut().zip(&d) {
            *w *= weight_factor(*dl, config.eta, n);
        }
    }
    let best_iteration = if converged {
        trace.len() - 1
    } else {
        trace
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_deviation.total_cmp(&b.1.total_deviation))
            .map(|(i, _)| i)
            .expect("at least one iteration")
    };
    Ok(TuneResult {
        pathway_ids: map.pathways().iter().map(|p| p.id.clone()).collect(),
        weights: trace[best_iteration].weights.clone(),
        converged,
        best_iteration,
        config: *config,
        trace,
    })
}
