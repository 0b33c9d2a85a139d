//! Stability ranking of pathways, genes and features over half-sample fits.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use log::warn;
use rand::seq::{index, SliceRandom};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::data::{expand_overlaps, standardize, GenotypeMatrix, PathwayMap, Phenotype};
use crate::error::{Error, Result};
use crate::linalg::mean;
use crate::penalty::lambda_max;
use crate::rng::substream;
use crate::solver::{fit_sgl_bcgd, fit_sgl_cgd, Algorithm, SglConfig};

pub const DEFAULT_SUBSAMPLES: usize = 1000;

const SUBSAMPLE_TAG: &str = "subsample";
const NULL_TAG: &str = "null-permutation";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingConfig {
    pub algorithm: Algorithm,
    pub alpha: f64,
    /// Penalty as a fraction of each subsample's own `lambda_max`.
    pub lambda_frac: f64,
    /// Pathway weights; unit weights when absent.
    pub weights: Option<Vec<f64>>,
    pub subsamples: usize,
    pub seed: u64,
}

impl RankingConfig {
    pub fn new(algorithm: Algorithm, alpha: f64, lambda_frac: f64, subsamples: usize, seed: u64) -> Self {
        Self {
            algorithm,
            alpha,
            lambda_frac,
            weights: None,
            subsamples,
            seed,
        }
    }
}

/// Selection counts over `subsamples` half-sample fits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingResult {
    pub config: RankingConfig,
    pub null: bool,
    pub pathway_ids: Vec<String>,
    pub feature_ids: Vec<String>,
    pub gene_ids: Vec<String>,
    pub pathway_counts: Vec<u32>,
    pub feature_counts: Vec<u32>,
    pub gene_counts: Vec<u32>,
    pub mean_selected_pathways: f64,
    pub sd_selected_pathways: f64,
    pub mean_selected_features: f64,
    pub sd_selected_features: f64,
    /// Subsamples in which some pathway fit hit its iteration cap.
    pub nonconverged_subsamples: usize,
    /// Feature -> gene indices, kept for ranking output.
    feature_genes: Vec<Vec<usize>>,
}

/// One ranked entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranked {
    pub rank: usize,
    pub index: usize,
    pub id: String,
    pub frequency: f64,
    /// Shares its frequency with another entry; order among ties is by ID.
    pub tied: bool,
}

fn frequencies(counts: &[u32], b: usize) -> Vec<f64> {
    counts.iter().map(|&c| f64::from(c) / b as f64).collect()
}

fn rank_nonzero(ids: &[String], counts: &[u32], b: usize) -> Vec<Ranked> {
    let mut order: Vec<usize> = (0..counts.len()).filter(|&i| counts[i] > 0).collect();
    order.sort_by(|&a, &c| counts[c].cmp(&counts[a]).then_with(|| ids[a].cmp(&ids[c])));
    order
        .iter()
        .enumerate()
        .map(|(pos, &i)| {
            let tied = (pos > 0 && counts[order[pos - 1]] == counts[i])
                || (pos + 1 < order.len() && counts[order[pos + 1]] == counts[i]);
            Ranked {
                rank: pos + 1,
                index: i,
                id: ids[i].clone(),
                frequency: f64::from(counts[i]) / b as f64,
                tied,
            }
        })
        .collect()
}

impl RankingResult {
    pub fn subsamples(&self) -> usize {
        self.config.subsamples
    }

    pub fn pi_path(&self) -> Vec<f64> {
        frequencies(&self.pathway_counts, self.subsamples())
    }

    pub fn pi_snp(&self) -> Vec<f64> {
        frequencies(&self.feature_counts, self.subsamples())
    }

    pub fn pi_gene(&self) -> Vec<f64> {
        frequencies(&self.gene_counts, self.subsamples())
    }

    /// Genes mapped from feature `j`.
    pub fn genes_of_feature(&self, j: usize) -> &[usize] {
        &self.feature_genes[j]
    }

    /// Pathways with nonzero frequency, most frequent first, ties by ID.
    pub fn ranked_pathways(&self) -> Vec<Ranked> {
        rank_nonzero(&self.pathway_ids, &self.pathway_counts, self.subsamples())
    }

    pub fn ranked_features(&self) -> Vec<Ranked> {
        rank_nonzero(&self.feature_ids, &self.feature_counts, self.subsamples())
    }

    pub fn ranked_genes(&self) -> Vec<Ranked> {
        rank_nonzero(&self.gene_ids, &self.gene_counts, self.subsamples())
    }

    fn write_ranked(&self, path: &Path, ranked: &[Ranked], with_genes: bool) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let io = |e| Error::io(path, e);
        if with_genes {
            writeln!(w, "rank\tid\tfrequency\ttied\tgenes").map_err(io)?;
        } else {
            writeln!(w, "rank\tid\tfrequency\ttied").map_err(io)?;
        }
        for r in ranked {
            write!(w, "{}\t{}\t{}\t{}", r.rank, r.id, r.frequency, r.tied).map_err(io)?;
            if with_genes {
                let genes: Vec<&str> = self.feature_genes[r.index]
                    .iter()
                    .map(|&g| self.gene_ids[g].as_str())
                    .collect();
                write!(w, "\t{}", genes.join(",")).map_err(io)?;
            }
            writeln!(w).map_err(io)?;
        }
        w.flush().map_err(io)
    }

    pub fn write_pathways_tsv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_ranked(path.as_ref(), &self.ranked_pathways(), false)
    }

    pub fn write_features_tsv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_ranked(path.as_ref(), &self.ranked_features(), true)
    }

    pub fn write_genes_tsv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_ranked(path.as_ref(), &self.ranked_genes(), false)
    }
}

/// `floor(n / 2)` distinct row indices, ascending, for subsample `b`.
pub fn subsample_indices(n: usize, b: u64, seed: u64) -> Result<Vec<usize>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("cannot halve {n} samples")));
    }
    let mut rng = substream(seed, SUBSAMPLE_TAG, b);
    let mut rows = index::sample(&mut rng, n, n / 2).into_vec();
    rows.sort_unstable();
    Ok(rows)
}

struct SubsampleOutcome {
    pathways: Vec<usize>,
    features: Vec<usize>,
    converged: bool,
}

fn fit_subsample(
    genotypes: &GenotypeMatrix,
    phenotype: &Phenotype,
    map: &PathwayMap,
    config: &RankingConfig,
    weights: &[f64],
    null: bool,
    b: u64,
) -> Result<SubsampleOutcome> {
    let rows = subsample_indices(genotypes.n_samples(), b, config.seed)?;
    let g = genotypes.select_samples(&rows);
    let sample_ids: Vec<usize> = {
        let pos: std::collections::HashMap<&str, usize> = phenotype
            .samples
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        g.samples()
            .iter()
            .map(|s| {
                pos.get(s.as_str())
                    .copied()
                    .ok_or_else(|| Error::SampleMismatch(format!("sample {s} has no phenotype")))
            })
            .collect::<Result<_>>()?
    };
    let p = phenotype.select_samples(&sample_ids);
    let mut data = standardize(&g, &p)?;
    if null {
        let mut y = data.y().to_vec();
        y.shuffle(&mut substream(config.seed, NULL_TAG, b));
        data = data.with_response(y);
    }
    let lmax = lambda_max(&data, map, config.alpha, weights)?;
    let mut sgl = SglConfig::new(config.lambda_frac * lmax, config.alpha, map.n_pathways());
    sgl.weights = weights.to_vec();
    let fit = match config.algorithm {
        Algorithm::Cgd => fit_sgl_cgd(&data, map, &sgl)?,
        Algorithm::Bcgd => fit_sgl_bcgd(&data, map, &expand_overlaps(map), &sgl)?,
    };
    Ok(SubsampleOutcome {
        converged: fit.converged(),
        pathways: fit.selected_pathways,
        features: fit.selected_features,
    })
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let m = mean(v);
    if v.len() < 2 {
        return (m, 0.0);
    }
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
    (m, var.sqrt())
}

fn run_ranking(
    genotypes: &GenotypeMatrix,
    phenotype: &Phenotype,
    map: &PathwayMap,
    config: &RankingConfig,
    null: bool,
) -> Result<RankingResult> {
    if config.subsamples == 0 {
        return Err(Error::InvalidParameter("at least one subsample is required".into()));
    }
    if !(config.lambda_frac >= 0.0) {
        return Err(Error::InvalidParameter("lambda_frac must be non-negative".into()));
    }
    if map.n_features() != genotypes.n_features() {
        return Err(Error::InvalidParameter(
            "pathway map and genotypes cover different feature sets".into(),
        ));
    }
    let weights = config
        .weights
        .clone()
        .unwrap_or_else(|| vec![1.0; map.n_pathways()]);
    SglConfig::new(0.0, config.alpha, map.n_pathways())
        .with_weights(weights.clone())
        .validate(map.n_pathways())?;

    let outcomes: Vec<SubsampleOutcome> = (0..config.subsamples as u64)
        .into_par_iter()
        .map(|b| fit_subsample(genotypes, phenotype, map, config, &weights, null, b))
        .collect::<Result<_>>()?;

    let n_genes = map.genes().len();
    let mut pathway_counts = vec![0u32; map.n_pathways()];
    let mut feature_counts = vec![0u32; map.n_features()];
    let mut gene_counts = vec![0u32; n_genes];
    let mut n_paths = Vec::with_capacity(outcomes.len());
    let mut n_feats = Vec::with_capacity(outcomes.len());
    let mut nonconverged = 0;
    for o in &outcomes {
        for &l in &o.pathways {
            pathway_counts[l] += 1;
        }
        let mut genes = BTreeSet::new();
        for &j in &o.features {
            feature_counts[j] += 1;
            genes.extend(map.genes_of(j).iter().copied());
        }
        for g in genes {
            gene_counts[g] += 1;
        }
        n_paths.push(o.pathways.len() as f64);
        n_feats.push(o.features.len() as f64);
        if !o.converged {
            nonconverged += 1;
        }
    }
    if nonconverged > 0 {
        warn!("{nonconverged} of {} subsample fits did not fully converge", config.subsamples);
    }
    let (mean_selected_pathways, sd_selected_pathways) = mean_sd(&n_paths);
    let (mean_selected_features, sd_selected_features) = mean_sd(&n_feats);
    Ok(RankingResult {
        config: config.clone(),
        null,
        pathway_ids: map.pathways().iter().map(|p| p.id.clone()).collect(),
        feature_ids: genotypes.snp_ids().to_vec(),
        gene_ids: map.genes().to_vec(),
        pathway_counts,
        feature_counts,
        gene_counts,
        mean_selected_pathways,
        sd_selected_pathways,
        mean_selected_features,
        sd_selected_features,
        nonconverged_subsamples: nonconverged,
        feature_genes: (0..map.n_features()).map(|j| map.genes_of(j).to_vec()).collect(),
    })
}

/// Selection frequencies over `config.subsamples` half-samples.
///
/// Each half-sample is re-standardised before fitting and the penalty is
/// `lambda_frac` times that half-sample's own `lambda_max`.
pub fn rank_by_stability(
    genotypes: &GenotypeMatrix,
    phenotype: &Phenotype,
    map: &PathwayMap,
    config: &RankingConfig,
) -> Result<RankingResult> {
    run_ranking(genotypes, phenotype, map, config, false)
}

/// Same procedure with an independently permuted phenotype in every half-sample.
pub fn null_ranking(
    genotypes: &GenotypeMatrix,
    phenotype: &Phenotype,
    map: &PathwayMap,
    config: &RankingConfig,
) -> Result<RankingResult> {
    run_ranking(genotypes, phenotype, map, config, true)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub r: f64,
    /// Two-sided p-value from the t distribution with `n - 2` degrees of freedom.
    pub p_value: Option<f64>,
    pub n: usize,
}

/// Pearson correlation with its two-sided t-test p-value.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<Correlation> {
    if x.len() != y.len() {
        return Err(Error::InvalidParameter("vectors differ in length".into()));
    }
    let n = x.len();
    let (mx, my) = (mean(x), mean(y));
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateVariance("first vector".into()));
    }
    if syy == 0.0 {
        return Err(Error::DegenerateVariance("second vector".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    let p_value = if n < 3 {
        None
    } else if r.abs() == 1.0 {
        Some(0.0)
    } else {
        let df = (n - 2) as f64;
        let t = r * (df / (1.0 - r * r)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
        Some((2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0))
    };
    Ok(Correlation { r, p_value, n })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum CorrelationOutcome {
    Defined(Correlation),
    Degenerate { reason: String },
}

impl CorrelationOutcome {
    fn from_result(r: Result<Correlation>) -> Result<Self> {
        match r {
            Ok(c) => Ok(CorrelationOutcome::Defined(c)),
            Err(Error::DegenerateVariance(what)) => Ok(CorrelationOutcome::Degenerate {
                reason: format!("{what} has zero variance"),
            }),
            Err(e) => Err(e),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasReport {
    pub pathway: CorrelationOutcome,
    /// Restricted to features with nonzero empirical frequency.
    pub feature: CorrelationOutcome,
}

/// Correlation between empirical and null selection frequencies.
pub fn bias_diagnostics(empirical: &RankingResult, null: &RankingResult) -> Result<BiasReport> {
    if empirical.pathway_ids != null.pathway_ids {
        return Err(Error::UniverseMismatch(
            empirical.pathway_ids.len(),
            null.pathway_ids.len(),
        ));
    }
    if empirical.feature_ids != null.feature_ids {
        return Err(Error::UniverseMismatch(
            empirical.feature_ids.len(),
            null.feature_ids.len(),
        ));
    }
    let pathway = CorrelationOutcome::from_result(pearson(&empirical.pi_path(), &null.pi_path()))?;
    let (pe, pn) = (empirical.pi_snp(), null.pi_snp());
    let keep: Vec<usize> = (0..pe.len()).filter(|&j| pe[j] > 0.0).collect();
    let fe: Vec<f64> = keep.iter().map(|&j| pe[j]).collect();
    let fnull: Vec<f64> = keep.iter().map(|&j| pn[j]).collect();
    let feature = CorrelationOutcome::from_result(pearson(&fe, &fnull))?;
    Ok(BiasReport { pathway, feature })
}

/// Frequencies sorted descending with ties by ascending ID; helper for
/// building rank lists from any frequency vector.
pub fn order_by_frequency(ids: &[String], freq: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..freq.len()).collect();
    order.sort_by(|&a, &b| {
        freq[b]
            .partial_cmp(&freq[a])
            .unwrap_or(Ordering::Equal)
            .then_with(|| ids[a].cmp(&ids[b]))
    });
    order
}
