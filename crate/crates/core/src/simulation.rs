//! Synthetic genotypes, pathway topologies and phenotypes, and the two
//! simulation studies built from them.
//!
//! Study 1 places causal features in disjoint pathways and compares the
//! sparse group lasso with a lasso matched for the number of selected
//! features. Study 2 uses a chain of overlapping pathways and compares the
//! competitive (BCGD) and independent (CGD) fitting algorithms.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use log::{info, warn};
use ndarray::Array2;
use rand::seq::index;
use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{expand_overlaps, standardize, GenotypeMatrix, PathwayMap, Phenotype};
use crate::error::{Error, Result};
use crate::penalty::{lambda_max, match_lasso_cardinality};
use crate::rng::substream;
use crate::solver::{fit_sgl_bcgd, fit_sgl_cgd, SglConfig, SglFit};

/// Mean of the baseline phenotype.
pub const BASELINE_MEAN: f64 = 10.0;
pub const DEFAULT_FEATURES_PER_GENE: usize = 5;

/// Hardy-Weinberg genotypes with per-feature minor allele frequency drawn
/// from `U[maf_low, maf_high]`. Returns the matrix and the frequencies.
pub fn simulate_genotypes(
    n: usize,
    p: usize,
    maf_low: f64,
    maf_high: f64,
    seed: u64,
) -> Result<(GenotypeMatrix, Vec<f64>)> {
    if !(maf_low > 0.0 && maf_low <= maf_high && maf_high <= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "MAF range [{maf_low}, {maf_high}] must satisfy 0 < low <= high <= 0.5"
        )));
    }
    let columns: Vec<(f64, Vec<u8>)> = (0..p as u64)
        .into_par_iter()
        .map(|j| {
            let mut rng = substream(seed, "genotype", j);
            let m = if maf_low == maf_high {
                maf_low
            } else {
                rng.random_range(maf_low..maf_high)
            };
            let p0 = (1.0 - m) * (1.0 - m);
            let p1 = p0 + 2.0 * m * (1.0 - m);
            let col = (0..n)
                .map(|_| {
                    let u: f64 = rng.random();
                    if u < p0 {
                        0
                    } else if u < p1 {
                        1
                    } else {
                        2
                    }
                })
                .collect();
            (m, col)
        })
        .collect();
    let mut values = Array2::<u8>::zeros((n, p));
    for (j, (_, col)) in columns.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            values[[i, j]] = v;
        }
    }
    let samples = (0..n).map(|i| format!("S{:05}", i + 1)).collect();
    let snps = (0..p).map(|j| format!("SNP{:05}", j + 1)).collect();
    let mafs = columns.into_iter().map(|(m, _)| m).collect();
    Ok((GenotypeMatrix::new(samples, snps, values)?, mafs))
}

/// `n_pathways` disjoint pathways of `p / n_pathways` consecutive features.
pub fn build_study1_pathways(p: usize, n_pathways: usize, features_per_gene: usize) -> Result<PathwayMap> {
    if n_pathways == 0 || !p.is_multiple_of(n_pathways) {
        return Err(Error::InvalidTopology(format!(
            "{p} features cannot be split evenly into {n_pathways} pathways"
        )));
    }
    let size = p / n_pathways;
    let sets = (0..n_pathways).map(|l| (l * size..(l + 1) * size).collect()).collect();
    PathwayMap::from_feature_sets(sets, p, features_per_gene)
}

/// Chain of `n_pathways` pathways of `size` features where consecutive
/// pathways share `overlap` features. Pathway `l` holds features
/// `[l (size - overlap), l (size - overlap) + size)`.
pub fn build_study2_pathways(
    n_pathways: usize,
    size: usize,
    overlap: usize,
    features_per_gene: usize,
) -> Result<PathwayMap> {
    if n_pathways == 0 || size == 0 || overlap >= size || 2 * overlap > size {
        return Err(Error::InvalidTopology(format!(
            "size {size} with overlap {overlap} does not give a chain where only neighbours overlap"
        )));
    }
    let stride = size - overlap;
    let p = n_pathways * stride + overlap;
    let sets = (0..n_pathways)
        .map(|l| (l * stride..l * stride + size).collect())
        .collect();
    PathwayMap::from_feature_sets(sets, p, features_per_gene)
}

/// Causal features and the pathways containing them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CausalDraw {
    pub features: Vec<usize>,
    pub pathways: Vec<usize>,
}

fn pathways_containing(map: &PathwayMap, features: &[usize]) -> Vec<usize> {
    let set: BTreeSet<usize> = features.iter().copied().collect();
    (0..map.n_pathways())
        .filter(|&l| map.pathway(l).members.iter().any(|j| set.contains(j)))
        .collect()
}

fn sample_from(pool: &[usize], k: usize, rng: &mut crate::rng::Rng) -> Result<Vec<usize>> {
    if k > pool.len() {
        return Err(Error::InvalidParameter(format!(
            "cannot draw {k} causal features from {}",
            pool.len()
        )));
    }
    let mut out: Vec<usize> = index::sample(rng, pool.len(), k)
        .into_iter()
        .map(|i| pool[i])
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// Study 1 causal set: `n_causal` features from one uniformly chosen pathway
/// (`enriched`), or from all features.
pub fn choose_causal_study1(
    map: &PathwayMap,
    n_causal: usize,
    enriched: bool,
    seed: u64,
) -> Result<CausalDraw> {
    let mut rng = substream(seed, "causal", 0);
    let features = if enriched {
        let l = rng.random_range(0..map.n_pathways());
        sample_from(&map.pathway(l).members, n_causal, &mut rng)?
    } else {
        let all: Vec<usize> = (0..map.n_features()).collect();
        sample_from(&all, n_causal, &mut rng)?
    };
    Ok(CausalDraw {
        pathways: pathways_containing(map, &features),
        features,
    })
}

/// Eligible causal features for the adjacent pair `(l, l + 1)`:
/// `(G_l \ G_{l-1}) ∪ (G_{l+1} \ G_{l+2})`, missing neighbours taken as empty.
pub fn study2_pool(map: &PathwayMap, l: usize) -> Vec<usize> {
    let set = |m: Option<usize>| -> BTreeSet<usize> {
        m.filter(|&m| m < map.n_pathways())
            .map(|m| map.pathway(m).members.iter().copied().collect())
            .unwrap_or_default()
    };
    let left: BTreeSet<usize> = set(Some(l)).difference(&set(l.checked_sub(1))).copied().collect();
    let right: BTreeSet<usize> = set(Some(l + 1)).difference(&set(Some(l + 2))).copied().collect();
    left.union(&right).copied().collect()
}

/// Study 2 causal set: `n_causal` features from the pool of a uniformly
/// chosen adjacent pathway pair.
pub fn choose_causal_study2(map: &PathwayMap, n_causal: usize, seed: u64) -> Result<CausalDraw> {
    if map.n_pathways() < 2 {
        return Err(Error::InvalidTopology("need at least two pathways".into()));
    }
    let mut rng = substream(seed, "causal", 0);
    let l = rng.random_range(0..map.n_pathways() - 1);
    let features = sample_from(&study2_pool(map, l), n_causal, &mut rng)?;
    Ok(CausalDraw {
        pathways: pathways_containing(map, &features),
        features,
    })
}

/// `delta = |S| gamma E(y) / (2 sum_k m_k)` for equal per-feature shares.
pub fn effect_amplitude(n_causal: usize, gamma: f64, maf_sum: f64) -> Result<f64> {
    if maf_sum == 0.0 {
        return Err(Error::ZeroMafSum);
    }
    if !(gamma >= 0.0) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} is negative")));
    }
    Ok(n_causal as f64 * gamma * BASELINE_MEAN / (2.0 * maf_sum))
}

/// `y* = y + delta sum_k x_k / |S|` on raw allele counts.
pub fn inject_effects(
    y_base: &[f64],
    genotypes: &GenotypeMatrix,
    causal: &[usize],
    gamma: f64,
    mafs: &[f64],
) -> Result<Vec<f64>> {
    if causal.is_empty() {
        return Ok(y_base.to_vec());
    }
    let maf_sum: f64 = causal.iter().map(|&k| mafs[k]).sum();
    let delta = effect_amplitude(causal.len(), gamma, maf_sum)?;
    let share = 1.0 / causal.len() as f64;
    let g = genotypes.values();
    Ok(y_base
        .iter()
        .enumerate()
        .map(|(i, &y)| {
            let w: f64 = causal.iter().map(|&k| f64::from(g[[i, k]])).sum();
            y + delta * share * w
        })
        .collect())
}

/// `N(10, 1)` baseline phenotype.
pub fn baseline_phenotype(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = substream(seed, "baseline", 0);
    let normal = Normal::new(BASELINE_MEAN, 1.0).expect("valid normal");
    (0..n).map(|_| normal.sample(&mut rng)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionMetrics {
    pub power: f64,
    pub fpr: f64,
}

/// Power `|sel ∩ truth| / |truth|` and false positive rate
/// `|sel \ truth| / |sel|` (0 when nothing is selected).
pub fn power_fpr(selected: &[usize], truth: &[usize]) -> Result<SelectionMetrics> {
    if truth.is_empty() {
        return Err(Error::EmptyTruth);
    }
    let t: BTreeSet<usize> = truth.iter().copied().collect();
    let s: BTreeSet<usize> = selected.iter().copied().collect();
    let hits = s.intersection(&t).count();
    Ok(SelectionMetrics {
        power: hits as f64 / t.len() as f64,
        fpr: if s.is_empty() {
            0.0
        } else {
            (s.len() - hits) as f64 / s.len() as f64
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Study {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

/// Study settings; serialisable as the JSON study config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StudyConfig {
    pub study: Study,
    pub n_samples: usize,
    /// Study 1 only; Study 2 derives the feature count from the chain.
    pub n_features: usize,
    pub n_pathways: usize,
    /// Study 2 pathway size and overlap.
    pub pathway_size: usize,
    pub overlap: usize,
    pub features_per_gene: usize,
    pub n_causal: usize,
    /// Study 1: causal features from a single pathway.
    pub enriched: bool,
    pub gammas: Vec<f64>,
    pub replicates: usize,
    pub lambda_frac: f64,
    pub alpha: f64,
    pub maf_low: f64,
    pub maf_high: f64,
    pub seed: u64,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self::study1()
    }
}

impl StudyConfig {
    pub fn study1() -> Self {
        Self {
            study: Study::One,
            n_samples: 400,
            n_features: 2500,
            n_pathways: 50,
            pathway_size: 50,
            overlap: 0,
            features_per_gene: DEFAULT_FEATURES_PER_GENE,
            n_causal: 5,
            enriched: true,
            gammas: vec![0.04, 0.08, 0.12],
            replicates: 100,
            lambda_frac: 0.85,
            alpha: 0.8,
            maf_low: 0.1,
            maf_high: 0.5,
            seed: 1,
        }
    }

    pub fn study2() -> Self {
        Self {
            study: Study::Two,
            n_samples: 400,
            n_features: 1010,
            n_pathways: 50,
            pathway_size: 30,
            overlap: 10,
            features_per_gene: DEFAULT_FEATURES_PER_GENE,
            n_causal: 10,
            enriched: true,
            gammas: vec![0.12],
            replicates: 200,
            lambda_frac: 0.85,
            alpha: 0.85,
            maf_low: 0.1,
            maf_high: 0.5,
            seed: 1,
        }
    }

    /// Parse a possibly partial JSON config; missing fields take the
    /// defaults of the study it names (Study 1 when absent).
    pub fn from_json(text: &str) -> Result<Self> {
        let invalid = |e: serde_json::Error| Error::InvalidParameter(format!("study config: {e}"));
        let given: serde_json::Value = serde_json::from_str(text).map_err(invalid)?;
        let fields = given
            .as_object()
            .ok_or_else(|| Error::InvalidParameter("study config must be a JSON object".into()))?;
        let base = match fields.get("study") {
            Some(s) => match serde_json::from_value::<Study>(s.clone()).map_err(invalid)? {
                Study::One => Self::study1(),
                Study::Two => Self::study2(),
            },
            None => Self::study1(),
        };
        let mut merged = serde_json::to_value(base).map_err(invalid)?;
        let target = merged.as_object_mut().expect("config serialises to an object");
        for (k, v) in fields {
            target.insert(k.clone(), v.clone());
        }
        serde_json::from_value(merged).map_err(invalid)
    }

    pub fn pathway_map(&self) -> Result<PathwayMap> {
        match self.study {
            Study::One => build_study1_pathways(self.n_features, self.n_pathways, self.features_per_gene),
            Study::Two => build_study2_pathways(
                self.n_pathways,
                self.pathway_size,
                self.overlap,
                self.features_per_gene,
            ),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_samples < 2 || self.replicates == 0 || self.gammas.is_empty() {
            return Err(Error::InvalidParameter(
                "need at least 2 samples, 1 replicate and 1 effect size".into(),
            ));
        }
        if self.gammas.iter().any(|g| !(*g >= 0.0)) {
            return Err(Error::InvalidParameter("effect sizes must be non-negative".into()));
        }
        if !(0.0..=1.0).contains(&self.alpha) || !(self.lambda_frac > 0.0) {
            return Err(Error::InvalidParameter("alpha or lambda_frac out of range".into()));
        }
        Ok(())
    }
}

/// Metrics for one method on one replicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodOutcome {
    pub method: String,
    pub pathway: Option<SelectionMetrics>,
    pub feature: SelectionMetrics,
    pub selected_pathways: usize,
    pub selected_features: usize,
    pub converged: bool,
    /// Lasso only: whether the matched cardinality was hit exactly.
    pub exact_match: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRecord {
    pub gamma: f64,
    pub replicate: usize,
    pub causal_features: Vec<usize>,
    pub causal_pathways: Vec<usize>,
    pub outcomes: Vec<MethodOutcome>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub replicates: usize,
    pub mean_pathway_power: Option<f64>,
    pub mean_pathway_fpr: Option<f64>,
    pub mean_feature_power: f64,
    pub mean_feature_fpr: f64,
    pub mean_selected_pathways: f64,
    pub mean_selected_features: f64,
    /// Count of replicates at feature power `i / n_causal`, `i = 0..=n_causal`.
    pub power_histogram: Vec<usize>,
    pub nonconverged: usize,
    pub inexact_matches: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectSummary {
    pub gamma: f64,
    pub failures: usize,
    pub methods: Vec<MethodSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub config: StudyConfig,
    pub summaries: Vec<EffectSummary>,
    pub replicates: Vec<ReplicateRecord>,
}

impl StudyReport {
    pub fn summary(&self, gamma: f64) -> Option<&EffectSummary> {
        self.summaries.iter().find(|s| s.gamma == gamma)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        serde_json::to_writer_pretty(&mut w, self)
            .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// One row per replicate and method.
    pub fn write_tsv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let io = |e| Error::io(path, e);
        writeln!(
            w,
            "gamma\treplicate\tmethod\tpathway_power\tpathway_fpr\tfeature_power\tfeature_fpr\tselected_pathways\tselected_features\tconverged"
        )
        .map_err(io)?;
        let opt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| x.to_string());
        for r in &self.replicates {
            for o in &r.outcomes {
                writeln!(
                    w,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    r.gamma,
                    r.replicate,
                    o.method,
                    opt(o.pathway.map(|m| m.power)),
                    opt(o.pathway.map(|m| m.fpr)),
                    o.feature.power,
                    o.feature.fpr,
                    o.selected_pathways,
                    o.selected_features,
                    o.converged
                )
                .map_err(io)?;
            }
        }
        w.flush().map_err(io)
    }
}

fn sgl_outcome(method: &str, fit: &SglFit, causal: &CausalDraw) -> Result<MethodOutcome> {
    Ok(MethodOutcome {
        method: method.to_string(),
        pathway: Some(power_fpr(&fit.selected_pathways, &causal.pathways)?),
        feature: power_fpr(&fit.selected_features, &causal.features)?,
        selected_pathways: fit.selected_pathways.len(),
        selected_features: fit.selected_features.len(),
        converged: fit.converged(),
        exact_match: None,
    })
}

fn run_replicate(
    config: &StudyConfig,
    map: &PathwayMap,
    gamma: f64,
    replicate: usize,
) -> Result<(CausalDraw, Vec<MethodOutcome>)> {
    // genotypes, causal set and baseline depend only on the replicate, so
    // every effect size sees the same data
    let rep_seed: u64 = substream(config.seed, "replicate", replicate as u64).random();
    let (genotypes, mafs) = simulate_genotypes(
        config.n_samples,
        map.n_features(),
        config.maf_low,
        config.maf_high,
        rep_seed,
    )?;
    let causal = match config.study {
        Study::One => choose_causal_study1(map, config.n_causal, config.enriched, rep_seed)?,
        Study::Two => choose_causal_study2(map, config.n_causal, rep_seed)?,
    };
    let y = inject_effects(
        &baseline_phenotype(config.n_samples, rep_seed),
        &genotypes,
        &causal.features,
        gamma,
        &mafs,
    )?;
    let phenotype = Phenotype::new(genotypes.samples().to_vec(), y)?;
    let data = standardize(&genotypes, &phenotype)?;
    let weights = vec![1.0; map.n_pathways()];
    let lmax = lambda_max(&data, map, config.alpha, &weights)?;
    let sgl = SglConfig::new(config.lambda_frac * lmax, config.alpha, map.n_pathways());
    let expanded = expand_overlaps(map);

    let mut outcomes = Vec::new();
    match config.study {
        Study::One => {
            let fit = fit_sgl_bcgd(&data, map, &expanded, &sgl)?;
            outcomes.push(sgl_outcome("sgl", &fit, &causal)?);
            let matched = match_lasso_cardinality(&data, fit.selected_features.len())?;
            let support: Vec<usize> = (0..matched.beta.len())
                .filter(|&j| matched.beta[j] != 0.0)
                .collect();
            outcomes.push(MethodOutcome {
                method: "lasso".into(),
                pathway: None,
                feature: power_fpr(&support, &causal.features)?,
                selected_pathways: 0,
                selected_features: support.len(),
                converged: true,
                exact_match: Some(matched.exact),
            });
        }
        Study::Two => {
            let cgd = fit_sgl_cgd(&data, map, &sgl)?;
            outcomes.push(sgl_outcome("cgd", &cgd, &causal)?);
            let bcgd = fit_sgl_bcgd(&data, map, &expanded, &sgl)?;
            outcomes.push(sgl_outcome("bcgd", &bcgd, &causal)?);
        }
    }
    Ok((causal, outcomes))
}

fn summarise(gamma: f64, records: &[&ReplicateRecord], n_causal: usize) -> EffectSummary {
    let failures = records.iter().filter(|r| r.error.is_some()).count();
    let mut methods: Vec<String> = Vec::new();
    for r in records {
        for o in &r.outcomes {
            if !methods.contains(&o.method) {
                methods.push(o.method.clone());
            }
        }
    }
    let methods = methods
        .into_iter()
        .map(|m| {
            let outs: Vec<&MethodOutcome> = records
                .iter()
                .flat_map(|r| r.outcomes.iter())
                .filter(|o| o.method == m)
                .collect();
            let n = outs.len().max(1) as f64;
            let mean = |f: &dyn Fn(&MethodOutcome) -> f64| outs.iter().map(|o| f(o)).sum::<f64>() / n;
            let has_pathways = outs.iter().all(|o| o.pathway.is_some());
            let mut power_histogram = vec![0usize; n_causal + 1];
            for o in &outs {
                let bin = (o.feature.power * n_causal as f64).round() as usize;
                power_histogram[bin.min(n_causal)] += 1;
            }
            MethodSummary {
                replicates: outs.len(),
                mean_pathway_power: has_pathways
                    .then(|| mean(&|o| o.pathway.map_or(0.0, |p| p.power))),
                mean_pathway_fpr: has_pathways.then(|| mean(&|o| o.pathway.map_or(0.0, |p| p.fpr))),
                mean_feature_power: mean(&|o| o.feature.power),
                mean_feature_fpr: mean(&|o| o.feature.fpr),
                mean_selected_pathways: mean(&|o| o.selected_pathways as f64),
                mean_selected_features: mean(&|o| o.selected_features as f64),
                power_histogram,
                nonconverged: outs.iter().filter(|o| !o.converged).count(),
                inexact_matches: outs.iter().filter(|o| o.exact_match == Some(false)).count(),
                method: m,
            }
        })
        .collect();
    EffectSummary {
        gamma,
        failures,
        methods,
    }
}

/// Run every (effect size, replicate) pair and aggregate.
pub fn run_study(config: &StudyConfig) -> Result<StudyReport> {
    config.validate()?;
    let map = config.pathway_map()?;
    let tasks: Vec<(f64, usize)> = config
        .gammas
        .iter()
        .flat_map(|&g| (0..config.replicates).map(move |r| (g, r)))
        .collect();
    let replicates: Vec<ReplicateRecord> = tasks
        .par_iter()
        .map(|&(gamma, replicate)| match run_replicate(config, &map, gamma, replicate) {
            Ok((causal, outcomes)) => ReplicateRecord {
                gamma,
                replicate,
                causal_features: causal.features,
                causal_pathways: causal.pathways,
                outcomes,
                error: None,
            },
            Err(e) => {
                warn!("replicate {replicate} at gamma {gamma} failed: {e}");
                ReplicateRecord {
                    gamma,
                    replicate,
                    causal_features: Vec::new(),
                    causal_pathways: Vec::new(),
                    outcomes: Vec::new(),
                    error: Some(e.to_string()),
                }
            }
        })
        .collect();
    let summaries = config
        .gammas
        .iter()
        .map(|&g| {
            let recs: Vec<&ReplicateRecord> = replicates.iter().filter(|r| r.gamma == g).collect();
            let s = summarise(g, &recs, config.n_causal);
            for m in &s.methods {
                info!(
                    "gamma {g}: {} power {:.3} fpr {:.3} |C| {:.2} |S| {:.2}",
                    m.method,
                    m.mean_feature_power,
                    m.mean_feature_fpr,
                    m.mean_selected_pathways,
                    m.mean_selected_features
                );
            }
            s
        })
        .collect();
    Ok(StudyReport {
        config: config.clone(),
        summaries,
        replicates,
    })
}

/// Study 1 with the given effect sizes and replicate count.
pub fn run_study1(gammas: &[f64], replicates: usize, enriched: bool, seed: u64) -> Result<StudyReport> {
    let config = StudyConfig {
        gammas: gammas.to_vec(),
        replicates,
        enriched,
        seed,
        ..StudyConfig::study1()
    };
    run_study(&config)
}

/// Study 2 with the given effect sizes and replicate count.
pub fn run_study2(gammas: &[f64], replicates: usize, seed: u64) -> Result<StudyReport> {
    let config = StudyConfig {
        gammas: gammas.to_vec(),
        replicates,
        seed,
        ..StudyConfig::study2()
    };
    run_study(&config)
}
