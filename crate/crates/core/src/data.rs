//! Genotype, phenotype and pathway-annotation ingestion, standardisation and
//! overlap expansion.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::ops::Range;
use std::path::Path;

use log::{debug, warn};
use ndarray::{Array2, ShapeBuilder};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Columns whose centred sum of squares falls below this are treated as constant.
const CONSTANT_COLUMN_EPS: f64 = 1e-12;

fn fields(line: &str) -> Vec<&str> {
    if line.contains('\t') {
        line.split('\t').map(str::trim).collect()
    } else {
        line.split_whitespace().collect()
    }
}

fn read_lines(path: &Path) -> Result<impl Iterator<Item = (usize, Result<String>)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let owned = path.to_path_buf();
    Ok(BufReader::new(file)
        .lines()
        .enumerate()
        .map(move |(i, l)| (i + 1, l.map_err(|e| Error::io(&owned, e))))
        .filter(|(_, l)| !matches!(l, Ok(s) if s.trim().is_empty())))
}

fn check_unique(ids: &[String]) -> Result<()> {
    let mut seen = HashSet::with_capacity(ids.len());
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(Error::DuplicateId(id.clone()));
        }
    }
    Ok(())
}

/// Minor-allele counts for `N` samples by `P` features.
#[derive(Debug, Clone, PartialEq)]
pub struct GenotypeMatrix {
    samples: Vec<String>,
    snp_ids: Vec<String>,
    values: Array2<u8>,
}

impl GenotypeMatrix {
    pub fn new(samples: Vec<String>, snp_ids: Vec<String>, values: Array2<u8>) -> Result<Self> {
        if values.nrows() != samples.len() || values.ncols() != snp_ids.len() {
            return Err(Error::InvalidParameter(format!(
                "genotype matrix is {}x{} but {} samples and {} features were named",
                values.nrows(),
                values.ncols(),
                samples.len(),
                snp_ids.len()
            )));
        }
        if let Some(bad) = values.iter().find(|&&v| v > 2) {
            return Err(Error::InvalidParameter(format!("genotype value {bad} is not 0, 1 or 2")));
        }
        check_unique(&samples)?;
        check_unique(&snp_ids)?;
        Ok(Self {
            samples,
            snp_ids,
            values,
        })
    }

    pub fn samples(&self) -> &[String] {
        &self.samples
    }

    pub fn snp_ids(&self) -> &[String] {
        &self.snp_ids
    }

    pub fn values(&self) -> &Array2<u8> {
        &self.values
    }

    pub fn n_samples(&self) -> usize {
        self.samples.len()
    }

    pub fn n_features(&self) -> usize {
        self.snp_ids.len()
    }

    /// Restrict to the given sample rows, in the given order.
    pub fn select_samples(&self, rows: &[usize]) -> Self {
        let values = self.values.select(ndarray::Axis(0), rows);
        Self {
            samples: rows.iter().map(|&r| self.samples[r].clone()).collect(),
            snp_ids: self.snp_ids.clone(),
            values,
        }
    }

    pub fn write_tsv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let io = |e| Error::io(path, e);
        write!(w, "sample_id").map_err(io)?;
        for id in &self.snp_ids {
            write!(w, "\t{id}").map_err(io)?;
        }
        writeln!(w).map_err(io)?;
        let mut line = String::with_capacity(self.snp_ids.len() * 2 + 16);
        for (i, row) in self.values.outer_iter().enumerate() {
            line.clear();
            line.push_str(&self.samples[i]);
            for &v in row {
                line.push('\t');
                line.push(char::from(b'0' + v));
            }
            writeln!(w, "{line}").map_err(io)?;
        }
        w.flush().map_err(io)
    }
}

/// Parse a genotype TSV: a header of feature IDs (optionally preceded by a
/// label for the sample column), then one row per sample.
pub fn load_genotypes(path: impl AsRef<Path>) -> Result<GenotypeMatrix> {
    let path = path.as_ref();
    let mut lines = read_lines(path)?;
    let (_, header) = lines.next().ok_or_else(|| Error::Parse {
        path: path.to_path_buf(),
        line: 1,
        message: "empty genotype file".into(),
    })?;
    let header = header?;
    let header_fields: Vec<String> = fields(&header).into_iter().map(String::from).collect();

    let mut samples = Vec::new();
    let mut cells: Vec<u8> = Vec::new();
    let mut snp_ids: Option<Vec<String>> = None;
    for (lineno, line) in lines {
        let line = line?;
        let row = fields(&line);
        let ids = snp_ids.get_or_insert_with(|| {
            // a header one field longer than the feature count carries a
            // label for the sample column
            if header_fields.len() == row.len() {
                header_fields[1..].to_vec()
            } else {
                header_fields.clone()
            }
        });
        if row.len() != ids.len() + 1 {
            return Err(Error::RaggedRow {
                path: path.to_path_buf(),
                line: lineno,
                expected: ids.len() + 1,
                found: row.len(),
            });
        }
        samples.push(row[0].to_string());
        for cell in &row[1..] {
            let v = match *cell {
                "0" => 0,
                "1" => 1,
                "2" => 2,
                other => {
                    return Err(Error::MissingValue {
                        path: path.to_path_buf(),
                        line: lineno,
                        value: other.to_string(),
                    })
                }
            };
            cells.push(v);
        }
    }
    let snp_ids = snp_ids.unwrap_or_else(|| header_fields.clone());
    let values = Array2::from_shape_vec((samples.len(), snp_ids.len()), cells)
        .expect("row lengths were checked");
    GenotypeMatrix::new(samples, snp_ids, values)
}

/// Quantitative response with optional covariates.
#[derive(Debug, Clone, PartialEq)]
pub struct Phenotype {
    pub samples: Vec<String>,
    pub y: Vec<f64>,
    pub covariate_names: Vec<String>,
    /// `N x C`, empty when there are no covariates.
    pub covariates: Option<Array2<f64>>,
}

impl Phenotype {
    pub fn new(samples: Vec<String>, y: Vec<f64>) -> Result<Self> {
        if samples.len() != y.len() {
            return Err(Error::InvalidParameter(format!(
                "{} samples but {} phenotype values",
                samples.len(),
                y.len()
            )));
        }
        check_unique(&samples)?;
        Ok(Self {
            samples,
            y,
            covariate_names: Vec::new(),
            covariates: None,
        })
    }

    pub fn with_covariates(mut self, names: Vec<String>, covariates: Array2<f64>) -> Result<Self> {
        if covariates.nrows() != self.samples.len() || covariates.ncols() != names.len() {
            return Err(Error::InvalidParameter(
                "covariate matrix does not align with samples".into(),
            ));
        }
        self.covariate_names = names;
        self.covariates = Some(covariates);
        Ok(self)
    }

    pub fn select_samples(&self, rows: &[usize]) -> Self {
        Self {
            samples: rows.iter().map(|&r| self.samples[r].clone()).collect(),
            y: rows.iter().map(|&r| self.y[r]).collect(),
            covariate_names: self.covariate_names.clone(),
            covariates: self
                .covariates
                .as_ref()
                .map(|c| c.select(ndarray::Axis(0), rows)),
        }
    }

    pub fn write_tsv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let io = |e| Error::io(path, e);
        write!(w, "sample_id\ty").map_err(io)?;
        for name in &self.covariate_names {
            write!(w, "\t{name}").map_err(io)?;
        }
        writeln!(w).map_err(io)?;
        for (i, s) in self.samples.iter().enumerate() {
            write!(w, "{s}\t{}", self.y[i]).map_err(io)?;
            if let Some(c) = &self.covariates {
                for v in c.row(i) {
                    write!(w, "\t{v}").map_err(io)?;
                }
            }
            writeln!(w).map_err(io)?;
        }
        w.flush().map_err(io)
    }
}

/// Parse a phenotype TSV with columns `sample_id, y, covariates...`.
/// A first line whose second field is not numeric is taken as the header.
pub fn load_phenotype(path: impl AsRef<Path>) -> Result<Phenotype> {
    let path = path.as_ref();
    let mut names: Option<Vec<String>> = None;
    let mut samples = Vec::new();
    let mut y = Vec::new();
    let mut cov: Vec<f64> = Vec::new();
    let mut width: Option<usize> = None;
    for (lineno, line) in read_lines(path)? {
        let line = line?;
        let row = fields(&line);
        if row.len() < 2 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: lineno,
                message: "expected at least sample_id and y".into(),
            });
        }
        if lineno == 1 && row[1].parse::<f64>().is_err() {
            names = Some(row[2..].iter().map(|s| s.to_string()).collect());
            width = Some(row.len());
            continue;
        }
        let expected = *width.get_or_insert(row.len());
        if row.len() != expected {
            return Err(Error::RaggedRow {
                path: path.to_path_buf(),
                line: lineno,
                expected,
                found: row.len(),
            });
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse {
                    path: path.to_path_buf(),
                    line: lineno,
                    message: format!("{s:?} is not a finite number"),
                })
        };
        samples.push(row[0].to_string());
        y.push(parse(row[1])?);
        for cell in &row[2..] {
            cov.push(parse(cell)?);
        }
    }
    let n_cov = width.map_or(0, |w| w - 2);
    let pheno = Phenotype::new(samples, y)?;
    if n_cov == 0 {
        return Ok(pheno);
    }
    let names = names.unwrap_or_else(|| (1..=n_cov).map(|i| format!("cov{i}")).collect());
    let matrix = Array2::from_shape_vec((pheno.samples.len(), n_cov), cov)
        .expect("row widths were checked");
    pheno.with_covariates(names, matrix)
}

/// A named group of feature indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pathway {
    pub id: String,
    pub members: Vec<usize>,
}

/// Feature -> gene -> pathway mapping. Pathways may overlap.
#[derive(Debug, Clone, PartialEq)]
pub struct PathwayMap {
    pathways: Vec<Pathway>,
    genes: Vec<String>,
    snp_to_genes: Vec<Vec<usize>>,
    gene_to_pathways: Vec<Vec<usize>>,
}

impl PathwayMap {
    /// Assemble and validate a map. `snp_to_genes` has one entry per feature
    /// of the genotype universe; unmapped features have an empty list.
    pub fn new(
        pathways: Vec<Pathway>,
        genes: Vec<String>,
        snp_to_genes: Vec<Vec<usize>>,
        gene_to_pathways: Vec<Vec<usize>>,
    ) -> Result<Self> {
        check_unique(&pathways.iter().map(|p| p.id.clone()).collect::<Vec<_>>())?;
        check_unique(&genes)?;
        if gene_to_pathways.len() != genes.len() {
            return Err(Error::InvalidParameter(
                "gene_to_pathways must have one entry per gene".into(),
            ));
        }
        for p in &pathways {
            if p.members.is_empty() {
                return Err(Error::InvalidParameter(format!("pathway {} is empty", p.id)));
            }
            let mut seen = HashSet::with_capacity(p.members.len());
            for &j in &p.members {
                if !seen.insert(j) {
                    return Err(Error::InvalidParameter(format!(
                        "pathway {} lists feature {j} twice",
                        p.id
                    )));
                }
                if j >= snp_to_genes.len() || snp_to_genes[j].is_empty() {
                    return Err(Error::InvalidParameter(format!(
                        "pathway {} contains feature {j} with no gene mapping",
                        p.id
                    )));
                }
            }
        }
        if snp_to_genes.iter().flatten().any(|&g| g >= genes.len())
            || gene_to_pathways.iter().flatten().any(|&l| l >= pathways.len())
        {
            return Err(Error::InvalidParameter("map index out of range".into()));
        }
        Ok(Self {
            pathways,
            genes,
            snp_to_genes,
            gene_to_pathways,
        })
    }

    /// Build a map where gene -> pathway links are implied by shared features.
    pub fn from_memberships(
        pathways: Vec<Pathway>,
        genes: Vec<String>,
        snp_to_genes: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let mut gene_to_pathways: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); genes.len()];
        for (l, p) in pathways.iter().enumerate() {
            for &j in &p.members {
                if let Some(gs) = snp_to_genes.get(j) {
                    for &g in gs {
                        if g < genes.len() {
                            gene_to_pathways[g].insert(l);
                        }
                    }
                }
            }
        }
        let gene_to_pathways = gene_to_pathways
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect();
        Self::new(pathways, genes, snp_to_genes, gene_to_pathways)
    }

    /// Map over `n_features` features where gene `g` covers features
    /// `[g k, (g + 1) k)` and pathway `l` (ID `P<l+1>`) holds the given features.
    pub fn from_feature_sets(
        sets: Vec<Vec<usize>>,
        n_features: usize,
        features_per_gene: usize,
    ) -> Result<Self> {
        if features_per_gene == 0 {
            return Err(Error::InvalidParameter("features_per_gene must be positive".into()));
        }
        let n_genes = n_features.div_ceil(features_per_gene);
        let genes = (0..n_genes).map(|g| format!("G{}", g + 1)).collect();
        let snp_to_genes = (0..n_features).map(|j| vec![j / features_per_gene]).collect();
        let pathways = sets
            .into_iter()
            .enumerate()
            .map(|(l, members)| Pathway {
                id: format!("P{}", l + 1),
                members,
            })
            .collect();
        Self::from_memberships(pathways, genes, snp_to_genes)
    }

    pub fn n_pathways(&self) -> usize {
        self.pathways.len()
    }

    pub fn n_features(&self) -> usize {
        self.snp_to_genes.len()
    }

    pub fn pathways(&self) -> &[Pathway] {
        &self.pathways
    }

    pub fn pathway(&self, l: usize) -> &Pathway {
        &self.pathways[l]
    }

    pub fn genes(&self) -> &[String] {
        &self.genes
    }

    pub fn genes_of(&self, feature: usize) -> &[usize] {
        &self.snp_to_genes[feature]
    }

    pub fn pathways_of_gene(&self, gene: usize) -> &[usize] {
        &self.gene_to_pathways[gene]
    }

    /// Pathways containing `feature`, ascending.
    pub fn pathways_of_feature(&self, feature: usize) -> Vec<usize> {
        self.pathways
            .iter()
            .enumerate()
            .filter(|(_, p)| p.members.contains(&feature))
            .map(|(l, _)| l)
            .collect()
    }

    /// Sum of pathway sizes, i.e. the overlap-expanded width.
    pub fn total_membership(&self) -> usize {
        self.pathways.iter().map(|p| p.members.len()).sum()
    }
}

/// Read a GMT pathway file and a feature -> gene map, keeping only features in
/// `genotype`. Pathways left with no mappable features are dropped.
pub fn load_pathway_annotation(
    gmt_path: impl AsRef<Path>,
    snp_gene_path: impl AsRef<Path>,
    genotype: &GenotypeMatrix,
) -> Result<PathwayMap> {
    let gmt_path = gmt_path.as_ref();
    let snp_gene_path = snp_gene_path.as_ref();
    let index: HashMap<&str, usize> = genotype
        .snp_ids()
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();

    let mut gene_snps: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    let mut unknown_snps = 0usize;
    for (lineno, line) in read_lines(snp_gene_path)? {
        let line = line?;
        let row = fields(&line);
        if row.len() != 2 {
            return Err(Error::RaggedRow {
                path: snp_gene_path.to_path_buf(),
                line: lineno,
                expected: 2,
                found: row.len(),
            });
        }
        match index.get(row[0]) {
            Some(&j) => {
                gene_snps.entry(row[1].to_string()).or_default().insert(j);
            }
            None => unknown_snps += 1,
        }
    }
    if unknown_snps > 0 {
        debug!("{unknown_snps} feature-gene pairs refer to features absent from the genotypes");
    }

    let genes: Vec<String> = gene_snps.keys().cloned().collect();
    let gene_index: HashMap<&str, usize> = genes
        .iter()
        .enumerate()
        .map(|(g, s)| (s.as_str(), g))
        .collect();
    let mut snp_to_genes: Vec<Vec<usize>> = vec![Vec::new(); genotype.n_features()];
    for (g, snps) in gene_snps.values().enumerate() {
        for &j in snps {
            snp_to_genes[j].push(g);
        }
    }

    let file = File::open(gmt_path).map_err(|e| Error::io(gmt_path, e))?;
    let mut pathways = Vec::new();
    let mut gene_to_pathways: Vec<Vec<usize>> = vec![Vec::new(); genes.len()];
    let mut seen_ids = HashSet::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(gmt_path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split('\t').map(str::trim);
        let id = parts.next().unwrap_or_default().to_string();
        if !seen_ids.insert(id.clone()) {
            return Err(Error::DuplicateId(id));
        }
        let mut members = BTreeSet::new();
        let mut used_genes = BTreeSet::new();
        for gene in parts.filter(|g| !g.is_empty()) {
            match gene_index.get(gene) {
                Some(&g) => {
                    members.extend(gene_snps[gene].iter().copied());
                    used_genes.insert(g);
                }
                None => debug!("pathway {id}: gene {gene} has no mapped features, ignored"),
            }
        }
        if members.is_empty() {
            warn!("pathway {id} has no mappable features and was dropped");
            continue;
        }
        let l = pathways.len();
        for g in used_genes {
            gene_to_pathways[g].push(l);
        }
        pathways.push(Pathway {
            id,
            members: members.into_iter().collect(),
        });
    }
    PathwayMap::new(pathways, genes, snp_to_genes, gene_to_pathways)
}

/// Centred response and unit-norm, centred design columns.
#[derive(Debug, Clone)]
pub struct StandardizedData {
    sample_ids: Vec<String>,
    snp_ids: Vec<String>,
    /// `N x P`, column-major so each column is a contiguous slice.
    x: Array2<f64>,
    y: Vec<f64>,
    column_means: Vec<f64>,
    column_norms: Vec<f64>,
    retained: Vec<bool>,
    y_mean: f64,
    covariate_coefficients: Option<Vec<f64>>,
}

impl StandardizedData {
    pub fn n_samples(&self) -> usize {
        self.y.len()
    }

    pub fn n_features(&self) -> usize {
        self.x.ncols()
    }

    pub fn sample_ids(&self) -> &[String] {
        &self.sample_ids
    }

    pub fn snp_ids(&self) -> &[String] {
        &self.snp_ids
    }

    pub fn x(&self) -> &Array2<f64> {
        &self.x
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[f64] {
        self.x
            .column(j)
            .to_slice()
            .expect("design matrix is column-major")
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn column_norms(&self) -> &[f64] {
        &self.column_norms
    }

    pub fn column_means(&self) -> &[f64] {
        &self.column_means
    }

    pub fn y_mean(&self) -> f64 {
        self.y_mean
    }

    /// Intercept followed by covariate coefficients, when covariates were regressed out.
    pub fn covariate_coefficients(&self) -> Option<&[f64]> {
        self.covariate_coefficients.as_deref()
    }

    #[inline]
    pub fn is_retained(&self, j: usize) -> bool {
        self.retained[j]
    }

    pub fn constant_columns(&self) -> Vec<usize> {
        (0..self.retained.len()).filter(|&j| !self.retained[j]).collect()
    }

    /// Same design with a different (already centred) response.
    pub fn with_response(&self, y: Vec<f64>) -> Self {
        assert_eq!(y.len(), self.y.len());
        Self { y, ..self.clone() }
    }

    /// `X_j' v` for every retained feature (0 for constant columns).
    pub fn xt_dot(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n_features())
            .map(|j| {
                if self.retained[j] {
                    linalg::dot(self.column(j), v)
                } else {
                    0.0
                }
            })
            .collect()
    }
}

/// Centre and scale the design and response. Covariates, when present, are
/// regressed out of the response together with an intercept.
pub fn standardize(genotype: &GenotypeMatrix, phenotype: &Phenotype) -> Result<StandardizedData> {
    let n = genotype.n_samples();
    let p = genotype.n_features();
    if phenotype.samples.len() != n {
        return Err(Error::SampleMismatch(format!(
            "{n} genotyped samples but {} phenotyped samples",
            phenotype.samples.len()
        )));
    }
    let order: Vec<usize> = if phenotype.samples == genotype.samples {
        (0..n).collect()
    } else {
        let pos: HashMap<&str, usize> = phenotype
            .samples
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        genotype
            .samples()
            .iter()
            .map(|s| {
                pos.get(s.as_str())
                    .copied()
                    .ok_or_else(|| Error::SampleMismatch(format!("sample {s} has no phenotype")))
            })
            .collect::<Result<_>>()?
    };
    let y_raw: Vec<f64> = order.iter().map(|&i| phenotype.y[i]).collect();
    let y_mean = linalg::mean(&y_raw);

    let (mut y, covariate_coefficients) = match &phenotype.covariates {
        Some(c) if c.ncols() > 0 => {
            let mut basis = Vec::with_capacity(c.ncols() + 1);
            basis.push(vec![1.0; n]);
            for k in 0..c.ncols() {
                basis.push(order.iter().map(|&i| c[[i, k]]).collect());
            }
            let (resid, coef) = linalg::least_squares_residual(&basis, &y_raw);
            (resid, Some(coef))
        }
        _ => (y_raw, None),
    };
    let m = linalg::mean(&y);
    y.iter_mut().for_each(|v| *v -= m);

    let mut x = Array2::<f64>::zeros((n, p).f());
    let mut column_means = vec![0.0; p];
    let mut column_norms = vec![0.0; p];
    let mut retained = vec![true; p];
    let g = genotype.values();
    for j in 0..p {
        let mut col = x.column_mut(j);
        let slice = col.as_slice_mut().expect("column-major");
        for (i, v) in slice.iter_mut().enumerate() {
            *v = f64::from(g[[i, j]]);
        }
        let mu = linalg::mean(slice);
        slice.iter_mut().for_each(|v| *v -= mu);
        let ss: f64 = slice.iter().map(|v| v * v).sum();
        column_means[j] = mu;
        column_norms[j] = ss.sqrt();
        if ss <= CONSTANT_COLUMN_EPS {
            retained[j] = false;
            slice.iter_mut().for_each(|v| *v = 0.0);
        } else {
            let s = ss.sqrt();
            slice.iter_mut().for_each(|v| *v /= s);
        }
    }
    let n_constant = retained.iter().filter(|r| !**r).count();
    if n_constant > 0 {
        warn!("{n_constant} constant genotype columns excluded from all pathways");
    }

    Ok(StandardizedData {
        sample_ids: genotype.samples().to_vec(),
        snp_ids: genotype.snp_ids().to_vec(),
        x,
        y,
        column_means,
        column_norms,
        retained,
        y_mean,
        covariate_coefficients,
    })
}

/// Overlap-expanded index: each pathway owns a contiguous block of expanded
/// columns, each of which points back to an original feature.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpandedIndex {
    ranges: Vec<Range<usize>>,
    back_map: Vec<usize>,
}

impl ExpandedIndex {
    pub fn width(&self) -> usize {
        self.back_map.len()
    }

    pub fn n_groups(&self) -> usize {
        self.ranges.len()
    }

    pub fn group(&self, l: usize) -> Range<usize> {
        self.ranges[l].clone()
    }

    pub fn feature_of(&self, expanded: usize) -> usize {
        self.back_map[expanded]
    }

    pub fn back_map(&self) -> &[usize] {
        &self.back_map
    }
}

/// Duplicate every feature into each pathway containing it.
pub fn expand_overlaps(map: &PathwayMap) -> ExpandedIndex {
    let mut ranges = Vec::with_capacity(map.n_pathways());
    let mut back_map = Vec::with_capacity(map.total_membership());
    for p in map.pathways() {
        let start = back_map.len();
        back_map.extend_from_slice(&p.members);
        ranges.push(start..back_map.len());
    }
    ExpandedIndex { ranges, back_map }
}
