use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use pathway_sgl::compare::{compare_rankings, read_ranked_list, CompareConfig, RankComparison};
use pathway_sgl::data::{
    expand_overlaps, load_genotypes, load_pathway_annotation, load_phenotype, standardize, GenotypeMatrix,
    PathwayMap, Phenotype,
};
use pathway_sgl::penalty::lambda_max;
use pathway_sgl::ranking::{bias_diagnostics, null_ranking, rank_by_stability, RankingConfig};
use pathway_sgl::simulation::{run_study, Study, StudyConfig};
use pathway_sgl::solver::{fit_sgl_bcgd, fit_sgl_cgd, Algorithm, SglConfig, SglFit};
use pathway_sgl::weights::{read_weights_tsv, tune_weights, TuneConfig};
use pathway_sgl::Error;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "pathway-sgl", version, about = "Sparse group lasso pathway and SNP selection")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "SGL_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the sparse group lasso at a fraction of lambda_max.
    Fit(FitArgs),
    /// Rank pathways, SNPs and genes by half-sample selection frequency.
    Rank(RankArgs),
    /// Tune pathway weights for unbiased selection under the null.
    TuneWeights(TuneArgs),
    /// Compare two ranked lists with the top-k Canberra distance.
    CompareRanks(CompareArgs),
    /// Run a simulation study.
    Simulate(SimulateArgs),
    /// Print the version.
    Version,
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Genotype matrix (samples x SNPs, tab-delimited, 0/1/2).
    #[arg(long)]
    genotypes: PathBuf,
    /// Phenotype table: sample id, response, optional covariates.
    #[arg(long)]
    phenotype: PathBuf,
    /// Pathway definitions, GMT-style: pathway id then gene ids.
    #[arg(long)]
    pathways: PathBuf,
    /// SNP to gene mapping, two columns.
    #[arg(long)]
    snp_gene_map: PathBuf,
}

#[derive(Args, Clone)]
struct ModelArgs {
    #[arg(long, default_value_t = 0.95)]
    alpha: f64,
    /// Penalty as a fraction of lambda_max.
    #[arg(long, default_value_t = 0.95)]
    lambda_frac: f64,
    #[arg(long, default_value = "bcgd")]
    algorithm: Algorithm,
    /// Pathway weights TSV (pathway id, weight); unit weights otherwise.
    #[arg(long)]
    weights: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct RankArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Number of half-sample subsamples.
    #[arg(long = "B", default_value_t = 1000)]
    subsamples: usize,
    /// Also compute a permuted-phenotype ranking and bias diagnostics.
    #[arg(long)]
    null: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct TuneArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 0.95)]
    alpha: f64,
    #[arg(long, default_value_t = pathway_sgl::weights::DEFAULT_ETA)]
    eta: f64,
    #[arg(long, default_value_t = pathway_sgl::weights::DEFAULT_EPSILON)]
    epsilon: f64,
    /// Permutations per iteration.
    #[arg(long = "R", default_value_t = pathway_sgl::weights::DEFAULT_PERMUTATIONS)]
    permutations: usize,
    #[arg(long, default_value_t = pathway_sgl::weights::DEFAULT_MAX_ITERS)]
    max_iters: usize,
    /// Starting weights TSV.
    #[arg(long)]
    weights: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    /// First ranked list (one ID per line, or id and rank).
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long, default_value_t = 1)]
    k_min: usize,
    #[arg(long)]
    k_max: Option<usize>,
    /// Permutations for the p-values.
    #[arg(long = "Z", default_value_t = pathway_sgl::compare::DEFAULT_PERMUTATIONS)]
    permutations: usize,
    /// Random draws for the expected distance.
    #[arg(long, default_value_t = pathway_sgl::compare::DEFAULT_EXPECTATION_DRAWS)]
    draws: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// Study number (1 or 2); defaults to 1 or the config file's study.
    #[arg(long)]
    study: Option<u8>,
    /// Effect sizes; repeat or comma-separate.
    #[arg(long, value_delimiter = ',')]
    gamma: Vec<f64>,
    #[arg(long)]
    replicates: Option<usize>,
    /// Study 1: draw causal SNPs from all SNPs instead of one pathway.
    #[arg(long)]
    random_placement: bool,
    /// JSON study config; command-line values override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Serialize)]
struct InputDigest {
    path: PathBuf,
    sha256: String,
}

#[derive(Serialize)]
struct RunManifest {
    subcommand: &'static str,
    version: &'static str,
    seed: Option<u64>,
    config: Value,
    inputs: BTreeMap<String, InputDigest>,
    outputs: Vec<PathBuf>,
    status: String,
}

enum Status {
    Ok,
    NonConverged(String),
}

struct Outcome {
    config: Value,
    outputs: Vec<PathBuf>,
    status: Status,
}

impl Outcome {
    fn ok(config: Value, outputs: Vec<PathBuf>) -> Self {
        Self {
            config,
            outputs,
            status: Status::Ok,
        }
    }
}

fn sha256_file(path: &Path) -> Result<String> {
    let mut file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf).with_context(|| format!("cannot read {}", path.display()))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

fn digests(inputs: &[(&str, &Path)]) -> Result<BTreeMap<String, InputDigest>> {
    inputs
        .iter()
        .map(|(name, path)| {
            Ok((
                name.to_string(),
                InputDigest {
                    path: path.to_path_buf(),
                    sha256: sha256_file(path)?,
                },
            ))
        })
        .collect()
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

struct Loaded {
    genotypes: GenotypeMatrix,
    phenotype: Phenotype,
    map: PathwayMap,
}

fn load_inputs(input: &InputArgs) -> Result<Loaded> {
    let genotypes = load_genotypes(&input.genotypes)?;
    let phenotype = load_phenotype(&input.phenotype)?;
    let map = load_pathway_annotation(&input.pathways, &input.snp_gene_map, &genotypes)?;
    info!(
        "{} samples, {} SNPs, {} pathways",
        genotypes.n_samples(),
        genotypes.n_features(),
        map.n_pathways()
    );
    Ok(Loaded {
        genotypes,
        phenotype,
        map,
    })
}

fn input_list(input: &InputArgs) -> Vec<(&'static str, &Path)> {
    vec![
        ("genotypes", input.genotypes.as_path()),
        ("phenotype", input.phenotype.as_path()),
        ("pathways", input.pathways.as_path()),
        ("snp_gene_map", input.snp_gene_map.as_path()),
    ]
}

fn load_weights(path: Option<&Path>, map: &PathwayMap) -> Result<Vec<f64>> {
    Ok(match path {
        Some(p) => read_weights_tsv(p, map)?,
        None => vec![1.0; map.n_pathways()],
    })
}

#[derive(Serialize)]
struct FitReport<'a> {
    lambda_max: f64,
    lambda_frac: f64,
    selected_pathway_ids: Vec<&'a str>,
    selected_snp_ids: Vec<&'a str>,
    fit: &'a SglFit,
}

fn cmd_fit(args: &FitArgs) -> Result<Outcome> {
    let loaded = load_inputs(&args.input)?;
    let map = &loaded.map;
    let data = standardize(&loaded.genotypes, &loaded.phenotype)?;
    let weights = load_weights(args.model.weights.as_deref(), map)?;
    let lmax = lambda_max(&data, map, args.model.alpha, &weights)?;
    let config = SglConfig::new(args.model.lambda_frac * lmax, args.model.alpha, map.n_pathways())
        .with_weights(weights);
    config.validate(map.n_pathways())?;
    let fit = match args.model.algorithm {
        Algorithm::Cgd => fit_sgl_cgd(&data, map, &config)?,
        Algorithm::Bcgd => fit_sgl_bcgd(&data, map, &expand_overlaps(map), &config)?,
    };
    info!(
        "lambda_max {lmax:.6}: {} pathways, {} SNPs selected",
        fit.selected_pathways.len(),
        fit.selected_features.len()
    );

    let snp_ids = loaded.genotypes.snp_ids();
    let fit_path = args.out.join("fit.json");
    write_json(
        &fit_path,
        &FitReport {
            lambda_max: lmax,
            lambda_frac: args.model.lambda_frac,
            selected_pathway_ids: fit.selected_pathways.iter().map(|&l| map.pathway(l).id.as_str()).collect(),
            selected_snp_ids: fit.selected_features.iter().map(|&j| snp_ids[j].as_str()).collect(),
            fit: &fit,
        },
    )?;
    let coef_path = args.out.join("coefficients.tsv");
    let mut w = BufWriter::new(File::create(&coef_path)?);
    writeln!(w, "pathway\tsnp\tcoefficient")?;
    for (l, coefs) in fit.coefficients.iter().enumerate() {
        for &(j, b) in coefs {
            writeln!(w, "{}\t{}\t{b}", map.pathway(l).id, snp_ids[j])?;
        }
    }
    w.flush()?;

    let status = if fit.converged() {
        Status::Ok
    } else {
        Status::NonConverged(format!(
            "{} pathways hit the inner iteration cap; outer converged: {}",
            fit.nonconverged_pathways.len(),
            fit.outer_converged
        ))
    };
    Ok(Outcome {
        config: json!({
            "alpha": config.alpha,
            "lambda_frac": args.model.lambda_frac,
            "lambda": config.lambda,
            "lambda_max": lmax,
            "algorithm": args.model.algorithm,
            "weights": config.weights,
            "tol": config.tol,
            "outer_tol": config.outer_tol,
            "max_inner_iters": config.max_inner_iters,
            "max_outer_iters": config.max_outer_iters,
        }),
        outputs: vec![fit_path, coef_path],
        status,
    })
}

fn cmd_rank(args: &RankArgs) -> Result<Outcome> {
    let loaded = load_inputs(&args.input)?;
    let weights = args
        .model
        .weights
        .as_deref()
        .map(|p| load_weights(Some(p), &loaded.map))
        .transpose()?;
    let config = RankingConfig {
        weights,
        ..RankingConfig::new(
            args.model.algorithm,
            args.model.alpha,
            args.model.lambda_frac,
            args.subsamples,
            args.seed,
        )
    };
    let result = rank_by_stability(&loaded.genotypes, &loaded.phenotype, &loaded.map, &config)?;
    let mut outputs = vec![
        args.out.join("pathways.tsv"),
        args.out.join("snps.tsv"),
        args.out.join("genes.tsv"),
    ];
    result.write_pathways_tsv(&outputs[0])?;
    result.write_features_tsv(&outputs[1])?;
    result.write_genes_tsv(&outputs[2])?;
    let mut nonconverged = result.nonconverged_subsamples;

    if args.null {
        let null = null_ranking(&loaded.genotypes, &loaded.phenotype, &loaded.map, &config)?;
        let paths = [
            args.out.join("null_pathways.tsv"),
            args.out.join("null_snps.tsv"),
            args.out.join("null_genes.tsv"),
            args.out.join("bias.json"),
        ];
        null.write_pathways_tsv(&paths[0])?;
        null.write_features_tsv(&paths[1])?;
        null.write_genes_tsv(&paths[2])?;
        write_json(&paths[3], &bias_diagnostics(&result, &null)?)?;
        nonconverged += null.nonconverged_subsamples;
        outputs.extend(paths);
    }

    let status = if nonconverged == 0 {
        Status::Ok
    } else {
        Status::NonConverged(format!("{nonconverged} subsample fits did not converge"))
    };
    Ok(Outcome {
        config: serde_json::to_value(&config)?,
        outputs,
        status,
    })
}

fn cmd_tune(args: &TuneArgs) -> Result<Outcome> {
    let loaded = load_inputs(&args.input)?;
    let data = standardize(&loaded.genotypes, &loaded.phenotype)?;
    let config = TuneConfig {
        eta: args.eta,
        epsilon: args.epsilon,
        permutations: args.permutations,
        max_iters: args.max_iters,
        ..TuneConfig::new(args.alpha, args.seed)
    };
    let initial = args
        .weights
        .as_deref()
        .map(|p| read_weights_tsv(p, &loaded.map))
        .transpose()?;
    let result = tune_weights(&data, &loaded.map, &config, initial)?;
    let weights_path = args.out.join("weights.tsv");
    let trace_path = args.out.join("trace.json");
    result.write_weights_tsv(&weights_path)?;
    result.write_trace_json(&trace_path)?;
    let status = if result.converged {
        Status::Ok
    } else {
        Status::NonConverged(format!(
            "weights did not converge in {} iterations; best iterate {} written",
            config.max_iters, result.best_iteration
        ))
    };
    Ok(Outcome {
        config: serde_json::to_value(config)?,
        outputs: vec![weights_path, trace_path],
        status,
    })
}

fn write_comparison_tsv(path: &Path, cmp: &RankComparison) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "k\tcanberra\texpected\tnormalized\tp_value\tq_value")?;
    for r in &cmp.rows {
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}\t{}",
            r.k, r.canberra, r.expected, r.normalized, r.p_value, r.q_value
        )?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_compare(args: &CompareArgs) -> Result<Outcome> {
    let a = read_ranked_list(&args.a)?;
    let b = read_ranked_list(&args.b)?;
    let config = CompareConfig {
        k_min: args.k_min,
        k_max: args.k_max,
        expectation_draws: args.draws,
        permutations: args.permutations,
        seed: args.seed,
    };
    let cmp = compare_rankings(&a, &b, &config)?;
    info!("best k {} of {} compared", cmp.best_k, cmp.rows.len());
    let tsv = args.out.join("comparison.tsv");
    let json_path = args.out.join("comparison.json");
    write_comparison_tsv(&tsv, &cmp)?;
    write_json(&json_path, &cmp)?;
    Ok(Outcome::ok(serde_json::to_value(config)?, vec![tsv, json_path]))
}

fn simulate_config(args: &SimulateArgs) -> Result<StudyConfig> {
    let study = match args.study {
        None => None,
        Some(1) => Some(Study::One),
        Some(2) => Some(Study::Two),
        Some(s) => bail!(Error::InvalidParameter(format!("unknown study {s}; expected 1 or 2"))),
    };
    let mut config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            let mut c = StudyConfig::from_json(&text)?;
            if let Some(s) = study {
                c.study = s;
            }
            c
        }
        None => match study {
            Some(Study::Two) => StudyConfig::study2(),
            _ => StudyConfig::study1(),
        },
    };
    if !args.gamma.is_empty() {
        config.gammas = args.gamma.clone();
    }
    if let Some(r) = args.replicates {
        config.replicates = r;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if args.random_placement {
        config.enriched = false;
    }
    Ok(config)
}

fn cmd_simulate(args: &SimulateArgs, config: &StudyConfig) -> Result<Outcome> {
    let report = run_study(config)?;
    for s in &report.summaries {
        for m in &s.methods {
            println!(
                "gamma={}\tmethod={}\tpower={:.4}\tfpr={:.4}\tpathways={:.3}\tsnps={:.3}",
                s.gamma,
                m.method,
                m.mean_feature_power,
                m.mean_feature_fpr,
                m.mean_selected_pathways,
                m.mean_selected_features
            );
        }
    }
    let json_path = args.out.join("report.json");
    let tsv = args.out.join("replicates.tsv");
    report.write_json(&json_path)?;
    report.write_tsv(&tsv)?;
    let failures: usize = report.summaries.iter().map(|s| s.failures).sum();
    if failures > 0 {
        warn!("{failures} replicates failed");
    }
    Ok(Outcome::ok(serde_json::to_value(config)?, vec![json_path, tsv]))
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::NonConvergence { .. }) => 3,
        _ => 2,
    }
}

fn run(cli: Cli) -> ExitCode {
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} threads: {e}");
            return ExitCode::from(2);
        }
    }

    let (name, out, seed, inputs): (&'static str, &Path, Option<u64>, Vec<(&str, &Path)>) = match &cli.command {
        Command::Version => {
            println!("pathway-sgl {VERSION}");
            return ExitCode::SUCCESS;
        }
        Command::Fit(a) => ("fit", &a.out, Some(a.seed), {
            let mut v = input_list(&a.input);
            v.extend(a.model.weights.as_deref().map(|p| ("weights", p)));
            v
        }),
        Command::Rank(a) => ("rank", &a.out, Some(a.seed), {
            let mut v = input_list(&a.input);
            v.extend(a.model.weights.as_deref().map(|p| ("weights", p)));
            v
        }),
        Command::TuneWeights(a) => ("tune-weights", &a.out, Some(a.seed), {
            let mut v = input_list(&a.input);
            v.extend(a.weights.as_deref().map(|p| ("weights", p)));
            v
        }),
        Command::CompareRanks(a) => (
            "compare-ranks",
            &a.out,
            Some(a.seed),
            vec![("a", a.a.as_path()), ("b", a.b.as_path())],
        ),
        Command::Simulate(a) => ("simulate", &a.out, a.seed, a.config.iter().map(|p| ("config", p.as_path())).collect()),
    };

    if let Err(e) = fs::create_dir_all(out) {
        eprintln!("error: cannot create output directory {}: {e}", out.display());
        return ExitCode::from(2);
    }
    let mut manifest = RunManifest {
        subcommand: name,
        version: VERSION,
        seed,
        config: Value::Null,
        inputs: BTreeMap::new(),
        outputs: Vec::new(),
        status: "error".into(),
    };

    let result = digests(&inputs).and_then(|d| {
        manifest.inputs = d;
        match &cli.command {
            Command::Fit(a) => cmd_fit(a),
            Command::Rank(a) => cmd_rank(a),
            Command::TuneWeights(a) => cmd_tune(a),
            Command::CompareRanks(a) => cmd_compare(a),
            Command::Simulate(a) => {
                let config = simulate_config(a)?;
                manifest.seed = Some(config.seed);
                cmd_simulate(a, &config)
            }
            Command::Version => unreachable!(),
        }
    });

    let code = match result {
        Ok(outcome) => {
            manifest.config = outcome.config;
            manifest.outputs = outcome.outputs;
            match outcome.status {
                Status::Ok => {
                    manifest.status = "ok".into();
                    0
                }
                Status::NonConverged(msg) => {
                    eprintln!("warning: {msg}");
                    manifest.status = format!("nonconverged: {msg}");
                    3
                }
            }
        }
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("error: {msg}");
            manifest.status = format!("error: {msg}");
            exit_code(&e)
        }
    };
    if let Err(e) = write_json(&out.join("manifest.json"), &manifest) {
        eprintln!("error: cannot write manifest: {e:#}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    run(Cli::parse())
}
