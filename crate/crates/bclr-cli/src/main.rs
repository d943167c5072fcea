//! `bclr`: Bayesian changepoint detection via logistic regression.
//!
//! Subcommands: `fit` (single changepoint on a CSV table or image stack),
//! `multi` (multiple changepoints), `simulate` (write synthetic benchmark
//! data), and `bench` (end-to-end scenario metrics). All results are emitted
//! as versioned JSON (`"schema": "bclr/1"`).

mod input;

use anyhow::{anyhow, bail, Context, Result};
use bclr_core::rng::{domains, stream_id};
use bclr_core::{
    embed_image_series, embed_tabular_series, evaluate_multi, evaluate_single, gen_covariance,
    gen_exp_images, gen_mixed, gen_multi3, highest_mass_set, multi_fit, normalized_entropy,
    point_estimates, quantile_interval, run_gibbs, run_multi_replications,
    run_single_replications, snr_report, stack, ChangepointPosterior, CredibleSet, EmbeddingKind,
    EmbeddingSpec, FeatureMatrix, GaussianPrior, GibbsConfig, KappaPrior, MultiConfig,
    PosteriorSamples, RngStream, Scenario, SnrReport,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use input::Input;
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "bclr", version, about = "Bayesian changepoint detection via logistic regression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the single-changepoint model to a CSV table or image stack.
    Fit(FitArgs),
    /// Fit the multiple-changepoint extension.
    Multi(MultiArgs),
    /// Write synthetic benchmark datasets to a directory.
    Simulate(SimulateArgs),
    /// Run a benchmark scenario end to end and report metrics.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum EmbedArg {
    /// 36 persistence statistics of both diagrams (image input).
    TdaStat,
    /// Degree-2 polynomial features (tabular input).
    Poly2,
    /// Use the columns as they are (tabular input).
    Identity,
    /// 6x6 persistence image of the dimension-0 diagram (image input).
    Pimg,
}

#[derive(Args)]
struct ChainArgs {
    /// Total Gibbs sweeps including burn-in.
    #[arg(long, default_value_t = 5000)]
    iters: usize,
    /// Leading sweeps to discard.
    #[arg(long, default_value_t = 2500)]
    burn_in: usize,
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// RNG stream (replication) index.
    #[arg(long, default_value_t = 0)]
    stream: u64,
}

#[derive(Args)]
struct EmbedArgs {
    /// Feature embedding; defaults to tda-stat for stacks, identity for CSV.
    #[arg(long, value_enum)]
    embed: Option<EmbedArg>,
    /// Gaussian smoothing bandwidth for image frames.
    #[arg(long, default_value_t = 2.0)]
    sigma: f64,
    /// Persistence-image kernel bandwidth.
    #[arg(long, default_value_t = 0.1)]
    pi_sigma: f64,
}

#[derive(Args)]
struct FitArgs {
    /// Input file: numeric CSV (optional header) or BCLR-IS1 image stack.
    input: PathBuf,
    #[command(flatten)]
    chain: ChainArgs,
    #[command(flatten)]
    embedding: EmbedArgs,
    /// Variance of the isotropic N(0, s I) coefficient prior; defaults to
    /// 3 for image input and 1/3 for tabular input.
    #[arg(long)]
    prior_scale: Option<f64>,
    /// CSV file holding a prior mean vector (overrides the zero mean).
    #[arg(long)]
    prior_mean_file: Option<PathBuf>,
    /// CSV file holding a d x d prior covariance (overrides the isotropic one).
    #[arg(long)]
    prior_cov_file: Option<PathBuf>,
    /// Changepoint prior: "uniform" or "binomial:p=0.8".
    #[arg(long, default_value = "uniform")]
    kappa_prior: String,
    /// Also write the raw draws (kappa and beta per sweep) as CSV.
    #[arg(long)]
    draws_csv: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct MultiArgs {
    /// Input file: numeric CSV (optional header) or BCLR-IS1 image stack.
    input: PathBuf,
    #[command(flatten)]
    chain: ChainArgs,
    #[command(flatten)]
    embedding: EmbedArgs,
    /// Variance of the per-segment N(0, s I) coefficient prior.
    #[arg(long, default_value_t = 1.0)]
    prior_scale: f64,
    /// Initial segment count J.
    #[arg(long, default_value_t = 10)]
    segments: usize,
    /// Minimum gap between changepoints.
    #[arg(long, default_value_t = 10)]
    min_gap: usize,
    /// Normalized-entropy thresholds: warm-up 1, warm-up 2, final.
    #[arg(long, num_args = 3, default_values_t = [0.75, 0.5, 1.0])]
    entropy: Vec<f64>,
    /// Warm-up chain length (half is discarded as burn-in).
    #[arg(long, default_value_t = 600)]
    warm_iters: usize,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario: exp1, exp2, mixed, covariance, multi3.
    scenario: String,
    /// Replications to write.
    #[arg(long, default_value_t = 1)]
    reps: u64,
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Scenario: exp1, exp2, mixed, covariance, multi3.
    scenario: String,
    /// Replications to run.
    #[arg(long, default_value_t = 100)]
    reps: u64,
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Total Gibbs sweeps for the (final) chains.
    #[arg(long, default_value_t = 5000)]
    iters: usize,
    /// Burn-in sweeps.
    #[arg(long, default_value_t = 2500)]
    burn_in: usize,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() {
    if let Err(err) = run() {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Fit(args) => fit(args),
        Command::Multi(args) => multi(args),
        Command::Simulate(args) => simulate(args),
        Command::Bench(args) => bench(args),
    }
}

/// Resolve the embedding spec and feature matrix for a loaded input.
fn embed_input(
    input: &Input,
    embedding: &EmbedArgs,
) -> Result<(FeatureMatrix, EmbeddingSpec, Vec<String>)> {
    let kind = match (embedding.embed, input) {
        (Some(EmbedArg::TdaStat), _) => EmbeddingKind::TdaStat,
        (Some(EmbedArg::Poly2), _) => EmbeddingKind::Poly2,
        (Some(EmbedArg::Identity), _) => EmbeddingKind::Identity,
        (Some(EmbedArg::Pimg), _) => EmbeddingKind::PersistenceImage,
        (None, Input::Stack(_)) => EmbeddingKind::TdaStat,
        (None, Input::Table(_)) => EmbeddingKind::Identity,
    };
    let spec = EmbeddingSpec {
        kind,
        smoothing_sigma: embedding.sigma,
        pi_sigma: embedding.pi_sigma,
        ..EmbeddingSpec::tda_stat()
    };
    let x = match input {
        Input::Stack(frames) => embed_image_series(frames, &spec)?,
        Input::Table(rows) => embed_tabular_series(rows, &spec)?,
    };
    let q = match input {
        Input::Stack(_) => 0,
        Input::Table(rows) => rows.ncols(),
    };
    Ok((x, spec, spec.labels(q)))
}

fn parse_kappa_prior(arg: &str, n: usize) -> Result<KappaPrior> {
    if arg == "uniform" {
        return Ok(KappaPrior::uniform(n)?);
    }
    if let Some(rest) = arg.strip_prefix("binomial:p=") {
        let p: f64 = rest.parse().context("parsing binomial prior p")?;
        return Ok(KappaPrior::binomial(n, p)?);
    }
    bail!("unsupported kappa prior '{arg}' (use 'uniform' or 'binomial:p=0.8')")
}

fn credible_json(set: &CredibleSet) -> Value {
    json!({
        "lo": set.members.first(),
        "hi": set.members.last(),
        "members": set.members,
        "mass": set.mass,
    })
}

fn snr_json(report: &SnrReport, labels: &[String]) -> Value {
    Value::Array(
        report
            .entries
            .iter()
            .map(|e| {
                json!({
                    "coord": e.coord,
                    "label": labels.get(e.coord).cloned().unwrap_or_default(),
                    "mean": e.mean,
                    "sd": e.sd,
                    "snr": if e.degenerate { Value::Null } else { e.snr.into() },
                    "degenerate": e.degenerate,
                })
            })
            .collect(),
    )
}

fn posterior_json(posterior: &ChangepointPosterior) -> Value {
    json!({
        "first": posterior.first(),
        "last": posterior.last(),
        "pmf": posterior.pmf(),
    })
}

fn emit(value: &Value, output: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match output {
        Some(path) => {
            std::fs::write(path, text + "\n")
                .with_context(|| format!("writing {}", path.display()))?;
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn write_draws_csv(path: &Path, samples: &PosteriorSamples) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let d = samples.d();
    let mut header = vec!["kappa".to_string()];
    header.extend((0..d).map(|j| format!("beta_{j}")));
    w.write_record(&header)?;
    for (k, b) in samples.kappa_draws().iter().zip(samples.beta_draws()) {
        let mut row = vec![k.to_string()];
        row.extend(b.iter().map(|v| format!("{v}")));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn fit(args: FitArgs) -> Result<()> {
    let input = input::load(&args.input)?;
    let is_stack = matches!(input, Input::Stack(_));
    let (x, _, labels) = embed_input(&input, &args.embedding)?;
    let d = x.d();
    let n = x.n();

    let prior_scale = args
        .prior_scale
        .unwrap_or(if is_stack { 3.0 } else { 1.0 / 3.0 });
    let prior = match (&args.prior_mean_file, &args.prior_cov_file) {
        (None, None) => GaussianPrior::isotropic(d, prior_scale)?,
        (mean_file, cov_file) => {
            let mu = mean_file
                .as_deref()
                .map(|p| input::load_csv_vector(p, d))
                .transpose()?
                .unwrap_or_else(|| nalgebra::DVector::zeros(d));
            let sigma = cov_file
                .as_deref()
                .map(input::load_csv_matrix)
                .transpose()?
                .unwrap_or_else(|| nalgebra::DMatrix::identity(d, d) * prior_scale);
            GaussianPrior::new(mu, sigma)?
        }
    };
    let kappa_prior = parse_kappa_prior(&args.kappa_prior, n)?;
    let chain = GibbsConfig::new(args.chain.iters, args.chain.burn_in)?;
    let mut rng = RngStream::new(
        args.chain.seed,
        stream_id(domains::CHAIN, args.chain.stream, 0),
    );
    let samples = run_gibbs(&x, &prior, &kappa_prior, &chain, &mut rng)?;

    let posterior = ChangepointPosterior::from_draws(samples.kappa_draws(), 1, n - 1)?;
    let (mode, mean) = point_estimates(&samples);
    let snr = snr_report(&samples)?;
    if let Some(path) = &args.draws_csv {
        write_draws_csv(path, &samples)?;
    }

    let report = json!({
        "schema": "bclr/1",
        "command": "fit",
        "input": args.input.display().to_string(),
        "n": n,
        "d": d,
        "iterations": chain.iterations,
        "burn_in": chain.burn_in,
        "seed": args.chain.seed,
        "stream": args.chain.stream,
        "posterior": posterior_json(&posterior),
        "mode": mode,
        "mean": mean,
        "entropy": normalized_entropy(&posterior),
        "interval_95": credible_json(&quantile_interval(&posterior, 0.05)),
        "highest_mass_95": credible_json(&highest_mass_set(&posterior, 0.05)),
        "snr": snr_json(&snr, &labels),
    });
    emit(&report, args.output.as_deref())
}

fn multi(args: MultiArgs) -> Result<()> {
    if args.entropy.len() != 3 {
        bail!("--entropy takes exactly three thresholds");
    }
    let input = input::load(&args.input)?;
    let (x, _, labels) = embed_input(&input, &args.embedding)?;
    let config = MultiConfig {
        segments: args.segments,
        min_gap: args.min_gap,
        eta: [args.entropy[0], args.entropy[1], args.entropy[2]],
        warm: GibbsConfig::new(args.warm_iters, args.warm_iters / 2)?,
        fin: GibbsConfig::new(args.chain.iters, args.chain.burn_in)?,
        prior_scale: args.prior_scale,
        seed: args.chain.seed,
        replication: args.chain.stream,
    };
    let result = multi_fit(&x, &config)?;

    let reports: Vec<Value> = result
        .reports
        .iter()
        .map(|r| {
            json!({
                "changepoint": r.kappa,
                "entropy": r.entropy,
                "interval_95": credible_json(&r.interval),
                "posterior": posterior_json(&r.posterior),
                "snr": snr_json(&r.snr, &labels),
            })
        })
        .collect();
    let report = json!({
        "schema": "bclr/1",
        "command": "multi",
        "input": args.input.display().to_string(),
        "n": x.n(),
        "d": x.d(),
        "segments": args.segments,
        "min_gap": args.min_gap,
        "entropy": args.entropy,
        "seed": args.chain.seed,
        "changepoints": result.changepoints,
        "reports": reports,
    });
    emit(&report, args.output.as_deref())
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let scenario: Scenario = args.scenario.parse().map_err(|e| anyhow!("{e}"))?;
    std::fs::create_dir_all(&args.out)?;
    let mut files = Vec::new();
    for rep in 0..args.reps {
        let mut rng = RngStream::new(args.seed, stream_id(domains::DATA, rep, 0));
        let name = match scenario {
            Scenario::Exp1 | Scenario::Exp2 => {
                let variant = if scenario == Scenario::Exp1 { 1 } else { 2 };
                let (frames, _) = gen_exp_images(variant, &mut rng);
                let name = format!("rep{rep:03}.stack");
                stack::write_stack_file(args.out.join(&name), &frames)?;
                name
            }
            _ => {
                let rows = match scenario {
                    Scenario::Mixed => gen_mixed(&mut rng).0,
                    Scenario::Covariance => gen_covariance(&mut rng).0,
                    Scenario::Multi3 => gen_multi3(&mut rng).0,
                    _ => unreachable!(),
                };
                let name = format!("rep{rep:03}.csv");
                let mut w = csv::Writer::from_path(args.out.join(&name))?;
                w.write_record((1..=rows.ncols()).map(|j| format!("x{j}")))?;
                for i in 0..rows.nrows() {
                    w.write_record(rows.row(i).iter().map(|v| format!("{v}")))?;
                }
                w.flush()?;
                name
            }
        };
        files.push(name);
    }
    let manifest = json!({
        "schema": "bclr/1",
        "command": "simulate",
        "scenario": scenario.to_string(),
        "seed": args.seed,
        "reps": args.reps,
        "true_changepoints": scenario.true_changepoints(),
        "conventions": {
            "rectangle": "redrawn independently for every post-change frame",
            "stream": "data stream id = (domain DATA, replication, 0)",
        },
        "files": files,
    });
    let mut f = std::fs::File::create(args.out.join("manifest.json"))?;
    writeln!(f, "{}", serde_json::to_string_pretty(&manifest)?)?;
    Ok(())
}

fn bench(args: BenchArgs) -> Result<()> {
    let scenario: Scenario = args.scenario.parse().map_err(|e| anyhow!("{e}"))?;
    let chain = GibbsConfig::new(args.iters, args.burn_in)?;
    let embedding = scenario.default_embedding();

    let report = if scenario == Scenario::Multi3 {
        let template = MultiConfig {
            fin: chain,
            ..MultiConfig::default()
        };
        let results = run_multi_replications(args.reps, &embedding, &template, args.seed)?;
        let truth = scenario.true_changepoints();
        let n = scenario.n();
        let scores: Vec<(f64, f64)> = results
            .iter()
            .map(|r| evaluate_multi(&r.changepoints, &truth, n))
            .collect();
        let rand = scores.iter().map(|s| s.0).sum::<f64>() / scores.len() as f64;
        let ari = scores.iter().map(|s| s.1).sum::<f64>() / scores.len() as f64;
        json!({
            "schema": "bclr/1",
            "command": "bench",
            "scenario": scenario.to_string(),
            "reps": args.reps,
            "seed": args.seed,
            "settings": {
                "final_iterations": chain.iterations,
                "burn_in": chain.burn_in,
                "segments": 10,
                "min_gap": 10,
                "entropy": [0.75, 0.5, 1.0],
                "prior_scale": 1.0,
            },
            "rand": rand,
            "adjusted_rand": ari,
        })
    } else {
        let prior_scale = scenario.default_prior_scale();
        let samples = run_single_replications(
            scenario,
            args.reps,
            &embedding,
            prior_scale,
            &chain,
            args.seed,
        )?;
        let metrics = evaluate_single(&samples, scenario.n(), scenario.true_changepoints()[0])?;
        json!({
            "schema": "bclr/1",
            "command": "bench",
            "scenario": scenario.to_string(),
            "reps": args.reps,
            "seed": args.seed,
            "settings": {
                "iterations": chain.iterations,
                "burn_in": chain.burn_in,
                "prior_scale": prior_scale,
                "embedding": format!("{:?}", embedding.kind),
            },
            "metrics": serde_json::to_value(&metrics)?,
        })
    };
    emit(&report, args.output.as_deref())
}
