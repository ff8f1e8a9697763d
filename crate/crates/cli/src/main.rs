//! `mlmc-qdrift` command-line driver.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use mlmc_qdrift::experiment::{fig1, fig2, fig3, write_csv, write_json, ExperimentConfig, Summary};
use mlmc_qdrift::mlmc::{self, MlmcSettings};
use mlmc_qdrift::qdrift;
use mlmc_qdrift::Error;
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Parser)]
#[command(name = "mlmc-qdrift", version, about = "qDRIFT and multilevel Monte Carlo experiments")]
struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, env = "MLMC_QDRIFT_THREADS", default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact-channel variance and mean decay per level (fig1).
    VarianceDecay(CommonArgs),
    /// Augmented-state shot-noise variance per level (fig2).
    ShotNoise(CommonArgs),
    /// Gate-count model, crossover and speedups (fig3).
    GateCost(CommonArgs),
    /// Run the MLMC estimator at a target RMSE.
    MlmcRun(CommonArgs),
    /// Run plain single-level qDRIFT.
    QdriftRun(CommonArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// JSON experiment config; the built-in six-site chain if omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed for every random stream.
    #[arg(long)]
    seed: Option<u64>,
    /// Output root; results go to <out>/<experiment>/.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Target RMSE (mlmc-run, qdrift-run).
    #[arg(long)]
    eps: Option<f64>,
    /// Number of levels (variance-decay, gate-cost) or finest level
    /// (shot-noise, mlmc-run).
    #[arg(long)]
    levels: Option<usize>,
    /// Base gate count N₀.
    #[arg(long)]
    n0: Option<usize>,
    /// Pilot samples per level (mlmc-run).
    #[arg(long)]
    pilot: Option<u64>,
}

#[derive(Serialize)]
struct RunManifest {
    command: String,
    config_path: Option<PathBuf>,
    seed: u64,
    config_sha256: String,
    output_dir: PathBuf,
    threads: usize,
    wall_clock_seconds: f64,
    version: &'static str,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => Failure::Config(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

struct Loaded {
    cfg: ExperimentConfig,
    hash: String,
    seed: u64,
    out: PathBuf,
}

fn load(args: &CommonArgs) -> Result<Loaded, Failure> {
    let (mut cfg, bytes) = match &args.config {
        Some(path) => {
            let bytes = std::fs::read(path)
                .map_err(|e| Failure::Config(format!("cannot read config {}: {e}", path.display())))?;
            let text = String::from_utf8(bytes.clone())
                .map_err(|_| Failure::Config(format!("config {} is not UTF-8", path.display())))?;
            let cfg = ExperimentConfig::from_json(&text)
                .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            (cfg, bytes)
        }
        None => {
            let cfg = ExperimentConfig::heisenberg6();
            let bytes = serde_json::to_vec(&cfg).map_err(|e| Failure::Runtime(e.to_string()))?;
            (cfg, bytes)
        }
    };
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(n0) = args.n0 {
        cfg.n0 = n0;
    }
    if let Some(e) = args.eps {
        cfg.mlmc.eps = e;
    }
    if let Some(p) = args.pilot {
        cfg.mlmc.pilot = p;
    }
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    cfg.validate().map_err(Failure::from)?;
    Ok(Loaded {
        hash: hex::encode(Sha256::digest(&bytes)),
        seed: cfg.seed,
        out: cfg.output_dir.clone(),
        cfg,
    })
}

fn summary_for(l: &Loaded) -> Summary {
    Summary {
        seed: l.seed,
        config: serde_json::to_value(&l.cfg).unwrap_or_default(),
        ..Summary::default()
    }
}

fn finish(name: &str, args: &CommonArgs, l: &Loaded, dir: &Path, start: Instant, threads: usize) -> Result<(), Failure> {
    let manifest = RunManifest {
        command: name.to_string(),
        config_path: args.config.clone(),
        seed: l.seed,
        config_sha256: l.hash.clone(),
        output_dir: dir.to_path_buf(),
        threads,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        version: env!("CARGO_PKG_VERSION"),
    };
    write_json(&dir.join("manifest.json"), &manifest)?;
    println!("wrote {}", dir.display());
    Ok(())
}

fn variance_decay(args: &CommonArgs, threads: usize) -> Result<(), Failure> {
    let start = Instant::now();
    let mut l = load(args)?;
    if let Some(n) = args.levels {
        l.cfg.fig1.levels = n;
        l.cfg.validate()?;
    }
    let r = fig1::fig1_variance_mean_decay(&l.cfg)?;
    let dir = l.out.join("fig1");
    r.write(&dir)?;
    let mut s = summary_for(&l);
    r.summarize(&mut s);
    write_json(&dir.join("summary.json"), &s)?;
    println!("beta_hat = {:.4}, alpha_hat = {:.4}", r.beta_hat(), r.alpha_hat());
    finish("variance-decay", args, &l, &dir, start, threads)
}

fn shot_noise(args: &CommonArgs, threads: usize) -> Result<(), Failure> {
    let start = Instant::now();
    let mut l = load(args)?;
    if let Some(n) = args.levels {
        l.cfg.fig2.max_level = n;
        if l.cfg.fig2.samples.len() > 0 && l.cfg.fig2.samples.len() != n + 1 - l.cfg.fig2.min_level {
            l.cfg.fig2.samples.clear();
        }
        l.cfg.validate()?;
    }
    let r = fig2::fig2_shot_noise(&l.cfg, l.seed)?;
    let dir = l.out.join("fig2");
    r.write(&dir)?;
    let mut s = summary_for(&l);
    r.summarize(&mut s);
    write_json(&dir.join("summary.json"), &s)?;
    println!("beta_shot_hat = {:.4}", r.beta_shot_hat());
    finish("shot-noise", args, &l, &dir, start, threads)
}

fn gate_cost(args: &CommonArgs, threads: usize) -> Result<(), Failure> {
    let start = Instant::now();
    let mut l = load(args)?;
    if let Some(n) = args.levels {
        l.cfg.fig1.levels = n;
        l.cfg.validate()?;
    }
    let problem = l.cfg.problem()?;
    let f1 = fig1::fig1_variance_mean_decay(&l.cfg)?;
    let r = fig3::fig3_gate_complexity(&f1, &l.cfg.fig3, problem.t, problem.h.one_norm())?;
    let dir = l.out.join("fig3");
    r.write(&dir)?;
    let mut s = summary_for(&l);
    f1.summarize(&mut s);
    r.summarize(&mut s);
    write_json(&dir.join("summary.json"), &s)?;
    match r.eps_star {
        Some(e) => println!("c_p = {:.4}, eps* = {e:.4e}", r.model.c_p),
        None => println!("c_p = {:.4}, no crossover on the grid", r.model.c_p),
    }
    for p in &r.speedups {
        println!("eps = {:.0e}: L = {}, speedup = {:.2}x", p.eps, p.levels, p.speedup);
    }
    finish("gate-cost", args, &l, &dir, start, threads)
}

fn mlmc_run(args: &CommonArgs, threads: usize) -> Result<(), Failure> {
    let start = Instant::now();
    let l = load(args)?;
    let problem = l.cfg.problem()?;
    let m = &l.cfg.mlmc;
    let settings = MlmcSettings {
        t: problem.t,
        eps: m.eps,
        n0: l.cfg.n0,
        bias_constant: m.bias_constant,
        max_level: args.levels.or(m.max_level),
        pilot: m.pilot,
        variance_mode: m.variance_mode,
        readout: m.readout,
    };
    let report = mlmc::plan_and_run(&problem.h, &problem.observable, &problem.psi0, &settings, l.seed)?;
    let dir = l.out.join("mlmc");
    write_csv(&dir.join("levels.csv"), &report.result.levels.iter().map(LevelRow::from).collect::<Vec<_>>())?;
    write_json(&dir.join("result.json"), &report)?;
    println!("Y_hat = {:.6}", report.result.estimate);
    print!("{}", report.result.to_csv());
    println!("total gates = {}", report.result.total_gates);
    finish("mlmc-run", args, &l, &dir, start, threads)
}

#[derive(Serialize)]
struct LevelRow {
    level: usize,
    #[serde(rename = "N_ell")]
    n: usize,
    n_ell: u64,
    #[serde(rename = "mean_Y")]
    mean: f64,
    #[serde(rename = "var_Y")]
    var: f64,
    cost_per_sample: u64,
    cumulative_gates: String,
}

impl From<&mlmc::LevelStats> for LevelRow {
    fn from(s: &mlmc::LevelStats) -> Self {
        Self {
            level: s.level,
            n: s.gates,
            n_ell: s.samples,
            mean: s.mean,
            var: s.variance,
            cost_per_sample: s.cost_per_sample,
            cumulative_gates: s.cumulative_gates.to_string(),
        }
    }
}

fn qdrift_run(args: &CommonArgs, threads: usize) -> Result<(), Failure> {
    let start = Instant::now();
    let l = load(args)?;
    let problem = l.cfg.problem()?;
    let q = &l.cfg.qdrift;
    let (depth, samples) = match args.eps {
        Some(eps) => {
            let lambda = problem.h.one_norm();
            let b = 2.0 * lambda * lambda * problem.t * problem.t;
            let c = qdrift::std_cost(eps, b, problem.observable.norm_bound().powi(2))?;
            (c.depth as usize, c.samples as usize)
        }
        None => (q.depth, q.samples),
    };
    let est = qdrift::run_qdrift(
        &problem.h,
        &problem.observable,
        &problem.psi0,
        problem.t,
        depth,
        samples,
        l.seed,
        q.readout,
    )?;
    let dir = l.out.join("qdrift");
    write_json(&dir.join("result.json"), &est)?;
    println!(
        "mean = {:.6} ± {:.2e} (N = {depth}, n = {samples}, total gates = {})",
        est.mean, est.stderr, est.total_gates
    );
    finish("qdrift-run", args, &l, &dir, start, threads)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
        eprintln!("error: cannot start thread pool: {e}");
        return ExitCode::from(1);
    }
    let threads = rayon::current_num_threads();
    let result = match &cli.command {
        Command::VarianceDecay(a) => variance_decay(a, threads),
        Command::ShotNoise(a) => shot_noise(a, threads),
        Command::GateCost(a) => gate_cost(a, threads),
        Command::MlmcRun(a) => mlmc_run(a, threads),
        Command::QdriftRun(a) => qdrift_run(a, threads),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
