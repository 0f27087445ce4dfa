//! `hcd`: hybrid causal discovery from time series.
//!
//! Subcommands: `simulate` (synthetic data + ground truth), `discover`
//! (NBCB/CBNB over a CSV), `evaluate` (F1 of a prediction against a
//! truth graph) and `bench` (multi-seed sweeps).
//!
//! Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical
//! degeneracy.

use clap::{Args, Parser, Subcommand};
use hcd_core::bench::{self, BenchStructure, MethodId};
use hcd_core::datagen::{self, NoiseKind, RickerParams, Structure};
use hcd_core::graph::GraphDocument;
use hcd_core::hybrid::{self, DiscoveryConfig};
use hcd_core::stats::Dataset;
use hcd_core::Error as CoreError;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "hcd",
    version,
    about = "Hybrid causal discovery for multivariate time series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic dataset CSV plus its ground-truth graph JSON
    Simulate(SimulateArgs),
    /// Run a hybrid discovery method over a dataset CSV
    Discover(DiscoverArgs),
    /// Score a predicted summary graph against a truth graph
    Evaluate(EvaluateArgs),
    /// Sweep methods x structures over many seeds and report mean F1
    Bench(BenchArgs),
}

/// Optional key=value config file; explicit flags win over file entries.
#[derive(Args, Debug, Default)]
struct ConfigFile {
    /// Config file with `key = value` lines mirroring the long flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

fn read_config(path: &Option<PathBuf>) -> Result<BTreeMap<String, String>, CoreError> {
    let mut map = BTreeMap::new();
    if let Some(p) = path {
        let text = std::fs::read_to_string(p).map_err(|source| CoreError::Io {
            path: p.display().to_string(),
            source,
        })?;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CoreError::InvalidParameter(format!("config line without `=`: {line}"))
            })?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    Ok(map)
}

fn pick<T: std::str::FromStr>(
    flag: Option<T>,
    cfg: &BTreeMap<String, String>,
    key: &str,
    default: T,
) -> Result<T, CoreError> {
    if let Some(v) = flag {
        return Ok(v);
    }
    match cfg.get(key) {
        Some(raw) => raw.parse().map_err(|_| {
            CoreError::InvalidParameter(format!("config key `{key}`: bad value `{raw}`"))
        }),
        None => Ok(default),
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Structure id: v-structure, fork, diamond, unfaithful-diamond,
    /// cyclic-fork, cyclic-diamond, or ricker
    #[arg(long)]
    structure: Option<String>,
    /// Noise family for the linear structures: uniform or gaussian
    #[arg(long)]
    noise: Option<String>,
    /// Species count (ricker only)
    #[arg(long)]
    species: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Timestamps to record
    #[arg(long = "T")]
    t: Option<usize>,
    /// Output prefix: writes `<prefix>.csv` and `<prefix>.truth.json`
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    config: ConfigFile,
}

#[derive(Args)]
struct DiscoverArgs {
    /// Input dataset CSV (header row, one row per timestamp)
    #[arg(long)]
    input: PathBuf,
    /// Method id: nbcb-w, nbcb-e, cbnb-w or cbnb-e
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    gamma: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Output JSON path (summary graph, detail graph, diagnostics)
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    config: ConfigFile,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Predicted graph JSON (or a discovery-result JSON)
    #[arg(long)]
    pred: PathBuf,
    /// Truth graph JSON
    #[arg(long)]
    truth: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated method ids
    #[arg(long)]
    methods: Option<String>,
    /// Comma-separated structure ids (ricker as `ricker-<species>`)
    #[arg(long)]
    structures: Option<String>,
    #[arg(long)]
    noise: Option<String>,
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long = "T")]
    t: Option<usize>,
    #[arg(long)]
    gamma: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Worker pool size (default: available parallelism)
    #[arg(long)]
    jobs: Option<usize>,
    /// Report CSV path (stdout table is always printed)
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigFile,
}

fn write_text(path: &Path, text: &str) -> Result<(), CoreError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|source| CoreError::Io {
                path: dir.display().to_string(),
                source,
            })?;
        }
    }
    std::fs::write(path, text).map_err(|source| CoreError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn read_text(path: &Path) -> Result<String, CoreError> {
    std::fs::read_to_string(path).map_err(|source| CoreError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CoreError> {
    let cfg = read_config(&args.config.config)?;
    let structure_id = pick(args.structure, &cfg, "structure", String::new())?;
    if structure_id.is_empty() {
        return Err(CoreError::InvalidParameter(
            "--structure is required (flag or config file)".into(),
        ));
    }
    let seed = pick(args.seed, &cfg, "seed", 0)?;
    let t = pick(args.t, &cfg, "T", 1000)?;
    let noise = NoiseKind::from_id(&pick(args.noise, &cfg, "noise", "uniform".into())?)?;

    let csv_path = args.out.with_extension("csv");
    let truth_path = args.out.with_extension("truth.json");

    // The generating parameters travel as a replayable config sidecar.
    let config_path = args.out.with_extension("config");

    if structure_id == "ricker" {
        let species = pick(args.species, &cfg, "species", 5)?;
        let mut p = RickerParams::new(species, seed);
        p.t = t;
        let (data, scg) = datagen::gen_ricker(&p)?;
        write_text(&csv_path, &data.to_csv())?;
        write_text(&truth_path, &serde_json::to_string_pretty(&scg.to_json())?)?;
        write_text(
            &config_path,
            &format!("structure = ricker\nspecies = {species}\nseed = {seed}\nT = {t}\n"),
        )?;
        println!(
            "wrote {} ({} rows x {} vars) and {}",
            csv_path.display(),
            data.rows(),
            data.var_count(),
            truth_path.display()
        );
        return Ok(());
    }

    let structure = Structure::from_id(&structure_id)?;
    let (spec, data, wcg, scg) = datagen::gen_structure_auto(structure, noise, t, seed)?;
    write_text(&csv_path, &data.to_csv())?;
    write_text(&truth_path, &serde_json::to_string_pretty(&scg.to_json())?)?;
    let wcg_path = args.out.with_extension("truth-wcg.json");
    write_text(&wcg_path, &serde_json::to_string_pretty(&wcg.to_json())?)?;
    write_text(
        &config_path,
        &format!(
            "structure = {}\nnoise = {}\nseed = {seed}\nT = {t}\n",
            structure.id(),
            noise.id()
        ),
    )?;
    println!(
        "wrote {} ({} rows x {} vars, seed {}), {} and {}",
        csv_path.display(),
        data.rows(),
        data.var_count(),
        spec.seed,
        truth_path.display(),
        wcg_path.display()
    );
    Ok(())
}

fn cmd_discover(args: DiscoverArgs) -> Result<(), CoreError> {
    let cfg = read_config(&args.config.config)?;
    let method_id = pick(args.method, &cfg, "method", String::new())?;
    if method_id.is_empty() {
        return Err(CoreError::InvalidParameter(
            "--method is required (flag or config file)".into(),
        ));
    }
    let method = MethodId::from_id(&method_id)?;
    let gamma = pick(args.gamma, &cfg, "gamma", 5)?;
    let alpha = pick(args.alpha, &cfg, "alpha", 0.05)?;

    let data = Dataset::read_csv(&args.input)?;
    let run_cfg = DiscoveryConfig {
        gamma,
        alpha,
        variant: method.variant(),
    };
    let result = match method {
        MethodId::NbcbW | MethodId::NbcbE => hybrid::nbcb(&data, &run_cfg)?,
        MethodId::CbnbW | MethodId::CbnbE => hybrid::cbnb(&data, &run_cfg)?,
    };
    for w in &result.diagnostics.warnings {
        eprintln!("warning: {w}");
    }
    write_text(&args.out, &result.to_json_string()?)?;
    println!(
        "{}: {} summary edges, {} self loops, {} tests, {} ms -> {}",
        method.id(),
        result.scg.edges().len(),
        result.scg.self_loops().len(),
        result.diagnostics.ci_tests,
        result.diagnostics.runtime_ms,
        args.out.display()
    );
    Ok(())
}

fn load_summary(path: &Path) -> Result<hcd_core::graph::SummaryGraph, CoreError> {
    let text = read_text(path)?;
    if let Ok(doc) = GraphDocument::from_json(&text) {
        return doc.into_summary();
    }
    // Maybe a discovery-result document; its summary sits under "scg".
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let scg = value.get("scg").ok_or_else(|| {
        CoreError::GraphDocument(format!("{}: neither a graph nor a result", path.display()))
    })?;
    GraphDocument::from_json(&scg.to_string())?.into_summary()
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<(), CoreError> {
    let pred = load_summary(&args.pred)?;
    let truth = load_summary(&args.truth)?;
    let r = bench::f1_scg(&pred, &truth)?;
    println!("tp,fp,fn,f1");
    println!(
        "{},{},{},{:.4}",
        r.true_positives, r.false_positives, r.false_negatives, r.f1
    );
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), CoreError> {
    let cfg = read_config(&args.config.config)?;
    let methods: Vec<MethodId> = pick(args.methods, &cfg, "methods", "nbcb-w,cbnb-w".into())?
        .split(',')
        .map(|s| MethodId::from_id(s.trim()))
        .collect::<Result<_, _>>()?;
    let structures: Vec<BenchStructure> = pick(args.structures, &cfg, "structures", "fork".into())?
        .split(',')
        .map(|s| BenchStructure::from_id(s.trim()))
        .collect::<Result<_, _>>()?;
    let noise = NoiseKind::from_id(&pick(args.noise, &cfg, "noise", "uniform".into())?)?;
    let seeds = pick(args.seeds, &cfg, "seeds", 20)?;
    let t = pick(args.t, &cfg, "T", 1000)?;
    let gamma = pick(args.gamma, &cfg, "gamma", 5)?;
    let alpha = pick(args.alpha, &cfg, "alpha", 0.05)?;
    let jobs = match args.jobs {
        Some(j) => Some(j),
        None => cfg
            .get("jobs")
            .map(|v| v.parse())
            .transpose()
            .map_err(|_| CoreError::InvalidParameter("config key `jobs`: not a number".into()))?,
    };

    let run_cfg = DiscoveryConfig {
        gamma,
        alpha,
        ..DiscoveryConfig::default()
    };
    let reports = bench::run_benchmark(&methods, &structures, noise, seeds, t, &run_cfg, jobs);
    print!("{}", bench::report_table(&reports));
    if let Some(out) = args.out {
        write_text(&out, &bench::report_csv(&reports))?;
        println!("report written to {}", out.display());
    }
    Ok(())
}

fn exit_code_for(e: &CoreError) -> u8 {
    match e {
        CoreError::UnknownId { .. } | CoreError::InvalidParameter(_) => 2,
        CoreError::DegenerateSeries(_)
        | CoreError::InsufficientSamples { .. }
        | CoreError::Explosive(_) => 4,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Discover(a) => cmd_discover(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
