use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vispad::config::{read_kv_file, DatasetConfig};
use vispad::dataset::{generate_dataset, render_sample, sample_instance};
use vispad::manifest::{read_manifest, CONFIG_FILE, MANIFEST_FILE};
use vispad::mask::export_masked_variant;
use vispad::score::score_dirs;
use vispad::teacher::export_tuples;
use vispad::PipelineError;
use vispad_core::globality::{conditional_mi, MiMode};
use vispad_core::oracle::{oracle_step, FrameState, DEFAULT_MAX_STEPS};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_GENERATION: u8 = 3;
const EXIT_COVERAGE: u8 = 4;

#[derive(Parser)]
#[command(name = "vispad", version, about = "Visual scratchpad task generator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset of inputs, scratchpad frames and a manifest.
    Generate(GenArgs),
    /// Write a patch-masked copy of a dataset.
    Mask(MaskArgs),
    /// Step the oracle on one sample and print each step.
    OracleRun(OracleArgs),
    /// Print conditional mutual information of the label given k revealed nodes.
    Probe(ProbeArgs),
    /// Score predictions against a dataset.
    Score(ScoreArgs),
    /// Re-render one sample and compare it with the files on disk.
    Inspect(InspectArgs),
    /// Export teacher-forcing tuples.
    Tuples(TupleArgs),
}

#[derive(Args, Clone, Default)]
struct GenArgs {
    /// key = value file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = ["cycles", "strings", "maze-rect", "maze-circ"])]
    task: Option<String>,
    #[arg(long)]
    size: Option<usize>,
    #[arg(long)]
    count: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = ["main", "easy"])]
    regime: Option<String>,
    #[arg(long, value_parser = ["none", "single", "multi"])]
    frames: Option<String>,
    #[arg(long, value_parser = ["448", "224"])]
    resolution: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    mask_prob: Option<f64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_parser = ["png", "ppm"])]
    format: Option<String>,
    #[arg(long)]
    split: Option<String>,
}

#[derive(Args)]
struct TupleArgs {
    #[command(flatten)]
    gen: GenArgs,
    /// List every tuple a second time, flagged for self-rollout.
    #[arg(long)]
    self_rollout: bool,
}

#[derive(Args)]
struct MaskArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    mask_prob: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    gen: GenArgs,
    /// Sample index; its label is `id mod 2`.
    #[arg(long, default_value_t = 0)]
    id: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
    max_steps: usize,
}

#[derive(Args)]
struct ProbeArgs {
    /// Total node count 2n.
    #[arg(long, default_value_t = 6)]
    size: usize,
    /// Only this number of revealed nodes; all k from 0 to 2n otherwise.
    #[arg(long)]
    k: Option<usize>,
    /// Monte Carlo sample count; exact enumeration when absent.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ScoreArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Directory containing predictions.jsonl.
    #[arg(long)]
    predictions: PathBuf,
}

#[derive(Args)]
struct InspectArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    id: u64,
    /// Also write the re-rendered input image here.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(&a),
        Command::Mask(a) => mask(&a),
        Command::OracleRun(a) => oracle_run(&a),
        Command::Probe(a) => probe(&a),
        Command::Score(a) => score(&a),
        Command::Inspect(a) => inspect(&a),
        Command::Tuples(a) => tuples(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err((code, err)) => {
            eprintln!("error: {err}");
            ExitCode::from(code)
        }
    }
}

type CmdResult = Result<u8, (u8, PipelineError)>;

fn usage(e: PipelineError) -> (u8, PipelineError) {
    (EXIT_USAGE, e)
}

fn failed(code: u8) -> impl Fn(PipelineError) -> (u8, PipelineError) {
    move |e| match e {
        PipelineError::Config(_) => (EXIT_USAGE, e),
        e => (code, e),
    }
}

fn resolve(args: &GenArgs) -> Result<DatasetConfig, PipelineError> {
    let mut pairs = match &args.config {
        Some(path) => read_kv_file(path)?,
        None => BTreeMap::new(),
    };
    let mut set = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            pairs.insert(k.to_string(), v);
        }
    };
    set("task", args.task.clone());
    set("size", args.size.map(|v| v.to_string()));
    set("count", args.count.map(|v| v.to_string()));
    set("seed", args.seed.map(|v| v.to_string()));
    set("regime", args.regime.clone());
    set("frames", args.frames.clone());
    set("resolution", args.resolution.clone());
    set("out", args.out.as_ref().map(|p| p.display().to_string()));
    set("mask-prob", args.mask_prob.map(|v| v.to_string()));
    set("workers", args.workers.map(|v| v.to_string()));
    set("format", args.format.clone());
    set("split", args.split.clone());
    let cfg = DatasetConfig::from_pairs(&pairs)?;
    cfg.validate()?;
    Ok(cfg)
}

fn generate(args: &GenArgs) -> CmdResult {
    let cfg = resolve(args).map_err(usage)?;
    let records = generate_dataset(&cfg).map_err(failed(EXIT_GENERATION))?;
    println!("wrote {} samples to {}", records.len(), cfg.out.display());
    Ok(0)
}

fn tuples(args: &TupleArgs) -> CmdResult {
    let cfg = resolve(&args.gen).map_err(usage)?;
    let index = export_tuples(&cfg, args.self_rollout).map_err(failed(EXIT_GENERATION))?;
    println!("wrote {} tuples to {}", index.len(), cfg.out.display());
    Ok(0)
}

fn mask(args: &MaskArgs) -> CmdResult {
    let workers = args.workers.unwrap_or_else(vispad::config::default_workers);
    if workers == 0 {
        return Err(usage(PipelineError::Config("workers must be at least 1".into())));
    }
    let records = export_masked_variant(&args.dataset, &args.out, args.mask_prob, args.seed, workers)
        .map_err(failed(EXIT_GENERATION))?;
    let masked: usize = records.iter().filter_map(|r| r.mask.as_ref()).map(|m| m.masked_patches).sum();
    println!(
        "wrote {} masked samples to {} ({masked} patches masked)",
        records.len(),
        args.out.display()
    );
    Ok(0)
}

fn oracle_run(args: &OracleArgs) -> CmdResult {
    let mut gen = args.gen.clone();
    gen.count.get_or_insert(2);
    let cfg = resolve(&gen).map_err(usage)?;
    let task = sample_instance(&cfg, args.id).map_err(failed(EXIT_GENERATION))?;
    let items = task.item_count();
    println!(
        "task {} size {} id {} label {} items {items}",
        cfg.task,
        cfg.size,
        args.id,
        task.label().as_u8()
    );
    let mut state = FrameState::input(&task);
    for _ in 0..args.max_steps {
        let out = oracle_step(&state).map_err(|e| (EXIT_FAILURE, e.into()))?;
        println!(
            "step {} colored {}/{items} label_estimate {} decided {} halt {}",
            out.next.step,
            out.next.coloring.count(),
            out.label_estimate.as_u8(),
            out.decided,
            out.halt
        );
        if out.halt {
            println!("halted after {} steps, label {}", out.next.step, out.label_estimate.as_u8());
            return Ok(0);
        }
        state = out.next;
    }
    Err((
        EXIT_FAILURE,
        PipelineError::Config(format!("no halt within {} steps", args.max_steps)),
    ))
}

fn probe(args: &ProbeArgs) -> CmdResult {
    if !args.size.is_multiple_of(2) || args.size < 4 {
        return Err(usage(PipelineError::Config(format!(
            "size must be an even node count of at least 4, got {}",
            args.size
        ))));
    }
    let n = args.size / 2;
    let mode = match args.samples {
        Some(samples) => MiMode::MonteCarlo { samples, seed: args.seed },
        None => MiMode::Exact,
    };
    let ks: Vec<usize> = match args.k {
        Some(k) => vec![k],
        None => (0..=args.size).collect(),
    };
    println!("k\tmi_bits");
    for k in ks {
        let mi = conditional_mi(n, k, mode).map_err(|e| failed(EXIT_FAILURE)(e.into()))?;
        println!("{k}\t{mi:.6}");
    }
    Ok(0)
}

fn score(args: &ScoreArgs) -> CmdResult {
    let report = score_dirs(&args.dataset, &args.predictions).map_err(failed(EXIT_FAILURE))?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| (EXIT_FAILURE, PipelineError::Format(e.to_string())))?;
    println!("{json}");
    if report.coverage < 1.0 {
        eprintln!(
            "error: predictions cover {} of {} samples",
            report.predicted, report.samples
        );
        return Ok(EXIT_COVERAGE);
    }
    Ok(0)
}

fn inspect(args: &InspectArgs) -> CmdResult {
    let mut cfg = vispad::config::load_config(&args.dataset.join(CONFIG_FILE)).map_err(failed(EXIT_FAILURE))?;
    cfg.out = args.dataset.clone();
    let records = read_manifest(&args.dataset.join(MANIFEST_FILE)).map_err(failed(EXIT_FAILURE))?;
    let stored = records
        .iter()
        .find(|r| r.id == args.id)
        .ok_or_else(|| usage(PipelineError::Config(format!("no sample with id {}", args.id))))?;
    let sample = render_sample(&cfg, args.id).map_err(failed(EXIT_GENERATION))?;
    let record_matches = &sample.record == stored;
    let mut files_match = true;
    for (rel, bytes) in &sample.files {
        let same = fs::read(args.dataset.join(rel)).is_ok_and(|b| &b == bytes);
        println!("{rel}\t{}", if same { "identical" } else { "DIFFERENT" });
        files_match &= same;
    }
    println!("{}", serde_json::to_string(&sample.record).unwrap_or_default());
    println!("record_matches {record_matches} files_match {files_match}");
    if let Some(out) = &args.out {
        fs::write(out, &sample.files[0].1).map_err(|e| {
            (
                EXIT_FAILURE,
                PipelineError::Io {
                    path: out.clone(),
                    source: e,
                },
            )
        })?;
    }
    Ok(if record_matches && files_match { 0 } else { EXIT_GENERATION })
}
