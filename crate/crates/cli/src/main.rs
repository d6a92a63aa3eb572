use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use neuropattern::architecture::{build, count_resources, LayerHandles, Manifest};
use neuropattern::config::{RunConfig, OUTPUT_DIR_ENV};
use neuropattern::engine::{NetworkSpec, SimState};
use neuropattern::events::{save_events, synthesize, to_raw_events, EventFormat, Jiggle, Shape, SynthPattern};
use neuropattern::experiments::{
    confusion_table, curve_table, latency_table, measure_latencies, report_scalability, run_evaluation,
    run_training, scalability_table, sweep_input_noise, sweep_neuron_noise, trajectory_table, trials_table,
    CurvePoint, ReportSink, TrainedState, TrainingOutcome,
};
use neuropattern::{Error, Result};

const INPUT_NOISE_DEFINITION: &str = "added input spikes as a percentage of the signal spike count";
const NEURON_NOISE_DEFINITION: &str =
    "uniform multiplicative jitter of feature-neuron thresholds and biases, plus per-step current noise";

#[derive(Parser)]
#[command(name = "neuropattern", version, about = "One-shot spiking pattern learning experiments")]
struct Cli {
    /// Run configuration (TOML). Defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Fixed timestamp for report names, for reproducible file names.
    #[arg(long, global = true)]
    timestamp: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the network manifest and the per-pattern resource cost.
    BuildInfo {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train the configured patterns and save the trained state.
    Train,
    /// Classify every pattern for every seed and emit both confusion matrices.
    Eval {
        #[arg(long)]
        state: PathBuf,
    },
    /// Accuracy as a function of injected noise.
    Sweep {
        kind: SweepKind,
        #[arg(long)]
        state: PathBuf,
    },
    /// Learning convergence and recognition switch latencies.
    Latency {
        #[arg(long)]
        state: PathBuf,
    },
    /// Write a synthetic jiggled pattern as an event file.
    GenPattern(GenPattern),
    /// Network size for 0..=max output groups and the per-pattern deltas.
    Scalability {
        #[arg(long, default_value_t = 8)]
        max: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepKind {
    InputNoise,
    NeuronNoise,
}

#[derive(clap::Args)]
struct GenPattern {
    /// T, L, plus or H.
    #[arg(long)]
    shape: String,
    /// Size class 0 (smallest) to 3 (full grid).
    #[arg(long, default_value_t = 3)]
    scale: u8,
    #[arg(long, default_value_t = 0)]
    row: u8,
    #[arg(long, default_value_t = 0)]
    col: u8,
    /// Timesteps to generate.
    #[arg(long, default_value_t = 4000)]
    duration: usize,
    /// Spike probability per active pixel per step.
    #[arg(long, default_value_t = 0.5)]
    rate: f64,
    #[arg(long, default_value_t = 1)]
    jiggle_amplitude: u8,
    #[arg(long, default_value_t = 4)]
    jiggle_period: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; `.csv` selects CSV, anything else the binary format.
    #[arg(long)]
    out: PathBuf,
    /// Also write the binned raster as JSON lines.
    #[arg(long)]
    binned: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } => 2,
        _ => 1,
    }
}

struct Ctx {
    cfg: RunConfig,
    out_dir: PathBuf,
    timestamp: Option<String>,
}

impl Ctx {
    fn sink(&self, experiment: &str, seeds: &[u64]) -> Result<ReportSink> {
        let sink = match &self.timestamp {
            Some(ts) => ReportSink::at(&self.out_dir, experiment, ts, seeds)?,
            None => ReportSink::new(&self.out_dir, experiment, seeds)?,
        };
        self.cfg.write_provenance(&self.out_dir, sink.stem())?;
        Ok(sink)
    }

    fn network(&self) -> Result<(NetworkSpec, LayerHandles)> {
        let (net, h, _) = build(&self.cfg.network)?;
        Ok((net, h))
    }

    fn trained(&self, net: &NetworkSpec, path: &Path) -> Result<TrainingOutcome> {
        let state = TrainedState::load(path)?;
        let outcome = state.to_outcome(net, &self.cfg.network_hash())?;
        if state.classes != self.cfg.protocol.labels() {
            return Err(Error::Config {
                path: "protocol.patterns".into(),
                message: format!(
                    "trained classes {:?} differ from configured patterns {:?}",
                    state.classes,
                    self.cfg.protocol.labels()
                ),
            });
        }
        Ok(outcome)
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let out_dir = cfg.resolve_output_dir(std::env::var_os(OUTPUT_DIR_ENV));
    let ctx = Ctx {
        cfg,
        out_dir,
        timestamp: cli.timestamp,
    };
    match cli.command {
        Command::BuildInfo { out } => build_info(&ctx, out.as_deref()),
        Command::Train => train(&ctx),
        Command::Eval { state } => eval(&ctx, &state),
        Command::Sweep { kind, state } => sweep(&ctx, kind, &state),
        Command::Latency { state } => latency(&ctx, &state),
        Command::GenPattern(args) => gen_pattern(&args),
        Command::Scalability { max } => scalability(&ctx, max),
    }
}

fn build_info(ctx: &Ctx, out: Option<&Path>) -> Result<()> {
    let (net, h) = ctx.network()?;
    let body = json!({
        "network_hash": ctx.cfg.network_hash(),
        "manifest": Manifest::new(&net, &h),
        "per_added_pattern": count_resources(&ctx.cfg.network)?,
    });
    let text = serde_json::to_string_pretty(&body)? + "\n";
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io { path: p.into(), source: e }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn train(ctx: &Ctx) -> Result<()> {
    let (net, h) = ctx.network()?;
    let p = &ctx.cfg.protocol;
    let outcome = run_training(&net, &h, p, SimState::new(&net, p.train_seed))?;
    let state = TrainedState::from_outcome(&outcome, p.labels(), &ctx.cfg.network_hash());
    let sink = ctx.sink("train", &[p.train_seed])?;
    let state_path = sink.path("state", "json");
    state.save(&state_path)?;
    let (hd, rows) = trajectory_table(&outcome);
    sink.write_table("trajectory", &hd, &rows)?;
    sink.write_json(&json!({
        "network_hash": state.network_hash,
        "classes": state.classes,
        "labels": state.labels,
        "outcomes": state.outcomes,
        "episodes": state.episodes,
        "capacity_exhausted_at": outcome.capacity_exhausted(),
        "state_file": state_path.file_name().map(|n| n.to_string_lossy().into_owned()),
    }))?;
    for (ep, o) in outcome.outcomes.iter().enumerate() {
        println!("pattern {ep}: {o:?}");
    }
    println!("{}", state_path.display());
    Ok(())
}

fn eval(ctx: &Ctx, state: &Path) -> Result<()> {
    let (net, h) = ctx.network()?;
    let trained = ctx.trained(&net, state)?;
    let p = &ctx.cfg.protocol;
    let report = run_evaluation(&net, &h, &trained, p)?;
    let sink = ctx.sink("eval", &p.seeds)?;
    let (hd, rows) = confusion_table(&report.confusion_pre_wta);
    sink.write_table("confusion_pre_wta", &hd, &rows)?;
    let (hd, rows) = confusion_table(&report.confusion_post_wta);
    sink.write_table("confusion_post_wta", &hd, &rows)?;
    let (hd, rows) = trials_table(&report);
    sink.write_table("trials", &hd, &rows)?;
    sink.write_json(&json!({
        "accuracy": report.accuracy,
        "accuracy_pre_wta": report.accuracy_pre_wta,
        "classes": report.confusion_post_wta.classes,
        "confusion_pre_wta": report.confusion_pre_wta.counts,
        "confusion_post_wta": report.confusion_post_wta.counts,
        "latency_samples": report.latency_samples,
        "convergence_steps": report.convergence_steps,
    }))?;
    println!("accuracy {:.4} (pre-WTA {:.4})", report.accuracy, report.accuracy_pre_wta);
    Ok(())
}

fn sweep(ctx: &Ctx, kind: SweepKind, state: &Path) -> Result<()> {
    let (net, h) = ctx.network()?;
    let trained = ctx.trained(&net, state)?;
    let p = &ctx.cfg.protocol;
    let s = &ctx.cfg.sweeps;
    let (name, definition, curve) = match kind {
        SweepKind::InputNoise => (
            "sweep_input_noise",
            INPUT_NOISE_DEFINITION,
            sweep_input_noise(&net, &h, &trained, p, &s.input_noise_levels)?,
        ),
        SweepKind::NeuronNoise => (
            "sweep_neuron_noise",
            NEURON_NOISE_DEFINITION,
            sweep_neuron_noise(&net, &h, &trained, p, &s.neuron_noise_levels, s.neuron_noise)?,
        ),
    };
    let sink = ctx.sink(name, &p.seeds)?;
    let (hd, rows) = curve_table(&curve);
    sink.write_table("curve", &hd, &rows)?;
    sink.write_json(&json!({
        "noise_definition": definition,
        "seeds": p.seeds,
        "points": curve,
    }))?;
    print_curve(definition, &curve);
    Ok(())
}

fn print_curve(definition: &str, curve: &[CurvePoint]) {
    println!("# level: {definition}");
    for c in curve {
        println!("{:>6.1}%  mean {:.4}  min {:.4}  max {:.4}", c.level, c.mean, c.min, c.max);
    }
}

fn latency(ctx: &Ctx, state: &Path) -> Result<()> {
    let (net, h) = ctx.network()?;
    let trained = ctx.trained(&net, state)?;
    let p = &ctx.cfg.protocol;
    let report = measure_latencies(&net, &h, &trained, p)?;
    let sink = ctx.sink("latency", &p.seeds)?;
    let (hd, rows) = latency_table(&report);
    sink.write_table("switches", &hd, &rows)?;
    sink.write_json(&report)?;
    let cross: Vec<_> = report.cross_switches().filter_map(|s| s.steps).collect();
    println!("learning convergence steps {:?}", report.learning_convergence_steps);
    if let (Some(lo), Some(hi)) = (cross.iter().min(), cross.iter().max()) {
        println!("switch latency steps {lo}..={hi} over {} switches", cross.len());
    }
    Ok(())
}

fn gen_pattern(a: &GenPattern) -> Result<()> {
    let shape: Shape = a.shape.parse().map_err(|e: Error| Error::Config {
        path: "shape".into(),
        message: e.to_string(),
    })?;
    let mut p = SynthPattern::new(shape, a.scale, (a.row, a.col));
    p.event_rate = a.rate;
    p.jiggle = Jiggle {
        amplitude: a.jiggle_amplitude,
        period: a.jiggle_period,
    };
    if !(0.0..=1.0).contains(&a.rate) {
        return Err(Error::Config {
            path: "rate".into(),
            message: format!("{} outside [0, 1]", a.rate),
        });
    }
    p.validate().map_err(|e| Error::Config {
        path: "pattern".into(),
        message: e.to_string(),
    })?;
    let binned = synthesize(&p, a.duration, a.seed)?;
    save_events(&a.out, EventFormat::from_path(&a.out), &to_raw_events(&binned))?;
    if let Some(path) = &a.binned {
        std::fs::write(path, binned.to_json_lines()).map_err(|e| Error::Io { path: path.clone(), source: e })?;
    }
    println!("{} events -> {}", binned.spike_count(), a.out.display());
    Ok(())
}

fn scalability(ctx: &Ctx, max: usize) -> Result<()> {
    let rows = report_scalability(&ctx.cfg.network, max)?;
    let sink = ctx.sink("scalability", &[])?;
    let (hd, body) = scalability_table(&rows);
    sink.write_table("table", &hd, &body)?;
    sink.write_json(&rows)?;
    println!("{}", hd.join(","));
    for r in body {
        println!("{}", r.join(","));
    }
    Ok(())
}
