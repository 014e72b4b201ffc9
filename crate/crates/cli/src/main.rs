mod commands;
mod config;
mod experiment;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::{Args, Parser, Subcommand};
use spinorbit_core::{Basis, Bindings, Complex64};

use config::{parse_angle, Layered, RunConfig, SweepSpec, RUN_KEYS};

/// Simulate and analyze the classical spin-orbit Bell experiment.
///
/// Angles accept `deg` or `rad` suffixes and default to degrees; `pi/16`
/// is read in radians.
#[derive(Parser)]
#[command(name = "spinorbit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measure the four correlations and S.
    Bell(RunArgs),
    /// Scan one parameter and write a CSV trace.
    Sweep(SweepArgs),
    /// Analyze a measured intensity table.
    Ingest { path: PathBuf },
    /// Coherent-state expansion and single-photon post-selection.
    Quantum(QuantumArgs),
    /// Write the transverse field map of the input mode.
    Render(RenderArgs),
    /// Compile and run a `.bench` program.
    Bench(BenchArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat TOML file of `key = value` pairs; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// mns, separable or bench.
    #[arg(long)]
    mode: Option<String>,
    /// Separable coefficients `b1,b2,b3,b4`, or `random`.
    #[arg(long)]
    b: Option<String>,
    /// Bench program to use as the experiment.
    #[arg(long = "bench-file")]
    bench_file: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    chi: Option<String>,
    /// canonical, or explicit with all four angles below.
    #[arg(long)]
    settings: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta2: Option<String>,
    /// Seed for `--b random`.
    #[arg(long)]
    seed: Option<u64>,
}

impl RunArgs {
    fn layered(&self, extra_keys: &[&str]) -> Result<Layered> {
        let mut cfg = Layered::new(self.config.as_deref())?;
        cfg.flag("mode", self.mode.as_ref())
            .flag("b", self.b.as_ref())
            .flag("bench", self.bench_file.as_ref().map(|p| p.display()))
            .flag("phi", self.phi.as_ref())
            .flag("chi", self.chi.as_ref())
            .flag("settings", self.settings.as_ref())
            .flag("alpha1", self.alpha1.as_ref())
            .flag("alpha2", self.alpha2.as_ref())
            .flag("beta1", self.beta1.as_ref())
            .flag("beta2", self.beta2.as_ref())
            .flag("seed", self.seed);
        let known: Vec<&str> = RUN_KEYS.iter().chain(extra_keys).copied().collect();
        cfg.check_known(&known)?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// chi, phi, alpha or beta.
    #[arg(long)]
    param: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    from: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    to: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    /// Basis whose detectors are recorded (a1b1, a1b2, a2b1, a2b2).
    #[arg(long)]
    basis: Option<String>,
    /// CSV output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

const SWEEP_KEYS: &[&str] = &["param", "from", "to", "samples", "basis", "out"];

#[derive(Args)]
struct QuantumArgs {
    /// Coherent amplitude, real or complex (`1`, `1+0.5i`).
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    amp: String,
    /// Photon-number cutoff.
    #[arg(long, default_value_t = spinorbit_core::quantum::DEFAULT_CUTOFF)]
    cutoff: usize,
    /// Fail when the single-photon sector is empty.
    #[arg(long)]
    post_select: bool,
    /// Write the Fock coefficient table here.
    #[arg(long)]
    fock_out: Option<PathBuf>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct RenderArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Pixels per side.
    #[arg(long, default_value_t = 256)]
    size: usize,
    /// Half-width of the window in beam-waist units.
    #[arg(long, default_value_t = 3.0)]
    extent: f64,
    /// CSV output path.
    #[arg(long)]
    out: PathBuf,
    /// Optional PGM intensity image.
    #[arg(long)]
    pgm: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    path: PathBuf,
    /// Parameter binding `name=angle`, repeatable.
    #[arg(long = "set", value_name = "NAME=ANGLE", allow_hyphen_values = true)]
    set: Vec<String>,
    /// Print the parsed program first.
    #[arg(long)]
    print: bool,
}

fn sweep_spec(cfg: &Layered) -> Result<SweepSpec> {
    let param = cfg
        .parsed("param")?
        .ok_or_else(|| anyhow!("a sweep needs `--param`"))?;
    let from = cfg
        .angle("from")?
        .ok_or_else(|| anyhow!("a sweep needs `--from`"))?;
    let to = cfg
        .angle("to")?
        .ok_or_else(|| anyhow!("a sweep needs `--to`"))?;
    let samples = cfg.parsed("samples")?.unwrap_or(256);
    Ok(SweepSpec {
        param,
        from,
        to,
        samples,
    })
}

fn parse_bindings(pairs: &[String]) -> Result<Bindings> {
    let mut bindings = Bindings::new();
    for pair in pairs {
        let (name, value) = pair
            .split_once('=')
            .ok_or_else(|| anyhow!("binding `{pair}` is not NAME=ANGLE"))?;
        bindings.insert(name.trim().to_string(), parse_angle(value)?);
    }
    Ok(bindings)
}

fn run(cli: Cli) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Bell(args) => {
            let cfg = RunConfig::from_layered(&args.layered(&[])?)?;
            commands::bell(&cfg, &mut out)?;
        }
        Command::Sweep(args) => {
            let mut layered = args.run.layered(SWEEP_KEYS)?;
            layered
                .flag("param", args.param.as_ref())
                .flag("from", args.from.as_ref())
                .flag("to", args.to.as_ref())
                .flag("samples", args.samples)
                .flag("basis", args.basis.as_ref())
                .flag("out", args.out.as_ref().map(|p| p.display()));
            let cfg = RunConfig::from_layered(&layered)?;
            let basis = match layered.get("basis") {
                Some(b) => Basis::parse(b).ok_or_else(|| anyhow!("unknown basis `{b}`"))?,
                None => Basis::A1B1,
            };
            let out_path = layered.get("out").map(PathBuf::from);
            let opts = commands::SweepOptions {
                spec: sweep_spec(&layered)?,
                basis,
                out: out_path.as_deref(),
            };
            commands::sweep(&cfg, &opts, &mut out)?;
        }
        Command::Ingest { path } => commands::ingest(&path, &mut out)?,
        Command::Quantum(args) => {
            let amp: Complex64 = args
                .amp
                .trim()
                .parse()
                .map_err(|_| anyhow!("invalid amplitude `{}`", args.amp))?;
            let cfg = RunConfig::from_layered(&args.run.layered(&[])?)?;
            let opts = commands::QuantumOptions {
                amp,
                cutoff: args.cutoff,
                settings: cfg.settings,
                post_select: args.post_select,
                fock_out: args.fock_out.as_deref(),
            };
            commands::quantum(&opts, &mut out)?;
        }
        Command::Render(args) => {
            let cfg = RunConfig::from_layered(&args.run.layered(&[])?)?;
            let opts = commands::RenderOptions {
                size: args.size,
                extent: args.extent,
                out: &args.out,
                pgm: args.pgm.as_deref(),
            };
            commands::render(&cfg, &opts, &mut out)?;
        }
        Command::Bench(args) => {
            commands::bench(
                &args.path,
                &parse_bindings(&args.set)?,
                args.print,
                &mut out,
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
