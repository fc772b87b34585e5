use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hubbard_core::circuit::{decompose_to_basis, to_text};
use hubbard_core::harness::{
    depth_csv, depth_report, emit_plot_data, run_sweep, Backend, ExperimentConfig, ObservableKind, PlotKind,
    ResultSet, Timings,
};
use hubbard_core::trotter::{build_circuit, TrotterOrder};
use hubbard_core::Error;

/// Trotterized Fermi-Hubbard dynamics on classical backends.
#[derive(Parser)]
#[command(name = "hubbard", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// TOML experiment file.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Start from a named preset instead of a file.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Output directory (overrides the file and HUBBARD_OUT_DIR).
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CircuitFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Write the Trotter circuit for every step count in the range.
    Build {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Decompose to the native basis {X, SX, RX, RZ, CZ, RZZ}.
        #[arg(long)]
        basis: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: CircuitFormat,
    },
    /// Run the step sweep on the configured backend.
    Evolve {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, value_enum)]
        backend: Option<BackendArg>,
    },
    /// Depth and CZ-count tables for all three orders.
    Depth {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Noisy sweep through the full mitigation stack.
    Mitigate {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Report unmitigated noisy estimates instead.
        #[arg(long)]
        raw: bool,
    },
    /// Emit CSV plot data from a stored result set.
    Plotdata {
        /// results.json written by `evolve` or `mitigate`.
        #[arg(long)]
        results: PathBuf,
        /// timings.json; defaults to the file next to the results.
        #[arg(long)]
        timings: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "all")]
        kind: KindArg,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Statevector,
    Exact,
    Mps,
    Noisy,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    NeelVsTime,
    DepthVsR,
    MpsDiagnostics,
    All,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Capacity { .. } | Error::UnsupportedGate(_) | Error::NonAdjacentGate(..) => 3,
        Error::Numerical(_) | Error::FitFailure(_) => 4,
        _ => 2,
    }
}

fn load(args: &ConfigArgs) -> Result<ExperimentConfig, Error> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(name)) => ExperimentConfig::preset(name)?,
        (None, None) => ExperimentConfig::preset("paper-L10")?,
    }
    .with_env_overrides();
    if let Some(dir) = &args.out {
        cfg.output.dir = dir.clone();
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn configure_threads() -> Result<(), Error> {
    if let Ok(v) = std::env::var("HUBBARD_THREADS") {
        let n: usize = v.parse().map_err(|_| Error::Config(format!("HUBBARD_THREADS={v:?} is not a count")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    Ok(())
}

fn write(dir: &Path, name: &str, body: &str) -> Result<PathBuf, Error> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, body)?;
    Ok(path)
}

fn sweep(cfg: &ExperimentConfig) -> Result<(), Error> {
    let out = run_sweep(cfg)?;
    let dir = &cfg.output.dir;
    write(dir, "results.json", &out.results.to_json()?)?;
    write(dir, "timings.json", &out.timings.to_json()?)?;
    let primary = cfg.observables[0];
    println!("backend {}  L={}  order {}", cfg.backend.name(), cfg.model.sites, cfg.plan.order.name());
    println!("{:>4} {:>8} {:>14} {:>12}", "r", "tau", primary.name(), "std");
    for p in &out.results.points {
        let v = &p.observables[&primary];
        println!("{:>4} {:>8.3} {:>14.8} {:>12.3e}", p.r, p.tau, v.mean, v.std);
    }
    println!("wrote {}", dir.join("results.json").display());
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    configure_threads()?;
    match cli.command {
        Command::Build { cfg, basis, format } => {
            let cfg = load(&cfg)?;
            for r in cfg.steps() {
                let mut c = build_circuit(&cfg.trotter_plan(r))?;
                if basis {
                    c = decompose_to_basis(&c)?;
                }
                let (ext, body) = match format {
                    CircuitFormat::Text => ("txt", to_text(&c)),
                    CircuitFormat::Json => ("json", c.to_json()?),
                };
                let path = write(&cfg.output.dir, &format!("{}_r{r}.{ext}", cfg.plan.order.name()), &body)?;
                println!("{}", path.display());
            }
        }
        Command::Evolve { cfg, backend } => {
            let mut cfg = load(&cfg)?;
            if let Some(b) = backend {
                cfg.backend = match b {
                    BackendArg::Statevector => Backend::Statevector,
                    BackendArg::Exact => Backend::Exact,
                    BackendArg::Mps => Backend::Mps,
                    BackendArg::Noisy => Backend::Noisy,
                };
            }
            sweep(&cfg)?;
        }
        Command::Depth { cfg } => {
            let cfg = load(&cfg)?;
            let rows = depth_report(&cfg)?;
            println!("{:>4} {:>14} {:>8} {:>9} {:>9}", "r", "order", "depth", "cz_depth", "cz_count");
            for row in &rows {
                println!("{:>4} {:>14} {:>8} {:>9} {:>9}", row.r, row.order.name(), row.depth, row.cz_depth, row.cz_count);
            }
            for order in TrotterOrder::ALL {
                write(&cfg.output.dir, &format!("depth_{}.csv", order.name()), &depth_csv(&rows, order))?;
            }
        }
        Command::Mitigate { cfg, raw } => {
            let mut cfg = load(&cfg)?;
            cfg.backend = Backend::Noisy;
            cfg.mitigate = !raw;
            if cfg.observables.is_empty() {
                cfg.observables = vec![ObservableKind::Neel];
            }
            sweep(&cfg)?;
        }
        Command::Plotdata { results, timings, kind, out } => {
            let rs = ResultSet::from_json(&std::fs::read_to_string(&results)?)?;
            let timings_path = timings.unwrap_or_else(|| results.with_file_name("timings.json"));
            let timings = match std::fs::read_to_string(&timings_path) {
                Ok(s) => Some(Timings::from_json(&s)?),
                Err(_) => None,
            };
            let dir = out.unwrap_or_else(|| results.parent().map(Path::to_path_buf).unwrap_or_default());
            let kinds: Vec<PlotKind> = match kind {
                KindArg::NeelVsTime => vec![PlotKind::NeelVsTime],
                KindArg::DepthVsR => vec![PlotKind::DepthVsR],
                KindArg::MpsDiagnostics => vec![PlotKind::MpsDiagnostics],
                KindArg::All => PlotKind::ALL.to_vec(),
            };
            for k in kinds {
                for p in emit_plot_data(&rs, timings.as_ref(), k, &dir)? {
                    println!("{}", p.display());
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
