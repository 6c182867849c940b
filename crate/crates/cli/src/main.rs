use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use evc_core::attackers::AttackerKind;
use evc_core::cover::{alpha_report, is_vertex_cover, pattern, window_density, DensityReport};
use evc_core::evc_solver::{certify_against, solve_report, EVC_CAP};
use evc_core::harness::{run_matrix, to_csv, to_json, total_failures, ExperimentSpec, Instance};
use evc_core::ratio::{self, rat, Rational};
use evc_core::strategies::StrategyKind;
use evc_core::{grid, Coord, GridKind, Topology};
use evc_service::ServiceConfig;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "evc", version, about = "Eternal vertex cover on grid graphs")]
struct Cli {
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a grid graph as JSON.
    Gen(InstanceArgs),
    /// Lay the kind's periodic cover pattern on a grid.
    Cover {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Also count the pattern in the n x n window.
        #[arg(long)]
        window: Option<usize>,
    },
    /// Exact minimum vertex cover with bound checks.
    SolveAlpha(InstanceArgs),
    /// Exact eternal vertex cover number.
    SolveEvc {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Largest guard count to try; defaults to 2 alpha.
        #[arg(long)]
        k_max: Option<usize>,
        #[arg(long, default_value_t = EVC_CAP)]
        cap: usize,
    },
    /// Play a strategy against an attacker.
    Certify {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Defaults to the first applicable strategy.
        #[arg(long)]
        strategy: Option<StrategyKind>,
        #[arg(long, default_value = "random", value_parser = ["random", "greedy", "minimax"])]
        attacker: String,
        /// Lookahead for the minimax attacker.
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value_t = 10_000)]
        rounds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run an experiment matrix and emit a report.
    Report(ReportArgs),
    /// Start the session service.
    Serve {
        /// Overrides EVC_LISTEN_ADDR.
        #[arg(long)]
        listen: Option<SocketAddr>,
        /// Overrides EVC_DATA_DIR.
        #[arg(long)]
        data_dir: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct InstanceArgs {
    #[arg(long)]
    kind: GridKind,
    /// Rows; ignored for paths and cycles.
    #[arg(long, default_value_t = 1)]
    h: usize,
    /// Columns, or the vertex count for paths and cycles.
    #[arg(long)]
    w: usize,
    #[arg(long, default_value = "finite-rect")]
    topology: Topology,
}

impl InstanceArgs {
    fn build(&self) -> evc_core::Result<evc_core::GridGraph> {
        grid::build(self.kind, self.h, self.w, self.topology)
    }
}

#[derive(Args)]
struct ReportArgs {
    /// JSON experiment spec; a single instance can be given with flags instead.
    #[arg(long, required_unless_present = "kind", conflicts_with = "kind")]
    spec: Option<PathBuf>,
    #[arg(long)]
    kind: Option<GridKind>,
    #[arg(long, default_value_t = 1)]
    h: usize,
    #[arg(long, requires = "kind")]
    w: Option<usize>,
    #[arg(long, default_value = "finite-rect")]
    topology: Topology,
    /// Certify only this strategy (single-instance mode).
    #[arg(long)]
    strategy: Option<StrategyKind>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Record wall-clock times.
    #[arg(long)]
    timings: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Serialize)]
struct CoverOut {
    kind: GridKind,
    period_x: usize,
    period_y: usize,
    #[serde(with = "ratio")]
    limit: Rational,
    phase: (i64, i64),
    is_cover: bool,
    guards: usize,
    #[serde(with = "ratio")]
    ratio: Rational,
    config: Vec<Coord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    window: Option<DensityReport>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command, cli.out.as_deref()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    let text = if text.ends_with('\n') { text.to_owned() } else { format!("{text}\n") };
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output serializes")
}

/// Returns whether the run was clean.
fn run(command: Command, out: Option<&Path>) -> anyhow::Result<bool> {
    match command {
        Command::Gen(inst) => {
            emit(out, &json(&inst.build()?.to_json()))?;
            Ok(true)
        }
        Command::Cover { instance, window } => {
            let g = instance.build()?;
            let base = pattern(g.kind());
            let best = base
                .translates()
                .into_iter()
                .map(|p| (p.select_on(&g), p))
                .filter(|(sel, _)| is_vertex_cover(&g, sel))
                .min_by_key(|(sel, _)| sel.iter().filter(|&&b| b).count());
            let (sel, p) = best.unwrap_or_else(|| (base.select_on(&g), base));
            let config: Vec<Coord> = g.vertices().iter().zip(&sel).filter(|(_, &s)| s).map(|(&c, _)| c).collect();
            let report = CoverOut {
                kind: g.kind(),
                period_x: p.period_x,
                period_y: p.period_y,
                limit: p.limit(),
                phase: p.phase(),
                is_cover: is_vertex_cover(&g, &sel),
                guards: config.len(),
                ratio: rat(config.len() as i64, g.n() as i64),
                config,
                window: window.map(|n| window_density(&p, n)),
            };
            emit(out, &json(&report))?;
            Ok(report.is_cover)
        }
        Command::SolveAlpha(inst) => {
            let report = alpha_report(&inst.build()?)?;
            emit(out, &json(&report))?;
            Ok(report.bounds.all_ok())
        }
        Command::SolveEvc { instance, k_max, cap } => {
            let report = solve_report(&instance.build()?, k_max, cap)?;
            emit(out, &json(&report))?;
            Ok(true)
        }
        Command::Certify { instance, strategy, attacker, depth, rounds, seed } => {
            let g = instance.build()?;
            let strategy = match strategy {
                Some(s) => s,
                None => StrategyKind::default_for(&g)
                    .with_context(|| format!("no strategy applies to {} {} {}x{}", g.kind(), g.topology(), g.h(), g.w()))?,
            };
            let attacker = AttackerKind::from_tag(&attacker, seed, depth)?;
            let report = certify_against(&g, strategy, rounds, attacker)?;
            emit(out, &json(&report))?;
            Ok(report.passed())
        }
        Command::Report(args) => report(args, out),
        Command::Serve { listen, data_dir } => {
            let mut config = ServiceConfig::from_env()?;
            if let Some(addr) = listen {
                config.listen = addr;
            }
            if data_dir.is_some() {
                config.data_dir = data_dir;
            }
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(evc_service::serve(config))?;
            Ok(true)
        }
    }
}

fn report(args: ReportArgs, out: Option<&Path>) -> anyhow::Result<bool> {
    let mut spec = match (&args.spec, args.kind) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str::<ExperimentSpec>(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        (None, Some(kind)) => {
            let Some(w) = args.w else { bail!("--w is required with --kind") };
            let mut inst = Instance::new(kind, args.h, w, args.topology);
            inst.strategies = args.strategy.map(|s| vec![s]);
            ExperimentSpec::new(vec![inst])
        }
        (None, None) => bail!("give --spec or --kind"),
    };
    if let Some(r) = args.rounds {
        spec.rounds = r;
    }
    if let Some(s) = args.seed {
        spec.seed = s;
    }
    spec.timings |= args.timings;
    let reports = run_matrix(&spec);
    let text = match args.format {
        Format::Json => to_json(&reports),
        Format::Csv => to_csv(&reports)?,
    };
    emit(out, &text)?;
    Ok(total_failures(&reports) == 0)
}
