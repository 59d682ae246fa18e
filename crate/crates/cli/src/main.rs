use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qpairs::WeightKind;
use qpairs_cli::{
    emit_plots, load_config, run, write_report, CharSumRoute, CliError, CliResult, Command, ExperimentConfig,
    IntegralMethod, SurveyKind, WeightSpec,
};

#[derive(Parser, Debug)]
#[command(name = "qpairs", version, about = "Experiments on integer zeros of pairs of quadratic forms")]
struct Cli {
    /// Shipped pair name (n2, n3, n4, n6) or path to a pair JSON file.
    #[arg(long, global = true)]
    pair: Option<String>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Work cap for character sums and local densities.
    #[arg(long, global = true, env = "QPAIRS_BUDGET", default_value_t = 1e8)]
    budget: f64,
    /// Work cap for point enumeration.
    #[arg(long, global = true, env = "QPAIRS_COUNT_BUDGET", default_value_t = 2e9)]
    count_budget: f64,
    /// Size of the worker pool (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write <stem>.json and <stem>.csv here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write SVG plots into --out.
    #[arg(long, global = true)]
    plot: bool,
    /// File stem for --out (defaults to the command name).
    #[arg(long, global = true)]
    stem: Option<String>,
    /// Print the resolved configuration instead of running it.
    #[arg(long, global = true)]
    dry_run: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Kind {
    Sharp,
    Smooth,
    Bump,
}

#[derive(Args, Debug)]
struct WeightArgs {
    #[arg(long, value_enum)]
    weight: Option<Kind>,
    /// Lower corner of the box: one value (cube) or n comma-separated values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1")]
    lo: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "2")]
    hi: Vec<f64>,
    /// Sharpness H of the smooth weights.
    #[arg(long = "H", default_value_t = 2.0)]
    h: f64,
}

impl WeightArgs {
    fn spec(&self, default: Kind) -> WeightSpec {
        let kind = match self.weight.unwrap_or(default) {
            Kind::Sharp => WeightKind::SharpBox,
            Kind::Smooth => WeightKind::SmoothBox,
            Kind::Bump => WeightKind::BumpU,
        };
        WeightSpec { kind, lo: self.lo.clone(), hi: self.hi.clone(), h: self.h }
    }
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Validate the pair and print its invariants.
    Validate,
    /// Count integer zeros: exact in a sharp box, weighted otherwise.
    Count {
        #[arg(short = 'B', long = "B")]
        b: f64,
        #[command(flatten)]
        weight: WeightArgs,
    },
    /// Evaluate C_{q1,q2}(m) or S_{q1,q2}(m).
    Charsum {
        #[arg(long)]
        q1: u64,
        #[arg(long)]
        q2: u64,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        m: Vec<i64>,
        #[arg(long, value_enum, default_value = "assemble")]
        route: CharSumRoute,
    },
    /// Truncated singular series with per-prime factors.
    Sseries {
        #[arg(long, default_value_t = 100)]
        p_max: u64,
        #[arg(long, default_value_t = 4)]
        depth: u32,
        #[arg(long, default_value_t = 1)]
        bad_modulus: u64,
    },
    /// Singular integral J0.
    Sintegral {
        #[command(flatten)]
        weight: WeightArgs,
        #[arg(long, value_enum, default_value = "coarea")]
        method: IntegralMethod,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, default_value_t = 200_000)]
        samples: u64,
    },
    /// Residuals of the delta-kernel identity for |n| ≤ Q².
    DeltaCheck {
        #[arg(short = 'Q', long = "Q")]
        q: f64,
    },
    /// Nested decomposition of the weighted count.
    Decompose {
        #[arg(short = 'B', long = "B")]
        b: f64,
        #[arg(long, default_value_t = 2)]
        level: u8,
        #[command(flatten)]
        weight: WeightArgs,
    },
    /// Direct lattice sum against its Poisson dual for one (q1, q2, a1, a2).
    PoissonCheck {
        #[arg(short = 'B', long = "B")]
        b: f64,
        #[arg(long)]
        q1: u64,
        #[arg(long)]
        q2: u64,
        #[arg(long, default_value_t = 1)]
        a1: i64,
        #[arg(long, default_value_t = 1)]
        a2: i64,
        #[command(flatten)]
        weight: WeightArgs,
        /// Dual truncation; defaults to ceil(H √B log B).
        #[arg(long)]
        m_max: Option<i64>,
        #[arg(long, default_value_t = 1024)]
        grid: usize,
    },
    /// Empirical bound constants for the kernel or the character sums.
    Survey {
        #[arg(long, value_enum)]
        kind: SurveyKind,
        #[arg(short = 'Q', long = "Q", default_value_t = 10.0)]
        q: f64,
        #[arg(long, default_value_t = 12)]
        q_max: u64,
    },
    /// N(B) against the main term 𝔖 J0 B^{n-4}.
    Report {
        #[command(flatten)]
        weight: WeightArgs,
        #[arg(long = "B-list", value_delimiter = ',', default_value = "20,40,80")]
        b_list: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        p_max: u64,
        #[arg(long, default_value_t = 4)]
        depth: u32,
        #[arg(long, default_value_t = 32)]
        grid: usize,
    },
    /// Decay of the oscillatory integral I_{q1,q2}(u) along one axis.
    Oscint {
        #[arg(short = 'B', long = "B")]
        b: f64,
        #[arg(long)]
        q1: u64,
        #[arg(long)]
        q2: u64,
        #[command(flatten)]
        weight: WeightArgs,
        #[arg(long, default_value_t = 0)]
        axis: usize,
        #[arg(long, default_value_t = 1.0)]
        u_min: f64,
        #[arg(long, default_value_t = 40.0)]
        u_max: f64,
        #[arg(long, default_value_t = 60)]
        steps: usize,
        #[arg(long, default_value_t = 24.0)]
        panels_per_unit: f64,
    },
    /// Run a saved configuration (as printed by --dry-run or embedded in a report).
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn command(cmd: Cmd) -> Command {
    match cmd {
        Cmd::Validate => Command::Validate,
        Cmd::Count { b, weight } => Command::Count { b, weight: weight.spec(Kind::Sharp) },
        Cmd::Charsum { q1, q2, m, route } => Command::Charsum { q1, q2, m, route },
        Cmd::Sseries { p_max, depth, bad_modulus } => Command::Sseries { p_max, depth, bad_modulus },
        Cmd::Sintegral { weight, method, grid, samples } => {
            Command::Sintegral { weight: weight.spec(Kind::Smooth), method, grid, samples }
        }
        Cmd::DeltaCheck { q } => Command::DeltaCheck { q },
        Cmd::Decompose { b, level, weight } => Command::Decompose { b, level, weight: weight.spec(Kind::Smooth) },
        Cmd::PoissonCheck { b, q1, q2, a1, a2, weight, m_max, grid } => {
            Command::PoissonCheck { b, q1, q2, a1, a2, weight: weight.spec(Kind::Smooth), m_max, grid }
        }
        Cmd::Survey { kind, q, q_max } => Command::Survey { kind, q, q_max },
        Cmd::Report { weight, b_list, p_max, depth, grid } => {
            Command::Report { weight: weight.spec(Kind::Sharp), b_list, p_max, depth, grid }
        }
        Cmd::Oscint { b, q1, q2, weight, axis, u_min, u_max, steps, panels_per_unit } => Command::Oscint {
            b,
            q1,
            q2,
            weight: weight.spec(Kind::Smooth),
            axis,
            u_min,
            u_max,
            steps,
            panels_per_unit,
        },
        Cmd::Run { .. } => unreachable!("handled before conversion"),
    }
}

fn main_inner(cli: Cli) -> CliResult<()> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::ConfigInvalid(format!("thread pool: {e}")))?;
    }
    let cfg = match cli.command {
        Cmd::Run { config } => load_config(&config)?,
        other => ExperimentConfig {
            pair: cli.pair,
            seed: cli.seed,
            budget: cli.budget,
            count_budget: cli.count_budget,
            command: command(other),
        },
    };
    if cli.dry_run {
        println!("{}", serde_json::to_string_pretty(&cfg).expect("config serialises"));
        return Ok(());
    }
    let t = std::time::Instant::now();
    let mut rep = run(&cfg)?;
    rep.metadata.timings.insert("total_s".into(), t.elapsed().as_secs_f64());
    if let Some(dir) = &cli.out {
        let stem = cli.stem.clone().unwrap_or_else(|| cfg.command.name().to_string());
        let mut written = write_report(&rep, dir, &stem)?;
        if cli.plot {
            written.extend(emit_plots(&rep, dir, &stem)?);
        }
        for p in written {
            eprintln!("wrote {}", p.display());
        }
    } else if cli.plot {
        return Err(CliError::ConfigInvalid("--plot needs --out".into()));
    }
    print!("{}", rep.to_json());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
