//! Experiment configuration, dispatch and plot output for the `qpairs` binary.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use qpairs::charsum::{self, CharSumConfig};
use qpairs::counting::{self, CountConfig};
use qpairs::delta_kernel::{self, DeltaKernel, SurveyGrid};
use qpairs::integrals::{self, CoareaParams, McParams, OscParams};
use qpairs::local_series::{self, SeriesParams};
use qpairs::report::num;
use qpairs::{pairs, BumpSpec, ExperimentReport, PairSpec, QuadricPair, RealBox, WeightFunction, WeightKind};

pub mod plot;

pub use plot::emit_plots;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("{0}")]
    BudgetExceeded(qpairs::Error),
    #[error("{context}: {source}")]
    Upstream {
        context: String,
        #[source]
        source: qpairs::Error,
    },
    #[error("report has no rows")]
    EmptyReport,
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::ConfigInvalid(_) => "ConfigInvalid",
            CliError::BudgetExceeded(_) => "BudgetExceeded",
            CliError::Upstream { .. } => "UpstreamError",
            CliError::EmptyReport => "EmptyReport",
            CliError::Io { .. } => "IoError",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ConfigInvalid(_) => 2,
            CliError::BudgetExceeded(_) => 3,
            CliError::Upstream { .. } | CliError::EmptyReport | CliError::Io { .. } => 1,
        }
    }

    /// One-line JSON for stderr.
    pub fn to_json(&self) -> String {
        json!({ "error": self.kind(), "message": self.to_string() }).to_string()
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub(crate) trait Context<T> {
    fn ctx(self, what: &str) -> CliResult<T>;
}

impl<T> Context<T> for qpairs::Result<T> {
    fn ctx(self, what: &str) -> CliResult<T> {
        self.map_err(|e| match e {
            qpairs::Error::WorkBudgetExceeded { .. } => CliError::BudgetExceeded(e),
            qpairs::Error::EmptyReport => CliError::EmptyReport,
            qpairs::Error::DimensionMismatch { .. } | qpairs::Error::InvalidInput(_) => {
                CliError::ConfigInvalid(format!("{what}: {e}"))
            }
            other => CliError::Upstream { context: what.to_string(), source: other },
        })
    }
}

/// Weight description: a box given by per-axis bounds (one value means a cube).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub kind: WeightKind,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    #[serde(rename = "H")]
    pub h: f64,
}

impl WeightSpec {
    pub fn resolve(&self, pair: &QuadricPair) -> CliResult<WeightFunction> {
        let n = pair.n();
        let widen = |v: &[f64], name: &str| -> CliResult<Vec<f64>> {
            match v.len() {
                1 => Ok(vec![v[0]; n]),
                k if k == n => Ok(v.to_vec()),
                k => Err(CliError::ConfigInvalid(format!("{name} has {k} entries, pair has n = {n}"))),
            }
        };
        let bx = RealBox::new(widen(&self.lo, "lo")?, widen(&self.hi, "hi")?).ctx("box")?;
        integrals::make_weight(pair, self.kind, bx, self.h).ctx("weight")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CharSumRoute {
    Brute,
    Assemble,
    S,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum IntegralMethod {
    Coarea,
    McLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SurveyKind {
    Kernel,
    Charsum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    Validate,
    Count {
        #[serde(rename = "B")]
        b: f64,
        weight: WeightSpec,
    },
    Charsum {
        q1: u64,
        q2: u64,
        m: Vec<i64>,
        route: CharSumRoute,
    },
    Sseries {
        p_max: u64,
        depth: u32,
        bad_modulus: u64,
    },
    Sintegral {
        weight: WeightSpec,
        method: IntegralMethod,
        grid: usize,
        samples: u64,
    },
    DeltaCheck {
        #[serde(rename = "Q")]
        q: f64,
    },
    Decompose {
        #[serde(rename = "B")]
        b: f64,
        level: u8,
        weight: WeightSpec,
    },
    PoissonCheck {
        #[serde(rename = "B")]
        b: f64,
        q1: u64,
        q2: u64,
        a1: i64,
        a2: i64,
        weight: WeightSpec,
        m_max: Option<i64>,
        grid: usize,
    },
    Survey {
        kind: SurveyKind,
        #[serde(rename = "Q")]
        q: f64,
        q_max: u64,
    },
    Report {
        weight: WeightSpec,
        #[serde(rename = "B_list")]
        b_list: Vec<f64>,
        p_max: u64,
        depth: u32,
        grid: usize,
    },
    Oscint {
        #[serde(rename = "B")]
        b: f64,
        q1: u64,
        q2: u64,
        weight: WeightSpec,
        axis: usize,
        u_min: f64,
        u_max: f64,
        steps: usize,
        panels_per_unit: f64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Count { .. } => "count",
            Command::Charsum { .. } => "charsum",
            Command::Sseries { .. } => "sseries",
            Command::Sintegral { .. } => "sintegral",
            Command::DeltaCheck { .. } => "delta-check",
            Command::Decompose { .. } => "decompose",
            Command::PoissonCheck { .. } => "poisson-check",
            Command::Survey { .. } => "survey",
            Command::Report { .. } => "report",
            Command::Oscint { .. } => "oscint",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Path to a pair JSON file, or the name of a shipped pair (n2, n3, n4, n6).
    pub pair: Option<String>,
    pub seed: u64,
    /// Work cap for character sums and local densities.
    pub budget: f64,
    /// Work cap for point enumerations.
    pub count_budget: f64,
    #[serde(flatten)]
    pub command: Command,
}

pub fn load_pair(source: &str) -> CliResult<QuadricPair> {
    if let Some(p) = pairs::by_name(source) {
        return Ok(p);
    }
    let text = fs::read_to_string(source).map_err(|e| CliError::Io { path: source.into(), source: e })?;
    let spec: PairSpec = serde_json::from_str(&text).map_err(|e| CliError::ConfigInvalid(format!("pair file {source}: {e}")))?;
    QuadricPair::from_spec(&spec).ctx("pair")
}

pub fn load_config(path: &Path) -> CliResult<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io { path: path.into(), source: e })?;
    serde_json::from_str(&text).map_err(|e| CliError::ConfigInvalid(format!("{}: {e}", path.display())))
}

fn need_pair(cfg: &ExperimentConfig) -> CliResult<QuadricPair> {
    match &cfg.pair {
        Some(s) => load_pair(s),
        None => Err(CliError::ConfigInvalid(format!("{} needs a pair", cfg.command.name()))),
    }
}

fn b_ok(b: f64) -> CliResult<()> {
    if b.is_finite() && b > 1.0 {
        Ok(())
    } else {
        Err(CliError::ConfigInvalid(format!("B must be a finite number above 1, got {b}")))
    }
}

/// Runs one experiment. The returned report embeds the configuration.
pub fn run(cfg: &ExperimentConfig) -> CliResult<ExperimentReport> {
    let cs = CharSumConfig { budget: cfg.budget };
    let cc = CountConfig { budget: cfg.count_budget };
    let mut rep = match &cfg.command {
        Command::Validate => {
            let pair = need_pair(cfg)?;
            let mut rep = ExperimentReport::new("validate", &["eigenvalue_re", "eigenvalue_im"]);
            for &(re, im) in &pair.locus.eigenvalues {
                rep.push(vec![num(re), num(im)]);
            }
            rep.set("n", pair.n());
            rep.set("det_M2", pair.det_m2);
            rep.set("disc_D", pair.disc_d.to_string());
            rep.set("Delta_V", pair.delta_v.to_string());
            rep.set("bad_prime_B", pair.bad_prime_b);
            rep.set("bad_primes", json!(pair.bad_primes));
            rep.set("real_eigenlines", json!(pair.locus.real_eigenlines));
            rep
        }
        Command::Count { b, weight } => {
            b_ok(*b)?;
            let pair = need_pair(cfg)?;
            let w = weight.resolve(&pair)?;
            let mut rep = ExperimentReport::new("count", &["B", "mode", "value"]);
            if w.kind == WeightKind::SharpBox {
                let c = counting::exact_count(&pair, *b, &w.bx, &cc).ctx("exact_count")?;
                rep.push(vec![num(*b), json!("exact_box"), json!(c)]);
            } else {
                let v = counting::weighted_count(&pair, *b, &w, &cc).ctx("weighted_count")?;
                rep.push(vec![num(*b), json!("weighted"), num(v)]);
            }
            rep
        }
        Command::Charsum { q1, q2, m, route } => {
            let pair = need_pair(cfg)?;
            if *q1 == 0 || *q2 == 0 {
                return Err(CliError::ConfigInvalid("moduli must be positive".into()));
            }
            let v = match route {
                CharSumRoute::Brute => charsum::c_bruteforce(&pair, *q1, *q2, m, &cs),
                CharSumRoute::Assemble => charsum::c_assemble(&pair, *q1, *q2, m, &cs),
                CharSumRoute::S => charsum::s_bruteforce(&pair, *q1, *q2, m, &cs),
            }
            .ctx("charsum")?;
            let mut rep = ExperimentReport::new("charsum", &["q1", "q2", "m", "value", "imag_residual", "method"]);
            rep.push(vec![
                json!(v.q1),
                json!(v.q2),
                json!(v.m),
                num(v.value),
                num(v.imag_residual),
                serde_json::to_value(v.method).expect("method serialises"),
            ]);
            rep
        }
        Command::Sseries { p_max, depth, bad_modulus } => {
            let pair = need_pair(cfg)?;
            let params = SeriesParams { p_max: *p_max, depth: *depth, bad_modulus: *bad_modulus };
            let est = local_series::singular_series(&pair, &params, &cs).ctx("singular_series")?;
            let mut rep = ExperimentReport::new("sseries", &["p", "depth", "factor", "last_shell"]);
            for f in &est.factors {
                rep.push(vec![json!(f.p), json!(f.depth_k), num(f.value), num(f.last_term_magnitude)]);
            }
            rep.set("value", num(est.value));
            rep.set("value_descending", num(est.value_descending));
            rep.set("tail_heuristic", num(est.tail_heuristic));
            rep.set("bad_primes", json!(est.bad_primes));
            for w in est.warnings {
                rep.warn(w);
            }
            rep
        }
        Command::Sintegral { weight, method, grid, samples } => {
            let pair = need_pair(cfg)?;
            let w = weight.resolve(&pair)?;
            let est = match method {
                IntegralMethod::Coarea => integrals::singular_integral_coarea(&pair, &w, &CoareaParams { grid: *grid }),
                IntegralMethod::McLimit => integrals::singular_integral_limit(
                    &pair,
                    &w,
                    &McParams { samples: *samples, seed: cfg.seed, ..McParams::default() },
                ),
            }
            .ctx("singular integral")?;
            let mut rep = ExperimentReport::new("sintegral", &["eps", "estimate"]);
            for &(e, v) in &est.eps_schedule {
                rep.push(vec![num(e), num(v)]);
            }
            rep.set("J0", num(est.value));
            rep.set("error", num(est.stderr));
            rep.set("method", serde_json::to_value(est.method).expect("method serialises"));
            if let Some(j) = est.min_chart_jacobian {
                rep.set("min_chart_jacobian", num(j));
            }
            rep
        }
        Command::DeltaCheck { q } => {
            let k = DeltaKernel::new(*q).ctx("delta kernel")?;
            let lim = (q * q).floor() as i64;
            let mut rep = ExperimentReport::new("delta_check", &["n", "residual"]);
            let mut worst: f64 = 0.0;
            for n in -lim..=lim {
                let want = if n == 0 { 1.0 } else { 0.0 };
                let r = delta_kernel::reconstruct_delta(&k, n) - want;
                worst = worst.max(r.abs());
                rep.push(vec![json!(n), num(r)]);
            }
            rep.set("c_Q", num(k.c_q));
            rep.set("max_abs_residual", num(worst));
            rep
        }
        Command::Decompose { b, level, weight } => {
            b_ok(*b)?;
            let pair = need_pair(cfg)?;
            let w = weight.resolve(&pair)?;
            let trace = counting::nested_count(&pair, *b, &w, *level, &cc).ctx("nested_count")?;
            let reference = counting::weighted_count(&pair, *b, &w, &cc).ctx("weighted_count")?;
            let mut rep = ExperimentReport::new("decompose", &["q1", "partial_sum"]);
            for &(q1, v) in &trace.per_q1 {
                rep.push(vec![json!(q1), num(v)]);
            }
            rep.set("total", num(trace.total));
            rep.set("weighted_count", num(reference));
            rep.set("relative_error", num((trace.total - reference).abs() / reference.abs().max(1e-300)));
            rep.set("c_B", num(trace.c_b));
            if let Some(c) = trace.c_sqrt_b {
                rep.set("c_sqrtB", num(c));
            }
            rep.set("q1_cutoff", trace.q1_cutoff);
            if let Some(c) = trace.q2_cutoff {
                rep.set("q2_cutoff", c);
            }
            rep.set("c1", num(trace.nominal_c1));
            rep.set("mass_beyond_c1B_2sqrtB", num(trace.mass_beyond_nominal_cutoffs));
            rep
        }
        Command::PoissonCheck { b, q1, q2, a1, a2, weight, m_max, grid } => {
            b_ok(*b)?;
            let pair = need_pair(cfg)?;
            let w = weight.resolve(&pair)?;
            let r = counting::poisson_check(&pair, (*q1, *q2), (*a1, *a2), *b, &w, &BumpSpec::standard(), *m_max, *grid)
                .ctx("poisson_check")?;
            let mut rep = ExperimentReport::new("poisson_check", &["side", "re", "im"]);
            rep.push(vec![json!("direct"), num(r.direct.re), num(r.direct.im)]);
            rep.push(vec![json!("dual"), num(r.dual.re), num(r.dual.im)]);
            rep.set("relative_gap", num(r.relative_gap()));
            rep.set("quadrature_error", num(r.quadrature_error));
            rep.set("truncation_tail", num(r.truncation_tail));
            rep.set("M", r.m_max);
            rep
        }
        Command::Survey { kind, q, q_max } => match kind {
            SurveyKind::Kernel => {
                let k = DeltaKernel::new(*q).ctx("delta kernel")?;
                delta_kernel::h_bound_survey(&k, &SurveyGrid::default())
            }
            SurveyKind::Charsum => {
                let pair = need_pair(cfg)?;
                let n = pair.n();
                let ms: Vec<Vec<i64>> = (0..4i64).map(|k| (0..n as i64).map(|i| (k * (i + 2)) % 7 - 3).collect()).collect();
                charsum::bound_survey(&pair, *q_max, &ms, &cs).ctx("bound_survey")?
            }
        },
        Command::Report { weight, b_list, p_max, depth, grid } => {
            for &b in b_list {
                b_ok(b)?;
            }
            let pair = need_pair(cfg)?;
            let w = weight.resolve(&pair)?;
            let series = SeriesParams { p_max: *p_max, depth: *depth, ..SeriesParams::default() };
            counting::asymptotic_report(&pair, &w, b_list, &series, &CoareaParams { grid: *grid }, &cs, &cc)
                .ctx("asymptotic_report")?
        }
        Command::Oscint { b, q1, q2, weight, axis, u_min, u_max, steps, panels_per_unit } => {
            b_ok(*b)?;
            let pair = need_pair(cfg)?;
            if *axis >= pair.n() || *steps < 2 || !(u_min > &0.0 && u_max > u_min) {
                return Err(CliError::ConfigInvalid("need axis < n, steps ≥ 2 and 0 < u_min < u_max".into()));
            }
            let w = weight.resolve(&pair)?;
            let amp = integrals::Amplitude { pair: &pair, bump: BumpSpec::standard(), weight: &w, q1: *q1, q2: *q2, b: *b };
            let mut umax = vec![0.0; pair.n()];
            umax[*axis] = *u_max;
            let osc = OscParams { panels_per_unit: *panels_per_unit, ..OscParams::default() };
            let (coarse, fine) = integrals::sample_amplitude_pair(&amp, &umax, &osc).ctx("oscillatory sampling")?;
            let us: Vec<f64> =
                (0..*steps).map(|k| u_min * (u_max / u_min).powf(k as f64 / (*steps - 1) as f64)).collect();
            let pf = integrals::axis_profile(&fine, *axis, &us);
            let pc = integrals::axis_profile(&coarse, *axis, &us);
            let half_n = pair.n() as f64 / 2.0;
            let mut rep = ExperimentReport::new("oscint", &["u", "abs_I", "scaled", "quad_error"]);
            let mut best = (0.0, 0.0);
            for ((u, f), c) in us.iter().zip(&pf).zip(&pc) {
                let s = f.norm() * u.powf(half_n);
                if s > best.1 {
                    best = (*u, s);
                }
                rep.push(vec![num(*u), num(f.norm()), num(s), num((f - c).norm())]);
            }
            rep.set("max_scaled", num(best.1));
            rep.set("argmax_u", num(best.0));
            rep.set("exponent", num(half_n));
            rep
        }
    };
    rep.metadata.config = serde_json::to_value(cfg).expect("config serialises");
    rep.metadata.seed = Some(cfg.seed);
    Ok(rep)
}

/// Writes `<stem>.json` and `<stem>.csv` into `dir`.
pub fn write_report(rep: &ExperimentReport, dir: &Path, stem: &str) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io { path: dir.into(), source: e })?;
    let mut out = Vec::new();
    for (ext, body) in [("json", rep.to_json()), ("csv", rep.to_csv())] {
        let path = dir.join(format!("{stem}.{ext}"));
        fs::write(&path, body).map_err(|e| CliError::Io { path: path.clone(), source: e })?;
        out.push(path);
    }
    Ok(out)
}

/// The configuration embedded in a report.
pub fn embedded_config(rep: &ExperimentReport) -> CliResult<ExperimentConfig> {
    serde_json::from_value::<ExperimentConfig>(rep.metadata.config.clone())
        .map_err(|e| CliError::ConfigInvalid(format!("embedded config: {e}")))
}

/// Summary value as JSON, for quick inspection in tests and scripts.
pub fn summary(rep: &ExperimentReport, key: &str) -> Option<Value> {
    rep.summary.get(key).cloned()
}
