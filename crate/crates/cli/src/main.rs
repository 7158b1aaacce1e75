use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lpdecode::bounds::{
    bsc_threshold, eb_n0_db, error_bound_with, general_error_bound, mbios_condition,
    mbios_condition_nonuniform, preset_levels, sigma0_search_with, uniform_condition,
    uniform_threshold, NonUniformCondition, QuantConfig, Regime,
};
use lpdecode::channel::{Channel, LlrVector};
use lpdecode::density::{evolve_levels, DEFAULT_TRIM_MASS};
use lpdecode::deviation::{certify_local_optimality, Certificate, WeightVector};
use lpdecode::lp::{LpDecoder, LpMode};
use lpdecode::sim::{simulate_lp, simulate_tree_process, LpSimOptions};
use lpdecode::tanner::{build_regular_graph, Codeword, TannerGraph};
use lpdecode::Error;

/// Reference (s, σ₀, Eb/N0 dB) values for (3,6)-regular codes.
const TABLE1_REFERENCE: [(usize, f64, f64); 12] = [
    (0, 0.605, 4.36),
    (1, 0.635, 3.94),
    (2, 0.66, 3.60),
    (3, 0.675, 3.41),
    (4, 0.685, 3.28),
    (6, 0.7, 3.09),
    (8, 0.71, 2.97),
    (10, 0.715, 2.91),
    (12, 0.72, 2.85),
    (14, 0.725, 2.79),
    (18, 0.73, 2.73),
    (22, 0.735, 2.67),
];

/// Rows computed by `table1` unless `--all` is given.
const TABLE1_DEFAULT_ROWS: [usize; 7] = [0, 1, 2, 3, 4, 6, 8];

#[derive(Parser, Debug, Serialize)]
#[command(name = "lpdecode", version, about = "LP decoding of regular LDPC codes: certificates, density evolution and error bounds")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Serialize)]
struct GlobalOpts {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Base quantization step in LLR units.
    #[arg(long, global = true, default_value_t = lpdecode::density::DEFAULT_DELTA)]
    quant_delta: f64,
    /// Grid half-width around the mean, in noise deviations.
    #[arg(long, global = true, default_value_t = lpdecode::density::DEFAULT_SPAN_SIGMAS)]
    quant_span_sigmas: f64,
    /// Mass that may be truncated from a density before an error is raised.
    #[arg(long, global = true, default_value_t = lpdecode::density::DEFAULT_TAIL_TOLERANCE)]
    tail_tol: f64,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
enum Command {
    /// Build a random (d_L, d_R)-regular Tanner graph.
    GenGraph {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        dl: usize,
        #[arg(long)]
        dr: usize,
        /// Minimum girth.
        #[arg(long, default_value_t = 6)]
        girth: usize,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Transmit the all-zero codeword and LP-decode; one JSON line per trial.
    Decode {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        channel: Channel,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Float)]
        mode: ModeArg,
    },
    /// Check (T, w)-local optimality of a codeword. Exit 0 if certified, 1 if refuted.
    Certify {
        #[arg(long)]
        graph: PathBuf,
        /// Whitespace-separated LLR values.
        #[arg(long)]
        llr: PathBuf,
        /// Codeword bits (0/1, optionally whitespace-separated).
        #[arg(long)]
        word: PathBuf,
        #[arg(long = "T", default_value_t = 1)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = Preset::Uniform)]
        weights: Preset,
    },
    /// Threshold search: σ₀ for the BI-AWGN channel, p for the BSC.
    Threshold {
        #[arg(long, default_value_t = 3)]
        dl: usize,
        #[arg(long, default_value_t = 6)]
        dr: usize,
        /// Prefix length; ignored with `--regime uniform`.
        #[arg(long, default_value_t = 0)]
        s: usize,
        #[arg(long, value_enum, default_value_t = ChannelKind::Biawgn)]
        channel: ChannelKind,
        #[arg(long, value_enum, default_value_t = RegimeArg::Nonuniform)]
        regime: RegimeArg,
        #[arg(long, value_enum, default_value_t = Preset::Geometric)]
        weights: Preset,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Word-error probability bound as JSON.
    Bound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        girth: usize,
        #[arg(long)]
        sigma: f64,
        #[arg(long, default_value_t = 3)]
        dl: usize,
        #[arg(long, default_value_t = 6)]
        dr: usize,
        #[arg(long, default_value_t = 0)]
        s: usize,
        #[arg(long, value_enum, default_value_t = RegimeArg::Nonuniform)]
        regime: RegimeArg,
    },
    /// CSV of the quantized densities of Y_l and X_l, l = 0..=s.
    Densities {
        #[arg(long, default_value_t = 3)]
        dl: usize,
        #[arg(long, default_value_t = 6)]
        dr: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        channel: Channel,
        #[arg(long, value_enum, default_value_t = Preset::Geometric)]
        weights: Preset,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CSV of ln E e^{-t X_s} against t.
    LaplaceCurve {
        #[arg(long, default_value_t = 3)]
        dl: usize,
        #[arg(long, default_value_t = 6)]
        dr: usize,
        /// Levels, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        s: Vec<usize>,
        #[arg(long)]
        channel: Channel,
        #[arg(long, value_enum, default_value_t = Preset::Geometric)]
        weights: Preset,
        #[arg(long, default_value_t = 0.5)]
        t_max: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo estimate of the tree-process or LP failure probability.
    Simulate {
        #[arg(long, value_enum)]
        mode: SimMode,
        #[arg(long)]
        channel: Channel,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 3)]
        dl: usize,
        #[arg(long, default_value_t = 6)]
        dr: usize,
        /// Tree depth (tree mode) or certificate depth (lp mode, 0 = no certificate).
        #[arg(long = "T", default_value_t = 2)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = Preset::Geometric)]
        weights: Preset,
        /// Graph file (lp mode).
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ModeArg::Float)]
        lp_mode: ModeArg,
    },
    /// σ₀ for (3,6)-regular codes next to the reference table.
    Table1 {
        /// Largest s to compute.
        #[arg(long, default_value_t = 8)]
        max_s: usize,
        /// Include every reference row up to `--max-s`, not just 0..4, 6, 8.
        #[arg(long)]
        all: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ModeArg {
    Exact,
    Float,
}

impl From<ModeArg> for LpMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => LpMode::Exact,
            ModeArg::Float => LpMode::Float,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Preset {
    Uniform,
    Geometric,
}

impl Preset {
    fn name(self) -> &'static str {
        match self {
            Preset::Uniform => "uniform",
            Preset::Geometric => "geometric",
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, PartialEq)]
#[serde(rename_all = "lowercase")]
enum ChannelKind {
    Biawgn,
    Bsc,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, PartialEq)]
#[serde(rename_all = "lowercase")]
enum RegimeArg {
    Uniform,
    Nonuniform,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum SimMode {
    Tree,
    Lp,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, PartialEq)]
#[serde(rename_all = "lowercase")]
enum Format {
    Text,
    Json,
    Csv,
}

/// Exit 2 for bad input, 1 for a failure of the computation itself.
enum Failure {
    Usage(String),
    Domain(String),
    Refuted,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_)
            | Error::Parse(_)
            | Error::LengthMismatch { .. }
            | Error::NotACodeword
            | Error::DegreeTooLarge(_)
            | Error::GirthViolation { .. }
            | Error::GirthTooSmallForS { .. }
            | Error::Io(_) => Failure::Usage(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Refuted) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn quant(g: &GlobalOpts) -> CliResult<QuantConfig> {
    let positive = |name: &str, v: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Failure::Usage(format!("--{name} must be positive, got {v}")))
        }
    };
    positive("quant-delta", g.quant_delta)?;
    positive("quant-span-sigmas", g.quant_span_sigmas)?;
    positive("tail-tol", g.tail_tol)?;
    Ok(QuantConfig {
        delta: g.quant_delta,
        span_sigmas: g.quant_span_sigmas,
        tail_tolerance: g.tail_tol,
        trim_mass: DEFAULT_TRIM_MASS,
    })
}

fn run(cli: &Cli) -> CliResult<()> {
    let q = quant(&cli.global)?;
    if let Some(k) = cli.global.threads {
        if k == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| Failure::Domain(e.to_string()))?;
    }
    eprintln!("# config {}", serde_json::to_string(cli)?);
    let seed = cli.global.seed;
    match &cli.command {
        Command::GenGraph { n, dl, dr, girth, out } => {
            let g = build_regular_graph(*n, *dl, *dr, *girth, seed)?;
            emit(out.as_deref(), &g.to_text())
        }
        Command::Decode {
            graph,
            channel,
            trials,
            mode,
        } => decode(&read_graph(graph)?, channel, *trials, (*mode).into(), seed),
        Command::Certify {
            graph,
            llr,
            word,
            depth,
            weights,
        } => certify(&read_graph(graph)?, llr, word, *depth, *weights),
        Command::Threshold {
            dl,
            dr,
            s,
            channel,
            regime,
            weights,
            format,
        } => threshold(*dl, *dr, *s, *channel, *regime, *weights, *format, q),
        Command::Bound {
            n,
            girth,
            sigma,
            dl,
            dr,
            s,
            regime,
        } => {
            let b = match regime {
                RegimeArg::Uniform => general_error_bound(&uniform_condition(*sigma, *dl, *dr)?, *n, *girth)?,
                RegimeArg::Nonuniform => {
                    let cond = NonUniformCondition::new(*dl, *dr, *s, "geometric", q)?;
                    error_bound_with(*n, *girth, *sigma, &cond)?
                }
            };
            println!("{}", serde_json::to_string_pretty(&b)?);
            Ok(())
        }
        Command::Densities {
            dl,
            dr,
            s,
            channel,
            weights,
            out,
        } => {
            let omegas = preset_levels(weights.name(), *s, *dl)?;
            let base = q.base_density(channel)?;
            let levels = evolve_levels(&base, &omegas, *dl, *dr, &q.evolve_options(channel))?;
            let mut csv = String::from("level,variable,x,pdf\n");
            for (l, level) in levels.iter().enumerate() {
                for (name, d) in [("Y", &level.y), ("X", &level.x)] {
                    for (x, p) in d.points() {
                        csv.push_str(&format!("{l},{name},{x},{}\n", p / d.delta()));
                    }
                }
            }
            emit(out.as_deref(), &csv)
        }
        Command::LaplaceCurve {
            dl,
            dr,
            s,
            channel,
            weights,
            t_max,
            points,
            out,
        } => {
            if *points < 2 || !(*t_max > 0.0) {
                return Err(Failure::Usage("need --points >= 2 and --t-max > 0".into()));
            }
            let base = q.base_density(channel)?;
            let mut csv = String::from("s,t,ln_laplace\n");
            for &level in s {
                let omegas = preset_levels(weights.name(), level, *dl)?;
                let x = lpdecode::density::evolve(&base, &omegas, *dl, *dr, &q.evolve_options(channel))?;
                for i in 0..*points {
                    let t = t_max * i as f64 / (*points - 1) as f64;
                    csv.push_str(&format!("{level},{t},{}\n", x.ln_laplace(t)));
                }
            }
            emit(out.as_deref(), &csv)
        }
        Command::Simulate {
            mode,
            channel,
            trials,
            dl,
            dr,
            depth,
            weights,
            graph,
            lp_mode,
        } => match mode {
            SimMode::Tree => {
                let wv = WeightVector::preset(weights.name(), *depth, *dl)?;
                let r = simulate_tree_process(*dl, *dr, &wv, channel, *trials, seed)?;
                println!("{}", serde_json::to_string(&r)?);
                Ok(())
            }
            SimMode::Lp => {
                let path = graph
                    .as_ref()
                    .ok_or_else(|| Failure::Usage("--graph is required with --mode lp".into()))?;
                let g = read_graph(path)?;
                let d_l = g.var_neighbors(0).len();
                let opts = LpSimOptions {
                    mode: (*lp_mode).into(),
                    certify: match depth {
                        0 => None,
                        t => Some(WeightVector::preset(weights.name(), *t, d_l)?),
                    },
                };
                let r = simulate_lp(&g, channel, *trials, seed, &opts)?;
                println!("{}", serde_json::to_string(&r)?);
                Ok(())
            }
        },
        Command::Table1 { max_s, all, format } => table1(*max_s, *all, *format, q),
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn read_graph(path: &Path) -> CliResult<TannerGraph> {
    Ok(fs::read_to_string(path)?.parse()?)
}

fn read_llr(path: &Path) -> CliResult<LlrVector> {
    let values = fs::read_to_string(path)?
        .split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Failure::Usage(format!("bad LLR value `{t}`")))
        })
        .collect::<CliResult<Vec<f64>>>()?;
    Ok(LlrVector::new(values)?)
}

fn read_word(path: &Path) -> CliResult<Vec<u8>> {
    fs::read_to_string(path)?
        .chars()
        .filter(|c| !c.is_whitespace() && *c != ',')
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Failure::Usage(format!("bad bit `{other}` in word file"))),
        })
        .collect()
}

#[derive(Serialize)]
struct DecodeLine {
    trial: u64,
    integral: bool,
    unique: bool,
    failed: bool,
}

fn decode(g: &TannerGraph, ch: &Channel, trials: u64, mode: LpMode, seed: u64) -> CliResult<()> {
    let dec = LpDecoder::new(g, mode)?;
    let zero = Codeword::zero(g.n());
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for trial in 0..trials {
        let y = ch.sample(&zero, seed.wrapping_add(trial));
        let sol = dec.decode_robust(&ch.llr(&y))?;
        let line = DecodeLine {
            trial,
            integral: sol.is_integral,
            unique: sol.is_unique,
            failed: !sol.decoded(zero.bits()),
        };
        writeln!(out, "{}", serde_json::to_string(&line)?)?;
    }
    Ok(())
}

fn certify(g: &TannerGraph, llr: &Path, word: &Path, depth: usize, weights: Preset) -> CliResult<()> {
    let lambda = read_llr(llr)?;
    let x = Codeword::new(g, read_word(word)?)?;
    let d_l = g.var_neighbors(0).len();
    let wv = WeightVector::preset(weights.name(), depth, d_l)?;
    let cert = certify_local_optimality(g, &x, &lambda, &wv)?;
    println!("{}", serde_json::to_string(&cert)?);
    match cert {
        Certificate::Certified => Ok(()),
        Certificate::Refuted { .. } => Err(Failure::Refuted),
    }
}

#[allow(clippy::too_many_arguments)]
fn threshold(
    dl: usize,
    dr: usize,
    s: usize,
    channel: ChannelKind,
    regime: RegimeArg,
    weights: Preset,
    format: Format,
    q: QuantConfig,
) -> CliResult<()> {
    #[derive(Serialize)]
    struct Row {
        channel: ChannelKind,
        regime: Regime,
        d_l: usize,
        d_r: usize,
        threshold: f64,
        threshold_raw: f64,
        eb_n0_db: Option<f64>,
        c: Option<f64>,
        t_star: Option<f64>,
        rho: Option<f64>,
    }
    let regime_v = match regime {
        RegimeArg::Uniform => Regime::Uniform,
        RegimeArg::Nonuniform => Regime::NonUniform { s },
    };
    let row = match (channel, regime) {
        (ChannelKind::Biawgn, RegimeArg::Nonuniform) => {
            let r = sigma0_search_with(dl, dr, s, weights.name(), q)?;
            Row {
                channel,
                regime: regime_v,
                d_l: dl,
                d_r: dr,
                threshold: r.sigma0,
                threshold_raw: r.sigma0_raw,
                eb_n0_db: Some(r.eb_n0_db),
                c: Some(r.report.c),
                t_star: Some(r.report.t_star),
                rho: r.report.rho,
            }
        }
        (ChannelKind::Biawgn, RegimeArg::Uniform) => {
            let sigma = uniform_threshold(dl, dr, 1e-4)?;
            let r = uniform_condition(sigma, dl, dr)?;
            Row {
                channel,
                regime: regime_v,
                d_l: dl,
                d_r: dr,
                threshold: sigma,
                threshold_raw: sigma,
                eb_n0_db: Some(eb_n0_db(sigma, dl, dr)),
                c: Some(r.c),
                t_star: Some(r.t_star),
                rho: None,
            }
        }
        (ChannelKind::Bsc, _) => {
            let p = bsc_threshold(dl, dr, regime_v, 1e-5)?;
            let ch = Channel::bsc(p)?;
            let base = q.base_density(&ch)?;
            let r = match regime_v {
                Regime::Uniform => mbios_condition(&base, dl, dr)?,
                Regime::NonUniform { s } => mbios_condition_nonuniform(
                    &base,
                    &preset_levels(weights.name(), s, dl)?,
                    dl,
                    dr,
                    &q.evolve_options(&ch),
                )?,
            };
            Row {
                channel,
                regime: regime_v,
                d_l: dl,
                d_r: dr,
                threshold: p,
                threshold_raw: p,
                eb_n0_db: None,
                c: Some(r.c),
                t_star: Some(r.t_star),
                rho: None,
            }
        }
    };
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&row)?),
        Format::Csv => {
            println!("threshold,threshold_raw,eb_n0_db");
            println!(
                "{},{},{}",
                row.threshold,
                row.threshold_raw,
                row.eb_n0_db.map(|v| v.to_string()).unwrap_or_default()
            );
        }
        Format::Text => match row.eb_n0_db {
            Some(db) => println!(
                "sigma0 = {:.3} (bisection midpoint {:.4}), Eb/N0 = {db:.2} dB",
                row.threshold, row.threshold_raw
            ),
            None => println!("p = {:.4}", row.threshold),
        },
    }
    Ok(())
}

fn table1(max_s: usize, all: bool, format: Format, q: QuantConfig) -> CliResult<()> {
    #[derive(Serialize)]
    struct Row {
        s: usize,
        sigma0: f64,
        sigma0_raw: f64,
        eb_n0_db: f64,
        reference_sigma0: f64,
        reference_eb_n0_db: f64,
    }
    let mut rows = Vec::new();
    for &(s, ref_sigma, ref_db) in TABLE1_REFERENCE.iter() {
        if s > max_s || !(all || TABLE1_DEFAULT_ROWS.contains(&s)) {
            continue;
        }
        let r = sigma0_search_with(3, 6, s, "geometric", q)?;
        rows.push(Row {
            s,
            sigma0: r.sigma0,
            sigma0_raw: r.sigma0_raw,
            eb_n0_db: r.eb_n0_db,
            reference_sigma0: ref_sigma,
            reference_eb_n0_db: ref_db,
        });
    }
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&rows)?),
        Format::Csv => {
            println!("s,sigma0,sigma0_raw,eb_n0_db,reference_sigma0,reference_eb_n0_db");
            for r in &rows {
                println!(
                    "{},{},{},{},{},{}",
                    r.s, r.sigma0, r.sigma0_raw, r.eb_n0_db, r.reference_sigma0, r.reference_eb_n0_db
                );
            }
        }
        Format::Text => {
            println!(
                "{:>3}  {:>7}  {:>9}  {:>7}  {:>9}  {:>7}",
                "s", "sigma0", "Eb/N0 dB", "ref", "ref dB", "diff"
            );
            for r in &rows {
                println!(
                    "{:>3}  {:>7.3}  {:>9.2}  {:>7.3}  {:>9.2}  {:>+7.4}",
                    r.s,
                    r.sigma0,
                    r.eb_n0_db,
                    r.reference_sigma0,
                    r.reference_eb_n0_db,
                    r.sigma0_raw - r.reference_sigma0
                );
            }
        }
    }
    Ok(())
}
