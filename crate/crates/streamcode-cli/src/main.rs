//! Command-line front end: channel analytics, bound tables, streaming
//! simulations and schedule dumps.
//!
//! Exit codes: 0 success, 2 configuration error, 3 runtime cap exceeded.

mod config;
mod output;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use config::{parse_channel, DistKeyword, ExperimentConfig, RhoKeyword, RhoSpec};
use serde::Serialize;
use std::path::PathBuf;
use streamcode::bounds::{self, ExponentVariant, QSumTerms};
use streamcode::channel::{capacity, BA_DEFAULT_MAX_ITER, BA_DEFAULT_TOL};
use streamcode::codec::CodecError;
use streamcode::schedule::{self, Scheme, StreamParams};
use streamcode::sim::{self, SimError};
use streamcode::InputDist;

const EXIT_CONFIG: i32 = 2;
const EXIT_RUNTIME_CAP: i32 = 3;

#[derive(Parser)]
#[command(name = "streamcode", version, about = "Streaming channel-code analytics and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Capacity, dispersion and the capacity-achieving input of a channel.
    Analyze(AnalyzeArgs),
    /// Tabulate the Q-sum constant and related bound quantities over a grid.
    Bounds(BoundsArgs),
    /// Run a Monte Carlo streaming experiment from a config file.
    Simulate(SimulateArgs),
    /// Dump encode spans and decode plans for a block range.
    Schedule(ScheduleArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Channel spec: bsc:P, bec:E, identity:K, or a JSON matrix file.
    #[arg(long)]
    channel: String,
    /// Blahut-Arimoto bracket tolerance.
    #[arg(long, default_value_t = BA_DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = BA_DEFAULT_MAX_ITER)]
    max_iter: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    /// mu grid as lo:step:hi (mu = L/sqrt(V)).
    #[arg(long, default_value = "0.5:0.25:5")]
    mu: String,
    /// T grid as lo:hi.
    #[arg(long, default_value = "1:5")]
    t: String,
    /// Optional exponent-target column: variant name.
    #[arg(long)]
    variant: Option<String>,
    /// Dispersion V for the target column.
    #[arg(long)]
    v: Option<f64>,
    /// Block length for the target column.
    #[arg(long)]
    n: Option<u64>,
    /// Rate gap for the target column.
    #[arg(long)]
    rho: Option<f64>,
    /// Erasure tuning for the target column.
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Experiment config (JSON). Flags below override its fields.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    horizon: Option<u64>,
    /// Worker thread cap (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// json or csv.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct ScheduleArgs {
    /// Scheme name: md_infinite, cl_truncated, erasure, vardelay, alternating.
    #[arg(long)]
    scheme: String,
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    m: u64,
    #[arg(long, default_value_t = 2)]
    t: u32,
    #[arg(long)]
    a: Option<u32>,
    #[arg(long)]
    b: Option<u32>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    d_max: Option<u32>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    /// Block range as lo:hi.
    #[arg(long, default_value = "1:20")]
    blocks: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Schedule(a) => cmd_schedule(a),
    };
    if let Err(err) = result {
        let code = classify_exit(&err);
        let payload = serde_json::json!({
            "error": format!("{err:#}"),
            "exit_code": code,
        });
        eprintln!("{payload}");
        std::process::exit(code);
    }
}

/// Cap-style runtime failures exit 3; everything else is a config error.
fn classify_exit(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(c) = cause.downcast_ref::<CodecError>() {
            if matches!(c, CodecError::SearchCapExceeded { .. }) {
                return EXIT_RUNTIME_CAP;
            }
        }
        if let Some(s) = cause.downcast_ref::<SimError>() {
            match s {
                SimError::StateSpaceExceeded { .. } | SimError::MessageSpaceExceeded { .. } => {
                    return EXIT_RUNTIME_CAP
                }
                SimError::Codec(CodecError::SearchCapExceeded { .. }) => return EXIT_RUNTIME_CAP,
                _ => {}
            }
        }
    }
    EXIT_CONFIG
}

#[derive(Serialize)]
struct AnalyzeReport {
    channel: String,
    inputs: usize,
    outputs: usize,
    capacity_nats: f64,
    capacity_bits: f64,
    dispersion_nats2: f64,
    u_var_nats2: f64,
    mutual_info_nats: f64,
    ba_bracket: f64,
    ba_iterations: usize,
    p_star: Vec<f64>,
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<()> {
    let ch = parse_channel(&args.channel)?;
    let r = capacity(&ch, args.tol, args.max_iter).context("capacity computation failed")?;
    let report = AnalyzeReport {
        channel: args.channel.clone(),
        inputs: ch.inputs(),
        outputs: ch.outputs(),
        capacity_nats: r.capacity,
        capacity_bits: r.capacity / std::f64::consts::LN_2,
        dispersion_nats2: r.dispersion,
        u_var_nats2: r.measures.u_var,
        mutual_info_nats: r.measures.mutual_info,
        ba_bracket: r.bracket,
        ba_iterations: r.iterations,
        p_star: r.p_star.probs().to_vec(),
    };
    output::emit_json(&report, args.out.as_deref())
}

fn cmd_bounds(args: BoundsArgs) -> Result<()> {
    let mus = parse_float_grid(&args.mu)?;
    let ts = parse_int_range(&args.t)?;
    let variant = args
        .variant
        .as_deref()
        .map(parse_variant)
        .transpose()?;
    let mut table = String::from("mu,t,c_llt,q,qsum,bound,target\n");
    for &mu in &mus {
        for &t in &ts {
            let c = bounds::c_llt(mu, t)?;
            let q = bounds::q_func(mu * (t as f64).sqrt());
            let qsum = bounds::q_sum(mu, t, QSumTerms::Auto)?;
            let target = match variant {
                Some(v) => {
                    let (vv, n, rho) = (
                        args.v.ok_or_else(|| anyhow!("--variant needs --v"))?,
                        args.n.ok_or_else(|| anyhow!("--variant needs --n"))?,
                        args.rho.ok_or_else(|| anyhow!("--variant needs --rho"))?,
                    );
                    format!(
                        "{}",
                        bounds::md_exponent_target(vv, t, v, args.gamma, n, rho)?
                    )
                }
                None => String::new(),
            };
            table.push_str(&format!("{mu},{t},{c},{q},{qsum},{},{target}\n", c * q));
        }
    }
    output::emit_text(&table, args.out.as_deref())
}

fn parse_variant(s: &str) -> Result<ExponentVariant> {
    Ok(match s {
        "basic" => ExponentVariant::Basic,
        "erasure_total" => ExponentVariant::ErasureTotal,
        "erasure_undetected" => ExponentVariant::ErasureUndetected,
        "vardelay" => ExponentVariant::VarDelay,
        "alt_odd" => ExponentVariant::AltOdd,
        "alt_even" => ExponentVariant::AltEven,
        other => bail!("unknown exponent variant '{other}'"),
    })
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let raw = std::fs::read_to_string(&args.config)
        .with_context(|| format!("cannot read config {}", args.config.display()))?;
    let mut cfg: ExperimentConfig =
        serde_json::from_str(&raw).context("config does not match the experiment schema")?;
    // Flags win over config fields.
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(h) = args.horizon {
        cfg.horizon = h;
    }
    if let Some(fmt) = &args.format {
        cfg.format = fmt.clone();
    }
    if let Some(threads) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("thread pool already configured")?;
    }
    let report = run_experiment(&cfg)?;
    match cfg.format.as_str() {
        "json" => output::emit_json(&report, args.out.as_deref()),
        "csv" => output::emit_text(&output::flatten_csv(&report), args.out.as_deref()),
        other => bail!("config field 'format': unknown format '{other}' (json or csv)"),
    }
}

#[derive(Serialize)]
struct SimulateReport {
    config: ExperimentConfig,
    params: StreamParams,
    capacity_nats: f64,
    dispersion_nats2: f64,
    seeds: Vec<u64>,
    per_k: Vec<sim::MessageStats>,
    aggregate: sim::Aggregate,
    members: Vec<sim::TrialStats>,
    bounds: Vec<sim::BoundRow>,
    ensemble_bounds: Vec<sim::EnsembleRow>,
    oracle: Vec<OracleRow>,
    prf_version: String,
}

#[derive(Serialize)]
struct OracleRow {
    k: u64,
    exact: sim::ExactOutcome,
    empirical: f64,
    consistent_3_sigma: bool,
}

fn run_experiment(cfg: &ExperimentConfig) -> Result<SimulateReport> {
    let ch = parse_channel(&cfg.channel)?;
    let analysis = capacity(&ch, BA_DEFAULT_TOL, BA_DEFAULT_MAX_ITER)
        .context("channel capacity computation failed")?;
    let dist = match &cfg.input_dist {
        config::InputDistSpec::Keyword(DistKeyword::Capacity) => analysis.p_star.clone(),
        config::InputDistSpec::Explicit(p) => {
            InputDist::new(p.clone()).context("config field 'input_dist' is invalid")?
        }
    };
    let mut params = StreamParams::new(cfg.n, cfg.m, cfg.t, cfg.scheme)
        .context("config fields (n, m, t, scheme) are inconsistent")?;
    match cfg.rho_n {
        None => {}
        Some(RhoSpec::Value(r)) => params = params.with_rho(r).context("config field 'rho_n'")?,
        Some(RhoSpec::Keyword(RhoKeyword::CapacityGap)) => {
            let rho = analysis.capacity - params.ln_m() / cfg.n as f64;
            params = params.with_rho(rho).context("config field 'rho_n'")?;
        }
    }
    if matches!(
        params.scheme,
        Scheme::Erasure { .. } | Scheme::VarDelay { .. }
    ) && params.rho_n.is_none()
    {
        bail!("config field 'rho_n': required by the {} scheme", params.scheme.name());
    }
    params.validate().context("config fields do not satisfy the scheme invariants")?;

    let members_n = cfg.codebook_seeds.max(1);
    let seeds: Vec<u64> = if members_n == 1 {
        vec![cfg.seed]
    } else {
        (0..members_n).map(|j| sim::member_seed(cfg.seed, j)).collect()
    };
    let members: Vec<sim::TrialStats> = seeds
        .iter()
        .map(|&s| {
            sim::run_stream_opts(
                &ch,
                &params,
                &dist,
                s,
                cfg.horizon,
                cfg.trials,
                cfg.steady_state,
            )
        })
        .collect::<sim::Result<_>>()?;

    let pooled = sim::pool_members(&members);

    let targets = if cfg.compare_bounds {
        sim::default_targets(&params, analysis.dispersion)
    } else {
        Vec::new()
    };
    let bound_rows = sim::compare_to_bounds(&pooled, &targets).rows;
    let ensemble_rows = if members_n > 1 {
        sim::ensemble_compare(&members, &targets)
    } else {
        Vec::new()
    };

    let mut oracle = Vec::new();
    if cfg.oracle {
        for m in &pooled.per_k {
            let exact = sim::exact_error(&ch, &params, &dist, seeds[0], m.k, cfg.horizon)?;
            let emp = members[0].per_k[(m.k - 1) as usize].error_rate();
            let sigma =
                (exact.total_error * (1.0 - exact.total_error) / cfg.trials as f64).sqrt();
            oracle.push(OracleRow {
                k: m.k,
                consistent_3_sigma: (emp - exact.total_error).abs() <= 3.0 * sigma.max(1e-9),
                empirical: emp,
                exact,
            });
        }
    }

    Ok(SimulateReport {
        config: cfg.clone(),
        params,
        capacity_nats: analysis.capacity,
        dispersion_nats2: analysis.dispersion,
        seeds,
        aggregate: pooled.aggregate.clone(),
        per_k: pooled.per_k,
        members,
        bounds: bound_rows,
        ensemble_bounds: ensemble_rows,
        oracle,
        prf_version: streamcode::codebook::PRF_VERSION.to_string(),
    })
}

fn cmd_schedule(args: ScheduleArgs) -> Result<()> {
    let scheme = match args.scheme.as_str() {
        "md_infinite" => Scheme::MdInfinite,
        "cl_truncated" => Scheme::ClTruncated {
            a: args.a.ok_or_else(|| anyhow!("cl_truncated needs --a"))?,
            b: args.b.ok_or_else(|| anyhow!("cl_truncated needs --b"))?,
        },
        "erasure" => Scheme::Erasure {
            gamma: args.gamma.ok_or_else(|| anyhow!("erasure needs --gamma"))?,
        },
        "vardelay" => Scheme::VarDelay {
            gamma: args.gamma.ok_or_else(|| anyhow!("vardelay needs --gamma"))?,
            d_max: args.d_max.unwrap_or(8 * args.t),
        },
        "alternating" => Scheme::Alternating {
            r: args.r.ok_or_else(|| anyhow!("alternating needs --r"))?,
        },
        other => bail!("unknown scheme '{other}'"),
    };
    let mut params = StreamParams::new(args.n, args.m, args.t, scheme)
        .context("schedule parameters are invalid")?;
    if let Some(rho) = args.rho {
        params = params.with_rho(rho)?;
    }
    let (lo, hi) = {
        let r = parse_int_range(&args.blocks)?;
        (*r.first().unwrap() as u64, *r.last().unwrap() as u64)
    };
    let dump = schedule::dump(&params, lo, hi).context("schedule dump failed")?;
    output::emit_json(&dump, args.out.as_deref())
}

fn parse_float_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [single] => Ok(vec![single.parse()?]),
        [lo, step, hi] => {
            let (lo, step, hi): (f64, f64, f64) = (lo.parse()?, step.parse()?, hi.parse()?);
            if step <= 0.0 || hi < lo {
                bail!("bad grid '{spec}': need lo <= hi and step > 0");
            }
            let mut v = Vec::new();
            let mut x = lo;
            let mut i = 0u64;
            while x <= hi + 1e-12 {
                v.push(x);
                i += 1;
                x = lo + step * i as f64;
            }
            Ok(v)
        }
        _ => bail!("bad grid '{spec}': use lo:step:hi or a single value"),
    }
}

fn parse_int_range(spec: &str) -> Result<Vec<u32>> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [single] => Ok(vec![single.parse()?]),
        [lo, hi] => {
            let (lo, hi): (u32, u32) = (lo.parse()?, hi.parse()?);
            if hi < lo {
                bail!("bad range '{spec}'");
            }
            Ok((lo..=hi).collect())
        }
        _ => bail!("bad range '{spec}': use lo:hi or a single value"),
    }
}
