use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{Map, Value};

use growthlab::experiment::{run_config, run_sweep, EdgeFormat, RunConfig, SweepConfig, SweepPoint};
use growthlab::io::{fmt_sig, write_grid_csv, write_histogram_csv, write_parents_binary, write_parents_csv, write_px_csv};
use growthlab::master_eq::{degree_distribution, solve_q, truncation_mass, DEFAULT_KMAX, DEFAULT_LMAX};
use growthlab::observables::degree_histogram;
use growthlab::predictions::predictions_at;
use growthlab::validate::run_validation;
use growthlab::{Alpha, Family, ModelParams};

const WORKERS_ENV: &str = "GROWTHLAB_WORKERS";

/// Growing-tree simulator for the QPA and CR attachment models.
#[derive(Parser)]
#[command(name = "growthlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grow replicas of one model point and write summaries.
    Grow(GrowArgs),
    /// Run every point of a sweep config and write the sweep CSV.
    Sweep(SweepArgs),
    /// Solve the joint degree recurrence and write `x,p_x`.
    Mastereq(MastereqArgs),
    /// Tabulate closed-form predictions over an (alpha, r) grid.
    Predictions(PredictionsArgs),
    /// Run the fast oracle suite.
    Validate,
}

#[derive(Args)]
struct Common {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<String>,
    /// Worker threads (default: GROWTHLAB_WORKERS, then all cores).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    n_target: Option<usize>,
    #[arg(long)]
    replicas: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated snapshot sizes.
    #[arg(long, value_delimiter = ',')]
    snapshots: Option<Vec<usize>>,
    #[arg(long)]
    eta_dmin: Option<u32>,
}

#[derive(Args)]
struct GrowArgs {
    #[command(flatten)]
    common: Common,
    /// `qpa` or `cr`.
    #[arg(long)]
    family: Option<Family>,
    /// Exponent, or `inf` / `-inf`.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<Alpha>,
    #[arg(long)]
    r: Option<f64>,
    /// Summary JSON lines (default: stdout).
    #[arg(long)]
    summary_out: Option<String>,
    /// Parent-array output; `{replica}` expands to the replica index.
    #[arg(long)]
    edges_out: Option<String>,
    /// `csv` or `binary`.
    #[arg(long)]
    edges_format: Option<String>,
    /// Degree histogram output; `{replica}` expands to the replica index.
    #[arg(long)]
    histogram_out: Option<String>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Replace the config's points; `family:alpha[:r]`, repeatable.
    #[arg(long = "point", allow_hyphen_values = true)]
    points: Vec<String>,
    /// Sweep CSV (default: stdout).
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct MastereqArgs {
    #[arg(long, default_value_t = DEFAULT_KMAX)]
    kmax: usize,
    #[arg(long, default_value_t = DEFAULT_LMAX)]
    lmax: usize,
    /// `x,p_x` CSV (default: stdout).
    #[arg(long)]
    out: Option<String>,
    /// Optional full `k,l,q` grid.
    #[arg(long)]
    grid_out: Option<String>,
}

#[derive(Args)]
struct PredictionsArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-inf,0,1,2,3,inf")]
    alphas: Vec<Alpha>,
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1")]
    rs: Vec<f64>,
    #[arg(long)]
    out: Option<String>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Grow(args) => cmd_grow(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Mastereq(args) => cmd_mastereq(args),
        Command::Predictions(args) => cmd_predictions(args),
        Command::Validate => Ok(cmd_validate()),
    }
}

fn workers(flag: Option<usize>) -> Result<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => {
            let n: usize = v.trim().parse().with_context(|| format!("{WORKERS_ENV}={v:?} is not an integer"))?;
            Ok(Some(n.max(1)))
        }
        Err(_) => Ok(None),
    }
}

fn load_config(path: Option<&str>) -> Result<Map<String, Value>> {
    let Some(path) = path else {
        return Ok(Map::new());
    };
    let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    match serde_json::from_str(&text).with_context(|| format!("parsing {path}"))? {
        Value::Object(m) => Ok(m),
        _ => bail!("{path}: config must be a JSON object"),
    }
}

fn set<T: serde::Serialize>(map: &mut Map<String, Value>, key: &str, value: Option<T>) -> Result<()> {
    if let Some(v) = value {
        map.insert(key.to_owned(), serde_json::to_value(v)?);
    }
    Ok(())
}

fn apply_common(map: &mut Map<String, Value>, c: &Common) -> Result<()> {
    set(map, "n_target", c.n_target)?;
    set(map, "replicas", c.replicas)?;
    set(map, "seed", c.seed)?;
    set(map, "snapshots", c.snapshots.clone())?;
    set(map, "eta_dmin", c.eta_dmin)
}

fn write_output(path: Option<&str>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {p}")),
        None => io::stdout().lock().write_all(bytes).context("writing stdout"),
    }
}

fn replica_path(template: &str, k: usize) -> String {
    template.replace("{replica}", &k.to_string())
}

fn create(path: &str) -> growthlab::Result<io::BufWriter<fs::File>> {
    if let Some(dir) = Path::new(path).parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(io::BufWriter::new(fs::File::create(path)?))
}

fn cmd_grow(args: GrowArgs) -> Result<ExitCode> {
    let mut map = load_config(args.common.config.as_deref())?;
    apply_common(&mut map, &args.common)?;
    set(&mut map, "family", args.family)?;
    set(&mut map, "alpha", args.alpha)?;
    set(&mut map, "r", args.r)?;
    set(&mut map, "summary_out", args.summary_out)?;
    set(&mut map, "edges_out", args.edges_out)?;
    set(&mut map, "edges_format", args.edges_format)?;
    set(&mut map, "histogram_out", args.histogram_out)?;
    let cfg = RunConfig::from_json(&Value::Object(map).to_string()).context("invalid grow config")?;

    for path in [&cfg.edges_out, &cfg.histogram_out].into_iter().flatten() {
        if cfg.replicas > 1 && !path.contains("{replica}") {
            bail!("{path}: with several replicas the path must contain {{replica}}");
        }
    }

    let outcome = run_config(&cfg, workers(args.common.workers)?, |k, tree| {
        if let Some(t) = &cfg.edges_out {
            let mut f = create(&replica_path(t, k))?;
            match cfg.edges_format {
                EdgeFormat::Csv => write_parents_csv(tree, &mut f)?,
                EdgeFormat::Binary => write_parents_binary(tree, &mut f)?,
            }
            f.flush()?;
        }
        if let Some(t) = &cfg.histogram_out {
            let mut f = create(&replica_path(t, k))?;
            write_histogram_csv(&degree_histogram(tree), &mut f)?;
            f.flush()?;
        }
        Ok(())
    })?;
    let lines = outcome.json_lines(&cfg.params(), cfg.seed)?;
    write_output(cfg.summary_out.as_deref(), lines.as_bytes())?;
    Ok(ExitCode::SUCCESS)
}

fn parse_point(s: &str) -> Result<SweepPoint> {
    let parts: Vec<&str> = s.split(':').collect();
    let (family, alpha, r) = match parts.as_slice() {
        [f, a] => (f.parse::<Family>()?, a.parse::<Alpha>()?, 0.0),
        [f, a, r] => (f.parse::<Family>()?, a.parse::<Alpha>()?, r.parse::<f64>()?),
        _ => bail!("point {s:?} is not family:alpha[:r]"),
    };
    Ok(SweepPoint { family, alpha, r })
}

fn cmd_sweep(args: SweepArgs) -> Result<ExitCode> {
    let mut map = load_config(args.common.config.as_deref())?;
    apply_common(&mut map, &args.common)?;
    if !args.points.is_empty() {
        let points = args.points.iter().map(|p| parse_point(p)).collect::<Result<Vec<_>>>()?;
        set(&mut map, "points", Some(points))?;
    }
    set(&mut map, "out", args.out)?;
    let cfg = SweepConfig::from_json(&Value::Object(map).to_string()).context("invalid sweep config")?;
    let csv = run_sweep(&cfg, workers(args.common.workers)?)?;
    write_output(cfg.out.as_deref(), csv.as_bytes())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_mastereq(args: MastereqArgs) -> Result<ExitCode> {
    let grid = solve_q(args.kmax, args.lmax)?;
    let p = degree_distribution(&grid, args.kmax.min(args.lmax))?;
    let mut csv = Vec::new();
    write_px_csv(&p, &mut csv)?;
    write_output(args.out.as_deref(), &csv)?;
    if let Some(path) = &args.grid_out {
        let mut f = create(path)?;
        write_grid_csv(&grid, &mut f)?;
        f.flush()?;
    }
    eprintln!("truncation_mass,{}", fmt_sig(truncation_mass(&grid)));
    Ok(ExitCode::SUCCESS)
}

fn cmd_predictions(args: PredictionsArgs) -> Result<ExitCode> {
    let mut csv = String::from("family,alpha,r,quantity,value,source\n");
    let mut row = |p: &ModelParams| {
        for pred in predictions_at(p) {
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                p.family,
                p.alpha,
                p.r,
                pred.quantity,
                fmt_sig(pred.value),
                pred.source
            ));
        }
    };
    for &a in &args.alphas {
        row(&ModelParams::qpa(a));
        for &r in &args.rs {
            row(&ModelParams::cr(a, r)?);
        }
    }
    write_output(args.out.as_deref(), csv.as_bytes())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate() -> ExitCode {
    let report = run_validation();
    for c in &report.checks {
        println!("[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        let names: Vec<&str> = report.failures().map(|c| c.name).collect();
        eprintln!("validation failed: {}", names.join(", "));
        ExitCode::FAILURE
    }
}
