use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use syncap::bounds::{evaluate_bound, BoundOptions, BoundResult, SeriesConfig};
use syncap::channel::{apply_delins, Action};
use syncap::optimize::{optimize_channel, sweep, ChannelBound, ChannelKind, DEFAULT_TOL, MIN_TOL};
use syncap::source::chain_seed;
use syncap::verify::{run_suite, Severity, Suite, SuiteReport, VerifyOptions};
use syncap::{generate_markov_sequence, to_runs, BitSequence, ChannelParams, MarkovSourceParams, RunSequence};

mod grid;
use grid::Grid;

/// Capacity lower bounds for deletion, insertion and combined
/// deletion+insertion channels with Markov inputs.
#[derive(Parser)]
#[command(name = "syncap", version)]
struct Cli {
    /// Series configuration file (key=value); defaults to $SYNCAP_SERIES_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate (or maximise over gamma) the bounds for one channel.
    Bound(BoundArgs),
    /// Maximise the bounds over a parameter grid and write CSV.
    Sweep(SweepArgs),
    /// Simulate one channel realisation and write JSON.
    Simulate(SimulateArgs),
    /// Run verification suites; exits nonzero if a required check fails.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long, value_parser = parse_channel)]
    channel: ChannelKind,
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    i: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Evaluate at this gamma instead of maximising.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Use the printed closed form for the deletion S term.
    #[arg(long)]
    paper_closed_forms: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_parser = parse_channel)]
    channel: ChannelKind,
    /// Value or start:stop:step.
    #[arg(long)]
    d: Option<Grid>,
    /// Value, start:stop:step, or `d` to tie i to d.
    #[arg(long)]
    i: Option<String>,
    #[arg(long)]
    alpha: Option<Grid>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long)]
    paper_closed_forms: bool,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_parser = parse_channel)]
    channel: ChannelKind,
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    i: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Input length (ignored with --input).
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Markov parameter of the generated input.
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// Explicit input bits instead of a Markov sample.
    #[arg(long)]
    input: Option<BitSequence>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suites to run: oracle, mc, anchors, reductions, truncation, closed-forms, figures, or all.
    #[arg(required = true)]
    suites: Vec<String>,
    /// Monte Carlo chain length (accepts 1e6).
    #[arg(long, default_value = "1e6", value_parser = parse_count)]
    steps: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_channel(s: &str) -> Result<ChannelKind, String> {
    s.parse().map_err(|e: syncap::Error| e.to_string())
}

fn parse_count(s: &str) -> Result<usize, String> {
    let v: f64 = s.parse().map_err(|e| format!("{s:?}: {e}"))?;
    if v >= 1.0 && v.fract() == 0.0 && v <= 1e12 {
        Ok(v as usize)
    } else {
        Err(format!("{s:?} is not a positive integer"))
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Run(String),
    Io(io::Error),
    ChecksFailed,
}

impl From<syncap::Error> for Failure {
    fn from(e: syncap::Error) -> Self {
        match e {
            syncap::Error::Domain { .. } | syncap::Error::Config(_) | syncap::Error::InvalidBit(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Run(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.into())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.into())
    }
}

/// Builds channel parameters, rejecting flags that do not belong to the channel.
fn channel_params(channel: ChannelKind, d: Option<f64>, i: Option<f64>, alpha: Option<f64>) -> Result<ChannelParams, Failure> {
    let need = |name: &str, v: Option<f64>| v.ok_or_else(|| Failure::Usage(format!("--{name} is required for the {} channel", channel.name())));
    let forbid = |name: &str, v: Option<f64>| match v {
        Some(_) => Err(Failure::Usage(format!("--{name} does not apply to the {} channel", channel.name()))),
        None => Ok(()),
    };
    let p = match channel {
        ChannelKind::Deletion => {
            forbid("i", i)?;
            forbid("alpha", alpha)?;
            ChannelParams::deletion(need("d", d)?)
        }
        ChannelKind::Insertion => {
            forbid("d", d)?;
            ChannelParams::insertion(need("i", i)?, need("alpha", alpha)?)
        }
        ChannelKind::Delins => ChannelParams::new(need("d", d)?, need("i", i)?, need("alpha", alpha)?),
    };
    Ok(p?)
}

fn series_config(path: Option<&Path>) -> Result<SeriesConfig, Failure> {
    Ok(match path {
        Some(p) => SeriesConfig::from_file(p)?,
        None => SeriesConfig::from_env()?,
    })
}

fn check_tol(tol: f64) -> Result<(), Failure> {
    if tol >= MIN_TOL {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--tol must be at least {MIN_TOL}")))
    }
}

fn output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

#[derive(Serialize)]
struct BoundReport<'a> {
    channel: &'a str,
    params: ChannelParams,
    optimised: bool,
    gamma_star: f64,
    bound: f64,
    series: SeriesConfig,
    results: &'a [BoundResult],
}

fn cmd_bound(args: BoundArgs, series: SeriesConfig) -> Result<(), Failure> {
    check_tol(args.tol)?;
    let p = channel_params(args.channel, args.d, args.i, args.alpha)?;
    let opts = BoundOptions {
        series,
        paper_closed_forms: args.paper_closed_forms,
        diagnostics: true,
    };
    let best = match args.gamma {
        None => optimize_channel(args.channel, &p, &opts, args.tol)?,
        Some(g) => {
            let results = args
                .channel
                .bounds()
                .iter()
                .map(|&k| evaluate_bound(k, &p, g, &opts))
                .collect::<syncap::Result<Vec<_>>>()?;
            let top = results.iter().map(|r| r.bound_bits).fold(f64::NEG_INFINITY, f64::max);
            ChannelBound {
                channel: args.channel,
                params: p,
                gamma_star: g,
                bound: top,
                results,
            }
        }
    };

    let mut out = io::stdout().lock();
    if args.json {
        let report = BoundReport {
            channel: args.channel.name(),
            params: p,
            optimised: args.gamma.is_none(),
            gamma_star: best.gamma_star,
            bound: best.bound,
            series,
            results: &best.results,
        };
        serde_json::to_writer_pretty(&mut out, &report)?;
        writeln!(out)?;
        return Ok(());
    }

    writeln!(out, "channel {}  d={} i={} alpha={}", args.channel.name(), p.d, p.i, p.alpha)?;
    writeln!(out, "bound {:.9} bits/use at gamma* {:.6}", best.bound, best.gamma_star)?;
    for r in &best.results {
        writeln!(out)?;
        writeln!(
            out,
            "{}: {:.9} at gamma {:.6} (truncation budget {:.1e})",
            r.kind.name(),
            r.bound_bits,
            r.gamma_star,
            r.error_budget
        )?;
        writeln!(out, "  {:<8} {:>10} {:<22} {:>14} {:>10} {:>14}", "role", "weight", "term", "value", "trunc.err", "contribution")?;
        for t in &r.terms {
            writeln!(
                out,
                "  {:<8} {:>10.6} {:<22} {:>14.10} {:>10.1e} {:>14.10}",
                format!("{:?}", t.role).to_lowercase(),
                t.weight,
                t.term.name,
                t.term.value,
                t.term.truncation_error,
                t.contribution()
            )?;
        }
        for dg in &r.diagnostics {
            writeln!(
                out,
                "  check {}: series {:.12} printed {:.12} residual {:+.3e}",
                dg.name, dg.series, dg.closed_form, dg.residual
            )?;
        }
    }
    Ok(())
}

fn sweep_grid(args: &SweepArgs) -> Result<Vec<ChannelParams>, Failure> {
    let one = |g: &Option<Grid>| g.as_ref().map(|g| g.0.clone());
    let d = one(&args.d);
    let alpha = one(&args.alpha);
    let tied = args.i.as_deref() == Some("d");
    let i = match args.i.as_deref() {
        None | Some("d") => None,
        Some(s) => Some(s.parse::<Grid>().map_err(Failure::Usage)?.0),
    };
    if tied && args.channel != ChannelKind::Delins {
        return Err(Failure::Usage("--i d only applies to the delins channel".into()));
    }
    let opt = |v: &Option<Vec<f64>>| -> Vec<Option<f64>> {
        match v {
            Some(v) => v.iter().copied().map(Some).collect(),
            None => vec![None],
        }
    };
    let mut grid = Vec::new();
    for &dv in &opt(&d) {
        let iv: Vec<Option<f64>> = if tied { vec![dv] } else { opt(&i) };
        for &iv in &iv {
            for &av in &opt(&alpha) {
                grid.push(channel_params(args.channel, dv, iv, av)?);
            }
        }
    }
    Ok(grid)
}

fn cmd_sweep(args: SweepArgs, series: SeriesConfig) -> Result<(), Failure> {
    check_tol(args.tol)?;
    let grid = sweep_grid(&args)?;
    let opts = BoundOptions {
        series,
        paper_closed_forms: args.paper_closed_forms,
        diagnostics: false,
    };
    let rows = sweep(args.channel, &grid, &opts, args.tol)?;
    let insertion = args.channel == ChannelKind::Insertion;

    let term_columns = |r: &ChannelBound| -> Vec<String> {
        r.results
            .iter()
            .flat_map(|b| {
                b.terms.iter().map(move |t| {
                    if insertion {
                        format!("term:{}:{}", b.kind.name().trim_start_matches("insertion_"), t.term.name)
                    } else {
                        format!("term:{}", t.term.name)
                    }
                })
            })
            .collect()
    };
    let mut header: Vec<String> = ["channel", "d", "i", "alpha", "gamma_star", "bound"].map(String::from).to_vec();
    if insertion {
        header.extend(["lb1", "lb2", "lb_max"].map(String::from));
    }
    header.extend(term_columns(&rows[0]));

    let mut w = csv::Writer::from_writer(output(args.out.as_deref())?);
    w.write_record(&header)?;
    for r in &rows {
        let mut rec = vec![
            args.channel.name().to_string(),
            r.params.d.to_string(),
            r.params.i.to_string(),
            r.params.alpha.to_string(),
            r.gamma_star.to_string(),
            r.bound.to_string(),
        ];
        if insertion {
            rec.extend(r.results.iter().map(|b| b.bound_bits.to_string()));
            rec.push(r.bound.to_string());
        }
        rec.extend(r.results.iter().flat_map(|b| b.terms.iter().map(|t| t.term.value.to_string())));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Simulation {
    channel: &'static str,
    params: ChannelParams,
    gamma: Option<f64>,
    seed: u64,
    n: usize,
    x: BitSequence,
    y: BitSequence,
    pattern: Vec<Action>,
    #[serde(rename = "I")]
    inserted: Vec<u8>,
    #[serde(rename = "T")]
    complementary: Vec<u8>,
    #[serde(rename = "S")]
    deleted_runs: Vec<usize>,
    y_tilde: BitSequence,
    x_runs: RunSequence,
    y_tilde_runs: RunSequence,
    y_prime: RunSequence,
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), Failure> {
    let p = channel_params(args.channel, args.d, args.i, args.alpha)?;
    let (x, gamma) = match args.input {
        Some(x) => (x, None),
        None => {
            if args.n == 0 {
                return Err(Failure::Usage("--n must be at least 1".into()));
            }
            let src = MarkovSourceParams::new(args.gamma)?;
            (generate_markov_sequence(src, args.n, chain_seed(args.seed, 0)), Some(args.gamma))
        }
    };
    let out = apply_delins(&x, &p, chain_seed(args.seed, 1));
    let y_tilde = out.flipped();
    let sim = Simulation {
        channel: args.channel.name(),
        params: p,
        gamma,
        seed: args.seed,
        n: x.len(),
        x_runs: to_runs(&x),
        y_tilde_runs: to_runs(&y_tilde),
        y_prime: out.augmented()?,
        y_tilde,
        x,
        y: out.y,
        pattern: out.pattern,
        inserted: out.aux.inserted,
        complementary: out.aux.complementary,
        deleted_runs: out.aux.deleted_runs,
    };
    let mut w = output(args.out.as_deref())?;
    serde_json::to_writer_pretty(&mut w, &sim)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct VerifyReport {
    passed: bool,
    mc_steps: usize,
    seed: u64,
    suites: Vec<SuiteReport>,
}

fn cmd_verify(args: VerifyArgs, series: SeriesConfig) -> Result<(), Failure> {
    check_tol(args.tol)?;
    let mut suites = Vec::new();
    for name in &args.suites {
        if name == "all" {
            suites.extend(Suite::ALL);
        } else {
            suites.push(name.parse::<Suite>()?);
        }
    }
    suites.dedup();
    let opts = VerifyOptions {
        mc_steps: args.steps,
        seed: args.seed,
        series,
        tol: args.tol,
    };
    let mut reports = Vec::new();
    for s in suites {
        let report = run_suite(s, &opts)?;
        for c in &report.checks {
            eprintln!("{}", c.line());
        }
        reports.push(report);
    }
    let passed = reports.iter().all(|r| r.passed);
    let report = VerifyReport {
        passed,
        mc_steps: args.steps,
        seed: args.seed,
        suites: reports,
    };
    let mut w = output(args.out.as_deref())?;
    serde_json::to_writer_pretty(&mut w, &report)?;
    writeln!(w)?;
    w.flush()?;
    let failed = report
        .suites
        .iter()
        .flat_map(|s| &s.checks)
        .filter(|c| !c.passed && c.severity == Severity::Required)
        .count();
    if failed > 0 {
        eprintln!("{failed} required check(s) failed");
        return Err(Failure::ChecksFailed);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = series_config(cli.config.as_deref()).and_then(|series| match cli.cmd {
        Command::Bound(a) => cmd_bound(a, series),
        Command::Sweep(a) => cmd_sweep(a, series),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Verify(a) => cmd_verify(a, series),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::ChecksFailed) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
