mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::ConfigFile;
use zenocomm::experiments::{
    self, format_number, gen_table1, sweep_c0, sweep_noise, Fig3Report, Format, NoiseSweepConfig, FIG3_T_VALUES,
};
use zenocomm::montecarlo::{Seed, SlazNoise};
use zenocomm::protocols::{equivalent_distance, improved_c0, improved_c1, improved_run, slaz_p1, slaz_p2, slaz_run};
use zenocomm::{BobBit, ChainModule, ImprovedParams, NoiseMask, Protocol, SlazParams};

const EXIT_ARGS: u8 = 1;
const EXIT_NUMERIC: u8 = 2;
const EXIT_REGRESSION: u8 = 3;

/// Counterfactual quantum communication via the chained Zeno effect:
/// analytics, single runs, and reproducible experiment pipelines.
#[derive(Debug, Parser)]
#[command(name = "zenocomm", version)]
struct Cli {
    /// Flat `key = value` config file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Counterfactuality rates C0 (needs --t) and C1 = cos^{2M}(pi/2M), the
    /// baseline's P1 (and P2 with --N), and equivalent optical distances.
    Analytic(AnalyticArgs),
    /// Single-photon detector distribution (D1, D2, module/D3, D4, noise)
    /// for one protocol run with Bob's choice and an obstruction mask.
    Run(RunArgs),
    /// Counterfactuality table: C0 over (t, M) and baseline p2 over (N, M),
    /// with per-cell deviation from the published values.
    Table1(OutArgs),
    /// C0 as a function of M for t = 1e-3, 5e-4, 1e-4, 5e-5, with shape checks.
    Fig3(Fig3Args),
    /// Successful clicking rate against the noise rate B (Monte Carlo plus
    /// exact oracle) for improved M=25/50 and baseline M=25/N=320, M=50/N=1250.
    Fig4(Fig4Args),
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Debug, Args)]
struct AnalyticArgs {
    #[arg(long = "M")]
    m: Option<usize>,
    /// Module transmission t = prod t_j.
    #[arg(long = "t")]
    t: Option<f64>,
    /// Baseline inner cycle count.
    #[arg(long = "N")]
    n: Option<usize>,
    /// Physical channel length per cycle.
    #[arg(long = "L")]
    length: Option<f64>,
    #[arg(long)]
    format: Option<String>,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// improved or slaz.
    #[arg(long)]
    protocol: Option<String>,
    #[arg(long = "M")]
    m: Option<usize>,
    #[arg(long = "N")]
    n: Option<usize>,
    /// Module transmission (improved protocol); 1 when omitted.
    #[arg(long = "t")]
    t: Option<f64>,
    /// Number of splitters in the module (uniform allocation of t).
    #[arg(long)]
    splitters: Option<usize>,
    /// block or pass.
    #[arg(long)]
    bob: Option<String>,
    /// none, all, or a 1-based cycle list such as 3,7,12.
    #[arg(long)]
    mask: Option<String>,
    /// Return rate of an obstructed segment in [0, 1], or `module` for the
    /// module's reflect-back probability. Default 0.
    #[arg(long = "c")]
    c: Option<String>,
    #[arg(long)]
    format: Option<String>,
}

#[derive(Debug, Args)]
struct Fig3Args {
    #[command(flatten)]
    out: OutArgs,
    /// Inclusive M range, e.g. 25-150.
    #[arg(long)]
    m_range: Option<String>,
}

#[derive(Debug, Args)]
struct Fig4Args {
    #[command(flatten)]
    out: OutArgs,
    /// Master seed; required.
    #[arg(long)]
    seed: Option<u64>,
    /// Trials per grid point (default 2000).
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated noise rates; default 0, 0.05, ..., 1.
    #[arg(long = "B")]
    b: Option<String>,
    /// Return rate for the improved protocol (default 0, the worst case).
    #[arg(long = "c")]
    c: Option<f64>,
    /// Baseline noise granularity: inner (per channel segment) or outer
    /// (per outer cycle).
    #[arg(long)]
    granularity: Option<String>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug)]
enum Failure {
    Args(String),
    Numeric(String),
    Regression(String),
}

impl From<zenocomm::Error> for Failure {
    fn from(e: zenocomm::Error) -> Self {
        Failure::Args(e.to_string())
    }
}

impl From<String> for Failure {
    fn from(e: String) -> Self {
        Failure::Args(e)
    }
}

type CmdResult = Result<(), Failure>;

fn parse_with<T>(s: &str, what: &str) -> Result<T, Failure>
where
    T: std::str::FromStr,
{
    s.parse::<T>()
        .map_err(|_| Failure::Args(format!("invalid {what} `{s}`")))
}

fn format_of(cfg: &ConfigFile, flag: Option<String>) -> Result<Format, Failure> {
    match cfg.pick(flag, "format")? {
        Some(f) => Ok(f.parse::<Format>()?),
        None => Ok(Format::Csv),
    }
}

fn required_cycles(cfg: &ConfigFile, flag: Option<usize>, key: &str) -> Result<usize, Failure> {
    match cfg.pick(flag, key)? {
        Some(0) => Err(Failure::Args(format!("--{key} must be at least 1"))),
        Some(v) => Ok(v),
        None => Err(Failure::Args(format!("--{key} is required"))),
    }
}

/// A single named record rendered with the same conventions as sweep rows.
fn print_record(fields: &[(&str, Option<String>)], format: Format) {
    match format {
        Format::Csv => {
            let header: Vec<&str> = fields.iter().map(|f| f.0).collect();
            let values: Vec<String> = fields.iter().map(|f| f.1.clone().unwrap_or_default()).collect();
            println!("{}", header.join(","));
            println!("{}", values.join(","));
        }
        Format::Json => {
            let body: Vec<String> = fields
                .iter()
                .filter_map(|(k, v)| {
                    v.as_ref().map(|v| {
                        let quoted = v.parse::<f64>().is_err();
                        if quoted {
                            format!("  \"{k}\": \"{v}\"")
                        } else {
                            format!("  \"{k}\": {v}")
                        }
                    })
                })
                .collect();
            println!("{{\n{}\n}}", body.join(",\n"));
        }
    }
}

fn num(x: f64) -> Option<String> {
    Some(format_number(x))
}

fn cmd_analytic(cfg: &ConfigFile, args: AnalyticArgs) -> CmdResult {
    let m = required_cycles(cfg, args.m, "M")?;
    let t: Option<f64> = cfg.pick(args.t, "t")?;
    let n: Option<usize> = cfg.pick(args.n, "N")?;
    if n == Some(0) {
        return Err(Failure::Args("--N must be at least 1".into()));
    }
    let length: f64 = cfg.pick(args.length, "L")?.unwrap_or(1.0);
    let format = format_of(cfg, args.format)?;

    let c0 = t.map(|t| improved_c0(m, t)).transpose()?;
    let c1: f64 = improved_c1(m)?;
    let p1: f64 = slaz_p1(m)?;
    let p2 = n.map(|n| slaz_p2::<f64>(m, n)).transpose()?;
    let d_improved = equivalent_distance(Protocol::Improved, m, 1, length)?;
    let d_slaz = n
        .map(|n| equivalent_distance(Protocol::Slaz, m, n, length))
        .transpose()?;

    print_record(
        &[
            ("M", Some(m.to_string())),
            ("N", n.map(|n| n.to_string())),
            ("t", t.and_then(num)),
            ("L", num(length)),
            ("C0", c0.and_then(num)),
            ("C1", num(c1)),
            ("slaz_p1", num(p1)),
            ("slaz_p2", p2.and_then(num)),
            ("D_eq_improved", num(d_improved)),
            ("D_eq_slaz", d_slaz.and_then(num)),
        ],
        format,
    );
    Ok(())
}

fn cmd_run(cfg: &ConfigFile, args: RunArgs) -> CmdResult {
    let protocol: Protocol = match cfg.pick(args.protocol, "protocol")? {
        Some(p) => p.parse()?,
        None => return Err(Failure::Args("--protocol is required".into())),
    };
    let m = required_cycles(cfg, args.m, "M")?;
    let bob: BobBit = match cfg.pick(args.bob, "bob")? {
        Some(b) => b.parse()?,
        None => return Err(Failure::Args("--bob is required".into())),
    };
    let mask_spec: String = cfg.pick(args.mask, "mask")?.unwrap_or_else(|| "none".into());
    let mask = NoiseMask::parse(&mask_spec, m)?;
    let format = format_of(cfg, args.format)?;

    let (dist, n, c) = match protocol {
        Protocol::Improved => {
            let t: f64 = cfg.pick(args.t, "t")?.unwrap_or(1.0);
            let splitters: usize = cfg.pick(args.splitters, "splitters")?.unwrap_or(1);
            let module = ChainModule::uniform_for_target(splitters, t)?;
            let c = match cfg.pick(args.c, "c")?.as_deref() {
                None => 0.0,
                Some("module") => module.effective_return_rate(),
                Some(v) => parse_with::<f64>(v, "c")?,
            };
            let params = ImprovedParams::new(m, module)?;
            (improved_run(&params, bob, &mask, c)?, None, Some(c))
        }
        Protocol::Slaz => {
            let n = required_cycles(cfg, args.n, "N")?;
            (slaz_run(&SlazParams::<f64>::new(m, n)?, bob, &mask)?, Some(n), None)
        }
    };
    dist.check_conservation(1e-9)
        .map_err(|e| Failure::Numeric(e.to_string()))?;

    print_record(
        &[
            ("protocol", Some(protocol.to_string())),
            ("M", Some(m.to_string())),
            ("N", n.map(|n: usize| n.to_string())),
            ("bob", Some(bob.to_string())),
            ("c", c.and_then(num)),
            ("D1", num(dist.d1)),
            ("D2", num(dist.d2)),
            ("D3", num(dist.d3_module)),
            ("D4", num(dist.d4_bob)),
            ("noise_absorbed", num(dist.noise_absorbed)),
        ],
        format,
    );
    Ok(())
}

fn write_rows(rows: &[experiments::SweepRow], format: Format, out: Option<&Path>) -> CmdResult {
    match out {
        Some(path) => experiments::emit(rows, format, path)
            .map_err(|e| Failure::Args(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{}", experiments::render(rows, format));
            Ok(())
        }
    }
}

fn cmd_table1(cfg: &ConfigFile, args: OutArgs) -> CmdResult {
    let format = format_of(cfg, args.format)?;
    let out: Option<PathBuf> = cfg.pick(args.out, "out")?;
    let (rows, report) = gen_table1();
    write_rows(&rows, format, out.as_deref())?;

    eprintln!("section  param     M    published  computed  deviation");
    for cell in &report.cells {
        let mark = if cell.out_of_tolerance() {
            "  FLAG"
        } else if cell.needs_audit() {
            "  audit"
        } else {
            ""
        };
        let section = match cell.section {
            experiments::TableSection::ImprovedC0 => "I  (t)",
            experiments::TableSection::SlazP2 => "II (N)",
        };
        eprintln!(
            "{section}  {:<8} {:>4}  {:>9.3}  {:.6}  {:+.6}{mark}",
            format_number(cell.row_param),
            cell.m,
            cell.expected,
            cell.computed,
            cell.deviation()
        );
    }
    let flagged = report.flagged().count();
    eprintln!(
        "{} rows; {flagged} cells outside tolerance (I: 5e-4, II: 1e-2); {} listed for audit (> 2e-3)",
        rows.len(),
        report.audit_list().count()
    );
    if flagged > 0 {
        return Err(Failure::Regression(format!("{flagged} table cells outside tolerance")));
    }
    Ok(())
}

fn parse_range(s: &str) -> Result<std::ops::RangeInclusive<usize>, Failure> {
    let (a, b) = s
        .split_once('-')
        .ok_or_else(|| Failure::Args(format!("M range must look like 25-150, got `{s}`")))?;
    let (a, b) = (parse_with::<usize>(a.trim(), "M")?, parse_with::<usize>(b.trim(), "M")?);
    if a == 0 || a > b {
        return Err(Failure::Args(format!("invalid M range `{s}`")));
    }
    Ok(a..=b)
}

fn cmd_fig3(cfg: &ConfigFile, args: Fig3Args) -> CmdResult {
    let format = format_of(cfg, args.out.format)?;
    let out: Option<PathBuf> = cfg.pick(args.out.out, "out")?;
    let range = match cfg.pick(args.m_range, "m_range")? {
        Some(s) => parse_range(&s)?,
        None => 25..=150,
    };
    let rows = sweep_c0(&FIG3_T_VALUES, range)?;
    write_rows(&rows, format, out.as_deref())?;
    let report = Fig3Report::check(&rows);
    eprintln!(
        "{} rows; {} rising steps, {} misordered points",
        rows.len(),
        report.rising.len(),
        report.misordered.len()
    );
    if !report.passed() {
        return Err(Failure::Regression(format!("C0 curve shape violated: {report:?}")));
    }
    Ok(())
}

fn cmd_fig4(cfg: &ConfigFile, args: Fig4Args) -> CmdResult {
    let format = format_of(cfg, args.out.format)?;
    let out: Option<PathBuf> = cfg.pick(args.out.out, "out")?;
    let seed: u64 = cfg
        .pick(args.seed, "seed")?
        .ok_or_else(|| Failure::Args("fig4 needs an explicit --seed".into()))?;
    let trials: usize = cfg.pick(args.trials, "trials")?.unwrap_or(2000);
    if trials == 0 {
        return Err(Failure::Args("--trials must be at least 1".into()));
    }
    let mut config = NoiseSweepConfig::standard(seed);
    config.trials = trials;
    config.seed = Seed(seed);
    config.workers = cfg.pick(args.workers, "workers")?;
    if config.workers == Some(0) {
        return Err(Failure::Args("--workers must be at least 1".into()));
    }
    config.c = cfg.pick(args.c, "c")?.unwrap_or(0.0);
    if !(0.0..=1.0).contains(&config.c) {
        return Err(Failure::Args(format!("c = {} outside [0, 1]", config.c)));
    }
    if let Some(g) = cfg.pick(args.granularity, "granularity")? {
        config.granularity = g.parse::<SlazNoise>()?;
    }
    if let Some(grid) = cfg.pick(args.b, "B")? {
        config.b_grid = grid
            .split(',')
            .map(|s| parse_with::<f64>(s.trim(), "B"))
            .collect::<Result<_, _>>()?;
        if config.b_grid.iter().any(|b| !(0.0..=1.0).contains(b)) {
            return Err(Failure::Args("noise rates must lie in [0, 1]".into()));
        }
    }

    let sweep = sweep_noise(&config)?;
    write_rows(&sweep.rows, format, out.as_deref())?;

    let report = &sweep.report;
    eprintln!(
        "success = probability mass at the right detector (D2 improved, D1 baseline) with Bob passing; \
         baseline noise granularity: {}",
        config.granularity
    );
    let oracle_fail: Vec<_> = report.oracle.iter().filter(|o| !o.passed()).collect();
    eprintln!(
        "oracle agreement (|mean - exact| <= 4 stderr): {}/{} points",
        report.oracle.len() - oracle_fail.len(),
        report.oracle.len()
    );
    for o in &oracle_fail {
        eprintln!(
            "  FLAG {} M={} N={:?} B={}: mean {} stderr {} exact {}",
            o.protocol, o.m, o.n, o.b, o.stats.mean, o.stats.stderr, o.exact
        );
    }
    for p in &report.pins {
        eprintln!(
            "  pin {} (B={}): {} vs {} {}",
            p.label,
            p.b,
            p.lhs,
            p.rhs,
            if p.holds { "ok" } else { "FLAG" }
        );
    }
    let broken: Vec<_> = report.claims.iter().filter(|c| !c.holds).collect();
    eprintln!(
        "ordering claims: {}/{} points hold",
        report.claims.len() - broken.len(),
        report.claims.len()
    );
    for c in &broken {
        eprintln!("  claim fails: {} at B={}: {} < {}", c.label, c.b, c.lhs, c.rhs);
    }
    if !report.tolerances_ok() {
        return Err(Failure::Regression("noise sweep regression tolerance violated".into()));
    }
    Ok(())
}

fn run(cli: Cli) -> CmdResult {
    let cfg = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::Analytic(a) => cmd_analytic(&cfg, a),
        Command::Run(a) => cmd_run(&cfg, a),
        Command::Table1(a) => cmd_table1(&cfg, a),
        Command::Fig3(a) => cmd_fig3(&cfg, a),
        Command::Fig4(a) => cmd_fig4(&cfg, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ARGS } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Args(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run `zenocomm --help` for usage");
            ExitCode::from(EXIT_ARGS)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("numeric validation failed: {msg}");
            ExitCode::from(EXIT_NUMERIC)
        }
        Err(Failure::Regression(msg)) => {
            eprintln!("regression check failed: {msg}");
            ExitCode::from(EXIT_REGRESSION)
        }
    }
}
