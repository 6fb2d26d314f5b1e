//! `mtstreams`: generate MT status sets, test them, and report on them.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use mt_streams::campaign::{
    build_registry, load_inputs, read_campaign, render_table, run_campaign, write_campaign,
    CampaignConfig, CampaignReport, Classification, ExpectedFailures, Table, TableFormat,
};
use mt_streams::partition::{
    generate_indexed, generate_random_spacing, generate_sequence_splitting, verify_sets, write_set,
    DEFAULT_SPACING,
};
use mt_streams::stats::{Battery, Mode, MINI_CRUSH};
use mt_streams::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_QUALITY: u8 = 3;

#[derive(Parser)]
#[command(
    name = "mtstreams",
    version,
    about = "Parallel MT19937 stream generation and quality testing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a set of MT statuses and its MANIFEST
    Gen(GenArgs),
    /// Run a battery over status files and write JSONL results
    Test(TestArgs),
    /// Render summary, histogram and per-test tables from a results file
    Report(ReportArgs),
    /// Write the registry of statuses that only fail expected tests
    Registry(RegistryArgs),
    /// Compare two status directories byte for byte
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum TechniqueArg {
    Split,
    Random,
    Indexed,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    technique: TechniqueArg,
    #[arg(long)]
    count: usize,
    /// Base seed (split), master seed (random) or first seed (indexed).
    /// Default: 0 for indexed, 5489 otherwise
    #[arg(long)]
    seed: Option<u32>,
    /// Draws between consecutive statuses (split only)
    #[arg(long, default_value_t = DEFAULT_SPACING)]
    spacing: u64,
    /// Accept spacing 0 (every status identical)
    #[arg(long)]
    allow_degenerate: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Int,
    Real,
    Both,
}

impl ModeArg {
    fn modes(self) -> Vec<Mode> {
        match self {
            ModeArg::Int => vec![Mode::Int],
            ModeArg::Real => vec![Mode::Real],
            ModeArg::Both => vec![Mode::Int, Mode::Real],
        }
    }
}

#[derive(Args)]
struct TestArgs {
    /// Directory of `<technique>_<index>.mts` files (repeatable)
    #[arg(long)]
    dir: Vec<PathBuf>,
    /// Single status file (repeatable)
    #[arg(long)]
    status: Vec<PathBuf>,
    /// Built-in battery name or path to a battery JSON file
    #[arg(long, default_value = MINI_CRUSH)]
    battery: String,
    #[arg(long, value_enum, default_value = "int")]
    mode: ModeArg,
    /// Two-sided failure threshold ε [default: the battery's, 1e-10 for mini-crush-v1]
    #[arg(long)]
    threshold: Option<f64>,
    /// Worker threads [default: logical cores]
    #[arg(long)]
    jobs: Option<usize>,
    /// Results file (JSONL); metadata goes to `<out>.meta.json`
    #[arg(long)]
    out: Option<PathBuf>,
    /// Abort on unreadable inputs; exit 3 if any status is Suspect
    #[arg(long)]
    strict: bool,
    /// Comma-separated ids a Good status may fail [default: the battery's LinearComp tests]
    #[arg(long)]
    expected_fail: Option<String>,
    /// Print the battery as JSON and exit
    #[arg(long)]
    print_battery: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Md,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableArg {
    Summary,
    Histogram,
    Pertest,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    results: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["summary", "histogram", "pertest"])]
    tables: Vec<TableArg>,
    #[arg(long, value_enum, default_value = "md")]
    format: FormatArg,
    /// Comma-separated ids a Good status may fail [default: the battery's LinearComp tests]
    #[arg(long)]
    expected_fail: Option<String>,
}

#[derive(Args)]
struct RegistryArgs {
    #[arg(long)]
    results: PathBuf,
    /// Comma-separated ids a Good status may fail [default: the battery's LinearComp tests]
    #[arg(long)]
    expected_fail: Option<String>,
    /// Text registry; the JSON variant goes to `<out>.json`
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// The two directories to compare
    #[arg(long, num_args = 1, required = true)]
    dir: Vec<PathBuf>,
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_input_error() {
            EXIT_IO
        } else {
            EXIT_USAGE
        };
        Failure {
            code,
            error: e.into(),
        }
    }
}

fn io_failure(e: anyhow::Error) -> Failure {
    Failure {
        code: EXIT_IO,
        error: e,
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        error: anyhow::anyhow!(msg.into()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Gen(args) => gen(args),
        Command::Test(args) => test(args),
        Command::Report(args) => report(args),
        Command::Registry(args) => registry(args),
        Command::Verify(args) => verify(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn gen(args: GenArgs) -> Result<u8, Failure> {
    let set = match args.technique {
        TechniqueArg::Split => generate_sequence_splitting(
            args.seed.unwrap_or(5489),
            args.spacing,
            args.count,
            !args.allow_degenerate,
        )?,
        TechniqueArg::Random => generate_random_spacing(args.seed.unwrap_or(5489), args.count)?,
        TechniqueArg::Indexed => generate_indexed(args.seed.unwrap_or(0), args.count)?,
    };
    let manifest = write_set(&set, &args.out)?;
    println!("{}", manifest.fingerprint());
    Ok(0)
}

fn expected_failures(
    report: &CampaignReport,
    arg: Option<&str>,
) -> Result<ExpectedFailures, Failure> {
    match arg {
        None => Ok(report.meta.default_expected()),
        Some(list) => {
            let ids = list.split(',').map(str::trim).filter(|s| !s.is_empty());
            Ok(ExpectedFailures::new(&report.meta.battery_ids(), ids)?)
        }
    }
}

fn test(args: TestArgs) -> Result<u8, Failure> {
    let mut battery = Battery::load(&args.battery)?;
    if let Some(t) = args.threshold {
        battery.threshold = t;
    }
    if args.print_battery {
        print!("{}", battery.to_json());
        return Ok(0);
    }
    battery.validate()?;
    let Some(out) = args.out else {
        return Err(usage("--out is required"));
    };
    if args.dir.is_empty() && args.status.is_empty() {
        return Err(usage("give at least one --dir or --status"));
    }
    let battery_ids: BTreeSet<String> = battery.ids().map(str::to_string).collect();
    if let Some(list) = &args.expected_fail {
        ExpectedFailures::new(
            &battery_ids,
            list.split(',').map(str::trim).filter(|s| !s.is_empty()),
        )?;
    }
    let jobs = args
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if jobs == 0 {
        return Err(usage("--jobs must be at least 1"));
    }

    let inputs = load_inputs(&args.dir, &args.status, args.strict)?;
    for (path, err) in &inputs.failures {
        eprintln!("warning: skipping {}: {err}", path.display());
    }
    let config = CampaignConfig::new(battery, &args.mode.modes(), jobs);
    let report = run_campaign(&config, &inputs)?;
    write_campaign(&report, &out)?;

    let expected = expected_failures(&report, args.expected_fail.as_deref())?;
    let suspect = report
        .reports
        .iter()
        .filter(|r| mt_streams::campaign::classify_status(r, &expected) == Classification::Suspect)
        .count();
    eprintln!(
        "{} statuses x {} mode(s): {} suspect report(s); fingerprint {}",
        inputs.statuses.len(),
        config.modes.len(),
        suspect,
        report.meta.fingerprint
    );
    if args.strict && suspect > 0 {
        return Ok(EXIT_QUALITY);
    }
    Ok(0)
}

fn report(args: ReportArgs) -> Result<u8, Failure> {
    let campaign = read_campaign(&args.results)?;
    let expected = expected_failures(&campaign, args.expected_fail.as_deref())?;
    let format = match args.format {
        FormatArg::Md => TableFormat::Markdown,
        FormatArg::Csv => TableFormat::Csv,
        FormatArg::Json => TableFormat::Json,
    };
    let tables: Vec<(&str, Table)> = args
        .tables
        .iter()
        .map(|t| match t {
            TableArg::Summary => ("summary", Table::Summary),
            TableArg::Histogram => ("histogram", Table::Histogram),
            TableArg::Pertest => ("pertest", Table::PerTest),
        })
        .collect();
    let mut out = String::new();
    match format {
        TableFormat::Json => {
            let mut obj = serde_json::Map::new();
            for (name, table) in &tables {
                let text = render_table(&campaign, &expected, *table, format);
                obj.insert(
                    name.to_string(),
                    serde_json::from_str(&text).expect("own json"),
                );
            }
            out = serde_json::to_string_pretty(&obj).expect("json") + "\n";
        }
        TableFormat::Markdown => {
            for (i, (name, table)) in tables.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                out.push_str(&format!("### {name}\n\n"));
                out.push_str(&render_table(&campaign, &expected, *table, format));
            }
        }
        TableFormat::Csv => {
            for (i, (name, table)) in tables.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                out.push_str(&format!("# {name}\n"));
                out.push_str(&render_table(&campaign, &expected, *table, format));
            }
        }
    }
    print!("{out}");
    Ok(0)
}

fn registry(args: RegistryArgs) -> Result<u8, Failure> {
    let campaign = read_campaign(&args.results)?;
    let expected = expected_failures(&campaign, args.expected_fail.as_deref())?;
    let registry = build_registry(&campaign, &expected);
    write(&args.out, &registry.render_text())?;
    let mut json = args.out.clone().into_os_string();
    json.push(".json");
    write(Path::new(&json), &registry.render_json())?;
    eprintln!("{} good status(es)", registry.entries.len());
    Ok(0)
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(io_failure)
}

fn verify(args: VerifyArgs) -> Result<u8, Failure> {
    let [a, b] = &args.dir[..] else {
        return Err(usage("verify takes exactly two --dir arguments"));
    };
    for d in [a, b] {
        if !d.is_dir() {
            return Err(io_failure(anyhow::anyhow!(
                "{}: not a directory",
                d.display()
            )));
        }
    }
    let report = verify_sets(a, b)?;
    println!("{report}");
    Ok(if report.is_identical() {
        0
    } else {
        EXIT_QUALITY
    })
}
