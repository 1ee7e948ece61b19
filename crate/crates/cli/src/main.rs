use std::io::IsTerminal;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wfts_core::bench::{bench_model, rows_to_csv, rows_to_json, rows_to_table, BenchRow};
use wfts_core::io::generators::{parse_generators, parse_generator, Generator};
use wfts_core::validate::{check_model, check_models, check_random, compare_with_golden, Summary};
use wfts_core::{analyze_family, analyze_product_based, serialize, AnalysisOptions, LimitAverageReport, Mode, Wfts};

const OK: u8 = 0;
const USAGE: u8 = 1;
const MODEL: u8 = 2;
const MISMATCH: u8 = 3;

/// Limit-average analysis of weighted featured transition systems.
#[derive(Parser)]
#[command(name = "wfts", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-product best limit-average value and an optimal cycle.
    Analyze {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value_t = ModeArg::Max)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = StrategyArg::Family)]
        strategy: StrategyArg,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Spread components or products over threads.
        #[arg(long)]
        parallel: bool,
    },
    /// Times family-based against product-based analysis.
    Bench {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value_t = ModeArg::Max)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
        reps: u32,
        #[arg(long)]
        parallel: bool,
    },
    /// Cross-checks the algorithms on a model, or on the bundled models and
    /// a seeded random batch when no model is given.
    Validate {
        #[arg(value_name = "MODEL")]
        path: Option<PathBuf>,
        #[arg(long, value_name = "GENERATOR", conflicts_with = "path")]
        generate: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random models to check when no model is given.
        #[arg(long, default_value_t = 500)]
        count: usize,
        /// JSON report the model's values must match.
        #[arg(long, value_name = "FILE")]
        golden: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ModeArg::Max)]
        mode: ModeArg,
    },
    /// Prints a model in `.wfts` syntax.
    Export {
        #[command(flatten)]
        source: Source,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// A `.wfts` file.
    #[arg(value_name = "MODEL")]
    path: Option<PathBuf>,
    /// A built-in model: `taxi:N`, `grantrequest` or `minepump`.
    #[arg(long, value_name = "GENERATOR")]
    generate: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Max,
    Min,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Max => Mode::Max,
            ModeArg::Min => Mode::Min,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Family,
    Product,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

/// A failure with its exit code.
struct Failure(u8, String);

fn model_error(e: impl ToString) -> Failure {
    Failure(MODEL, e.to_string())
}

fn load(path: &Option<PathBuf>, generate: &Option<String>) -> Result<(String, Wfts), Failure> {
    match (path, generate) {
        (Some(p), None) => Ok((p.display().to_string(), wfts_core::load(p).map_err(model_error)?)),
        (None, Some(text)) => {
            let g = parse_generator(text).map_err(|e| Failure(USAGE, e))?;
            Ok((g.to_string(), g.build()))
        }
        _ => Err(Failure(USAGE, "give either a model file or --generate".into())),
    }
}

fn color() -> bool {
    std::env::var("WFTS_COLOR").map_or(true, |v| v != "0") && std::io::stdout().is_terminal()
}

fn render(report: &LimitAverageReport, format: Format) -> String {
    match format {
        Format::Table => report.to_table(color()),
        Format::Json => report.to_json() + "\n",
        Format::Csv => report.to_csv(),
    }
}

fn analyze(source: &Source, mode: Mode, strategy: StrategyArg, format: Format, parallel: bool) -> Result<u8, Failure> {
    let (_, w) = load(&source.path, &source.generate)?;
    let opts = AnalysisOptions {
        witnesses: true,
        parallel,
    };
    let report = match strategy {
        StrategyArg::Family => analyze_family(&w, mode, opts),
        StrategyArg::Product => analyze_product_based(&w, mode, opts),
        StrategyArg::Both => {
            let mut family = analyze_family(&w, mode, opts);
            let product = analyze_product_based(&w, mode, opts);
            let diff = family.mismatches(&product);
            if !diff.is_empty() {
                let lines: Vec<String> = diff.iter().map(|d| format!("  {d}")).collect();
                return Err(Failure(
                    MISMATCH,
                    format!("family-based and product-based values differ (family versus product):\n{}", lines.join("\n")),
                ));
            }
            family.timing.product_ms = product.timing.product_ms;
            family
        }
    };
    print!("{}", render(&report, format));
    Ok(OK)
}

fn bench(source: &Source, mode: Mode, format: Format, reps: usize, parallel: bool) -> Result<u8, Failure> {
    let models: Vec<(String, Wfts)> = match (&source.path, &source.generate) {
        (None, Some(text)) => parse_generators(text)
            .map_err(|e| Failure(USAGE, e))?
            .into_iter()
            .map(|g: Generator| (g.to_string(), g.build()))
            .collect(),
        _ => vec![load(&source.path, &source.generate)?],
    };
    // without --parallel every code path is single-threaded
    let rows: Vec<BenchRow> = models
        .iter()
        .map(|(name, w)| bench_model(name, w, mode, reps, parallel))
        .collect();
    match format {
        Format::Table => print!("{}", rows_to_table(&rows)),
        Format::Json => println!("{}", rows_to_json(&rows)),
        Format::Csv => print!("{}", rows_to_csv(&rows)),
    }
    for r in &rows {
        if r.model.starts_with("taxi") && r.features >= 4 && r.family.mean_s >= r.product.mean_s {
            eprintln!(
                "warning: {}: family-based ({:.4} s) is not faster than product-based ({:.4} s)",
                r.model, r.family.mean_s, r.product.mean_s
            );
        }
    }
    if let Some(r) = rows.iter().find(|r| !r.agree) {
        return Err(Failure(MISMATCH, format!("{}: strategies disagree", r.model)));
    }
    Ok(OK)
}

fn report_summary(summary: &Summary, what: &str) -> u8 {
    for v in &summary.violations {
        println!("{v}");
    }
    let verdict = if summary.passed() { "PASS" } else { "FAIL" };
    println!(
        "{verdict}: {what}: {} models, {} products, {} violations",
        summary.models,
        summary.products,
        summary.violations.len()
    );
    if summary.passed() {
        OK
    } else {
        MISMATCH
    }
}

fn validate(
    path: &Option<PathBuf>,
    generate: &Option<String>,
    seed: u64,
    count: usize,
    golden: &Option<PathBuf>,
    mode: Mode,
) -> Result<u8, Failure> {
    if path.is_none() && generate.is_none() {
        if golden.is_some() {
            return Err(Failure(USAGE, "--golden needs a model".into()));
        }
        let bundled: Vec<Wfts> = [Generator::Taxi(1), Generator::GrantRequest, Generator::MinepumpLite]
            .into_iter()
            .map(Generator::build)
            .collect();
        let a = report_summary(&check_models(&bundled), "bundled models");
        let b = report_summary(&check_random(seed, count), &format!("random batch (seed {seed})"));
        return Ok(a.max(b));
    }
    let (name, w) = load(path, generate)?;
    let mut summary = Summary {
        models: 1,
        products: w.feature_model().product_count(),
        violations: check_model(&w),
    };
    if let Some(file) = golden {
        let text = std::fs::read_to_string(file).map_err(|e| model_error(format!("{}: {e}", file.display())))?;
        let report = analyze_family(&w, mode, AnalysisOptions::default());
        summary
            .violations
            .extend(compare_with_golden(&report, &text).map_err(model_error)?);
    }
    Ok(report_summary(&summary, &name))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Analyze {
            source,
            mode,
            strategy,
            format,
            parallel,
        } => analyze(&source, mode.into(), strategy, format, parallel),
        Command::Bench {
            source,
            mode,
            format,
            reps,
            parallel,
        } => bench(&source, mode.into(), format, reps as usize, parallel),
        Command::Validate {
            path,
            generate,
            seed,
            count,
            golden,
            mode,
        } => validate(&path, &generate, seed, count, &golden, mode.into()),
        Command::Export { source } => {
            let (_, w) = load(&source.path, &source.generate)?;
            print!("{}", serialize(&w));
            Ok(OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
