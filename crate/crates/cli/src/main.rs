use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use tripower::uni_image::CensusCache;
use tripower_cli::commands::{self, Ctx, PruneArgs, TImageArgs, TMethod, UImageArgs};
use tripower_cli::report::Format;
use tripower_cli::verify::{self, Caps, Suite};
use tripower_cli::{error_document, exit_code_for, EXIT_FAIL, EXIT_PASS};

#[derive(Parser)]
#[command(name = "tripower", version, about = "Sizes of p-th power images in triangular matrix groups over GF(q)")]
struct Cli {
    /// Output format
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    /// Worker threads for the censuses
    #[arg(long, env = "TRIPOWER_SHARDS", default_value_t = 1, global = true)]
    shards: usize,
    /// Census cache file
    #[arg(long, env = "TRIPOWER_CACHE", global = true)]
    cache: Option<PathBuf>,
    /// Allow runs estimated above 1e9 operations
    #[arg(long, global = true)]
    slow: bool,
    /// Add elapsed time and shard count to JSON output
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Describe the field table used for GF(q)
    FieldInfo {
        #[arg(long)]
        q: u64,
    },
    /// Exhaustive census of U(n,q)^m
    UImage {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
        /// Exponent, defaults to the characteristic
        #[arg(long)]
        m: Option<u64>,
        /// Write the membership bitmap here
        #[arg(long)]
        dump: Option<PathBuf>,
        /// Largest group the census will enumerate
        #[arg(long)]
        max_elements: Option<u128>,
    },
    /// Size of T(n,q)^p by type formula, brute force, or both
    TImage {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
        #[arg(long, value_enum, default_value = "formula")]
        method: TMethod,
        /// Fail instead of running missing censuses
        #[arg(long)]
        no_compute: bool,
        /// Largest group the brute force will enumerate
        #[arg(long)]
        max_elements: Option<u64>,
    },
    /// Recompute the table of |U(n,q)^p| against |U_{p-1}(n,q)|
    PaperTable,
    /// Run verification suites within size caps
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 6)]
        max_n: usize,
        #[arg(long, default_value_t = 5)]
        max_q: usize,
    },
    /// Inspect or prune the census cache
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand)]
enum CacheAction {
    List,
    Prune {
        /// Entries whose field presentation no longer matches
        #[arg(long)]
        stale: bool,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        all: bool,
    },
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::FieldInfo { .. } => "field-info",
        Command::UImage { .. } => "u-image",
        Command::TImage { .. } => "t-image",
        Command::PaperTable => "paper-table",
        Command::Verify { .. } => "verify",
        Command::Cache { action: CacheAction::List } => "cache-list",
        Command::Cache { .. } => "cache-prune",
    }
}

fn run(cli: &Cli) -> tripower::Result<tripower_cli::report::RunReport> {
    let cache = match &cli.cache {
        Some(path) => CensusCache::load(path)?,
        None => CensusCache::in_memory(),
    };
    let mut ctx = Ctx {
        shards: cli.shards.max(1),
        cache,
        slow: cli.slow,
    };
    let start = Instant::now();
    let mut report = match &cli.command {
        Command::FieldInfo { q } => commands::field_info(*q)?,
        Command::UImage {
            n,
            q,
            m,
            dump,
            max_elements,
        } => commands::u_image(
            &mut ctx,
            &UImageArgs {
                n: *n,
                q: *q,
                m: *m,
                dump: dump.clone(),
                max_elements: *max_elements,
            },
        )?,
        Command::TImage {
            n,
            q,
            method,
            no_compute,
            max_elements,
        } => commands::t_image(
            &mut ctx,
            &TImageArgs {
                n: *n,
                q: *q,
                method: *method,
                no_compute: *no_compute,
                max_elements: *max_elements,
            },
        )?,
        Command::PaperTable => commands::paper_table(&mut ctx)?,
        Command::Verify { suite, max_n, max_q } => verify::verify(
            &mut ctx,
            *suite,
            Caps {
                max_n: *max_n,
                max_q: *max_q,
            },
        )?,
        Command::Cache { action: CacheAction::List } => commands::cache_list(&ctx)?,
        Command::Cache {
            action: CacheAction::Prune { stale, n, q, all },
        } => commands::cache_prune(
            &mut ctx,
            &PruneArgs {
                stale: *stale,
                n: *n,
                q: *q,
                all: *all,
            },
        )?,
    };
    report.elapsed = start.elapsed();
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            let _ = writeln!(std::io::stdout(), "{}", report.render(cli.format, cli.timing));
            eprintln!("elapsed {:.3}s with {} shard(s)", report.elapsed.as_secs_f64(), report.shards);
            ExitCode::from(if report.passed() { EXIT_PASS } else { EXIT_FAIL } as u8)
        }
        Err(err) => {
            let name = command_name(&cli.command);
            let doc = serde_json::to_string_pretty(&error_document(name, &err)).expect("serializable");
            let _ = writeln!(std::io::stdout(), "{doc}");
            eprintln!("tripower {name}: {err}");
            ExitCode::from(exit_code_for(&err) as u8)
        }
    }
}
