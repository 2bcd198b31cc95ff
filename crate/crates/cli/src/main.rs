use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};

use pgm_cli::commands::{cmd_generate, cmd_render, cmd_solve, cmd_stats, cmd_validate, FULL_SCALE_SIZES};
use pgm_cli::serve::{serve, ServeConfig};
use pgm_core::dataset::manifest::{DatasetConfig, SplitSizes, DEFAULT_SHARD_SIZE};
use pgm_core::regimes::{RegimeId, Split};

#[derive(Parser)]
#[command(name = "pgm", version, about = "Procedurally generated progressive matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a sharded dataset with a manifest.
    Generate(GenerateArgs),
    /// Verify checksums, decoding and every record's invariants.
    Validate {
        dataset: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Corpus composition by structure size, relation, attribute and object.
    Stats {
        dataset: PathBuf,
        #[arg(long)]
        split: Option<Split>,
        #[arg(long)]
        json: bool,
    },
    /// Write a puzzle sheet or single panel as PNG (or PGM by extension).
    Render {
        dataset: PathBuf,
        #[arg(long, default_value = "test")]
        split: Split,
        #[arg(long, default_value_t = 0)]
        index: usize,
        /// Panel 0-7 (context) or 8-15 (candidates) instead of the sheet.
        #[arg(long)]
        panel: Option<usize>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Solve one record symbolically and compare with its stored answer.
    Solve {
        dataset: PathBuf,
        #[arg(long, default_value = "test")]
        split: Split,
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long)]
        json: bool,
    },
    /// Serve human trials over HTTP.
    Serve(ServeArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value = "neutral")]
    regime: RegimeId,
    #[arg(long, short)]
    out: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    train: usize,
    #[arg(long = "validation", alias = "val", default_value_t = 1_000)]
    validation: usize,
    #[arg(long, default_value_t = 2_000)]
    test: usize,
    /// Override split sizes with this fraction of 1.2M/20K/200K.
    #[arg(long)]
    fraction: Option<f64>,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    distracting: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Seed for choosing held-out triples and pairs.
    #[arg(long, default_value_t = 0)]
    selection_seed: u64,
    /// Restrict colour and size to four well-separated values.
    #[arg(long)]
    human_readable: bool,
    /// Relative weights of structure sizes 1,2,3,4.
    #[arg(long, value_delimiter = ',', default_value = "1,1,1,1")]
    size_weights: Vec<u32>,
    #[arg(long, default_value_t = DEFAULT_SHARD_SIZE)]
    shard_size: usize,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct ServeArgs {
    dataset: PathBuf,
    #[arg(long, default_value = "test")]
    split: Split,
    #[arg(long, default_value = "127.0.0.1")]
    bind: IpAddr,
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value_t = 20)]
    puzzles: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Response log; defaults to trials.jsonl inside the dataset.
    #[arg(long)]
    log: Option<PathBuf>,
    /// Directory of static trials-UI assets.
    #[arg(long = "static")]
    static_dir: Option<PathBuf>,
}

fn dataset_config(a: &GenerateArgs) -> Result<DatasetConfig> {
    let mut sizes = SplitSizes { train: a.train, validation: a.validation, test: a.test };
    if let Some(f) = a.fraction {
        if !(f > 0.0 && f <= 1.0) {
            bail!("--fraction must be in (0, 1]");
        }
        let scale = |n: usize| ((n as f64 * f).round() as usize).max(1);
        sizes = SplitSizes { train: scale(FULL_SCALE_SIZES[0]), validation: scale(FULL_SCALE_SIZES[1]), test: scale(FULL_SCALE_SIZES[2]) };
    }
    let Ok(size_weights) = <[u32; 4]>::try_from(a.size_weights.as_slice()) else {
        bail!("--size-weights needs exactly four values");
    };
    if a.shard_size == 0 {
        bail!("--shard-size must be at least 1");
    }
    Ok(DatasetConfig {
        regime: a.regime,
        sizes,
        distracting: a.distracting,
        base_seed: a.seed,
        selection_seed: a.selection_seed,
        human_readable: a.human_readable,
        size_weights,
        shard_size: a.shard_size,
        threads: a.threads,
    })
}

fn print_json(v: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Generate(a) => {
            let config = dataset_config(&a)?;
            let m = cmd_generate(&config, &a.out)?;
            for s in &m.splits {
                println!("{:<10} {:>8} records {:>4} shards {:>6} retries", s.split.to_string(), s.size, s.shards.len(), s.retries);
            }
            println!("manifest: {}", a.out.join("manifest.json").display());
            Ok(true)
        }
        Command::Validate { dataset, json } => {
            let r = cmd_validate(&dataset)?;
            if json {
                print_json(&r)?;
            } else {
                println!("records: {}", r.records);
                println!("integrity issues: {}", r.integrity.len());
                for i in &r.integrity {
                    println!("  {} {:?}: {}", i.file, i.record, i.message);
                }
                for (name, t) in &r.checks {
                    let status = if t.failed == 0 { "PASS" } else { "FAIL" };
                    println!("{status} {name:<12} {} passed, {} failed", t.passed, t.failed);
                }
                for f in &r.failures {
                    println!("  {f}");
                }
            }
            Ok(r.ok())
        }
        Command::Stats { dataset, split, json } => {
            let s = cmd_stats(&dataset, split)?;
            if json {
                print_json(&s)?;
            } else {
                print!("{s}");
            }
            Ok(true)
        }
        Command::Render { dataset, split, index, panel, out } => {
            let path = cmd_render(&dataset, split, index, panel, &out)?;
            println!("{}", path.display());
            Ok(true)
        }
        Command::Solve { dataset, split, index, json } => {
            let r = cmd_solve(&dataset, split, index)?;
            if json {
                print_json(&r)?;
            } else {
                match r.solved {
                    Some(i) => println!("{split}[{index}]: candidate {i} (stored answer {})", r.stored_answer),
                    None => println!("{split}[{index}]: ambiguous, consistent candidates {:?}", r.consistent),
                }
            }
            Ok(r.agrees())
        }
        Command::Serve(a) => {
            let config = ServeConfig {
                log_path: a.log.unwrap_or_else(|| a.dataset.join("trials.jsonl")),
                dataset: a.dataset,
                split: a.split,
                puzzles_per_session: a.puzzles,
                seed: a.seed,
                static_dir: a.static_dir,
            };
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(serve(config, SocketAddr::new(a.bind, a.port)))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
