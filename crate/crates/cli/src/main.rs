//! Command-line front end: generate, transform and inspect codes, and run a
//! flat-file storage simulation with shard files.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod error;
mod store;

#[derive(Parser, Debug)]
#[command(
    name = "repairforge",
    version,
    about = "Binary MDS array codes with optimal repair"
)]
struct Cli {
    /// Seed for randomized simulation; falls back to REPAIRFORGE_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the spec file of a built-in code.
    Gen {
        #[command(subcommand)]
        family: Family,
        /// Output path; stdout when omitted.
        #[arg(short, long, global = true)]
        out: Option<PathBuf>,
    },
    /// Split a file into one shard per node.
    Encode {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        shards: PathBuf,
    },
    /// Delete the shard of one node.
    Erase {
        #[arg(long)]
        shards: PathBuf,
        #[arg(long)]
        node: usize,
    },
    /// Rebuild a lost shard from all surviving nodes and print the repair report.
    Repair {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        shards: PathBuf,
        #[arg(long)]
        node: usize,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Reassemble the original file from any k shards.
    Decode {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        shards: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Check every k-subset of nodes for full rank.
    Verify {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Apply one transformation round to a spec.
    Transform(TransformArgs),
    /// Run a whole pipeline on a base code.
    Pipeline(PipelineArgs),
    /// Simulate repair of every node and print the bandwidth table.
    Report {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
        #[arg(long, default_value_t = 3)]
        trials: usize,
    },
}

#[derive(Subcommand, Debug)]
enum Family {
    /// EVENODD over an odd prime p: (p+2, p), alpha = p − 1.
    Evenodd {
        #[arg(long)]
        p: usize,
    },
    /// The (6,4) MDR code with alpha = 8.
    Mdr1,
    /// Cauchy matrix over GF(2^w), expanded to companion matrices.
    Cauchy {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        w: usize,
    },
}

#[derive(Args, Debug)]
struct TransformArgs {
    #[arg(long)]
    spec: PathBuf,
    /// JSON transform configuration; overrides the flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated target node ids.
    #[arg(long, value_delimiter = ',')]
    targets: Vec<usize>,
    #[arg(long, value_enum, default_value_t = VariantArg::PairTargets)]
    variant: VariantArg,
    #[arg(long, value_enum, default_value_t = PermArg::Auto)]
    perms: PermArg,
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct PipelineArgs {
    #[arg(value_enum)]
    algorithm: AlgorithmArg,
    #[arg(long)]
    base: PathBuf,
    #[arg(short, long)]
    out: PathBuf,
    /// Also write the round-by-round manifest here.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = PermArg::Auto)]
    perms: PermArg,
    /// Algorithm 1 only: never use the systematic variant.
    #[arg(long)]
    pair_targets_only: bool,
    /// Algorithm 2 only: space-share even if R1 already holds.
    #[arg(long)]
    force_space_share: bool,
    #[arg(long, default_value_t = 2)]
    trials: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReportFormat {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VariantArg {
    PairTargets,
    PairRemainders,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PermArg {
    Auto,
    Identity,
    Cyclic,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AlgorithmArg {
    Alg1,
    Alg2,
}

fn seed(flag: Option<u64>) -> Result<u64, error::CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("REPAIRFORGE_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| {
            error::CliError::Config(format!("REPAIRFORGE_SEED={v:?} is not an unsigned integer"))
        }),
        Err(_) => Ok(0),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.render().to_string();
            eprintln!(
                "{}",
                serde_json::json!({ "error": { "class": "usage", "exit_code": 2, "message": msg.trim() } })
            );
            return ExitCode::from(2);
        }
    };
    let result = seed(cli.seed).and_then(|seed| commands::run(cli.command, seed));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
