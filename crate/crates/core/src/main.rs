use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cancelable_vss::batch::{self, BatchConfig};
use cancelable_vss::commands::{
    self, AuthenticateRequest, BatchRequest, EnrollRequest, SeedSource,
};
use cancelable_vss::dataset::DatasetKind;
use cancelable_vss::scheme::{MethodKind, DEFAULT_SHARES};
use cancelable_vss::{BitTransform, Error};

/// Cancelable biometric templates from XOR-chain visual secret sharing.
#[derive(Parser, Debug)]
#[command(name = "cvss", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct SchemeOpts {
    /// Cover strategy: m1 (gray covers), m2 (permuted covers), m3 (all permuted).
    #[arg(long, default_value = "m3")]
    method: MethodKind,
    /// Number of shares n (>= 2).
    #[arg(long, default_value_t = DEFAULT_SHARES)]
    shares: usize,
    /// Per-pixel bit transform: reverse8 or rotate:K (1..=7).
    #[arg(long, default_value = "reverse8")]
    bit_transform: BitTransform,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate n secret shares and a manifest for one image.
    Enroll {
        /// PGM or BMP biometric image.
        input: PathBuf,
        #[command(flatten)]
        scheme: SchemeOpts,
        /// Master seed; per-slot seeds are derived from it.
        #[arg(long, conflicts_with = "seeds")]
        seed: Option<u64>,
        /// Comma-separated seeds, one per slot (n-1 for m1/m2, n for m3).
        #[arg(long)]
        seeds: Option<String>,
        /// M1 cover image (repeat n-1 times). Without covers M1 uses seeded textures.
        #[arg(long = "cover")]
        covers: Vec<PathBuf>,
        #[arg(long)]
        user_id: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reconstruct the secret and covers from a complete share set.
    Authenticate {
        manifest: PathBuf,
        /// Directory holding the share files (default: the manifest's directory).
        #[arg(long)]
        share_dir: Option<PathBuf>,
        /// Permutation seeds; for m3 the first one reveals the original image.
        #[arg(long)]
        seeds: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare every share of a template with the original image.
    Evaluate {
        original: PathBuf,
        manifest: PathBuf,
        #[arg(long)]
        share_dir: Option<PathBuf>,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Enroll and evaluate a whole dataset.
    Batch {
        dataset_root: PathBuf,
        #[arg(long, default_value = "flat")]
        dataset_kind: DatasetKind,
        /// One or more methods, comma-separated.
        #[arg(long, value_delimiter = ',', default_value = "m1,m2,m3")]
        method: Vec<MethodKind>,
        #[arg(long, default_value_t = DEFAULT_SHARES)]
        shares: usize,
        #[arg(long, default_value = "reverse8")]
        bit_transform: BitTransform,
        /// Master seed for per-image seeds.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report base path; writes <base>.csv and <base>.json.
        #[arg(long)]
        report: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Enroll {
            input,
            scheme,
            seed,
            seeds,
            covers,
            user_id,
            out,
        } => {
            let seeds = match (seed, seeds) {
                (_, Some(list)) => SeedSource::Explicit(commands::parse_seed_list(&list)?),
                (Some(master), None) => SeedSource::Master(master),
                (None, None) => SeedSource::Auto,
            };
            let manifest = commands::cmd_enroll(&EnrollRequest {
                input,
                method: scheme.method,
                n: scheme.shares,
                bit_transform: scheme.bit_transform,
                seeds,
                out_dir: out.clone(),
                user_id,
                covers,
            })?;
            println!(
                "enrolled {} ({}, n = {}) -> {}",
                manifest.user_id,
                manifest.method,
                manifest.n,
                out.join(commands::MANIFEST_FILE).display()
            );
        }
        Command::Authenticate {
            manifest,
            share_dir,
            seeds,
            out,
        } => {
            let seeds = seeds.map(|s| commands::parse_seed_list(&s)).transpose()?;
            let outcome = commands::cmd_authenticate(&AuthenticateRequest {
                manifest,
                share_dir,
                seeds,
                out_dir: out,
            })?;
            println!("digests verified; secret -> {}", outcome.secret.display());
            for c in &outcome.covers {
                println!("cover -> {}", c.display());
            }
            if let Some(o) = &outcome.revealed {
                println!("original -> {}", o.display());
            }
        }
        Command::Evaluate {
            original,
            manifest,
            share_dir,
            report,
        } => {
            let eval = commands::cmd_evaluate(&original, &manifest, share_dir.as_deref())?;
            let json = serde_json::to_string_pretty(&eval).expect("report serializes") + "\n";
            print!(
                "{}",
                batch::format_table(&[(eval.method.to_string(), eval.report)])
            );
            match report {
                Some(path) => {
                    std::fs::write(&path, json).map_err(|e| Error::Io { path, source: e })?
                }
                None => print!("{json}"),
            }
        }
        Command::Batch {
            dataset_root,
            dataset_kind,
            method,
            shares,
            bit_transform,
            seed,
            report,
        } => {
            let outcome = commands::cmd_batch(&BatchRequest {
                root: dataset_root,
                config: BatchConfig {
                    kind: dataset_kind,
                    methods: method,
                    n: shares,
                    bit_transform,
                    master_seed: seed,
                },
                report,
            })?;
            let r = &outcome.report;
            println!(
                "{} images ({} skipped), n = {}, {}",
                r.image_count, r.skipped, r.n, r.pairing
            );
            let rows: Vec<_> = r
                .methods
                .iter()
                .map(|m| (m.method.to_string(), m.report))
                .collect();
            print!("{}", batch::format_table(&rows));
            println!(
                "rows -> {}\naggregate -> {}",
                outcome.csv_path.display(),
                outcome.json_path.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
