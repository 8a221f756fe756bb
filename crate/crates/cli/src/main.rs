use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use archevo_cli::{cmd_gen_table, cmd_run, cmd_verify};

/// Network-free architecture generation by fitness-guided denoising.
#[derive(Parser)]
#[command(name = "archevo", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a generation experiment from a config file
    Run {
        /// Path to a TOML run config
        #[arg(long)]
        config: PathBuf,
        /// Override any config key, e.g. --set beta=20 --set oracle.seed=3
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Override the run seed (applied after --set)
        #[arg(long)]
        seed: Option<u64>,
        /// Override the output directory (applied after --set)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a complete benchmark table with a planted optimum
    GenTable {
        /// Decision slots of the search space
        #[arg(long)]
        d1: usize,
        /// Operation choices per slot
        #[arg(long)]
        d2: usize,
        /// Planted optimum genotype, e.g. 4-0-3-1-4-0
        #[arg(long)]
        optimum: String,
        /// Noise amplitude added to the hamming-based fitness
        #[arg(long, default_value_t = 0.05)]
        smoothness: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output table path
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the brute-force optimum genotype and fitness of a table
    Verify {
        #[arg(long)]
        table: PathBuf,
        /// Refuse tables spanning more genotypes than this
        #[arg(long, default_value_t = archevo::DEFAULT_BRUTE_FORCE_CAP)]
        cap: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run {
            config,
            set,
            seed,
            out,
        } => cmd_run(&config, &set, seed, out).map(|summary| summary.to_line()),
        Command::GenTable {
            d1,
            d2,
            optimum,
            smoothness,
            seed,
            out,
        } => cmd_gen_table(d1, d2, &optimum, smoothness, seed, &out).map(|()| String::new()),
        Command::Verify { table, cap } => {
            cmd_verify(&table, cap).map(|(genotype, fitness)| format!("{genotype} {fitness}"))
        }
    };
    match outcome {
        Ok(line) => {
            if !line.is_empty() {
                println!("{line}");
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
