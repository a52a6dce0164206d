//! `rds-ss`: estimation and simulation for respondent-driven sampling data.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rds_ss_cli::commands::{self, resolve_seed, FitArgs, InlineSimulate, MethodArg, RegimeArg};
use rds_ss_cli::errors::CliResult;

#[derive(Parser)]
#[command(
    name = "rds-ss",
    version,
    about = "Successive-sampling estimation for respondent-driven sampling data",
    long_about = "Estimates population proportions from RDS samples with the \
successive-sampling (PPSWOR) estimator, the Volz-Heckathorn estimator, and \
the sample mean; generates synthetic networks and chain-referral samples; \
and runs replicated bias/variance/MSE studies."
)]
struct Cli {
    /// Worker threads for replicated simulation (default: all cores;
    /// RDS_SS_THREADS as fallback).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate a population proportion from an RDS sample file.
    Estimate {
        /// Sample CSV: `id,recruiter_id,degree,outcome[,wave]`.
        #[arg(long)]
        input: PathBuf,

        #[arg(long, value_enum)]
        method: MethodArg,

        /// Assumed population size (required for --method ss).
        #[arg(long)]
        population_size: Option<usize>,

        #[command(flatten)]
        fit: FitArgs,

        /// Repair degree anomalies (0 -> 1; above N-1 capped) instead of
        /// rejecting the file.
        #[arg(long)]
        repair: bool,

        /// Also write estimate.json and manifest.json here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },

    /// Population-size sensitivity curve of the SS estimate.
    Sensitivity {
        /// Sample CSV (alternative: --preset).
        #[arg(long, required_unless_present = "preset", conflicts_with = "preset")]
        input: Option<PathBuf>,

        /// Assumed-population grid "min:max:points"; min must be >= n.
        #[arg(long, required_unless_present = "preset", conflicts_with = "preset")]
        grid: Option<String>,

        /// Built-in synthetic analysis: fig6-desk or fig6-paper.
        #[arg(long)]
        preset: Option<String>,

        #[command(flatten)]
        fit: FitArgs,

        #[arg(long)]
        repair: bool,

        #[arg(long)]
        out_dir: Option<PathBuf>,
    },

    /// Generate synthetic networks and chain-referral samples.
    Simulate {
        /// JSON config {net, design, graphs}; alternative to inline flags.
        #[arg(long, conflicts_with_all = ["population", "prevalence", "mean_degree",
            "activity_ratio", "homophily", "target_n"])]
        config: Option<PathBuf>,

        #[arg(long)]
        population: Option<usize>,

        #[arg(long)]
        prevalence: Option<f64>,

        #[arg(long)]
        mean_degree: Option<f64>,

        /// Activity ratio w (infected over uninfected mean degree).
        #[arg(long)]
        activity_ratio: Option<f64>,

        /// Homophily R (infected-infected over mixed tie probability).
        #[arg(long)]
        homophily: Option<f64>,

        /// Target sample size of the referral process.
        #[arg(long)]
        target_n: Option<usize>,

        #[arg(long, default_value_t = 10)]
        seed_count: usize,

        #[arg(long, default_value_t = 2)]
        coupons: usize,

        #[arg(long, value_enum, default_value_t = RegimeArg::Random)]
        regime: RegimeArg,

        /// Replace dead chains with fresh seeds instead of reporting
        /// exhaustion.
        #[arg(long)]
        reseed: bool,

        /// Number of (graph, sample) replicates to emit.
        #[arg(long, default_value_t = 1)]
        graphs: usize,

        #[arg(long)]
        seed: Option<u64>,

        #[arg(long)]
        out_dir: PathBuf,
    },

    /// Run a replicated simulation study.
    Study {
        /// JSON config {scenarios: [...]}; alternative to --preset.
        #[arg(long, required_unless_present = "preset", conflicts_with = "preset")]
        config: Option<PathBuf>,

        /// Built-in grid: {fig1|fig3|table2}-{desk|paper}.
        #[arg(long)]
        preset: Option<String>,

        /// Override the replicate count of every scenario.
        #[arg(long)]
        replicates: Option<usize>,

        #[arg(long)]
        seed: Option<u64>,

        #[arg(long)]
        out_dir: Option<PathBuf>,
    },

    /// Degree-to-inclusion-probability curve tables.
    Curves {
        /// Degree distribution CSV: degree,count.
        #[arg(long)]
        input: PathBuf,

        /// Sample fractions of the population, e.g. "0.5,0.7,0.95".
        #[arg(long, required_unless_present = "sizes", conflicts_with = "sizes")]
        fractions: Option<String>,

        /// Explicit sample sizes, e.g. "100,250".
        #[arg(long)]
        sizes: Option<String>,

        #[command(flatten)]
        fit: FitArgs,

        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn init_threads(threads: Option<usize>) {
    let from_env = std::env::var("RDS_SS_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    if let Some(n) = threads.or(from_env) {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            log::warn!("worker pool already initialized: {e}");
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    init_threads(cli.threads);
    match cli.command {
        Command::Estimate {
            input,
            method,
            population_size,
            fit,
            repair,
            out_dir,
        } => commands::estimate(
            &input,
            method,
            population_size,
            &fit,
            repair,
            out_dir.as_deref(),
        ),
        Command::Sensitivity {
            input,
            grid,
            preset,
            fit,
            repair,
            out_dir,
        } => commands::sensitivity(
            input.as_deref(),
            grid.as_deref(),
            preset.as_deref(),
            &fit,
            repair,
            out_dir.as_deref(),
        ),
        Command::Simulate {
            config,
            population,
            prevalence,
            mean_degree,
            activity_ratio,
            homophily,
            target_n,
            seed_count,
            coupons,
            regime,
            reseed,
            graphs,
            seed,
            out_dir,
        } => {
            let inline = InlineSimulate {
                population,
                prevalence,
                mean_degree,
                activity_ratio,
                homophily,
                target_n,
                seed_count,
                coupons,
                regime: regime.into(),
                reseed,
                graphs,
            };
            commands::simulate(config.as_deref(), inline, resolve_seed(seed), &out_dir)
        }
        Command::Study {
            config,
            preset,
            replicates,
            seed,
            out_dir,
        } => commands::study(
            config.as_deref(),
            preset.as_deref(),
            replicates,
            resolve_seed(seed),
            out_dir.as_deref(),
        ),
        Command::Curves {
            input,
            fractions,
            sizes,
            fit,
            out_dir,
        } => commands::curves(
            &input,
            fractions.as_deref(),
            sizes.as_deref(),
            &fit,
            out_dir.as_deref(),
        ),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
