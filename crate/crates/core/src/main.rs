//! Thin command-line front end; all logic lives in the library.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use squeezescan::cli::{self, CommandReport, CommonOpts, MonteCarloOpts, OutputFormat};
use squeezescan::config::ConfigFile;

#[derive(Parser)]
#[command(
    name = "squeezescan",
    version,
    about = "Squeezed resonant receiver simulation and scan-rate optimization"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for the manifest and data files.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the configured RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of frequency/coupling grid points.
    #[arg(long, default_value_t = 501)]
    grid_points: usize,
    /// Data file format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Export susceptibilities, output spectrum and sensitivity over frequency.
    Spectrum(Common),
    /// Optimize the measurement coupling for each configured gain.
    Optimize(Common),
    /// Sweep the closed-form scan rate over a (gain, coupling) grid.
    ScanRate(Common),
    /// Integrate the Langevin batch and compare its spectrum to the model.
    Montecarlo {
        #[command(flatten)]
        common: Common,
        /// Welch segment length (samples); defaults to the config value.
        #[arg(long)]
        segment_length: Option<usize>,
        /// Welch segment overlap fraction; defaults to the config value.
        #[arg(long)]
        overlap: Option<f64>,
        /// Per-bin relative tolerance for the measured-vs-analytic check.
        #[arg(long, default_value_t = 0.05)]
        tolerance: f64,
        /// Also dump the first trajectory as time,x,y (size-guarded).
        #[arg(long)]
        dump_trajectory: bool,
    },
    /// Closed-form vs Monte Carlo estimator variance table.
    Estimate(Common),
}

fn common_opts(common: &Common) -> CommonOpts {
    CommonOpts {
        out_dir: common.out.clone(),
        seed: common.seed,
        grid_points: common.grid_points,
        format: match common.format {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        },
    }
}

fn run(args: Args) -> squeezescan::Result<CommandReport> {
    let common = match &args.command {
        Command::Spectrum(c)
        | Command::Optimize(c)
        | Command::ScanRate(c)
        | Command::Estimate(c) => c,
        Command::Montecarlo { common, .. } => common,
    };
    let resolved = ConfigFile::from_path(&common.config)?.resolve()?;
    let opts = common_opts(common);
    match &args.command {
        Command::Spectrum(_) => cli::cmd_spectrum(&resolved, &opts),
        Command::Optimize(_) => cli::cmd_optimize(&resolved, &opts),
        Command::ScanRate(_) => cli::cmd_scan_rate(&resolved, &opts),
        Command::Estimate(_) => cli::cmd_estimate(&resolved, &opts),
        Command::Montecarlo {
            segment_length,
            overlap,
            tolerance,
            dump_trajectory,
            ..
        } => {
            let mc = MonteCarloOpts {
                segment_length: *segment_length,
                overlap: *overlap,
                tolerance: *tolerance,
                dump_trajectory: *dump_trajectory,
            };
            cli::cmd_montecarlo(&resolved, &opts, &mc)
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let args = Args::parse();
    match run(args) {
        Ok(report) => {
            println!("{}", report.summary);
            for file in &report.files {
                println!("wrote {}", file.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(cli::exit_code(&err) as u8)
        }
    }
}
