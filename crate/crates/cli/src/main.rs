//! Command line front end for the chain simulator.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use chainsim::chain_model::GimbalOrder;
use chainsim::dataset_io::DatasetFormat;
use chainsim::error::Error;
use chainsim::randomizer::Mode;
use chainsim::runner::{
    dump_scene, inspect_path, run_batch, run_once, validate_kinematics, RunConfig,
};

#[derive(Parser, Debug)]
#[command(
    name = "chainsim",
    version,
    about = "Synthetic IMU datasets from a reconfigurable serial chain simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate one dataset with its manifest.
    Run(ConfigArgs),
    /// Generate several datasets, advancing the seed between items
    /// when --randomize-each-run is set.
    Batch {
        #[command(flatten)]
        config: ConfigArgs,
        /// Number of datasets to generate.
        #[arg(long = "batch", value_name = "N")]
        batch: Option<usize>,
    },
    /// Summarize a dataset or manifest file.
    Inspect {
        /// Dataset (.csv or .bin) or manifest (.json) path.
        path: PathBuf,
    },
    /// Print the compiled scene as JSON: link types, the elementary
    /// transform sequence and every tracked frame at rest.
    DumpScene(ConfigArgs),
    /// Run the built in consistency checks.
    Validate {
        /// Seed for the randomized checks.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    Mode::from_str(s).map_err(|e| e.to_string())
}

fn parse_format(s: &str) -> Result<DatasetFormat, String> {
    DatasetFormat::from_str(s).map_err(|e| e.to_string())
}

fn parse_gimbal(s: &str) -> Result<GimbalOrder, String> {
    GimbalOrder::from_str(s).map_err(|e| e.to_string())
}

/// Run settings; every flag overrides the corresponding field of the
/// optional JSON configuration file.
#[derive(Args, Debug, Default)]
struct ConfigArgs {
    /// JSON configuration file with the same fields as the manifest's
    /// run settings.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// 1/randomize draws a fresh chain, 2/from-inputs uses the
    /// provided tables.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
    #[arg(long)]
    seed: Option<u64>,
    /// Trajectory length in seconds.
    #[arg(long, value_name = "SECONDS")]
    duration: Option<f64>,
    /// Sample rate in Hz.
    #[arg(long, value_name = "HZ")]
    rate: Option<f64>,
    /// Output dataset path; the manifest lands next to it.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Dataset encoding (csv or binary); default follows the output
    /// file extension.
    #[arg(long, value_parser = parse_format)]
    format: Option<DatasetFormat>,
    /// Write clean sensor channels without measurement noise.
    #[arg(long)]
    no_noise: bool,
    /// Advance the seed after every run of a batch.
    #[arg(long)]
    randomize_each_run: bool,
    /// Chain parameter table (numeric text or a manifest to lift it from).
    #[arg(long, value_name = "PATH")]
    dh: Option<PathBuf>,
    /// Joint oscillation table (numeric text or a manifest).
    #[arg(long, value_name = "PATH")]
    joints: Option<PathBuf>,
    /// Base oscillation table (numeric text or a manifest).
    #[arg(long, value_name = "PATH")]
    base: Option<PathBuf>,
    /// Rotation order of the base gimbal, e.g. xyz or zyx.
    #[arg(long, value_parser = parse_gimbal)]
    gimbal_order: Option<GimbalOrder>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<RunConfig, Error> {
        let mut config = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                serde_json::from_str(&text).map_err(|e| Error::Parse {
                    path: path.display().to_string(),
                    detail: e.to_string(),
                })?
            }
            None => RunConfig::default(),
        };
        if let Some(mode) = self.mode {
            config.mode = mode;
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(duration) = self.duration {
            config.duration_s = duration;
        }
        if let Some(rate) = self.rate {
            config.sample_rate_hz = rate;
        }
        if let Some(out) = &self.out {
            config.out = out.clone();
        }
        if let Some(format) = self.format {
            config.format = Some(format);
        }
        if self.no_noise {
            config.noise = false;
        }
        if self.randomize_each_run {
            config.randomize_each_run = true;
        }
        if let Some(path) = &self.dh {
            config.dh_path = Some(path.clone());
        }
        if let Some(path) = &self.joints {
            config.joints_path = Some(path.clone());
        }
        if let Some(path) = &self.base {
            config.base_path = Some(path.clone());
        }
        if let Some(order) = self.gimbal_order {
            config.gimbal_order = order;
        }
        Ok(config)
    }
}

fn execute(command: Command) -> Result<u8, Error> {
    match command {
        Command::Run(args) => {
            let config = args.resolve()?;
            let artifacts = run_once(&config)?;
            println!("dataset: {}", artifacts.dataset_path.display());
            println!("manifest: {}", artifacts.manifest_path.display());
            println!("rows: {}", artifacts.rows);
            println!("seed: {}", artifacts.seed);
            Ok(0)
        }
        Command::Batch { config, batch } => {
            let mut config = config.resolve()?;
            if let Some(n) = batch {
                config.batch_count = n;
            }
            let (summary, path) = run_batch(&config)?;
            println!("batch summary: {}", path.display());
            println!("items: {}", summary.count);
            let seeds: Vec<String> = summary.items.iter().map(|i| i.seed.to_string()).collect();
            println!("seeds: [{}]", seeds.join(", "));
            for item in &summary.items {
                println!(
                    "  {:03}: seed {} rows {} {}",
                    item.index,
                    item.seed,
                    item.rows,
                    item.dataset.display()
                );
            }
            Ok(0)
        }
        Command::Inspect { path } => {
            for line in inspect_path(&path)? {
                println!("{line}");
            }
            Ok(0)
        }
        Command::DumpScene(args) => {
            let config = args.resolve()?;
            let scene = dump_scene(&config)?;
            let text = serde_json::to_string_pretty(&scene)
                .map_err(|e| Error::Config(format!("scene serialization: {e}")))?;
            println!("{text}");
            Ok(0)
        }
        Command::Validate { seed } => {
            let report = validate_kinematics(seed);
            println!("{report}");
            Ok(if report.passed() { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
