use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use iobt_activation::harness::{
    emit_csv, emit_plot, run_single, run_verification, sweep_m, sweep_pe, ExperimentConfig, SweepResult,
    VerifyOptions,
};
use iobt_activation::Error;

/// Secure sensor activation simulator.
#[derive(Parser, Debug)]
#[command(name = "iobt-sim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one configuration and print per-run metrics as JSON lines.
    Simulate(Common),
    /// Sweep the compromise probability, one curve per network size.
    SweepPe {
        #[command(flatten)]
        common: Common,
        /// Compromise probabilities (x axis).
        #[arg(long, value_delimiter = ',', default_value = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1")]
        pe: Vec<f64>,
        /// Network sizes (one curve each).
        #[arg(long, value_delimiter = ',', default_value = "1000,3000")]
        m: Vec<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sweep the network size, one curve per compromise probability.
    SweepM {
        #[command(flatten)]
        common: Common,
        /// Network sizes (x axis).
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "500,1000,1500,2000,2500,3000,3500,4000,4500,5000"
        )]
        m: Vec<usize>,
        /// Compromise probabilities (one curve each).
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.5")]
        pe: Vec<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the brute-force oracle suite on random small games.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Random instances for the potential audit.
        #[arg(long, default_value_t = 1000)]
        audit_instances: usize,
        /// Sensors checked against type enumeration.
        #[arg(long, default_value_t = 1000)]
        secrecy_sensors: usize,
        /// Small games checked against profile enumeration.
        #[arg(long, default_value_t = 200)]
        containment_instances: usize,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// JSON file with ExperimentConfig fields; missing fields keep defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Runs per point.
    #[arg(long)]
    runs: Option<usize>,
    /// Field override such as `channel.path_loss_exp=3.5`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Also write one SVG chart per headline metric.
    #[arg(long)]
    plots: bool,
}

const PLOTTED: &[&str] = &[
    "activated_mean",
    "energy_reduction_pct_mean",
    "active_joint_entropy_mean",
    "passes_mean",
];

enum Failure {
    Lib(Error),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig, Error> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        for assignment in &self.overrides {
            config.set(assignment)?;
        }
        if let Some(seed) = self.seed {
            config.master_seed = seed;
        }
        if let Some(runs) = self.runs {
            config.runs = runs;
        }
        config.validate()?;
        Ok(config)
    }
}

fn write_outputs(result: &SweepResult, output: &OutputArgs, stem: &str) -> Result<(), Error> {
    std::fs::create_dir_all(&output.out).map_err(|e| Error::Io {
        path: output.out.clone(),
        source: e,
    })?;
    let csv = output.out.join(format!("{stem}.csv"));
    emit_csv(result, &csv)?;
    println!("wrote {}", csv.display());
    if output.plots {
        for metric in PLOTTED {
            let path = output.out.join(format!("{stem}_{metric}.svg"));
            emit_plot(result, metric, &path)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate(common) => {
            let config = common.load()?;
            for k in 0..config.runs as u64 {
                let metrics = run_single(&config, k)?;
                println!("{}", serde_json::to_string(&metrics).expect("metrics serialize"));
            }
        }
        Command::SweepPe { common, pe, m, output } => {
            let result = sweep_pe(&common.load()?, &pe, &m)?;
            write_outputs(&result, &output, "sweep_pe")?;
        }
        Command::SweepM { common, m, pe, output } => {
            let result = sweep_m(&common.load()?, &m, &pe)?;
            write_outputs(&result, &output, "sweep_m")?;
        }
        Command::Verify {
            seed,
            audit_instances,
            secrecy_sensors,
            containment_instances,
        } => {
            let opts = VerifyOptions {
                seed,
                audit_instances,
                secrecy_sensors,
                containment_instances,
                ..Default::default()
            };
            let report = run_verification(&opts)?;
            for c in &report.checks {
                println!(
                    "{} {}: samples={} worst={:.3e} ({:.2}s)",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.samples,
                    c.worst,
                    c.seconds
                );
            }
            if !report.passed() {
                return Err(Failure::Verification);
            }
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } | Error::Csv { .. } => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => {
            eprintln!("verification failed");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
