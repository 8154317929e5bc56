use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use beamtrain::Scheme;
use beamtrain_cli::bench::cmd_bench;
use beamtrain_cli::config::{load_config, ConfigLayers, Origin};
use beamtrain_cli::run::{cmd_run, RunOptions};
use beamtrain_cli::sweep::{cmd_sweep, SweepParam, SweepSpec};
use beamtrain_cli::CliError;

#[derive(Parser)]
#[command(name = "beamtrain", version, about = "Terahertz beam training simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one configuration and write per-frame results.
    Run {
        #[command(flatten)]
        common: Common,
        /// Start from a saved Q-table.
        #[arg(long, value_name = "PATH")]
        q_in: Option<PathBuf>,
        /// Save the learned Q-table.
        #[arg(long, value_name = "PATH")]
        q_out: Option<PathBuf>,
    },
    /// Sweep one parameter over a list of values, schemes and seeds.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// velocity, t_ti, n_beams, freq, radius or scheme.
        #[arg(long)]
        param: SweepParamArg,
        /// Comma-separated values of the swept parameter.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        /// Comma-separated schemes; defaults to the configured one.
        #[arg(long, value_delimiter = ',')]
        schemes: Vec<String>,
        /// Seeds per point, counting up from the configured seed.
        #[arg(long, default_value_t = 1)]
        seeds: usize,
        /// Also draw one SVG line chart per metric.
        #[arg(long)]
        plot: bool,
    },
    /// Compare all six schemes under one scenario.
    Bench {
        #[command(flatten)]
        common: Common,
        /// Seeds to average over, counting up from the configured seed.
        #[arg(long, default_value_t = 10)]
        seeds: usize,
    },
}

#[derive(Clone)]
struct SweepParamArg(SweepParam);

impl std::str::FromStr for SweepParamArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.parse().map(SweepParamArg).map_err(|e: CliError| e.to_string())
    }
}

#[derive(Args)]
struct Common {
    /// `key = value` configuration file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    frames: Option<String>,
    /// eetbf, exhaustive, random, iterative, linear or binary.
    #[arg(long, value_name = "TAG")]
    scheme: Option<String>,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Override one configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

impl Common {
    fn layers(&self) -> Result<ConfigLayers, CliError> {
        let mut layers = load_config(self.config.as_deref(), &self.set)?;
        for (key, flag, value) in
            [("seed", "--seed", &self.seed), ("frames", "--frames", &self.frames), ("scheme", "--scheme", &self.scheme)]
        {
            if let Some(v) = value {
                layers.set(key, v, Origin::Override(format!("{flag} {v}")))?;
            }
        }
        Ok(layers)
    }
}

fn report_warnings(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { common, q_in, q_out } => {
            let config = common.layers()?.resolve()?;
            report_warnings(&config.warnings);
            let opts = RunOptions { out: &common.out, q_in: q_in.as_deref(), q_out: q_out.as_deref() };
            let report = cmd_run(&config, &opts)?;
            print!("{}", report.summary);
            for p in &report.written {
                println!("wrote {}", p.display());
            }
        }
        Command::Sweep { common, param, values, schemes, seeds, plot } => {
            let layers = common.layers()?;
            let resolved = layers.resolve()?;
            report_warnings(&resolved.warnings);
            let schemes = if schemes.is_empty() {
                vec![resolved.sim.scheme]
            } else {
                schemes
                    .iter()
                    .map(|s| s.parse::<Scheme>().map_err(|e| CliError::Usage(e.to_string())))
                    .collect::<Result<_, _>>()?
            };
            let spec = SweepSpec { param: param.0, values, schemes, seeds };
            let report = cmd_sweep(&layers, &spec, &common.out, common.workers, plot)?;
            println!("{} summary rows", report.rows.len());
            println!("wrote {}", common.out.join("sweep.csv").display());
        }
        Command::Bench { common, seeds } => {
            let layers = common.layers()?;
            report_warnings(&layers.resolve()?.warnings);
            let report = cmd_bench(&layers, seeds, &common.out, common.workers)?;
            print!("{}", report.table);
            for p in &report.written {
                println!("wrote {}", p.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
