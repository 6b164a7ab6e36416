//! Thin command-line front end over the library's command implementations.

use clap::{Parser, Subcommand};
use gfc_stability::cli;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "gfcsim",
    version,
    about = "Transient stability of a current-limited grid-forming converter: \
             scenario simulation, power-angle curves, and stability margins"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario config and write the trajectory CSV
    /// (exit 0 = stable, 2 = loss of synchronism)
    Simulate {
        /// Scenario config file
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path (default: $GFCSIM_OUT_DIR/trajectory.csv)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override a config key, e.g. --override gfc.p_set_pu=0.9 (repeatable)
        #[arg(long = "override", value_name = "SECTION.KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Sweep the power-angle curves (unlimited, limited, virtual) to CSV
    Curve {
        /// Scenario config file
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path (default: $GFCSIM_OUT_DIR/curves.csv)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override a config key (repeatable)
        #[arg(long = "override", value_name = "SECTION.KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Compute stability margins for both feedback modes
    Margin {
        /// Scenario config file
        #[arg(long)]
        config: PathBuf,
        /// Also write the machine-readable margin CSV here
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override a config key (repeatable)
        #[arg(long = "override", value_name = "SECTION.KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Run the canned six-scenario suite (three grid events by two
    /// feedback modes) and check the expected verdict matrix
    ReproducePaper {
        /// Output directory (default: $GFCSIM_OUT_DIR/reproduction)
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn main() {
    let args = Cli::parse();
    let code = match args.command {
        Command::Simulate {
            config,
            out,
            overrides,
        } => {
            let out = out.unwrap_or_else(|| cli::default_out_dir().join("trajectory.csv"));
            cli::cmd_simulate(&config, &out, &overrides)
        }
        Command::Curve {
            config,
            out,
            overrides,
        } => {
            let out = out.unwrap_or_else(|| cli::default_out_dir().join("curves.csv"));
            cli::cmd_curve(&config, &out, &overrides)
        }
        Command::Margin {
            config,
            out,
            overrides,
        } => cli::cmd_margin(&config, out.as_deref(), &overrides),
        Command::ReproducePaper { out_dir } => {
            let out_dir = out_dir.unwrap_or_else(|| cli::default_out_dir().join("reproduction"));
            cli::cmd_reproduce_paper(&out_dir)
        }
    };
    std::process::exit(code);
}
