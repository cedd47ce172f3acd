use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use legendre_cli::commands;
use legendre_cli::config::load_config;
use legendre_cli::error::CliError;
use legendre_core::diagnostics::MoserParams;

const AFTER_HELP: &str = concat!(
    "Integrand language:\n",
    "  expr := term ('+' term)*\n",
    "  term := [coeff '*'] atom\n",
    "  atom := 'power(mu=<r>,p=<r>)' | 'axis(i=<int>,q=<r>)' | 'poly(<file>)'\n",
    "\n",
    "Exit codes:\n",
    "  0  success\n",
    "  1  a certification or diagnostic check failed\n",
    "  2  configuration, i/o or csv error\n",
    "  3  solver did not converge\n",
);

#[derive(Parser)]
#[command(name = "legendre", version, about = "Legendre (p,q)-growth experiments", after_help = AFTER_HELP)]
struct Cli {
    /// Write CSV here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify the growth and ellipticity constants of the configured integrand.
    Check { config: PathBuf },
    /// Evaluate the convex conjugate at given or sampled points.
    Conjugate {
        config: PathBuf,
        /// Point as comma-separated row-major entries; repeatable.
        #[arg(long, value_delimiter = ',', num_args = 1.., action = clap::ArgAction::Append)]
        xi: Vec<f64>,
        /// Number of seeded samples when no --xi is given.
        #[arg(long, default_value_t = 16)]
        samples: usize,
        /// Largest sample norm.
        #[arg(long, default_value_t = 10.0)]
        radius: f64,
    },
    /// Run the regularized scheme for every configured amplitude.
    Solve {
        config: PathBuf,
        /// Directory for node and gradient CSVs of the final fields.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve directly and measure the configured estimates.
    Diagnose { config: PathBuf },
    /// Run diagnostics over the [sweep] axis.
    Sweep { config: PathBuf },
    /// Tabulate the Gehring exponent over comma-separated parameter lists.
    Gehring {
        #[arg(long, value_delimiter = ',', required = true)]
        c0: Vec<f64>,
        #[arg(long = "M", value_delimiter = ',', required = true)]
        big_m: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<f64>,
    },
    /// Tabulate the Moser iteration and its limit bound.
    Moser {
        #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
        alpha0: f64,
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0)]
        c0: f64,
        #[arg(long = "M", default_value_t = 1.0)]
        big_m: f64,
        #[arg(long, default_value_t = 1.0)]
        tau1: f64,
        #[arg(long, default_value_t = 0.5)]
        tau2: f64,
        #[arg(long, default_value_t = 1.0)]
        v0: f64,
        #[arg(long, default_value_t = 10)]
        steps: u32,
    },
}

fn run(cmd: Command, out: &mut dyn Write) -> Result<bool, CliError> {
    match cmd {
        Command::Check { config } => commands::check(&load_config(&config)?, out),
        Command::Conjugate { config, xi, samples, radius } => {
            let cfg = load_config(&config)?;
            let width = cfg.regime.n * cfg.regime.big_n;
            if xi.len() % width != 0 {
                return Err(CliError::Config(format!(
                    "--xi needs multiples of {width} entries, got {}",
                    xi.len()
                )));
            }
            let points: Vec<Vec<f64>> = xi.chunks(width).map(<[f64]>::to_vec).collect();
            commands::conjugate_table(&cfg, &points, samples, radius, out)
        }
        Command::Solve { config, out: dir } => {
            commands::solve(&load_config(&config)?, dir.as_deref(), out)
        }
        Command::Diagnose { config } => commands::diagnose(&load_config(&config)?, out),
        Command::Sweep { config } => commands::sweep(&load_config(&config)?, out),
        Command::Gehring { c0, big_m, m } => commands::gehring_table(&c0, &big_m, &m, out),
        Command::Moser { alpha0, gamma, c0, big_m, tau1, tau2, v0, steps } => {
            let p = MoserParams::new(alpha0, gamma, c0, big_m, tau1, tau2)?;
            commands::moser_table(&p, v0, steps, out)
        }
    }
}

fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = sink(cli.output.as_deref())
        .map_err(CliError::from)
        .and_then(|mut out| {
            let ok = run(cli.command, &mut *out)?;
            out.flush()?;
            Ok(ok)
        });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("legendre: a certification or diagnostic check failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("legendre: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
