use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use vdw_cli::analysis;
use vdw_cli::config::{Quantity, RunConfig};
use vdw_cli::run;
use vdw_cli::suites;
use vdw_cli::table::Table;
use vdw_core::quadrature::Tolerance;

/// Two-body dispersion potentials, decay and energy-transfer rates for
/// two-level atoms.  Inputs in SI units (rad/s, meters, Kelvin; dipoles in
/// atomic units); output energies and rates in rad/s ≡ 1/s.
#[derive(Parser)]
#[command(name = "vdw", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output table path (overrides the config).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Relative quadrature tolerance (overrides the config).
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Distance scan of a self-energy or transfer rate.
    Scan {
        #[command(flatten)]
        common: ConfigArgs,
        /// Quantity to scan (overrides the config): gg, ge_keldysh,
        /// ge_feynman or fret.
        #[arg(long)]
        quantity: Option<String>,
        /// Worker threads for the point map (0 = all cores).
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Spontaneous, thermal and transfer rates at the configured geometry.
    Rates {
        #[command(flatten)]
        common: ConfigArgs,
    },
    /// Randomized identity checks of the response-function layer.
    Identities {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Finite-mode oracle: pipeline vs fourth-order perturbation theory.
    Oracle {
        #[arg(long, default_value_t = 20)]
        models: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Least-squares power-law fit of a scan column.
    Fit {
        /// Table produced by `scan`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        column: String,
        /// Radius window in meters, `rmin:rmax`.
        #[arg(long)]
        window: Option<String>,
    },
    /// Zero-crossing statistics of a scan column.
    Oscillations {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        column: String,
    },
}

fn load_config(common: &ConfigArgs) -> Result<(RunConfig, PathBuf)> {
    let mut config = RunConfig::load(&common.config)?;
    if let Some(tol) = common.tol {
        config.tolerances.rel = tol;
        config.validate().context("--tol")?;
    }
    let base_dir = common
        .config
        .parent()
        .map(|p| p.to_path_buf())
        .unwrap_or_else(|| PathBuf::from("."));
    Ok((config, base_dir))
}

fn output_path(common: &ConfigArgs, config: &RunConfig, default_name: &str) -> PathBuf {
    common
        .output
        .clone()
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from(default_name))
}

fn header(config: &RunConfig, extra: &[String]) -> Vec<String> {
    let mut lines = vec![
        format!("vdw {}", env!("CARGO_PKG_VERSION")),
        "r in meters; energies, widths and rates in rad/s".to_string(),
    ];
    lines.extend(extra.iter().cloned());
    lines.push("resolved configuration:".to_string());
    for l in config.provenance() {
        lines.push(format!("  {l}"));
    }
    lines
}

fn parse_window(spec: &str) -> Result<(f64, f64)> {
    let (lo, hi) = spec
        .split_once(':')
        .context("window must be `rmin:rmax` in meters")?;
    let lo: f64 = lo.trim().parse().context("window rmin")?;
    let hi: f64 = hi.trim().parse().context("window rmax")?;
    Ok((lo, hi))
}

fn main() -> ExitCode {
    match run_cli() {
        Ok(ok) => {
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run_cli() -> Result<bool> {
    let cli = Cli::parse();
    match cli.command {
        Command::Scan { common, quantity, workers } => {
            let (config, base_dir) = load_config(&common)?;
            let quantity = match (&quantity, &config.scan) {
                (Some(q), _) => Quantity::parse(q)?,
                (None, Some(scan)) => scan.quantity,
                (None, None) => anyhow::bail!("no [scan] section and no --quantity given"),
            };
            let table = run::run_scan(&config, &base_dir, quantity, workers)?;
            let path = output_path(&common, &config, &format!("{}_scan.csv", quantity.name()));
            table.write(&path, &header(&config, &[format!("quantity: {}", quantity.name())]))?;
            let failures = table.rows.iter().filter(|r| !r.error.is_empty()).count();
            println!(
                "wrote {} rows to {} ({} point failure(s))",
                table.rows.len(),
                path.display(),
                failures
            );
            Ok(true)
        }
        Command::Rates { common } => {
            let (config, base_dir) = load_config(&common)?;
            let (table, notes) = run::run_rates(&config, &base_dir)?;
            for n in &notes {
                println!("{n}");
            }
            let path = output_path(&common, &config, "rates.csv");
            table.write(&path, &header(&config, &[]))?;
            println!("wrote {}", path.display());
            Ok(true)
        }
        Command::Identities { seed, samples } => {
            let checks = suites::identities(seed, samples);
            let ok = suites::print_report(&checks);
            println!("identities suite: {}", if ok { "PASS" } else { "FAIL" });
            Ok(ok)
        }
        Command::Oracle { models, seed, tol } => {
            let tol = Tolerance::rel(tol.unwrap_or(1e-11));
            let checks = suites::oracle(models, seed, tol);
            let ok = suites::print_report(&checks);
            println!("oracle suite ({models} models, seed {seed}): {}", if ok { "PASS" } else { "FAIL" });
            Ok(ok)
        }
        Command::Fit { input, column, window } => {
            let table = Table::read(&input)?;
            let r = table.column("r_m")?;
            let v = table.column(&column)?;
            let window = match window {
                Some(w) => parse_window(&w)?,
                None => (f64::NEG_INFINITY, f64::INFINITY),
            };
            let (slope, stderr) = analysis::fit_slope(&r, &v, window)?;
            println!("column {column}: slope = {slope:.6} ± {stderr:.2e}");
            Ok(true)
        }
        Command::Oscillations { input, column } => {
            let table = Table::read(&input)?;
            let r = table.column("r_m")?;
            let v = table.column(&column)?;
            match analysis::detect_oscillation(&r, &v) {
                Some(osc) => {
                    println!(
                        "column {column}: {} crossings, mean spacing {:e} ± {:e} m, period {:e} m",
                        osc.crossings.len(),
                        osc.mean_spacing,
                        osc.spacing_std,
                        osc.period
                    );
                }
                None => println!("column {column}: no oscillation detected (< 2 sign changes)"),
            }
            Ok(true)
        }
    }
}
