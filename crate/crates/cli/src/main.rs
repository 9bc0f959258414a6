use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use vrm_cli::{acceptance, config, export, runner, tables};

#[derive(Parser)]
#[command(
    name = "vrm",
    version,
    about = "Variational R-matrix tunneling sweeps and reference-table checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an energy sweep described by a configuration document
    Sweep {
        /// Path to the TOML run configuration
        config: PathBuf,
        /// Force the independent reference integration on
        #[arg(long, conflicts_with = "no_oracle")]
        oracle: bool,
        /// Force the independent reference integration off
        #[arg(long)]
        no_oracle: bool,
        /// Override the reference-integration tolerance
        #[arg(long)]
        tol: Option<f64>,
        /// Directory the CSV and plot-data files are written into
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Worker threads for the sweep
        #[arg(long, default_value_t = default_workers())]
        workers: usize,
    },
    /// Reproduce one embedded reference table and report each cell
    Table {
        /// One of: table1, table2, table3, figure-claims
        id: String,
    },
    /// Run the full nine-criterion acceptance suite
    Check {
        /// Worker threads for the underlying sweeps
        #[arg(long, default_value_t = default_workers())]
        workers: usize,
    },
    /// Print the stock configuration document for a catalog family
    DumpConfig {
        /// One of: linear-step, exponential-step, parabolic, bell-shaped, eckart
        family: String,
    },
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(16)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            // Anything that prevents a run from starting — bad configuration,
            // unknown ids, unreadable or unwritable paths — exits 2; exit 1 is
            // reserved for runs that completed but failed a tolerance.
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Sweep { config, oracle, no_oracle, tol, out, workers } => {
            let text = fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let mut cfg =
                config::parse_config(&text).map_err(|e| anyhow!("configuration error: {e}"))?;
            if oracle {
                cfg.oracle = true;
            }
            if no_oracle {
                cfg.oracle = false;
            }
            if let Some(t) = tol {
                if !t.is_finite() || t < 1e-12 {
                    return Err(anyhow!(
                        "configuration error: --tol: reference integration supports tol >= 1e-12, got {t}"
                    ));
                }
                cfg.oracle_tol = t;
            }
            fs::create_dir_all(&out)
                .with_context(|| format!("creating output directory {}", out.display()))?;

            let rows = runner::run_sweep(&cfg, workers);

            let csv = out.join(format!("{}.csv", cfg.stem));
            export::write_csv(&rows, cfg.oracle, &csv)
                .with_context(|| format!("writing {}", csv.display()))?;
            let plots = export::write_plot_data(&rows, cfg.oracle, &out, &cfg.stem)
                .context("writing plot data")?;

            println!("family {}: swept {} energies on [{}, {}]", cfg.family, rows.len(), cfg.a, cfg.b);
            print_sweep_stats(&rows, cfg.oracle);
            println!("wrote {}", csv.display());
            for p in plots {
                println!("wrote {}", p.display());
            }
            if let Some(summary) = runner::error_summary(&rows) {
                eprintln!("{summary}");
                Ok(ExitCode::from(1))
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }
        Command::Table { id } => {
            let report = tables::reproduce_table(&id)?;
            print!("{}", report.render());
            Ok(if report.all_pass() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Check { workers } => {
            let reports = acceptance::run_all(workers);
            for report in &reports {
                println!("{}", report.headline());
                for line in &report.lines {
                    println!("    {line}");
                }
            }
            let passed = reports.iter().filter(|r| r.pass).count();
            println!("summary: {passed}/{} criteria pass", reports.len());
            Ok(if passed == reports.len() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::DumpConfig { family } => {
            let doc = config::catalog_document(&family).ok_or_else(|| {
                anyhow!(
                    "no stock configuration for family \"{family}\" (expected one of {})",
                    config::catalog_families().collect::<Vec<_>>().join(", ")
                )
            })?;
            print!("{doc}");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn print_sweep_stats(rows: &[vrm_cli::runner::SweepRow], oracle: bool) {
    let mut worst_defect: f64 = 0.0;
    let mut worst_eav: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    let mut solved = 0usize;
    for row in rows {
        if let Ok(res) = &row.result {
            solved += 1;
            worst_defect = worst_defect.max(res.unitarity_defect);
            worst_eav = worst_eav.max((res.e_av - res.e).abs() / res.e);
            if let Some(Ok((t_o, _))) = row.oracle.as_ref() {
                worst_gap = worst_gap.max((res.t - t_o).abs());
            }
        }
    }
    if solved == 0 {
        return;
    }
    let mut stats = format!(
        "max unitarity defect {worst_defect:.2e}, max |E_av/E - 1| {:.3}%",
        worst_eav * 100.0
    );
    if oracle {
        stats.push_str(&format!(", max |T - T_oracle| {worst_gap:.2e}"));
    }
    println!("{stats}");
}
