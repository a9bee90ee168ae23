use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use detcount::suites::Suite;
use detcount_harness::commands::{self, FitTarget};
use detcount_harness::config::{MethodChoice, SweepConfig};
use detcount_harness::{HarnessError, EXIT_FAILED, EXIT_USAGE};

#[derive(Parser)]
#[command(name = "detcount", version, about = "Count 2x2 integer matrices with bounded entries and fixed determinant")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count one cell T(h, N) and print its record.
    Count {
        #[arg(long = "h", allow_hyphen_values = true)]
        h: i64,
        #[arg(long = "N")]
        n: i64,
        /// naive, hyperbola, linear, t_tilde or auto.
        #[arg(long, default_value = "auto")]
        method: String,
        /// Configuration supplying counter caps.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Cache file to append the record to.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count a configured grid, cache the records and write regime reports.
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        method: Option<String>,
        /// Directory for the regime reports.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the identity and lemma suites.
    Verify {
        /// lemmas, identities or all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        config: Option<PathBuf>,
        /// File for the JSON outcome list.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write per-regime CSV files from a cache.
    Export {
        /// Cache to read; defaults to the configured cache.
        cache: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory.
        #[arg(long, default_value = "export")]
        out: PathBuf,
    },
    /// Fit error exponents and implied constants.
    Fit {
        /// thm1, thm2, prop13, t_zero, regimes, gap, mainterm, sawtooth or all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        config: Option<PathBuf>,
        /// File for the JSON output; printed to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAILED),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(command: Command) -> Result<bool, HarnessError> {
    match command {
        Command::Count {
            h,
            n,
            method,
            config,
            out,
        } => {
            let cfg = SweepConfig::load_or_default(config.as_deref())?;
            let method: MethodChoice = method.parse()?;
            commands::check_count_args(h, n, method)?;
            let record = commands::count(h, n, method, &cfg.caps, out.as_deref())?;
            println!("{}", serde_json::to_string(&record)?);
            Ok(true)
        }
        Command::Sweep {
            config,
            method,
            out,
            workers,
            seed,
        } => {
            let mut cfg = SweepConfig::load_or_default(config.as_deref())?;
            if let Some(m) = method {
                cfg.method = m.parse()?;
            }
            if let Some(dir) = out {
                cfg.reports = dir;
            }
            if let Some(w) = workers {
                cfg.workers = w;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let outcome = commands::sweep(&cfg)?;
            println!(
                "counted {} cells, reused {} from {}",
                outcome.computed,
                outcome.reused,
                cfg.cache.display()
            );
            for (path, report) in &outcome.reports {
                let status = if report.pass { "PASS" } else { "FAIL" };
                println!(
                    "[{status}] {}: alpha={:.4} C={:.4}{} -> {}",
                    report.regime,
                    report.alpha,
                    report.c,
                    if report.degraded() { " (degraded)" } else { "" },
                    path.display()
                );
                for c in report.checks.iter().filter(|c| !c.pass) {
                    let kind = if c.required { "failed" } else { "charted" };
                    println!("    {kind}: {} = {:.4} vs {:.4}", c.name, c.value, c.threshold);
                }
            }
            Ok(outcome.pass())
        }
        Command::Verify {
            suite,
            config,
            out,
            workers,
            seed,
        } => {
            let cfg = SweepConfig::load_or_default(config.as_deref())?;
            let suite: Suite = suite.parse().map_err(|e: detcount::Error| HarnessError::Usage(e.to_string()))?;
            let outcomes = commands::verify(suite, seed.unwrap_or(cfg.seed), workers.unwrap_or(cfg.workers))?;
            for o in &outcomes {
                println!("{}", o.summary());
                for f in &o.failures {
                    println!("    violation: {f}");
                }
            }
            if let Some(path) = out {
                commands::write_json(&path, &outcomes)?;
            }
            Ok(outcomes.iter().all(|o| o.pass()))
        }
        Command::Export { cache, config, out } => {
            let cfg = SweepConfig::load_or_default(config.as_deref())?;
            let cache = cache.unwrap_or(cfg.cache);
            for (path, rows) in commands::export(&cache, &out)? {
                println!("{rows} rows -> {}", path.display());
            }
            Ok(true)
        }
        Command::Fit {
            suite,
            config,
            out,
            workers,
        } => {
            let mut cfg = SweepConfig::load_or_default(config.as_deref())?;
            if let Some(w) = workers {
                cfg.workers = w;
            }
            let target: FitTarget = suite.parse()?;
            let output = commands::fit(target, &cfg)?;
            match out {
                Some(path) => {
                    commands::write_json(&path, &output)?;
                    for r in &output.regimes {
                        println!("{}: alpha={:.4} C={:.4}", r.regime, r.alpha, r.c);
                    }
                    for f in &output.constants {
                        println!("{}: C={:.4}", f.name, f.c);
                    }
                }
                None => println!("{}", serde_json::to_string_pretty(&output)?),
            }
            Ok(true)
        }
    }
}
