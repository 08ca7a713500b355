use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use campanato_lab::experiment::{self, OutputFormat, Overrides, Suite};

#[derive(Parser, Debug)]
#[command(
    name = "campanato-lab",
    version,
    about = "Martingale Campanato norms and multiplier checks on finite filtrations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory; defaults to the config's `output.dir`, else `./campanato-out`.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Overrides the tree depth.
    #[arg(long, value_name = "N")]
    depth: Option<usize>,
    /// Write only the JSON report or only the CSV tables.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Norm table for every function × φ × p.
    Norms(Common),
    /// Full verification registry.
    Verify(Common),
    /// Weight conditions, regime and the φ* table.
    Phi(Common),
    /// Pointwise-multiplier certificate.
    Multiplier(Common),
    /// Suites listed in the config.
    Run(Common),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Ok(threads) = std::env::var("CAMPANATO_LAB_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                {
                    log::warn!("cannot set thread count: {e}");
                }
            }
            _ => {
                eprintln!(
                    "error: CAMPANATO_LAB_THREADS must be a positive integer, got {threads:?}"
                );
                return ExitCode::from(2);
            }
        }
    }
    let (common, suites) = match &cli.command {
        Command::Norms(c) => (c, Some(vec![Suite::Norms])),
        Command::Verify(c) => (c, Some(vec![Suite::Verify])),
        Command::Phi(c) => (c, Some(vec![Suite::PhiReport])),
        Command::Multiplier(c) => (c, Some(vec![Suite::Multiplier])),
        Command::Run(c) => (c, None),
    };
    match execute(common, suites.as_deref()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(common: &Common, suites: Option<&[Suite]>) -> Result<u8, experiment::ExperimentError> {
    let overrides = Overrides {
        seed: common.seed,
        depth: common.depth,
    };
    let loaded = experiment::load_config(&common.config, &overrides)?;
    let report = experiment::run(&loaded, suites)?;
    let output = &loaded.config.output;
    let dir = common
        .out
        .clone()
        .or_else(|| output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("campanato-out"));
    let format = common.format.or(output.format);
    let written = experiment::write_outputs(&report, &dir, &output.report, format)?;

    for (section, r) in report.body.all_checks() {
        for c in &r.checks {
            let mark = if c.passed { "pass" } else { "FAIL" };
            println!("{mark}  [{section}] {}: {}", r.suite, c.name);
        }
    }
    for m in &report.body.multipliers {
        let cert = &m.certificate;
        println!(
            "multiplier [phi={} p={}] T={:.6} L={:.6} ratio={} status={:?}",
            m.phi,
            m.p,
            cert.upper,
            cert.lower.value,
            cert.ratio.map_or("-".to_string(), |r| format!("{r:.4}")),
            cert.status
        );
    }
    for path in &written {
        println!("wrote {}", path.display());
    }
    println!(
        "status: {} (hash {})",
        report.body.status, report.content_hash
    );
    Ok(report.exit_code() as u8)
}
