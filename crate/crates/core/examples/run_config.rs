//! Loads an experiment config, runs its suites and prints each check.
//!
//! Usage: `cargo run --release --example run_config -- configs/dyadic.json`

use std::path::PathBuf;

use campanato_lab::experiment::{load_config, run, Overrides};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(concat!(
                env!("CARGO_MANIFEST_DIR"),
                "/../../configs/norms.json"
            ))
        });
    let loaded = load_config(&path, &Overrides::default())?;
    let report = run(&loaded, None)?;
    for row in &report.body.norms {
        println!(
            "{:<14} {:<18} p={} seminorm {:.6} norm {:.6} ({})",
            row.function, row.phi, row.p, row.seminorm, row.tilde_norm, row.witness
        );
    }
    for (section, r) in report.body.all_checks() {
        for c in &r.checks {
            println!(
                "[{}] {section} {}: {}",
                if c.passed { "pass" } else { "FAIL" },
                r.suite,
                c.name
            );
        }
    }
    println!("status {} hash {}", report.body.status, report.content_hash);
    Ok(())
}
