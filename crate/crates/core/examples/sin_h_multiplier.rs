//! Multiplier certificate for `g = sin h` on the dyadic tree with `φ ≡ 1`.
//!
//! Usage: `cargo run --release --example sin_h_multiplier -- [depth] [chains] [seed]`

use std::time::Instant;

use campanato_lab::constructions::{leftmost_chain, sin_h_multiplier};
use campanato_lab::filtration::FiltrationTree;
use campanato_lab::multiplier::{multiplier_certificate, FamilyOptions};
use campanato_lab::phi::PhiSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>());
    let depth = args.next().transpose()?.unwrap_or(12) as usize;
    let chains = args.next().transpose()?.unwrap_or(64) as usize;
    let seed = args.next().transpose()?.unwrap_or(7);

    let tree = FiltrationTree::dyadic(depth);
    let g = sin_h_multiplier(&tree, &leftmost_chain(&tree), &PhiSpec::One)?;
    let opts = FamilyOptions {
        sample_chains: chains,
        seed,
        ..FamilyOptions::default()
    };
    let start = Instant::now();
    let report = multiplier_certificate(&g, "sin h", 1.0, &PhiSpec::One, &opts)?;
    println!(
        "depth {depth}, {} test functions, {:.2?}",
        report.family_size,
        start.elapsed()
    );
    println!("‖g‖_∞             = {:.6}", report.linf);
    println!("‖g‖ with φ/φ*      = {:.6}", report.quotient_seminorm);
    println!("T(g)              = {:.6}", report.upper);
    println!(
        "L(g)              = {:.6}  ({})",
        report.lower.value, report.lower.witness
    );
    if let Some(ratio) = report.ratio {
        println!("T/L               = {ratio:.6}");
    }
    println!(
        "C_fB measured     = {:.6} (telescoping bound {:.6})",
        report.c_fb, report.c_fb_bound
    );
    println!("status            = {:?}", report.status);
    for check in &report.checks.checks {
        println!(
            "  [{}] {}",
            if check.passed { "pass" } else { "FAIL" },
            check.name
        );
    }
    Ok(())
}
