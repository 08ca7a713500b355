//! The chain function whose atom averages grow like `φ*`, in exact
//! arithmetic on the dyadic tree.
//!
//! Usage: `cargo run --release --example extremal_chain -- [depth]`

use campanato_lab::constructions::{extremal_chain_function, leftmost_chain};
use campanato_lab::filtration::FiltrationTree;
use campanato_lab::phi::PhiSpec;
use campanato_lab::scalar::Rational;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let depth: usize = std::env::args()
        .nth(1)
        .map(|a| a.parse())
        .transpose()?
        .unwrap_or(12);
    let tree = FiltrationTree::dyadic(depth);
    let chain = leftmost_chain(&tree);
    let c = extremal_chain_function::<Rational>(&tree, &chain, &PhiSpec::One)?;

    println!(
        "{:>3} {:>10} {:>12} {:>10}",
        "n", "f_Bn", "phi*(P(Bn))", "ratio"
    );
    for (n, avg) in c.chain_averages()?.iter().enumerate() {
        let star = PhiSpec::One.phi_star(tree.atom(chain[n])?.prob())?;
        let v: f64 = avg.to_string().parse().unwrap_or(f64::NAN);
        println!("{n:>3} {avg:>10} {star:>12.6} {:>10.6}", v / star);
    }
    for p in [1.0, 2.0] {
        let b = c.bounds(p)?;
        println!(
            "p={p}: seminorm {:.6}, norm (C1) {:.6}, min ratio (C2) {:.6} >= guaranteed {:.6}",
            b.seminorm, b.norm, b.lower_ratio_min, b.lower_ratio_guaranteed
        );
    }
    let report = c.verify(1.0)?;
    for check in &report.checks {
        println!(
            "  [{}] {}",
            if check.passed { "pass" } else { "FAIL" },
            check.name
        );
    }
    Ok(())
}
