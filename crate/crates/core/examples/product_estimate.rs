//! `|F(f,g) - ‖fg‖| <= 2‖f‖‖g‖_∞` over seeded random pairs.
//!
//! Usage: `cargo run --release --example product_estimate -- [pairs] [seed]`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use campanato_lab::filtration::FiltrationTree;
use campanato_lab::functions::LeafFunction;
use campanato_lab::multiplier::check_product_estimate;
use campanato_lab::phi::PhiSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>());
    let pairs = args.next().transpose()?.unwrap_or(100) as usize;
    let seed = args.next().transpose()?.unwrap_or(5);
    let tree = FiltrationTree::dyadic(8);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fs: Vec<_> = (0..pairs)
        .map(|_| {
            (
                LeafFunction::random(tree.clone(), &mut rng),
                LeafFunction::random(tree.clone(), &mut rng),
            )
        })
        .collect();

    for phi in [PhiSpec::One, PhiSpec::Psi] {
        for p in [1.0, 2.0] {
            let mut failures = 0;
            let mut tightest = 0.0f64;
            for (f, g) in &fs {
                let report = check_product_estimate(f, g, p, &phi)?;
                let check = &report.checks[0];
                failures += usize::from(!check.passed);
                tightest =
                    tightest.max(check.measured["gap"] / check.threshold.unwrap_or(f64::INFINITY));
            }
            println!(
                "{:<6} p={p}: {failures} failures in {pairs} pairs, max gap/bound = {tightest:.4}",
                phi.to_string()
            );
        }
    }
    Ok(())
}
