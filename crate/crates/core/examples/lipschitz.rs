//! Oscillation of `F ∘ f` against that of `f` for Lipschitz `F`.
//!
//! Usage: `cargo run --release --example lipschitz -- [count] [seed]`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use campanato_lab::constructions::lipschitz_compose_check;
use campanato_lab::filtration::FiltrationTree;
use campanato_lab::functions::LeafFunction;

type LipschitzMap = (&'static str, f64, fn(f64) -> f64);

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>());
    let count = args.next().transpose()?.unwrap_or(100) as usize;
    let seed = args.next().transpose()?.unwrap_or(8);
    let tree = FiltrationTree::dyadic(8);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let maps: [LipschitzMap; 3] = [
        ("sin", 1.0, f64::sin),
        ("|x|", 1.0, f64::abs),
        ("3 clamp(x, -1/2, 1/2)", 3.0, |x| 3.0 * x.clamp(-0.5, 0.5)),
    ];
    let fs: Vec<_> = (0..count)
        .map(|_| LeafFunction::random(tree.clone(), &mut rng))
        .collect();
    for (name, lip, map) in maps {
        let mut failures = 0;
        let mut worst = 0.0f64;
        for f in &fs {
            let report = lipschitz_compose_check(f, lip, &f.map(|v| map(*v)));
            failures += report.failures().count();
            worst = worst.max(report.checks[0].measured["worst_ratio"]);
        }
        println!("F = {name:<22} C = {lip}: {failures} failures, worst lhs/rhs = {worst:.4}");
    }
    Ok(())
}
