//! Supremum over unions of same-level atoms against the single-atom
//! seminorm, exhaustively and with the greedy lower bound.
//!
//! Usage: `cargo run --release --example f_measurable_norm -- [count] [seed]`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use campanato_lab::filtration::FiltrationTree;
use campanato_lab::functions::LeafFunction;
use campanato_lab::norms::CampanatoNorm;
use campanato_lab::phi::PhiSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>());
    let count = args.next().transpose()?.unwrap_or(50) as usize;
    let seed = args.next().transpose()?.unwrap_or(3);
    let tree = FiltrationTree::dyadic(4);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fs: Vec<_> = (0..count)
        .map(|_| LeafFunction::random(tree.clone(), &mut rng))
        .collect();

    for phi in [PhiSpec::One, PhiSpec::power(0.3)] {
        for p in [1.0, 2.0] {
            let eval = CampanatoNorm::new(tree.clone(), p, &phi)?;
            let mut c = 0.0f64;
            let mut greedy_gap = 0.0f64;
            for f in &fs {
                let exact = eval.f_norm_exact(f)?.value;
                let greedy = eval.f_norm_lower(f, 4)?.value;
                let semi = eval.seminorm(f)?.value;
                c = c.max(exact / semi);
                greedy_gap = greedy_gap.max((exact - greedy) / exact);
            }
            println!(
                "{:<18} p={p}: max F-norm/seminorm = {c:.6}, max relative greedy shortfall = {greedy_gap:.2e}",
                phi.to_string()
            );
        }
    }
    let deep = FiltrationTree::dyadic(6);
    let f = LeafFunction::random(deep.clone(), &mut rng);
    match CampanatoNorm::new(deep, 1.0, &PhiSpec::One)?.f_norm_exact(&f) {
        Ok(_) => println!("unexpected: depth 6 enumerated"),
        Err(e) => println!("depth 6: {e}"),
    }
    Ok(())
}
