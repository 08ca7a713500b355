//! Seminorm and tilde norm of a few functions on the dyadic tree, for
//! `φ ∈ {1, ψ, r^0.3}` and `p ∈ {1, 2}`.
//!
//! Usage: `cargo run --release --example dyadic_bmo_norms -- [depth]`

use campanato_lab::filtration::FiltrationTree;
use campanato_lab::functions::LeafFunction;
use campanato_lab::norms::CampanatoNorm;
use campanato_lab::phi::PhiSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let depth: usize = std::env::args()
        .nth(1)
        .map(|a| a.parse())
        .transpose()?
        .unwrap_or(8);
    let tree = FiltrationTree::dyadic(depth);
    let leaves = tree.num_leaves() as f64;

    let functions = [
        (
            "x",
            LeafFunction::from_fn(tree.clone(), |i| (i as f64 + 0.5) / leaves),
        ),
        (
            "log(1/x)",
            LeafFunction::from_fn(tree.clone(), |i| -((i as f64 + 0.5) / leaves).ln()),
        ),
        (
            "haar",
            LeafFunction::from_fn(tree.clone(), |i| {
                if 2 * i < tree.num_leaves() {
                    1.0
                } else {
                    -1.0
                }
            }),
        ),
    ];
    println!(
        "{:<10} {:<18} {:>3} {:>12} {:>12}  witness",
        "f", "phi", "p", "seminorm", "norm"
    );
    for phi in [PhiSpec::One, PhiSpec::Psi, PhiSpec::power(0.3)] {
        for p in [1.0, 2.0] {
            let eval = CampanatoNorm::new(tree.clone(), p, &phi)?;
            for (name, f) in &functions {
                let semi = eval.seminorm(f)?;
                let norm = eval.norm(f)?;
                println!(
                    "{name:<10} {:<18} {p:>3} {:>12.6} {:>12.6}  {}",
                    phi.to_string(),
                    semi.value,
                    norm.value,
                    semi.witness
                );
            }
        }
    }
    Ok(())
}
