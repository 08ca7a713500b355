//! Indicator norms: closed form against the direct supremum, and the bound
//! `‖χ_B‖ φ(P(B))` across levels, on a skewed three-way split tree.
//!
//! Usage: `cargo run --release --example indicator_norms -- [depth]`

use campanato_lab::filtration::{FiltrationTree, SplitSpec};
use campanato_lab::functions::LeafFunction;
use campanato_lab::norms::CampanatoNorm;
use campanato_lab::phi::PhiSpec;
use campanato_lab::scalar::parse_rational;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let depth: usize = std::env::args()
        .nth(1)
        .map(|a| a.parse())
        .transpose()?
        .unwrap_or(5);
    let fractions: Vec<_> = ["1/6", "1/3", "1/2"]
        .iter()
        .filter_map(|t| parse_rational(t))
        .collect();
    let mut spec = SplitSpec::Leaf;
    for _ in 0..depth {
        spec = SplitSpec::split(fractions.clone(), vec![spec.clone(), spec.clone(), spec]);
    }
    let tree = FiltrationTree::from_splits(&spec, None)?;
    println!(
        "{} atoms, R = {:.4}",
        tree.num_atoms(),
        tree.regularity_constant()
    );

    for phi in [PhiSpec::One, PhiSpec::Psi, PhiSpec::power(0.3)] {
        for p in [1.0, 2.0] {
            let eval = CampanatoNorm::new(tree.clone(), p, &phi)?;
            let mut worst_diff = 0.0f64;
            let mut worst_scaled = 0.0f64;
            for atom in tree.atoms().skip(1) {
                let chi = LeafFunction::<f64>::indicator(tree.clone(), atom.id())?;
                let direct = eval.seminorm(&chi)?.value;
                let closed = eval.chi_closed_form(atom.id())?.value;
                worst_diff = worst_diff.max((direct - closed).abs());
                worst_scaled = worst_scaled.max(eval.norm_value(&chi)? * eval.phi_at(atom.id()));
            }
            println!(
                "{:<18} p={p}: max |closed - direct| = {worst_diff:.2e}, max ‖χ_B‖·φ(P(B)) = {worst_scaled:.6}",
                phi.to_string()
            );
        }
    }
    Ok(())
}
