//! Seminorms of the truncations `E_n f` in exact arithmetic, and the
//! multiplier bounds of the truncated filtrations for `g = sin h`.
//!
//! Usage: `cargo run --release --example martingale_truncation -- [depth] [seed]`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use campanato_lab::constructions::{chain_through_leaf, sin_h_multiplier};
use campanato_lab::filtration::FiltrationTree;
use campanato_lab::functions::LeafFunction;
use campanato_lab::multiplier::{conditional_multiplier_check, FamilyOptions};
use campanato_lab::norms::seminorm_power_exact;
use campanato_lab::phi::PhiSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>());
    let depth = args.next().transpose()?.unwrap_or(6) as usize;
    let seed = args.next().transpose()?.unwrap_or(9);
    let tree = FiltrationTree::dyadic(depth);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = LeafFunction::random_exact(tree.clone(), &mut rng);

    let full = seminorm_power_exact(&f, 1)?.value;
    println!("exact BMO seminorm of f: {full}");
    for n in 0..=depth {
        let en = f.conditional_expectation(n)?;
        let v = seminorm_power_exact(&en, 1)?.value;
        println!(
            "  n={n:>2}: ‖E_n f‖ = {v}{}",
            if v == full { "  (= ‖f‖)" } else { "" }
        );
    }

    let g = sin_h_multiplier(&tree, &chain_through_leaf(&tree, 0)?, &PhiSpec::One)?;
    let opts = FamilyOptions {
        sample_chains: 8,
        random: 8,
        seed,
        ..FamilyOptions::default()
    };
    let report = conditional_multiplier_check(&g, 1.0, &PhiSpec::One, &opts)?;
    println!(
        "\ng = sin h, L(g) over all families = {:.6}",
        report.lower_union
    );
    for level in &report.levels {
        println!(
            "  n={:>2}: L_n = {:.6}, T(E_n g) = {:.6}",
            level.n, level.lower, level.upper
        );
    }
    for check in &report.report.checks {
        println!(
            "  [{}] {}",
            if check.passed { "pass" } else { "FAIL" },
            check.name
        );
    }
    Ok(())
}
