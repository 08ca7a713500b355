//! Growth conditions and `φ*` regime for a handful of weights.
//!
//! Usage: `cargo run --release --example phi_regimes`

use campanato_lab::phi::{phi_report, Grid, PhiSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid::default();
    let weights = [
        PhiSpec::One,
        PhiSpec::Psi,
        PhiSpec::power(0.5),
        PhiSpec::power(-0.3),
        PhiSpec::powerlog(0.0, 1.0, 1.0),
        PhiSpec::Quotient {
            base: Box::new(PhiSpec::One),
        },
    ];
    println!("grid: {}", grid.describe());
    for phi in &weights {
        let report = phi_report(phi, &[1.0, 2.0], &grid)?;
        println!("\n{phi}");
        println!("  doubling            {:.4}", report.doubling);
        println!("  almost increasing   {:.4}", report.almost_increasing);
        println!("  almost decreasing   {:.4}", report.almost_decreasing);
        for c in &report.int_condition {
            println!(
                "  int condition p={}   {:.6}  (power weight {:.6})",
                c.p, c.value, c.power_weight
            );
        }
        println!(
            "  regime              {}  (sup φ*/φ {:.4}, sup φ* {:.4})",
            report.regime.label, report.regime.sup_star_over_phi, report.regime.sup_star
        );
        println!("  assumptions met     {}", report.assumptions_met);
    }
    Ok(())
}
