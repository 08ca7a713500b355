//! Grid evidence for the growth conditions on `φ`.
//!
//! Every constant here is a supremum over a finite grid, so it is a lower
//! bound for the analytic constant. Reports label them accordingly.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::quad::{integrate_semi_infinite, QuadOptions};
use super::{PhiError, PhiSpec, QUAD_REL_TOL};

/// Relative growth over the last decade of the grid below which a ratio is
/// treated as bounded.
pub const BOUNDED_GROWTH: f64 = 0.02;

/// Sorted set of sample points in `(0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Grid {
    points: Vec<f64>,
}

impl TryFrom<Vec<f64>> for Grid {
    type Error = PhiError;

    fn try_from(points: Vec<f64>) -> Result<Self, Self::Error> {
        Grid::new(points)
    }
}

impl From<Grid> for Vec<f64> {
    fn from(grid: Grid) -> Self {
        grid.points
    }
}

impl Default for Grid {
    /// `2^{-k/4}` for `k = 0..=160`: every dyadic measure down to `2^{-40}`
    /// plus three points per octave in between.
    fn default() -> Self {
        Grid::octaves(40, 4)
    }
}

impl Grid {
    pub fn new(mut points: Vec<f64>) -> Result<Self, PhiError> {
        if points.is_empty() {
            return Err(PhiError::EmptyGrid);
        }
        if let Some(&r) = points.iter().find(|&&r| !(r > 0.0 && r <= 1.0)) {
            return Err(PhiError::OutOfDomain(r));
        }
        points.sort_by(f64::total_cmp);
        points.dedup();
        Ok(Grid { points })
    }

    /// `2^{-k/per_octave}` for `k = 0..=octaves·per_octave`.
    pub fn octaves(octaves: u32, per_octave: u32) -> Self {
        let per = per_octave.max(1);
        let n = octaves * per;
        let mut points: Vec<f64> = (0..=n)
            .map(|k| {
                if k % per == 0 {
                    2f64.powi(-((k / per) as i32))
                } else {
                    2f64.powf(-(k as f64) / per as f64)
                }
            })
            .collect();
        points.reverse();
        Grid { points }
    }

    /// `10^{-k/per_decade}` down to `r_min` (rounded to whole steps).
    pub fn decades(r_min: f64, per_decade: u32) -> Result<Self, PhiError> {
        if !(r_min > 0.0 && r_min <= 1.0) {
            return Err(PhiError::OutOfDomain(r_min));
        }
        let per = per_decade.max(1) as f64;
        let steps = (-r_min.log10() * per).round() as i32;
        Grid::new((0..=steps).map(|k| 10f64.powf(-(k as f64) / per)).collect())
    }

    /// Ascending sample points.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn r_min(&self) -> f64 {
        self.points[0]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn describe(&self) -> String {
        format!(
            "{} points in [{:e}, {}] (measured over grid)",
            self.points.len(),
            self.r_min(),
            self.points[self.points.len() - 1]
        )
    }

    fn values<F>(&self, f: F) -> Result<Vec<f64>, PhiError>
    where
        F: Fn(f64) -> Result<f64, PhiError>,
    {
        self.points.iter().map(|&r| f(r)).collect()
    }
}

/// Sup of `max(φ(r)/φ(s), φ(s)/φ(r))` over grid pairs with `1/2 <= r/s <= 2`.
pub fn doubling_constant(phi: &PhiSpec, grid: &Grid) -> Result<f64, PhiError> {
    let values = grid.values(|r| phi.eval(r))?;
    let pts = grid.points();
    let mut best = 1.0f64;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            // Sorted ascending, so pts[j] >= pts[i].
            if pts[j] > 2.0 * pts[i] * (1.0 + 1e-15) {
                break;
            }
            let ratio = values[i] / values[j];
            best = best.max(ratio).max(ratio.recip());
        }
    }
    Ok(best)
}

/// `(sup_{r<=s} θ(r)/θ(s), sup_{r<=s} θ(s)/θ(r))` for grid values of `θ`,
/// in ascending grid order.
pub(crate) fn monotone_constants_of(values: &[f64]) -> (f64, f64) {
    let mut running_max = f64::NEG_INFINITY;
    let mut running_min = f64::INFINITY;
    let mut increasing = 1.0f64;
    let mut decreasing = 1.0f64;
    for &v in values {
        running_max = running_max.max(v);
        running_min = running_min.min(v);
        increasing = increasing.max(running_max / v);
        decreasing = decreasing.max(v / running_min);
    }
    (increasing, decreasing)
}

/// Almost-increasing and almost-decreasing constants of `φ` over the grid.
pub fn almost_monotone_constants(phi: &PhiSpec, grid: &Grid) -> Result<(f64, f64), PhiError> {
    Ok(monotone_constants_of(&grid.values(|r| phi.eval(r))?))
}

/// Almost-increasing constant of `r φ(r)^p` over the grid.
pub fn almost_increasing_weighted(phi: &PhiSpec, p: f64, grid: &Grid) -> Result<f64, PhiError> {
    let values = grid.values(|r| Ok(r * phi.eval(r)?.powf(p)))?;
    Ok(monotone_constants_of(&values).0)
}

/// `∫_0^∞ (φ(r e^{-s})/φ(r))^q e^{-λ s} ds`, or `+∞` when the tail does not
/// become negligible.
fn tail_ratio(phi: &PhiSpec, r: f64, q: f64, lambda: f64) -> Result<f64, PhiError> {
    let base = phi.eval(r)?;
    let mut failure = None;
    let result = integrate_semi_infinite(
        |s| {
            let t = r * (-s).exp();
            match phi.eval(t) {
                Ok(v) => (v / base).powf(q) * (-lambda * s).exp(),
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        QuadOptions {
            rel_tol: QUAD_REL_TOL,
            ..QuadOptions::default()
        },
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(result?.map_or(f64::INFINITY, |q| q.value))
}

fn check_p(p: f64) -> Result<(), PhiError> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(PhiError::BadExponent(p))
    }
}

fn grid_sup<F>(grid: &Grid, f: F) -> Result<f64, PhiError>
where
    F: Fn(f64) -> Result<f64, PhiError>,
{
    let mut best = f64::NEG_INFINITY;
    for &r in grid.points() {
        let v = f(r)?;
        if v == f64::INFINITY {
            return Ok(v);
        }
        best = best.max(v);
    }
    Ok(best)
}

/// Sup over the grid of `∫_0^r φ(t)^p dt / (r φ(r)^p)`; `+∞` flags a
/// divergent integral.
pub fn int_condition_constant(phi: &PhiSpec, p: f64, grid: &Grid) -> Result<f64, PhiError> {
    check_p(p)?;
    grid_sup(grid, |r| tail_ratio(phi, r, p, 1.0))
}

/// Sup over the grid of `∫_0^r φ(t) t^{1/p-1} dt / (φ(r) r^{1/p})`.
pub fn int_condition_power_weight(phi: &PhiSpec, p: f64, grid: &Grid) -> Result<f64, PhiError> {
    check_p(p)?;
    grid_sup(grid, |r| tail_ratio(phi, r, 1.0, 1.0 / p))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `φ*/φ` bounded.
    StarComparableToPhi,
    /// `φ*` bounded.
    StarBounded,
    Neither,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::StarComparableToPhi => "φ*∼φ",
            Regime::StarBounded => "φ*∼1",
            Regime::Neither => "neither",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub regime: Regime,
    /// `"φ*∼φ"`, `"φ*∼1"`, `"neither; φ/φ* → 0"` or `"neither"`.
    pub label: String,
    pub sup_star_over_phi: f64,
    pub sup_star: f64,
    /// Relative growth of `φ*/φ` between `10 r_min` and `r_min`.
    pub growth_star_over_phi: f64,
    /// Relative growth of `φ*` between `10 r_min` and `r_min`.
    pub growth_star: f64,
    pub r_min: f64,
}

/// Classifies the growth of `φ*` by the relative increase of `φ*/φ` and of
/// `φ*` over the last decade of the grid: an increase of at most
/// [`BOUNDED_GROWTH`] counts as bounded.
pub fn classify_regime(phi: &PhiSpec, grid: &Grid) -> Result<RegimeReport, PhiError> {
    let pts = grid.points();
    let r_min = grid.r_min();
    let anchor = pts
        .iter()
        .position(|&r| r >= 10.0 * r_min * (1.0 - 1e-12))
        .ok_or(PhiError::ShortGrid(r_min))?;
    let star = grid.values(|r| phi.phi_star(r))?;
    let phi_values = grid.values(|r| phi.eval(r))?;
    let quotient: Vec<f64> = star.iter().zip(&phi_values).map(|(s, v)| s / v).collect();
    let growth = |v: &[f64]| v[0] / v[anchor] - 1.0;
    let growth_star_over_phi = growth(&quotient);
    let growth_star = growth(&star);
    let sup = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let regime = if growth_star_over_phi <= BOUNDED_GROWTH {
        Regime::StarComparableToPhi
    } else if growth_star <= BOUNDED_GROWTH {
        Regime::StarBounded
    } else {
        Regime::Neither
    };
    let label = match regime {
        Regime::Neither if growth_star_over_phi > 0.0 => "neither; φ/φ* → 0".to_string(),
        other => other.to_string(),
    };
    Ok(RegimeReport {
        regime,
        label,
        sup_star_over_phi: sup(&quotient),
        sup_star: sup(&star),
        growth_star_over_phi,
        growth_star,
        r_min,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntConstant {
    pub p: f64,
    /// `+∞` when the integral diverges.
    pub value: f64,
    pub power_weight: f64,
}

/// All grid constants for one `φ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiReport {
    pub phi: PhiSpec,
    pub doubling: f64,
    pub almost_increasing: f64,
    pub almost_decreasing: f64,
    pub int_condition: Vec<IntConstant>,
    pub regime: RegimeReport,
    pub grid: String,
    /// Doubling constant finite and the integral condition finite for
    /// every requested `p`.
    pub assumptions_met: bool,
}

/// Largest doubling constant accepted as "finite" on a grid.
pub const DOUBLING_LIMIT: f64 = 1e6;

pub fn phi_report(phi: &PhiSpec, ps: &[f64], grid: &Grid) -> Result<PhiReport, PhiError> {
    phi.validate()?;
    let doubling = doubling_constant(phi, grid)?;
    let (almost_increasing, almost_decreasing) = almost_monotone_constants(phi, grid)?;
    let int_condition = ps
        .iter()
        .map(|&p| {
            Ok(IntConstant {
                p,
                value: int_condition_constant(phi, p, grid)?,
                power_weight: int_condition_power_weight(phi, p, grid)?,
            })
        })
        .collect::<Result<Vec<_>, PhiError>>()?;
    let regime = classify_regime(phi, grid)?;
    let assumptions_met =
        doubling <= DOUBLING_LIMIT && int_condition.iter().all(|c| c.value.is_finite());
    Ok(PhiReport {
        phi: phi.clone(),
        doubling,
        almost_increasing,
        almost_decreasing,
        int_condition,
        regime,
        grid: grid.describe(),
        assumptions_met,
    })
}
