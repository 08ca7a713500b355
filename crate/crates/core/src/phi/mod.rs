//! Weight functions `φ : (0,1] → (0,∞)` and the transform
//! `φ*(r) = 1 + ∫_r^1 φ(t)/t dt`.
//!
//! Closed forms are used for the constant, `ψ(r) = 1/log(e/r)` and the pure
//! power and pure log-power members of the power-log family. Everything
//! else goes through adaptive quadrature on the substitution `t = e^{-s}`,
//! which turns `∫_r^1 φ(t)/t dt` into `∫_0^{log(1/r)} φ(e^{-s}) ds`.

mod conditions;
pub mod quad;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use conditions::{
    almost_increasing_weighted, almost_monotone_constants, classify_regime, doubling_constant,
    int_condition_constant, int_condition_power_weight, phi_report, Grid, IntConstant, PhiReport,
    Regime, RegimeReport, BOUNDED_GROWTH, DOUBLING_LIMIT,
};
use quad::{integrate, QuadError, QuadOptions};

/// Relative tolerance for every quadrature in this module.
pub const QUAD_REL_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhiError {
    #[error("r = {0} is outside (0, 1]")]
    OutOfDomain(f64),
    #[error("φ({r}) = {value} is not a positive finite number")]
    NotPositive { r: f64, value: f64 },
    #[error("integral diverges (or converges too slowly to measure) at r = {r}")]
    Divergent { r: f64 },
    #[error("invalid φ table: {0}")]
    BadTable(String),
    #[error("empty grid")]
    EmptyGrid,
    #[error("grid must span at least one decade above r_min = {0}")]
    ShortGrid(f64),
    #[error("exponent p = {0} must be >= 1")]
    BadExponent(f64),
    #[error("quadrature failed: {0}")]
    Quadrature(#[from] QuadError),
}

/// A weight function.
///
/// JSON form: `{"family": "one"}`, `{"family": "psi"}`,
/// `{"family": "powerlog", "alpha": a, "beta": b, "gamma": g}`,
/// `{"family": "table", "points": [[r, v], ...]}` or
/// `{"family": "quotient", "base": {...}}` for `φ/φ*`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum PhiSpec {
    One,
    Psi,
    /// `r^α (log(e/r))^{-β} (log log(e^e/r))^{-γ}`.
    Powerlog {
        alpha: f64,
        #[serde(default)]
        beta: f64,
        #[serde(default)]
        gamma: f64,
    },
    /// Log-log linear interpolation through `(r, φ(r))` points, extended
    /// past the ends along the first and last segments.
    Table {
        points: Vec<[f64; 2]>,
    },
    Quotient {
        base: Box<PhiSpec>,
    },
}

impl fmt::Display for PhiSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiSpec::One => f.write_str("one"),
            PhiSpec::Psi => f.write_str("psi"),
            PhiSpec::Powerlog { alpha, beta, gamma } => {
                write!(f, "powerlog({alpha},{beta},{gamma})")
            }
            PhiSpec::Table { points } => write!(f, "table[{}]", points.len()),
            PhiSpec::Quotient { base } => write!(f, "{base}/star"),
        }
    }
}

fn check_domain(r: f64) -> Result<(), PhiError> {
    if r > 0.0 && r <= 1.0 {
        Ok(())
    } else {
        Err(PhiError::OutOfDomain(r))
    }
}

/// `log(e/r)`.
#[inline]
fn log_e_over(r: f64) -> f64 {
    1.0 - r.ln()
}

impl PhiSpec {
    pub fn power(alpha: f64) -> Self {
        PhiSpec::Powerlog {
            alpha,
            beta: 0.0,
            gamma: 0.0,
        }
    }

    pub fn powerlog(alpha: f64, beta: f64, gamma: f64) -> Self {
        PhiSpec::Powerlog { alpha, beta, gamma }
    }

    /// Checks parameters; tables must be sorted with `r ∈ (0,1]`, `v > 0`.
    pub fn validate(&self) -> Result<(), PhiError> {
        match self {
            PhiSpec::One | PhiSpec::Psi => Ok(()),
            PhiSpec::Powerlog { alpha, beta, gamma } => {
                if alpha.is_finite() && beta.is_finite() && gamma.is_finite() {
                    Ok(())
                } else {
                    Err(PhiError::BadTable("non-finite power-log parameter".into()))
                }
            }
            PhiSpec::Table { points } => {
                if points.is_empty() {
                    return Err(PhiError::BadTable("no points".into()));
                }
                for (i, [r, v]) in points.iter().enumerate() {
                    if !(*r > 0.0 && *r <= 1.0) {
                        return Err(PhiError::BadTable(format!(
                            "point {i}: r = {r} outside (0,1]"
                        )));
                    }
                    if !(v.is_finite() && *v > 0.0) {
                        return Err(PhiError::BadTable(format!(
                            "point {i}: value {v} not positive"
                        )));
                    }
                    if i > 0 && points[i - 1][0] >= *r {
                        return Err(PhiError::BadTable(format!(
                            "point {i}: r values must be strictly increasing"
                        )));
                    }
                }
                Ok(())
            }
            PhiSpec::Quotient { base } => base.validate(),
        }
    }

    /// `φ(r)` for `r ∈ (0, 1]`.
    pub fn eval(&self, r: f64) -> Result<f64, PhiError> {
        check_domain(r)?;
        let value = self.eval_unchecked(r)?;
        if value.is_finite() && value > 0.0 {
            Ok(value)
        } else {
            Err(PhiError::NotPositive { r, value })
        }
    }

    fn eval_unchecked(&self, r: f64) -> Result<f64, PhiError> {
        Ok(match self {
            PhiSpec::One => 1.0,
            PhiSpec::Psi => 1.0 / log_e_over(r),
            PhiSpec::Powerlog { alpha, beta, gamma } => {
                let mut v = if *alpha == 0.0 { 1.0 } else { r.powf(*alpha) };
                if *beta != 0.0 {
                    v *= log_e_over(r).powf(-beta);
                }
                if *gamma != 0.0 {
                    // log log(e^e / r) = log(e - log r) >= 1 on (0, 1].
                    v *= (std::f64::consts::E - r.ln()).ln().powf(-gamma);
                }
                v
            }
            PhiSpec::Table { points } => table_eval(points, r),
            PhiSpec::Quotient { base } => base.eval(r)? / base.phi_star(r)?,
        })
    }

    /// `φ*(r) = 1 + ∫_r^1 φ(t)/t dt`.
    pub fn phi_star(&self, r: f64) -> Result<f64, PhiError> {
        check_domain(r)?;
        if r == 1.0 {
            return Ok(1.0);
        }
        match self.phi_star_closed_form(r) {
            Some(v) => Ok(v),
            None => self.phi_star_quadrature(r),
        }
    }

    /// Closed form of `φ*`, when one is implemented for this family.
    pub fn phi_star_closed_form(&self, r: f64) -> Option<f64> {
        let log_inv = -r.ln();
        match self {
            PhiSpec::One => Some(1.0 + log_inv),
            PhiSpec::Psi => Some(1.0 + log_e_over(r).ln()),
            PhiSpec::Powerlog {
                alpha,
                beta,
                gamma: 0.0,
            } if *beta == 0.0 => Some(if *alpha == 0.0 {
                1.0 + log_inv
            } else {
                // (1 - r^α)/α = -expm1(α log r)/α
                1.0 - (alpha * r.ln()).exp_m1() / alpha
            }),
            PhiSpec::Powerlog {
                alpha: 0.0,
                beta,
                gamma: 0.0,
            } => {
                let l = log_e_over(r);
                Some(if *beta == 1.0 {
                    1.0 + l.ln()
                } else {
                    1.0 + (l.powf(1.0 - beta) - 1.0) / (1.0 - beta)
                })
            }
            _ => None,
        }
    }

    /// `φ*` by adaptive quadrature on `s = log(1/t)`, regardless of closed
    /// forms.
    pub fn phi_star_quadrature(&self, r: f64) -> Result<f64, PhiError> {
        check_domain(r)?;
        let upper = -r.ln();
        let mut failure = None;
        let q = integrate(
            |s| match self.eval((-s).exp().min(1.0)) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            },
            0.0,
            upper,
            QuadOptions {
                rel_tol: QUAD_REL_TOL,
                ..QuadOptions::default()
            },
        );
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(1.0 + q?.value)
    }

    /// `φ/φ*`. The constant weight maps to `ψ`.
    pub fn quotient(&self) -> Result<PhiSpec, PhiError> {
        self.validate()?;
        Ok(match self {
            PhiSpec::One => PhiSpec::Psi,
            other => PhiSpec::Quotient {
                base: Box::new(other.clone()),
            },
        })
    }

    /// `φ(1)`, used in `‖f‖_{L_1} <= max(1, φ(1)) ‖f‖`.
    pub fn at_one(&self) -> f64 {
        self.eval(1.0).unwrap_or(f64::NAN)
    }
}

/// `quotient_phi`: the weight `r ↦ φ(r)/φ*(r)`.
pub fn quotient_phi(phi: &PhiSpec) -> Result<PhiSpec, PhiError> {
    phi.quotient()
}

fn table_eval(points: &[[f64; 2]], r: f64) -> f64 {
    if points.len() == 1 {
        return points[0][1];
    }
    let seg = match points.iter().position(|p| p[0] >= r) {
        Some(0) => 0,
        Some(i) => i - 1,
        None => points.len() - 2,
    };
    let [r0, v0] = points[seg];
    let [r1, v1] = points[seg + 1];
    let slope = (v1.ln() - v0.ln()) / (r1.ln() - r0.ln());
    (v0.ln() + slope * (r.ln() - r0.ln())).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn eval_examples() {
        assert_eq!(PhiSpec::One.eval(0.3).unwrap(), 1.0);
        assert_eq!(PhiSpec::Psi.eval(1.0).unwrap(), 1.0);
        assert_eq!(PhiSpec::power(1.0).eval(0.5).unwrap(), 0.5);
        assert!(matches!(
            PhiSpec::One.eval(0.0),
            Err(PhiError::OutOfDomain(_))
        ));
        assert!(matches!(
            PhiSpec::One.eval(1.5),
            Err(PhiError::OutOfDomain(_))
        ));
        // The γ factor stays positive at r = 1.
        assert_eq!(PhiSpec::powerlog(0.0, 0.0, 2.0).eval(1.0).unwrap(), 1.0);
    }

    #[test]
    fn phi_star_examples() {
        for phi in [PhiSpec::One, PhiSpec::Psi, PhiSpec::power(0.5)] {
            assert_eq!(phi.phi_star(1.0).unwrap(), 1.0);
        }
        let r: f64 = 0.01;
        assert!(close(
            PhiSpec::One.phi_star(r).unwrap(),
            (std::f64::consts::E / r).ln(),
            1e-15
        ));
        let alpha = 0.5;
        assert!(close(
            PhiSpec::power(alpha).phi_star(r).unwrap(),
            1.0 + (1.0 - r.powf(alpha)) / alpha,
            1e-14
        ));
    }

    #[test]
    fn quadrature_matches_closed_forms() {
        let phis = [
            PhiSpec::One,
            PhiSpec::Psi,
            PhiSpec::power(0.5),
            PhiSpec::power(-0.3),
            PhiSpec::powerlog(0.0, 2.0, 0.0),
            PhiSpec::powerlog(0.0, 1.0, 0.0),
        ];
        for phi in &phis {
            for k in 0..=24 {
                let r = 10f64.powf(-(k as f64) / 4.0);
                let closed = phi.phi_star_closed_form(r).unwrap();
                let quad = phi.phi_star_quadrature(r).unwrap();
                assert!(close(quad, closed, 1e-8), "{phi} r={r}: {quad} vs {closed}");
            }
        }
    }

    #[test]
    fn phi_star_nonincreasing() {
        let phi = PhiSpec::powerlog(0.2, 1.0, 1.0);
        let mut last = 1.0;
        for k in 0..40 {
            let r = 2f64.powi(-k);
            let v = phi.phi_star(r).unwrap();
            assert!(v >= last - 1e-12);
            last = v;
        }
    }

    #[test]
    fn quotient_examples() {
        assert_eq!(PhiSpec::One.quotient().unwrap(), PhiSpec::Psi);
        let q = PhiSpec::power(0.5).quotient().unwrap();
        for r in [1e-6, 0.01, 0.3, 1.0] {
            let star = 3.0 - 2.0 * f64::sqrt(r);
            assert!(close(q.eval(r).unwrap(), r.sqrt() / star, 1e-14));
            assert!((1.0..=3.0).contains(&star));
        }
        let phi = PhiSpec::powerlog(0.3, 0.5, 0.0);
        assert_eq!(
            phi.quotient().unwrap().eval(1.0).unwrap(),
            phi.eval(1.0).unwrap()
        );
    }

    #[test]
    fn table_interpolation() {
        let table = PhiSpec::Table {
            points: vec![[0.25, 0.5], [1.0, 1.0]],
        };
        table.validate().unwrap();
        // Log-log linear through (1/4, 1/2), (1, 1) is sqrt(r).
        for r in [0.01, 0.25, 0.5, 1.0] {
            assert!(close(table.eval(r).unwrap(), r.sqrt(), 1e-14));
        }
        let bad = PhiSpec::Table {
            points: vec![[0.5, 1.0], [0.25, 1.0]],
        };
        assert!(bad.validate().is_err());
        let json = r#"{"family": "table", "points": [[0.5, 2.0], [1.0, 1.0]]}"#;
        let parsed: PhiSpec = serde_json::from_str(json).unwrap();
        parsed.validate().unwrap();
    }

    #[test]
    fn json_forms() {
        let phi: PhiSpec = serde_json::from_str(r#"{"family": "powerlog", "alpha": 0.5}"#).unwrap();
        assert_eq!(phi, PhiSpec::power(0.5));
        let phi: PhiSpec = serde_json::from_str(r#"{"family": "psi"}"#).unwrap();
        assert_eq!(phi, PhiSpec::Psi);
        let phi: PhiSpec = serde_json::from_str(r#"{"family": "one"}"#).unwrap();
        assert_eq!(phi, PhiSpec::One);
    }
}
