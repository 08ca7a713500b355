//! Pointwise multipliers: the functional `F(f, g)`, finite-family lower
//! bounds for `‖g‖_Op`, and the measured certificates around them.
//!
//! `‖g‖_Op = sup_{f ≠ 0} ‖fg‖_{L̃_{p,φ}} / ‖f‖_{L̃_{p,φ}}` is a sup over all
//! leaf functions, so only lower bounds `L(g)` over explicit families are
//! computed. They are compared with `T(g) = ‖g‖_{L_{p,φ/φ*}} + ‖g‖_∞`.

use std::fmt;
use std::sync::Arc;

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constructions::{chain_through_leaf, extremal_function, ConstructionError};
use crate::filtration::{AtomId, FiltrationTree, TreeError};
use crate::functions::{FunctionError, LeafFunction};
use crate::norms::{tabulate_on_atoms, CampanatoNorm, NormError};
use crate::phi::{phi_report, Grid, PhiError, PhiSpec};
use crate::report::{anchors, Check, VerificationReport, ROOT_SLACK, SLACK};
use crate::scalar::{Exponent, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MultiplierError {
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Phi(#[from] PhiError),
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error("test family has no member with nonzero norm")]
    EmptyFamily,
}

/// `F(f, g)` with the atom attaining it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapitalF {
    pub value: f64,
    pub witness: AtomId,
}

/// `sup_B |f_B| φ(P(B))^{-1} ((1/P(B)) ∫_B |g - g_B|^p)^{1/p}` for an
/// evaluator already bound to `(p, φ)`.
pub fn capital_f_with<S: Scalar>(
    eval: &CampanatoNorm,
    f: &LeafFunction<S>,
    g: &LeafFunction<S>,
) -> CapitalF {
    let pf = f.profile();
    let pg = g.profile();
    let mut best = CapitalF {
        value: 0.0,
        witness: AtomId::ROOT,
    };
    for atom in eval.tree().atoms() {
        let id = atom.id();
        if pg.is_uniform(id) {
            continue;
        }
        let v = pf.average(id).abs().to_f64() * eval.atom_ratio(&pg, id);
        if v > best.value {
            best = CapitalF {
                value: v,
                witness: id,
            };
        }
    }
    best
}

pub fn capital_f<S: Scalar>(
    f: &LeafFunction<S>,
    g: &LeafFunction<S>,
    p: f64,
    phi: &PhiSpec,
) -> Result<CapitalF, MultiplierError> {
    if !Arc::ptr_eq(f.tree(), g.tree()) && f.tree() != g.tree() {
        return Err(FunctionError::TreeMismatch.into());
    }
    let eval = CampanatoNorm::new(f.tree().clone(), p, phi)?;
    Ok(capital_f_with(&eval, f, g))
}

/// `|F(f,g) - ‖fg‖| <= 2 ‖f‖ ‖g‖_∞` (seminorms), with slack [`SLACK`].
pub fn check_product_estimate<S: Scalar>(
    f: &LeafFunction<S>,
    g: &LeafFunction<S>,
    p: f64,
    phi: &PhiSpec,
) -> Result<VerificationReport, MultiplierError> {
    let eval = CampanatoNorm::new(f.tree().clone(), p, phi)?;
    let cap = capital_f_with(&eval, f, g);
    let fg = eval.seminorm(&f.mul(g)?)?.value;
    let nf = eval.seminorm(f)?.value;
    let linf = g.linf_norm().to_f64();
    let gap = (cap.value - fg).abs();
    let bound = 2.0 * nf * linf;
    let mut report = VerificationReport::new("product-estimate");
    report.push(
        Check::new(
            "product estimate",
            anchors::PRODUCT_ESTIMATE,
            gap <= bound + SLACK,
        )
        .measure("F", cap.value)
        .measure("fg_seminorm", fg)
        .measure("f_seminorm", nf)
        .measure("g_linf", linf)
        .measure("gap", gap)
        .threshold(bound + SLACK)
        .witness(cap.witness.to_string()),
    );
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MemberKind {
    Constant,
    Indicator(AtomId),
    Chain { leaf: usize },
    Random { index: usize },
    Custom(String),
}

impl fmt::Display for MemberKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MemberKind::Constant => f.write_str("1"),
            MemberKind::Indicator(id) => write!(f, "chi{id}"),
            MemberKind::Chain { leaf } => write!(f, "chain(leaf {leaf})"),
            MemberKind::Random { index } => write!(f, "random#{index}"),
            MemberKind::Custom(name) => f.write_str(name),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FamilyMember {
    pub kind: MemberKind,
    pub f: LeafFunction<f64>,
}

/// Composition of the standard test family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FamilyOptions {
    /// Indicators of every non-root atom.
    pub indicators: bool,
    /// Chain functions through this many leaves drawn by index.
    pub sample_chains: usize,
    /// Functions with values uniform in `[-1, 1]`.
    pub random: usize,
    pub seed: u64,
}

impl Default for FamilyOptions {
    fn default() -> Self {
        FamilyOptions {
            indicators: true,
            sample_chains: 16,
            random: 32,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TestFamily {
    tree: Arc<FiltrationTree>,
    members: Vec<FamilyMember>,
}

impl TestFamily {
    pub fn new(tree: Arc<FiltrationTree>) -> Self {
        TestFamily {
            tree,
            members: Vec::new(),
        }
    }

    /// Constants, indicators, chain functions for `φ` and random functions.
    pub fn standard(
        tree: &Arc<FiltrationTree>,
        phi: &PhiSpec,
        opts: &FamilyOptions,
    ) -> Result<Self, MultiplierError> {
        let mut family = TestFamily::new(tree.clone());
        family.push(
            MemberKind::Constant,
            LeafFunction::constant(tree.clone(), 1.0),
        )?;
        if opts.indicators {
            for atom in tree.atoms().skip(1) {
                let chi = LeafFunction::indicator(tree.clone(), atom.id())?;
                family.push(MemberKind::Indicator(atom.id()), chi)?;
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        for _ in 0..opts.sample_chains {
            let leaf = rng.gen_range(0..tree.num_leaves());
            let chain = chain_through_leaf(tree, leaf)?;
            let f = extremal_function::<f64>(tree, &chain, phi)?;
            family.push(MemberKind::Chain { leaf }, f)?;
        }
        for index in 0..opts.random {
            let f = LeafFunction::random(tree.clone(), &mut rng);
            family.push(MemberKind::Random { index }, f)?;
        }
        Ok(family)
    }

    pub fn push(&mut self, kind: MemberKind, f: LeafFunction<f64>) -> Result<(), MultiplierError> {
        if !Arc::ptr_eq(f.tree(), &self.tree) && **f.tree() != *self.tree {
            return Err(FunctionError::TreeMismatch.into());
        }
        self.members.push(FamilyMember { kind, f });
        Ok(())
    }

    pub fn tree(&self) -> &Arc<FiltrationTree> {
        &self.tree
    }

    pub fn members(&self) -> &[FamilyMember] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members of a family on a truncated tree, extended to `full`.
    pub fn lift(&self, full: &Arc<FiltrationTree>) -> Result<TestFamily, MultiplierError> {
        let mut lifted = TestFamily::new(full.clone());
        for m in &self.members {
            lifted.push(m.kind.clone(), m.f.lift(full)?)?;
        }
        Ok(lifted)
    }
}

/// Relative window inside which two family ratios count as tied.
pub const TIE_TOLERANCE: f64 = 1e-14;

/// `L(g)` over a family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpNormBound {
    pub value: f64,
    pub witness: String,
    pub evaluated: usize,
    pub skipped: usize,
}

/// `‖fg‖_{L̃} / ‖f‖_{L̃}` for each member, `None` for zero-norm members.
fn member_ratios(
    eval: &CampanatoNorm,
    g: &LeafFunction<f64>,
    family: &TestFamily,
) -> Result<Vec<Option<(f64, f64)>>, MultiplierError> {
    family
        .members
        .par_iter()
        .map(|m| {
            let nf = eval.norm_value(&m.f)?;
            if nf == 0.0 {
                return Ok(None);
            }
            let nfg = eval.norm_value(&m.f.mul(g)?)?;
            Ok(Some((nf, nfg)))
        })
        .collect()
}

fn reduce_bound(family: &TestFamily, ratios: &[Option<(f64, f64)>]) -> OpNormBound {
    let mut best = OpNormBound {
        value: f64::NEG_INFINITY,
        witness: String::new(),
        evaluated: 0,
        skipped: 0,
    };
    for (m, r) in family.members.iter().zip(ratios) {
        match r {
            Some((nf, nfg)) => {
                best.evaluated += 1;
                let ratio = nfg / nf;
                // Ratios within rounding of the current best keep the earlier witness.
                if best.evaluated == 1 || ratio > best.value + TIE_TOLERANCE * best.value.abs() {
                    best.value = ratio;
                    best.witness = m.kind.to_string();
                }
            }
            None => {
                warn!("skipping test function {} with zero norm", m.kind);
                best.skipped += 1;
            }
        }
    }
    best
}

/// `max_f ‖fg‖_{L̃} / ‖f‖_{L̃}` over the family; zero-norm members are skipped.
pub fn op_norm_lower_bound(
    g: &LeafFunction<f64>,
    p: f64,
    phi: &PhiSpec,
    family: &TestFamily,
) -> Result<OpNormBound, MultiplierError> {
    let eval = CampanatoNorm::new(g.tree().clone(), p, phi)?;
    op_norm_lower_bound_with(&eval, g, family)
}

fn op_norm_lower_bound_with(
    eval: &CampanatoNorm,
    g: &LeafFunction<f64>,
    family: &TestFamily,
) -> Result<OpNormBound, MultiplierError> {
    let ratios = member_ratios(eval, g, family)?;
    let bound = reduce_bound(family, &ratios);
    if bound.evaluated == 0 {
        return Err(MultiplierError::EmptyFamily);
    }
    Ok(bound)
}

/// Per-atom data for `|f_B| <= C φ*(P(B)) ‖f‖_{L̃}`.
///
/// Telescoping `f_B - E f` along the path to `B` and applying Hölder on
/// each step gives `|f_B| <= |Ef| + ‖f‖ Σ_j ρ_j^{1/p} φ(P(B_{j-1}))`, summed
/// over the steps with `ρ_j = P(B_{j-1})/P(B_j) > 1`. Hence
/// `C(B) = max(1, Σ_j ...)/φ*(P(B))` works for every `f`.
#[derive(Clone, Debug)]
pub struct AtomGrowth {
    eval: CampanatoNorm,
    star: Vec<Vec<f64>>,
    bound: Vec<Vec<f64>>,
}

impl AtomGrowth {
    pub fn new(tree: Arc<FiltrationTree>, p: f64, phi: &PhiSpec) -> Result<Self, MultiplierError> {
        let eval = CampanatoNorm::new(tree.clone(), p, phi)?;
        let star = tabulate_on_atoms(&tree, |r| phi.phi_star(r))?;
        let exponent = Exponent::new(p);
        let mut sums: Vec<Vec<f64>> = tree.levels().map(|l| vec![0.0; l.len()]).collect();
        for n in 1..=tree.depth() {
            for atom in tree.level(n) {
                let parent = atom.parent().expect("non-root atom");
                let up = tree.atom(parent)?.prob();
                let mut s = sums[n - 1][parent.index];
                if up > atom.prob() {
                    s += exponent.root(up / atom.prob()) * eval.phi_at(parent);
                }
                sums[n][atom.id().index] = s;
            }
        }
        let bound = sums
            .iter()
            .zip(&star)
            .map(|(s, st)| s.iter().zip(st).map(|(s, st)| s.max(1.0) / st).collect())
            .collect();
        Ok(AtomGrowth { eval, star, bound })
    }

    pub fn norm(&self) -> &CampanatoNorm {
        &self.eval
    }

    pub fn phi_star_at(&self, atom: AtomId) -> f64 {
        self.star[atom.level][atom.index]
    }

    /// Telescoping constant `C(B)`.
    pub fn bound_at(&self, atom: AtomId) -> f64 {
        self.bound[atom.level][atom.index]
    }

    /// Largest telescoping constant over all atoms.
    pub fn max_bound(&self) -> f64 {
        self.bound.iter().flatten().cloned().fold(0.0, f64::max)
    }

    /// Ratio `|f_B| / (φ*(P(B)) ‖f‖_{L̃})` maximized over atoms, and the
    /// number of atoms where `|f_B|` exceeds the telescoping bound.
    pub fn measure(&self, f: &LeafFunction<f64>) -> Result<GrowthSample, MultiplierError> {
        let norm = self.eval.norm_value(f)?;
        let profile = f.profile();
        let mut sample = GrowthSample {
            norm,
            ratio: 0.0,
            witness: AtomId::ROOT,
            violations: 0,
        };
        if norm == 0.0 {
            return Ok(sample);
        }
        for atom in self.eval.tree().atoms() {
            let id = atom.id();
            let avg = profile.average(id).abs();
            let scale = self.phi_star_at(id) * norm;
            if avg > self.bound_at(id) * scale + SLACK {
                sample.violations += 1;
            }
            let ratio = avg / scale;
            if ratio > sample.ratio {
                sample.ratio = ratio;
                sample.witness = id;
            }
        }
        Ok(sample)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthSample {
    pub norm: f64,
    pub ratio: f64,
    pub witness: AtomId,
    pub violations: usize,
}

/// Result of the atom-average growth check over a set of functions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    /// Measured `C_fB`.
    pub measured: f64,
    /// Largest telescoping constant.
    pub bound: f64,
    pub functions: usize,
    pub violations: usize,
    pub report: VerificationReport,
}

pub fn atom_average_growth_check(
    functions: &[LeafFunction<f64>],
    p: f64,
    phi: &PhiSpec,
) -> Result<GrowthReport, MultiplierError> {
    let tree = functions
        .first()
        .ok_or(MultiplierError::EmptyFamily)?
        .tree()
        .clone();
    let growth = AtomGrowth::new(tree, p, phi)?;
    let samples = functions
        .par_iter()
        .map(|f| growth.measure(f))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(growth_report(&growth, &samples, |i| format!("f#{i}")))
}

fn growth_report(
    growth: &AtomGrowth,
    samples: &[GrowthSample],
    label: impl Fn(usize) -> String,
) -> GrowthReport {
    let mut measured = 0.0f64;
    let mut witness = String::new();
    let mut violations = 0;
    for (i, s) in samples.iter().enumerate() {
        violations += s.violations;
        if s.ratio > measured {
            measured = s.ratio;
            witness = format!("{} at {}", label(i), s.witness);
        }
    }
    let bound = growth.max_bound();
    let mut report = VerificationReport::new("atom-average-growth");
    report.push(
        Check::new(
            "atom averages within telescoping bound",
            anchors::ATOM_AVERAGE_GROWTH,
            violations == 0,
        )
        .measure("C_fB", measured)
        .measure("violations", violations as f64)
        .threshold(bound)
        .witness(witness),
    );
    GrowthReport {
        measured,
        bound,
        functions: samples.len(),
        violations,
        report,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateStatus {
    Certified,
    AssumptionsUnmet,
    Failed,
}

/// Two-sided evidence for `‖g‖_Op ≈ ‖g‖_{L_{p,φ/φ*}} + ‖g‖_∞`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplierReport {
    pub g: String,
    pub p: f64,
    pub phi: PhiSpec,
    pub linf: f64,
    /// `‖g‖_{L_{p,φ/φ*}}`.
    pub quotient_seminorm: f64,
    /// `T(g)`.
    pub upper: f64,
    /// `L(g)`.
    pub lower: OpNormBound,
    /// `T(g)/L(g)`, absent when `L(g) = 0`.
    pub ratio: Option<f64>,
    /// Measured `C_fB` over the family.
    pub c_fb: f64,
    /// Telescoping constant valid for every function.
    pub c_fb_bound: f64,
    pub family_size: usize,
    pub assumptions_met: bool,
    pub status: CertificateStatus,
    /// Calibration note: the equivalence constants are not known, so any
    /// band on `ratio` is empirical.
    pub note: String,
    pub checks: VerificationReport,
}

/// Certificate with the standard family built from `opts`.
pub fn multiplier_certificate(
    g: &LeafFunction<f64>,
    label: &str,
    p: f64,
    phi: &PhiSpec,
    opts: &FamilyOptions,
) -> Result<MultiplierReport, MultiplierError> {
    let family = TestFamily::standard(g.tree(), phi, opts)?;
    multiplier_certificate_with_family(g, label, p, phi, &family)
}

pub fn multiplier_certificate_with_family(
    g: &LeafFunction<f64>,
    label: &str,
    p: f64,
    phi: &PhiSpec,
    family: &TestFamily,
) -> Result<MultiplierReport, MultiplierError> {
    let tree = g.tree().clone();
    let conditions = phi_report(phi, &[p], &Grid::default())?;
    let quotient = phi.quotient()?;
    let quotient_seminorm = CampanatoNorm::new(tree.clone(), p, &quotient)?
        .seminorm(g)?
        .value;
    let linf = g.linf_norm();
    let upper = quotient_seminorm + linf;

    let growth = AtomGrowth::new(tree, p, phi)?;
    let eval = growth.norm();
    let results = family
        .members
        .par_iter()
        .map(|m| {
            let sample = growth.measure(&m.f)?;
            if sample.norm == 0.0 {
                return Ok((sample, None));
            }
            let nfg = eval.norm_value(&m.f.mul(g)?)?;
            let nf = sample.norm;
            Ok((sample, Some((nf, nfg))))
        })
        .collect::<Result<Vec<_>, MultiplierError>>()?;
    let (samples, ratios): (Vec<GrowthSample>, Vec<Option<(f64, f64)>>) =
        results.into_iter().unzip();
    let lower = reduce_bound(family, &ratios);
    if lower.evaluated == 0 {
        return Err(MultiplierError::EmptyFamily);
    }
    let growth_summary = growth_report(&growth, &samples, |i| family.members[i].kind.to_string());
    let c_fb = growth_summary.measured;

    let mut checks = VerificationReport::new("theorem-certificate");
    checks.push(
        Check::new(
            "phi conditions on grid",
            anchors::PHI_CONDITIONS,
            conditions.assumptions_met,
        )
        .measure("doubling", conditions.doubling)
        .measure("int_condition", conditions.int_condition[0].value)
        .witness(conditions.grid.clone()),
    );
    checks.extend(growth_summary.report);

    // ‖fg‖_{L̃} <= (C_fB ‖g‖_{L_{p,φ/φ*}} + (2 + max(1, φ(1))) ‖g‖_∞) ‖f‖_{L̃}
    let factor = c_fb * quotient_seminorm + (2.0 + phi.at_one().max(1.0)) * linf;
    let mut failures = 0usize;
    let mut worst = 0.0f64;
    let mut worst_member = String::new();
    for (m, r) in family.members.iter().zip(&ratios) {
        if let Some((nf, nfg)) = r {
            let rhs = factor * nf;
            if *nfg > rhs + SLACK {
                failures += 1;
            }
            let used = if rhs > 0.0 { nfg / rhs } else { 0.0 };
            if used > worst {
                worst = used;
                worst_member = m.kind.to_string();
            }
        }
    }
    checks.push(
        Check::new(
            "upper bound for every member",
            anchors::THEOREM_UPPER,
            failures == 0,
        )
        .measure("factor", factor)
        .measure("worst_fraction_of_bound", worst)
        .measure("failures", failures as f64)
        .threshold(1.0)
        .witness(worst_member),
    );
    let ratio = (lower.value > 0.0).then(|| upper / lower.value);
    checks.push(
        Check::new(
            "two-sided ratio",
            anchors::THEOREM_CERTIFICATE,
            ratio.map_or(upper == 0.0, f64::is_finite),
        )
        .measure("T", upper)
        .measure("L", lower.value)
        .measure("T_over_L", ratio.unwrap_or(f64::NAN))
        .witness(lower.witness.clone()),
    );
    let status = if !checks.passed() && conditions.assumptions_met {
        CertificateStatus::Failed
    } else if !conditions.assumptions_met {
        CertificateStatus::AssumptionsUnmet
    } else {
        CertificateStatus::Certified
    };
    Ok(MultiplierReport {
        g: label.to_string(),
        p,
        phi: phi.clone(),
        linf,
        quotient_seminorm,
        upper,
        lower,
        ratio,
        c_fb,
        c_fb_bound: growth.max_bound(),
        family_size: family.len(),
        assumptions_met: conditions.assumptions_met,
        status,
        note: "L(g) is a finite-family lower bound; bands on T/L are calibration values".into(),
        checks,
    })
}

/// First ancestor `B'` of `atom` with `P(B') >= (1 + 1/R) P(B)`.
fn gap_ancestor(tree: &FiltrationTree, atom: AtomId, r: f64) -> Result<Option<AtomId>, TreeError> {
    let target = tree.atom(atom)?.prob() * (1.0 + 1.0 / r) * (1.0 - 1e-12);
    let path = tree.path_from_root(atom)?;
    Ok(path
        .iter()
        .rev()
        .find(|a| tree.level(a.level)[a.index].prob() >= target)
        .copied())
}

/// For each level, `‖gχ_B‖_{L̃} >= ‖E_n g‖_∞ / (2R(R+1)^{1/p} φ(P(B')))`
/// at the atom `B` maximizing `|g_B|`, plus the growth `E_n|g| <= R E_{n-1}|g|`.
pub fn linf_bound_check(
    g: &LeafFunction<f64>,
    p: f64,
    phi: &PhiSpec,
) -> Result<VerificationReport, MultiplierError> {
    let tree = g.tree().clone();
    let eval = CampanatoNorm::new(tree.clone(), p, phi)?;
    let r = tree.regularity_constant();
    let exponent = Exponent::new(p);
    let profile = g.profile();
    let mut report = VerificationReport::new("linf-bound");

    let mut worst = f64::INFINITY;
    let mut worst_level = String::new();
    let mut failures = 0;
    let mut skipped = 0;
    for n in 0..=tree.depth() {
        let avgs = profile.level_averages(n);
        let (mut best, mut sup) = (0, 0.0f64);
        for (i, v) in avgs.iter().enumerate() {
            if v.abs() > sup {
                sup = v.abs();
                best = i;
            }
        }
        let b = AtomId::new(n, best);
        let Some(outer) = gap_ancestor(&tree, b, r)? else {
            skipped += 1;
            continue;
        };
        let chi = LeafFunction::indicator(tree.clone(), b)?;
        let lhs = eval.norm_value(&g.mul(&chi)?)?;
        let rhs = sup / (2.0 * r * exponent.root(r + 1.0) * eval.phi_at(outer));
        if lhs < rhs - SLACK {
            failures += 1;
        }
        if rhs > 0.0 && lhs / rhs < worst {
            worst = lhs / rhs;
            worst_level = format!("B={b} B'={outer}");
        }
    }
    report.push(
        Check::new(
            "indicator product dominates level sup",
            anchors::LINF_BOUND,
            failures == 0,
        )
        .measure("R", r)
        .measure(
            "min_lhs_over_rhs",
            if worst.is_finite() { worst } else { f64::NAN },
        )
        .measure("levels_without_gap_ancestor", skipped as f64)
        .threshold(1.0)
        .witness(worst_level),
    );

    let abs = g.map(|v| v.abs()).profile();
    let mut growth_failures = 0;
    let mut worst_growth = 0.0f64;
    let mean_abs = *abs.average(AtomId::ROOT);
    let mut level_max_ok = true;
    for n in 1..=tree.depth() {
        let mut level_max = 0.0f64;
        for atom in tree.level(n) {
            let parent = atom.parent().expect("non-root atom");
            let child = *abs.average(atom.id());
            let up = *abs.average(parent);
            level_max = level_max.max(child);
            if child > r * up + SLACK {
                growth_failures += 1;
            }
            if up > 0.0 {
                worst_growth = worst_growth.max(child / up);
            }
        }
        if level_max > r.powi(n as i32) * mean_abs + SLACK {
            level_max_ok = false;
        }
    }
    report.push(
        Check::new(
            "level growth of E_n|g|",
            anchors::LINF_GROWTH,
            growth_failures == 0 && level_max_ok,
        )
        .measure("max_child_over_parent", worst_growth)
        .threshold(r),
    );

    let mut l_chi = 0.0f64;
    for atom in tree.atoms() {
        let chi = LeafFunction::indicator(tree.clone(), atom.id())?;
        let nf = eval.norm_value(&chi)?;
        l_chi = l_chi.max(eval.norm_value(&chi.mul(g)?)? / nf);
    }
    let linf = g.linf_norm();
    report.push(
        Check::new(
            "sup norm against indicator family",
            anchors::LINF_BOUND,
            l_chi > 0.0 || linf == 0.0,
        )
        .measure("g_linf", linf)
        .measure("L_indicators", l_chi)
        .measure("linf_over_L", if l_chi > 0.0 { linf / l_chi } else { 0.0 }),
    );
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelMultiplier {
    pub n: usize,
    /// Lower bound for `‖E_n g‖_Op` over `F_n`-measurable test functions.
    pub lower: f64,
    /// `‖E_n g‖_{L_{p,φ/φ*}} + ‖E_n g‖_∞`.
    pub upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionalReport {
    pub levels: Vec<LevelMultiplier>,
    /// `L(g)` over the full family together with every lifted level family.
    pub lower_union: f64,
    pub upper: f64,
    pub report: VerificationReport,
}

/// Multipliers of the truncated filtrations against `g` itself.
pub fn conditional_multiplier_check(
    g: &LeafFunction<f64>,
    p: f64,
    phi: &PhiSpec,
    opts: &FamilyOptions,
) -> Result<ConditionalReport, MultiplierError> {
    let tree = g.tree().clone();
    let eval = CampanatoNorm::new(tree.clone(), p, phi)?;
    let quotient_eval = CampanatoNorm::new(tree.clone(), p, &phi.quotient()?)?;
    let full_family = TestFamily::standard(&tree, phi, opts)?;
    let mut lower_union = op_norm_lower_bound_with(&eval, g, &full_family)?.value;

    let profile = g.profile();
    let mut levels = Vec::new();
    let mut forward_failures = 0usize;
    let mut worst_forward = f64::NEG_INFINITY;
    for n in 0..=tree.depth() {
        let truncated = tree.truncate(n)?;
        let en = profile.conditional_expectation(n);
        let gn = en.restrict(&truncated).expect("E_n g is F_n-measurable");
        let family = TestFamily::standard(&truncated, phi, opts)?;
        let level_eval = CampanatoNorm::new(truncated.clone(), p, phi)?;
        let local = member_ratios(&level_eval, &gn, &family)?;
        let lower = reduce_bound(&family, &local).value.max(0.0);

        // ‖E_n[g] f‖ = ‖E_n[gf]‖ <= ‖gf‖ for each F_n-measurable f.
        let lifted = family.lift(&tree)?;
        let full = member_ratios(&eval, g, &lifted)?;
        for (a, b) in local.iter().zip(&full) {
            if let (Some((_, small)), Some((nf, big))) = (a, b) {
                if *small > big + SLACK {
                    forward_failures += 1;
                }
                worst_forward = worst_forward.max(small - big);
                lower_union = lower_union.max(big / nf);
            }
        }
        let upper = quotient_eval.seminorm(&en)?.value + en.linf_norm();
        levels.push(LevelMultiplier { n, lower, upper });
    }
    let upper = quotient_eval.seminorm(g)?.value + g.linf_norm();

    let mut report = VerificationReport::new("conditional-multipliers");
    report.push(
        Check::new(
            "forward inequality per test function",
            anchors::CONDITIONAL_MULTIPLIER,
            forward_failures == 0,
        )
        .measure("failures", forward_failures as f64)
        .measure("max_excess", worst_forward)
        .threshold(SLACK),
    );
    let max_level = levels.iter().map(|l| l.lower).fold(0.0, f64::max);
    report.push(
        Check::new(
            "L_n <= L(g)",
            anchors::CONDITIONAL_MULTIPLIER,
            max_level <= lower_union + SLACK,
        )
        .measure("max_L_n", max_level)
        .measure("L_union", lower_union)
        .threshold(lower_union + SLACK),
    );
    let max_upper = levels.iter().map(|l| l.upper).fold(0.0, f64::max);
    let last = levels.last().expect("depth >= 0").upper;
    let tol = ROOT_SLACK * upper.max(1.0);
    let nondecreasing = levels.windows(2).all(|w| w[1].lower >= w[0].lower - SLACK);
    report.push(
        Check::new(
            "T(E_n g) maximal at n = N",
            anchors::TRUNCATION,
            max_upper <= last + tol && (last - upper).abs() <= tol,
        )
        .measure("max_T_n", max_upper)
        .measure("T_N", last)
        .measure("T", upper)
        .measure("L_n_nondecreasing", if nondecreasing { 1.0 } else { 0.0 }),
    );
    Ok(ConditionalReport {
        levels,
        lower_union,
        upper,
        report,
    })
}

/// `‖E_n f‖ <= ‖f‖` for every `n`, with equality at `n = N`.
pub fn truncation_check<S: Scalar>(
    f: &LeafFunction<S>,
    p: f64,
    phi: &PhiSpec,
) -> Result<VerificationReport, MultiplierError> {
    let eval = CampanatoNorm::new(f.tree().clone(), p, phi)?;
    let profile = f.profile();
    let full = eval.seminorm_of_profile(&profile).value;
    let mut worst = f64::NEG_INFINITY;
    let mut last = f64::NAN;
    for n in 0..=f.tree().depth() {
        let v = eval.seminorm(&profile.conditional_expectation(n))?.value;
        worst = worst.max(v - full);
        last = v;
    }
    let mut report = VerificationReport::new("truncation");
    report.push(
        Check::new(
            "seminorm of E_n f bounded by seminorm of f",
            anchors::TRUNCATION,
            worst <= 0.0 && last == full,
        )
        .measure("max_excess", worst)
        .measure("seminorm", full)
        .threshold(0.0),
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{leftmost_chain, sin_h_multiplier};

    fn brute_f(f: &LeafFunction<f64>, g: &LeafFunction<f64>) -> f64 {
        // p = 1, φ ≡ 1, straight from leaf sums.
        let tree = f.tree();
        let mut best = 0.0f64;
        for atom in tree.atoms() {
            let r = atom.leaf_range();
            let w: Vec<f64> = r.clone().map(|i| tree.leaves()[i].prob()).collect();
            let mass: f64 = w.iter().sum();
            let fb: f64 = r
                .clone()
                .zip(&w)
                .map(|(i, w)| f.values()[i] * w)
                .sum::<f64>()
                / mass;
            let gb: f64 = r
                .clone()
                .zip(&w)
                .map(|(i, w)| g.values()[i] * w)
                .sum::<f64>()
                / mass;
            let osc: f64 = r
                .zip(&w)
                .map(|(i, w)| (g.values()[i] - gb).abs() * w)
                .sum::<f64>()
                / mass;
            best = best.max(fb.abs() * osc);
        }
        best
    }

    #[test]
    fn capital_f_examples() {
        let tree = FiltrationTree::dyadic(2);
        let f = LeafFunction::new(tree.clone(), vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let g = LeafFunction::new(tree.clone(), vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        let cap = capital_f(&f, &g, 1.0, &PhiSpec::One).unwrap();
        assert!((cap.value - brute_f(&f, &g)).abs() < 1e-15);
        // B = (1,0): f_B = 1/2, oscillation of g = 1/2.
        assert_eq!(cap.value, 0.25);
        let c = LeafFunction::constant(tree.clone(), 3.0);
        assert_eq!(capital_f(&f, &c, 2.0, &PhiSpec::Psi).unwrap().value, 0.0);
        let semi = crate::norms::campanato_seminorm(&g, 2.0, &PhiSpec::Psi)
            .unwrap()
            .value;
        let cf = capital_f(&LeafFunction::constant(tree, -2.0), &g, 2.0, &PhiSpec::Psi).unwrap();
        assert!((cf.value - 2.0 * semi).abs() < 1e-14);
    }

    #[test]
    fn product_estimate_trivial_cases() {
        let tree = FiltrationTree::dyadic(4);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = LeafFunction::random(tree.clone(), &mut rng);
        let one = LeafFunction::constant(tree, 1.0);
        assert!(check_product_estimate(&f, &one, 1.0, &PhiSpec::One)
            .unwrap()
            .passed());
        assert!(check_product_estimate(&one, &f, 2.0, &PhiSpec::Psi)
            .unwrap()
            .passed());
    }

    #[test]
    fn constant_multiplier() {
        let tree = FiltrationTree::dyadic(4);
        let g = LeafFunction::constant(tree.clone(), -1.5);
        let family = TestFamily::standard(&tree, &PhiSpec::One, &FamilyOptions::default()).unwrap();
        let bound = op_norm_lower_bound(&g, 1.0, &PhiSpec::One, &family).unwrap();
        assert!((bound.value - 1.5).abs() < 1e-15);
        assert_eq!(bound.witness, "1");
        let cert =
            multiplier_certificate_with_family(&g, "c", 1.0, &PhiSpec::One, &family).unwrap();
        assert_eq!(cert.upper, 1.5);
        assert_eq!(cert.status, CertificateStatus::Certified);
        let zero = LeafFunction::constant(tree, 0.0);
        let cert =
            multiplier_certificate_with_family(&zero, "0", 1.0, &PhiSpec::One, &family).unwrap();
        assert_eq!((cert.upper, cert.lower.value, cert.ratio), (0.0, 0.0, None));
    }

    #[test]
    fn family_monotone() {
        let tree = FiltrationTree::dyadic(5);
        let chain = leftmost_chain(&tree);
        let g = sin_h_multiplier(&tree, &chain, &PhiSpec::One).unwrap();
        let opts = FamilyOptions {
            indicators: false,
            sample_chains: 4,
            random: 4,
            seed: 1,
        };
        let small = TestFamily::standard(&tree, &PhiSpec::One, &opts).unwrap();
        let mut big = small.clone();
        let chi = LeafFunction::indicator(tree.clone(), AtomId::new(5, 0)).unwrap();
        big.push(MemberKind::Indicator(AtomId::new(5, 0)), chi)
            .unwrap();
        let a = op_norm_lower_bound(&g, 1.0, &PhiSpec::One, &small)
            .unwrap()
            .value;
        let b = op_norm_lower_bound(&g, 1.0, &PhiSpec::One, &big)
            .unwrap()
            .value;
        assert!(b >= a);
        let mut empty = TestFamily::new(tree.clone());
        empty
            .push(MemberKind::Constant, LeafFunction::constant(tree, 0.0))
            .unwrap();
        assert!(matches!(
            op_norm_lower_bound(&g, 1.0, &PhiSpec::One, &empty),
            Err(MultiplierError::EmptyFamily)
        ));
    }

    #[test]
    fn growth_bound_dyadic() {
        let tree = FiltrationTree::dyadic(8);
        let growth = AtomGrowth::new(tree.clone(), 1.0, &PhiSpec::One).unwrap();
        let ln2 = std::f64::consts::LN_2;
        let expected = 16.0 / (1.0 + 8.0 * ln2);
        assert!((growth.max_bound() - expected).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let fs: Vec<_> = (0..10)
            .map(|_| LeafFunction::random(tree.clone(), &mut rng))
            .collect();
        let report = atom_average_growth_check(&fs, 1.0, &PhiSpec::One).unwrap();
        assert_eq!(report.violations, 0);
        assert!(report.measured <= report.bound);
    }

    #[test]
    fn linf_check_on_leaf_indicator() {
        let tree = FiltrationTree::dyadic(6);
        let g = LeafFunction::indicator(tree.clone(), AtomId::new(6, 5)).unwrap();
        let report = linf_bound_check(&g, 1.0, &PhiSpec::One).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.checks[0].measured["R"], 2.0);
        assert_eq!(
            gap_ancestor(&tree, AtomId::new(6, 5), 2.0).unwrap(),
            Some(AtomId::new(5, 2))
        );
        let c = LeafFunction::constant(tree, 2.0);
        assert!(linf_bound_check(&c, 2.0, &PhiSpec::Psi).unwrap().passed());
    }

    #[test]
    fn conditional_check_small() {
        let tree = FiltrationTree::dyadic(5);
        let chain = leftmost_chain(&tree);
        let g = sin_h_multiplier(&tree, &chain, &PhiSpec::One).unwrap();
        let opts = FamilyOptions {
            sample_chains: 4,
            random: 4,
            ..FamilyOptions::default()
        };
        let r = conditional_multiplier_check(&g, 1.0, &PhiSpec::One, &opts).unwrap();
        assert!(r.report.passed(), "{:?}", r.report);
        let eg = g.expectation().abs();
        assert!((r.levels[0].lower - eg).abs() < 1e-12);
        assert!(truncation_check(&g, 1.0, &PhiSpec::One).unwrap().passed());
    }
}
