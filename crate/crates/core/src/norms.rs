//! Campanato seminorms and norms on a filtration tree.
//!
//! `‖f‖ = sup_n sup_{B ∈ A(F_n)} φ(P(B))^{-1} ((1/P(B)) ∫_B |f - E_n f|^p)^{1/p}`.
//! Levels past the tree depth contribute nothing for a leaf function, so the
//! supremum over `n <= N` is the full supremum.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filtration::{AtomId, FiltrationTree, TreeError};
use crate::functions::{check_exponent, AtomProfile, FunctionError, LeafFunction};
use crate::phi::{PhiError, PhiSpec};
use crate::scalar::{Exponent, PowerSum, Rational, Scalar};
use num_traits::One;

/// Largest number of atoms on one level for exhaustive subset enumeration.
pub const F_NORM_MAX_ATOMS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormError {
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error(transparent)]
    Phi(#[from] PhiError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(
        "level {level} has {atoms} atoms; exhaustive subset enumeration is limited to \
         {limit} atoms per level (use the greedy lower bound instead)"
    )]
    EnumerationBound {
        level: usize,
        atoms: usize,
        limit: usize,
    },
    #[error("subset budget must be positive")]
    ZeroBudget,
}

/// Atoms attaining a supremum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub level: usize,
    pub atoms: Vec<AtomId>,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} B=", self.level)?;
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub value: f64,
    pub witness: Witness,
    /// Supremum of the normalized oscillation on each level.
    pub level_sups: Vec<f64>,
    /// Set when the value is only a lower bound (greedy search).
    #[serde(default)]
    pub lower_bound: bool,
}

/// Exact supremum of `(1/P(B)) ∫_B |f - E_n f|^p` over all atoms, i.e. the
/// `p`-th power of the seminorm for `φ ≡ 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactNorm<S> {
    pub value: S,
    pub witness: Witness,
}

/// Running maximum; only a strictly larger value replaces the witness, so
/// ties resolve to the first atom in (level, index) order.
struct Best {
    value: f64,
    witness: Option<Witness>,
}

impl Best {
    fn new() -> Self {
        Best {
            value: f64::NEG_INFINITY,
            witness: None,
        }
    }

    fn offer(&mut self, value: f64, witness: impl FnOnce() -> Witness) {
        if value > self.value {
            self.value = value;
            self.witness = Some(witness());
        }
    }

    fn finish(self, level_sups: Vec<f64>) -> NormResult {
        NormResult {
            value: self.value.max(0.0),
            witness: self.witness.unwrap_or(Witness {
                level: 0,
                atoms: vec![AtomId::ROOT],
            }),
            level_sups,
            lower_bound: false,
        }
    }
}

/// Evaluates `φ` at every distinct atom measure once.
pub fn phi_on_atoms(tree: &FiltrationTree, phi: &PhiSpec) -> Result<Vec<Vec<f64>>, PhiError> {
    tabulate_on_atoms(tree, |r| phi.eval(r))
}

/// `w(P(B))` for every atom, indexed `[level][index]`, with one call per
/// distinct measure.
pub fn tabulate_on_atoms<F>(tree: &FiltrationTree, mut w: F) -> Result<Vec<Vec<f64>>, PhiError>
where
    F: FnMut(f64) -> Result<f64, PhiError>,
{
    let mut cache: HashMap<u64, f64> = HashMap::new();
    tree.levels()
        .map(|level| {
            level
                .iter()
                .map(|atom| {
                    let r = atom.prob();
                    if let Some(v) = cache.get(&r.to_bits()) {
                        return Ok(*v);
                    }
                    let v = w(r)?;
                    cache.insert(r.to_bits(), v);
                    Ok(v)
                })
                .collect()
        })
        .collect()
}

/// Seminorm evaluator for a fixed tree, exponent and weight.
#[derive(Clone, Debug)]
pub struct CampanatoNorm {
    tree: Arc<FiltrationTree>,
    exponent: Exponent,
    phi: PhiSpec,
    phi_values: Vec<Vec<f64>>,
}

impl CampanatoNorm {
    pub fn new(tree: Arc<FiltrationTree>, p: f64, phi: &PhiSpec) -> Result<Self, NormError> {
        let exponent = check_exponent(p)?;
        phi.validate()?;
        let phi_values = phi_on_atoms(&tree, phi)?;
        Ok(CampanatoNorm {
            tree,
            exponent,
            phi: phi.clone(),
            phi_values,
        })
    }

    pub fn tree(&self) -> &Arc<FiltrationTree> {
        &self.tree
    }

    pub fn p(&self) -> f64 {
        self.exponent.value()
    }

    pub fn exponent(&self) -> Exponent {
        self.exponent
    }

    pub fn phi(&self) -> &PhiSpec {
        &self.phi
    }

    /// `φ(P(B))`.
    pub fn phi_at(&self, atom: AtomId) -> f64 {
        self.phi_values[atom.level][atom.index]
    }

    fn check_tree<S: Scalar>(&self, f: &LeafFunction<S>) -> Result<(), NormError> {
        if Arc::ptr_eq(f.tree(), &self.tree) || **f.tree() == *self.tree {
            Ok(())
        } else {
            Err(FunctionError::TreeMismatch.into())
        }
    }

    /// `((1/P(B)) ∫_B |f - f_B|^p)^{1/p}` without the weight.
    pub fn oscillation<S: Scalar>(&self, profile: &AtomProfile<S>, atom: AtomId) -> f64 {
        self.exponent
            .root(profile.mean_oscillation(atom, self.exponent))
    }

    /// Normalized oscillation `φ(P(B))^{-1} ((1/P(B)) ∫_B |f - f_B|^p)^{1/p}`.
    pub fn atom_ratio<S: Scalar>(&self, profile: &AtomProfile<S>, atom: AtomId) -> f64 {
        self.oscillation(profile, atom) / self.phi_at(atom)
    }

    pub fn seminorm<S: Scalar>(&self, f: &LeafFunction<S>) -> Result<NormResult, NormError> {
        self.check_tree(f)?;
        Ok(self.seminorm_of_profile(&f.profile()))
    }

    pub fn seminorm_of_profile<S: Scalar>(&self, profile: &AtomProfile<S>) -> NormResult {
        let mut best = Best::new();
        let mut level_sups = Vec::with_capacity(self.tree.depth() + 1);
        for (n, level) in self.tree.levels().enumerate() {
            let mut sup = 0.0f64;
            for atom in level {
                let id = atom.id();
                let ratio = self.atom_ratio(profile, id);
                sup = sup.max(ratio);
                best.offer(ratio, || Witness {
                    level: n,
                    atoms: vec![id],
                });
            }
            level_sups.push(sup);
        }
        best.finish(level_sups)
    }

    /// Seminorm plus `|E f|`.
    pub fn norm<S: Scalar>(&self, f: &LeafFunction<S>) -> Result<NormResult, NormError> {
        let mut result = self.seminorm(f)?;
        result.value += f.expectation().abs().to_f64();
        Ok(result)
    }

    /// Value of the tilde norm only.
    pub fn norm_value<S: Scalar>(&self, f: &LeafFunction<S>) -> Result<f64, NormError> {
        Ok(self.norm(f)?.value)
    }

    /// Seminorm of `χ_B` from the two-valued formula over the ancestors of `B`.
    pub fn chi_closed_form(&self, atom: AtomId) -> Result<NormResult, NormError> {
        let path = self.tree.path_from_root(atom)?;
        let target = self.tree.atom(atom)?.measure().clone();
        let p = self.exponent;
        let mut best = Best::new();
        let mut level_sups = vec![0.0; self.tree.depth() + 1];
        for &ancestor in &path[..path.len() - 1] {
            let outer = self.tree.atom(ancestor)?.measure();
            let mean = match (target.as_exact(), outer.as_exact(), p) {
                (Some(b), Some(bk), Exponent::Integer(k)) => {
                    let x = b / bk;
                    let y = Rational::one() - &x;
                    (&x * y.powu(k) + &y * x.powu(k)).to_f64()
                }
                _ => {
                    let x = target.value() / outer.value();
                    let pv = p.value();
                    x * (1.0 - x).powf(pv) + (1.0 - x) * x.powf(pv)
                }
            };
            let ratio = p.root(mean) / self.phi_at(ancestor);
            level_sups[ancestor.level] = ratio;
            best.offer(ratio, || Witness {
                level: ancestor.level,
                atoms: vec![ancestor],
            });
        }
        Ok(best.finish(level_sups))
    }

    /// Per-atom central integrals `∫_B |f - E_n f|^p` for the atoms of level `n`.
    fn level_integrals<S: Scalar>(&self, profile: &AtomProfile<S>, n: usize) -> Vec<f64> {
        self.tree
            .level(n)
            .iter()
            .map(|atom| {
                if profile.is_uniform(atom.id()) {
                    0.0
                } else {
                    profile.central_sum(atom.id(), self.exponent).total()
                }
            })
            .collect()
    }

    fn subset_ratio(&self, integral: f64, mass: f64) -> Result<f64, PhiError> {
        let mass = mass.min(1.0);
        Ok(self.exponent.root(integral / mass) / self.phi.eval(mass)?)
    }

    /// Supremum over `n` and all unions `A` of level-`n` atoms of
    /// `φ(P(A))^{-1} ((1/P(A)) ∫_A |f - E_n f|^p)^{1/p}`, by enumeration.
    pub fn f_norm_exact<S: Scalar>(&self, f: &LeafFunction<S>) -> Result<NormResult, NormError> {
        self.check_tree(f)?;
        for (n, level) in self.tree.levels().enumerate() {
            if level.len() > F_NORM_MAX_ATOMS {
                return Err(NormError::EnumerationBound {
                    level: n,
                    atoms: level.len(),
                    limit: F_NORM_MAX_ATOMS,
                });
            }
        }
        let profile = f.profile();
        let mut best = Best::new();
        let mut level_sups = Vec::new();
        for (n, level) in self.tree.levels().enumerate() {
            let integrals = self.level_integrals(&profile, n);
            let masses: Vec<f64> = level.iter().map(|a| a.prob()).collect();
            let count = 1usize << level.len();
            let mut sum = vec![0.0f64; count];
            let mut mass = vec![0.0f64; count];
            let mut sup = 0.0f64;
            for mask in 1..count {
                let low = mask.trailing_zeros() as usize;
                let rest = mask & (mask - 1);
                sum[mask] = sum[rest] + integrals[low];
                mass[mask] = mass[rest] + masses[low];
                let ratio = self.subset_ratio(sum[mask], mass[mask])?;
                sup = sup.max(ratio);
                best.offer(ratio, || Witness {
                    level: n,
                    atoms: (0..level.len())
                        .filter(|i| mask >> i & 1 == 1)
                        .map(|i| AtomId::new(n, i))
                        .collect(),
                });
            }
            level_sups.push(sup);
        }
        Ok(best.finish(level_sups))
    }

    /// Lower bound for the measurable-set norm: on each level, singletons
    /// and prefixes (up to `budget` atoms) of the atoms sorted by decreasing
    /// oscillation density `∫_B |f - E_n f|^p / P(B)`.
    pub fn f_norm_lower<S: Scalar>(
        &self,
        f: &LeafFunction<S>,
        budget: usize,
    ) -> Result<NormResult, NormError> {
        self.check_tree(f)?;
        if budget == 0 {
            return Err(NormError::ZeroBudget);
        }
        let profile = f.profile();
        let mut best = Best::new();
        let mut level_sups = Vec::new();
        for (n, level) in self.tree.levels().enumerate() {
            let integrals = self.level_integrals(&profile, n);
            let masses: Vec<f64> = level.iter().map(|a| a.prob()).collect();
            let mut sup = 0.0f64;
            for i in 0..level.len() {
                let ratio = self.subset_ratio(integrals[i], masses[i])?;
                sup = sup.max(ratio);
                best.offer(ratio, || Witness {
                    level: n,
                    atoms: vec![AtomId::new(n, i)],
                });
            }
            let mut order: Vec<usize> = (0..level.len()).collect();
            order.sort_by(|&a, &b| {
                (integrals[b] / masses[b])
                    .total_cmp(&(integrals[a] / masses[a]))
                    .then(a.cmp(&b))
            });
            let (mut sum, mut mass) = (0.0, 0.0);
            for (k, &i) in order.iter().take(budget).enumerate() {
                sum += integrals[i];
                mass += masses[i];
                if k == 0 {
                    continue;
                }
                let ratio = self.subset_ratio(sum, mass)?;
                sup = sup.max(ratio);
                best.offer(ratio, || {
                    let mut atoms: Vec<AtomId> =
                        order[..=k].iter().map(|&j| AtomId::new(n, j)).collect();
                    atoms.sort_by_key(|a| a.index);
                    Witness { level: n, atoms }
                });
            }
            level_sups.push(sup);
        }
        let mut result = best.finish(level_sups);
        result.lower_bound = true;
        Ok(result)
    }
}

/// `‖f‖_{L_{p,φ}}`.
pub fn campanato_seminorm<S: Scalar>(
    f: &LeafFunction<S>,
    p: f64,
    phi: &PhiSpec,
) -> Result<NormResult, NormError> {
    CampanatoNorm::new(f.tree().clone(), p, phi)?.seminorm(f)
}

/// `‖f‖_{L̃_{p,φ}} = ‖f‖_{L_{p,φ}} + |E f|`.
pub fn campanato_norm<S: Scalar>(
    f: &LeafFunction<S>,
    p: f64,
    phi: &PhiSpec,
) -> Result<NormResult, NormError> {
    CampanatoNorm::new(f.tree().clone(), p, phi)?.norm(f)
}

/// Seminorm of the indicator of `atom` from its closed form.
pub fn chi_norm_closed_form(
    tree: &Arc<FiltrationTree>,
    atom: AtomId,
    p: f64,
    phi: &PhiSpec,
) -> Result<NormResult, NormError> {
    CampanatoNorm::new(tree.clone(), p, phi)?.chi_closed_form(atom)
}

pub fn f_norm_exact<S: Scalar>(
    f: &LeafFunction<S>,
    p: f64,
    phi: &PhiSpec,
) -> Result<NormResult, NormError> {
    CampanatoNorm::new(f.tree().clone(), p, phi)?.f_norm_exact(f)
}

pub fn f_norm_lower<S: Scalar>(
    f: &LeafFunction<S>,
    p: f64,
    phi: &PhiSpec,
    budget: usize,
) -> Result<NormResult, NormError> {
    CampanatoNorm::new(f.tree().clone(), p, phi)?.f_norm_lower(f, budget)
}

/// `sup_B (1/P(B)) ∫_B |f - E_n f|^p` computed without rounding for an
/// integer exponent `p`; this is `‖f‖^p` for `φ ≡ 1`.
pub fn seminorm_power_exact<S: Scalar>(
    f: &LeafFunction<S>,
    p: u32,
) -> Result<ExactNorm<S>, NormError> {
    if p == 0 {
        return Err(FunctionError::BadExponent(0.0).into());
    }
    let exponent = Exponent::Integer(p);
    let profile = f.profile();
    let mut value = S::zero();
    let mut witness = Witness {
        level: 0,
        atoms: vec![AtomId::ROOT],
    };
    for (n, level) in f.tree().levels().enumerate() {
        for atom in level {
            let id = atom.id();
            if profile.is_uniform(id) {
                continue;
            }
            let mean = match profile.central_sum(id, exponent) {
                PowerSum::Exact(s) => s / profile.weight(id).clone(),
                PowerSum::Float(_) => unreachable!("integer exponent"),
            };
            if mean > value {
                value = mean;
                witness = Witness {
                    level: n,
                    atoms: vec![id],
                };
            }
        }
    }
    Ok(ExactNorm { value, witness })
}

/// Exact BMO seminorm (`p = 1`, `φ ≡ 1`).
pub fn bmo_seminorm_exact<S: Scalar>(f: &LeafFunction<S>) -> Result<ExactNorm<S>, NormError> {
    seminorm_power_exact(f, 1)
}
