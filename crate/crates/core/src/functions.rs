//! Functions on the leaves of a filtration tree, conditional expectations,
//! atom averages and martingale sequences.
//!
//! A [`LeafFunction`] is constant on every deepest-level atom, so it is
//! `F_N`-measurable and every `E_n` reduces to finite weighted averages.

use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::filtration::{Atom, AtomId, FiltrationTree, TreeError};
use crate::scalar::{Exponent, PowerSum, Rational, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FunctionError {
    #[error("expected {expected} leaf values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("leaf value {leaf} is not finite")]
    NonFinite { leaf: usize },
    #[error("level {level} out of range 0..={depth}")]
    LevelOutOfRange { level: usize, depth: usize },
    #[error("atom {atom} is not at level {level}")]
    WrongLevel { atom: AtomId, level: usize },
    #[error("functions live on different trees")]
    TreeMismatch,
    #[error("exponent p = {0} must be a finite real >= 1")]
    BadExponent(f64),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

pub(crate) fn check_exponent(p: f64) -> Result<Exponent, FunctionError> {
    if p.is_finite() && p >= 1.0 {
        Ok(Exponent::new(p))
    } else {
        Err(FunctionError::BadExponent(p))
    }
}

/// Real function constant on each leaf atom.
#[derive(Clone, Debug)]
pub struct LeafFunction<S = f64> {
    tree: Arc<FiltrationTree>,
    values: Vec<S>,
}

impl<S: Scalar> PartialEq for LeafFunction<S> {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values
            && (Arc::ptr_eq(&self.tree, &other.tree) || self.tree == other.tree)
    }
}

impl<S: Scalar> LeafFunction<S> {
    pub fn new(tree: Arc<FiltrationTree>, values: Vec<S>) -> Result<Self, FunctionError> {
        let expected = tree.num_leaves();
        if values.len() != expected {
            return Err(FunctionError::LengthMismatch {
                expected,
                got: values.len(),
            });
        }
        if let Some(leaf) = values.iter().position(|v| !v.to_f64().is_finite()) {
            return Err(FunctionError::NonFinite { leaf });
        }
        Ok(LeafFunction { tree, values })
    }

    pub fn constant(tree: Arc<FiltrationTree>, c: S) -> Self {
        let values = vec![c; tree.num_leaves()];
        LeafFunction { tree, values }
    }

    pub fn zero(tree: Arc<FiltrationTree>) -> Self {
        Self::constant(tree, S::zero())
    }

    /// `χ_B` for an atom at any level.
    pub fn indicator(tree: Arc<FiltrationTree>, atom: AtomId) -> Result<Self, FunctionError> {
        let range = tree.atom(atom)?.leaf_range();
        let values = (0..tree.num_leaves())
            .map(|i| {
                if range.contains(&i) {
                    S::one()
                } else {
                    S::zero()
                }
            })
            .collect();
        Ok(LeafFunction { tree, values })
    }

    pub fn from_fn(tree: Arc<FiltrationTree>, f: impl FnMut(usize) -> S) -> Self {
        let values = (0..tree.num_leaves()).map(f).collect();
        LeafFunction { tree, values }
    }

    pub fn tree(&self) -> &Arc<FiltrationTree> {
        &self.tree
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn into_values(self) -> Vec<S> {
        self.values
    }

    pub fn value(&self, leaf: usize) -> &S {
        &self.values[leaf]
    }

    fn same_tree(&self, other: &Self) -> Result<(), FunctionError> {
        if Arc::ptr_eq(&self.tree, &other.tree) || self.tree == other.tree {
            Ok(())
        } else {
            Err(FunctionError::TreeMismatch)
        }
    }

    fn zip_with(&self, other: &Self, op: impl Fn(&S, &S) -> S) -> Result<Self, FunctionError> {
        self.same_tree(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| op(a, b))
            .collect();
        Ok(LeafFunction {
            tree: self.tree.clone(),
            values,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self, FunctionError> {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FunctionError> {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    /// Pointwise product `fg`.
    pub fn mul(&self, other: &Self) -> Result<Self, FunctionError> {
        self.zip_with(other, |a, b| a.clone() * b.clone())
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|v| v.clone() * c.clone())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> LeafFunction<T> {
        LeafFunction {
            tree: self.tree.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> LeafFunction<f64> {
        self.map(Scalar::to_f64)
    }

    pub fn leaf_weights(&self) -> Vec<S> {
        self.tree
            .leaves()
            .iter()
            .map(|a| S::from_measure(a.measure()))
            .collect()
    }

    /// `E f = Σ f(leaf) P(leaf)`.
    pub fn expectation(&self) -> S {
        self.values
            .iter()
            .zip(self.tree.leaves())
            .fold(S::zero(), |acc, (v, a)| {
                acc + v.clone() * S::from_measure(a.measure())
            })
    }

    pub fn linf_norm(&self) -> S {
        self.values
            .iter()
            .map(|v| v.abs())
            .fold(S::zero(), |acc, v| if v > acc { v } else { acc })
    }

    /// `(Σ |f|^p P(leaf))^(1/p)`.
    pub fn lp_norm(&self, p: f64) -> Result<f64, FunctionError> {
        let exponent = check_exponent(p)?;
        let mut acc = PowerSum::<S>::new(exponent);
        for (v, a) in self.values.iter().zip(self.tree.leaves()) {
            acc.add(v, &S::from_measure(a.measure()), exponent);
        }
        Ok(exponent.root(acc.total()))
    }

    /// Per-atom averages for every level.
    pub fn profile(&self) -> AtomProfile<S> {
        AtomProfile::new(self)
    }

    /// `f_B = (1/P(B)) Σ_{leaf ⊆ B} f(leaf) P(leaf)`.
    pub fn atom_average(&self, atom: AtomId) -> Result<S, FunctionError> {
        let a = self.tree.atom(atom)?;
        let sum = a.leaf_range().fold(S::zero(), |acc, i| {
            acc + self.values[i].clone() * S::from_measure(self.tree.leaves()[i].measure())
        });
        Ok(sum / S::from_measure(a.measure()))
    }

    /// `E_n f`, constant on each level-`n` atom.
    pub fn conditional_expectation(&self, n: usize) -> Result<Self, FunctionError> {
        self.check_level(n)?;
        Ok(self.profile().conditional_expectation(n))
    }

    /// `∫_B |f - E_n f|^p dP` for an atom `B` of level `n`.
    pub fn central_p_integral(&self, atom: AtomId, n: usize, p: f64) -> Result<f64, FunctionError> {
        let exponent = check_exponent(p)?;
        self.check_level(n)?;
        self.tree.atom(atom)?;
        if atom.level != n {
            return Err(FunctionError::WrongLevel { atom, level: n });
        }
        Ok(self.profile().central_sum(atom, exponent).total())
    }

    /// The martingale `(E_0 f, ..., E_N f)`.
    pub fn martingale(&self) -> MartingaleSequence<S> {
        let profile = self.profile();
        let levels = (0..=self.tree.depth())
            .map(|n| profile.conditional_expectation(n))
            .collect();
        MartingaleSequence {
            tree: self.tree.clone(),
            levels,
        }
    }

    /// Whether `f` is constant on every atom of level `n`.
    pub fn is_measurable_at(&self, n: usize) -> bool {
        n <= self.tree.depth()
            && self.tree.level(n).iter().all(|atom| {
                let r = atom.leaf_range();
                self.values[r.clone()]
                    .iter()
                    .all(|v| *v == self.values[r.start])
            })
    }

    /// Restriction of an `F_n`-measurable function to the tree truncated at
    /// depth `n`. Returns `None` when `f` is not `F_n`-measurable.
    pub fn restrict(&self, truncated: &Arc<FiltrationTree>) -> Option<Self> {
        let n = truncated.depth();
        if n > self.tree.depth() || truncated.level(n).len() != self.tree.level(n).len() {
            return None;
        }
        if !self.is_measurable_at(n) {
            return None;
        }
        let values = self
            .tree
            .level(n)
            .iter()
            .map(|atom| self.values[atom.leaf_range().start].clone())
            .collect();
        Some(LeafFunction {
            tree: truncated.clone(),
            values,
        })
    }

    /// Extends a function on a truncated tree to the full tree, constant on
    /// the descendants of each leaf.
    pub fn lift(&self, full: &Arc<FiltrationTree>) -> Result<Self, FunctionError> {
        let n = self.tree.depth();
        if n > full.depth() || full.level(n).len() != self.tree.num_leaves() {
            return Err(FunctionError::TreeMismatch);
        }
        let mut values = vec![S::zero(); full.num_leaves()];
        for (atom, v) in full.level(n).iter().zip(&self.values) {
            for i in atom.leaf_range() {
                values[i] = v.clone();
            }
        }
        Ok(LeafFunction {
            tree: full.clone(),
            values,
        })
    }

    fn check_level(&self, n: usize) -> Result<(), FunctionError> {
        if n > self.tree.depth() {
            return Err(FunctionError::LevelOutOfRange {
                level: n,
                depth: self.tree.depth(),
            });
        }
        Ok(())
    }
}

impl LeafFunction<f64> {
    /// Values drawn uniformly from `[-1, 1]`.
    pub fn random<R: Rng + ?Sized>(tree: Arc<FiltrationTree>, rng: &mut R) -> Self {
        Self::from_fn(tree, |_| rng.gen_range(-1.0..=1.0))
    }

    /// Exact rational copy of the `f64` values.
    pub fn to_exact(&self) -> LeafFunction<Rational> {
        self.map(|v| <Rational as Scalar>::from_f64(*v))
    }
}

impl LeafFunction<Rational> {
    /// Values `k/8` with `k` uniform in `-16..=16`.
    pub fn random_exact<R: Rng + ?Sized>(tree: Arc<FiltrationTree>, rng: &mut R) -> Self {
        Self::from_fn(tree, |_| {
            Rational::new(rng.gen_range(-16i64..=16).into(), 8i64.into())
        })
    }
}

/// Atom averages of one function, for every atom of every level.
///
/// An atom is *uniform* when the function is constant on it; the central
/// integral over an atom only descends into non-uniform sub-atoms.
#[derive(Clone, Debug)]
pub struct AtomProfile<S> {
    tree: Arc<FiltrationTree>,
    averages: Vec<Vec<S>>,
    uniform: Vec<Vec<bool>>,
    weights: Vec<Vec<S>>,
}

impl<S: Scalar> AtomProfile<S> {
    pub fn new(f: &LeafFunction<S>) -> Self {
        let tree = f.tree.clone();
        let depth = tree.depth();
        let weights: Vec<Vec<S>> = tree
            .levels()
            .map(|level| level.iter().map(|a| S::from_measure(a.measure())).collect())
            .collect();
        let mut averages: Vec<Vec<S>> = vec![Vec::new(); depth + 1];
        let mut uniform: Vec<Vec<bool>> = vec![Vec::new(); depth + 1];
        averages[depth] = f.values.clone();
        uniform[depth] = vec![true; f.values.len()];
        for n in (0..depth).rev() {
            let mut avg = Vec::with_capacity(tree.level(n).len());
            let mut uni = Vec::with_capacity(tree.level(n).len());
            for (i, atom) in tree.level(n).iter().enumerate() {
                let kids = atom.child_range();
                let first = &averages[n + 1][kids.start];
                let same = kids
                    .clone()
                    .all(|k| uniform[n + 1][k] && averages[n + 1][k] == *first);
                if same {
                    avg.push(first.clone());
                } else {
                    let sum = kids.fold(S::zero(), |acc, k| {
                        acc + averages[n + 1][k].clone() * weights[n + 1][k].clone()
                    });
                    avg.push(sum / weights[n][i].clone());
                }
                uni.push(same);
            }
            averages[n] = avg;
            uniform[n] = uni;
        }
        AtomProfile {
            tree,
            averages,
            uniform,
            weights,
        }
    }

    pub fn tree(&self) -> &Arc<FiltrationTree> {
        &self.tree
    }

    pub fn average(&self, atom: AtomId) -> &S {
        &self.averages[atom.level][atom.index]
    }

    pub fn level_averages(&self, n: usize) -> &[S] {
        &self.averages[n]
    }

    pub fn is_uniform(&self, atom: AtomId) -> bool {
        self.uniform[atom.level][atom.index]
    }

    pub fn weight(&self, atom: AtomId) -> &S {
        &self.weights[atom.level][atom.index]
    }

    /// Whether the function is constant on all of `Ω`.
    pub fn is_constant(&self) -> bool {
        self.uniform[0][0]
    }

    pub fn conditional_expectation(&self, n: usize) -> LeafFunction<S> {
        let mut values = vec![S::zero(); self.tree.num_leaves()];
        for (atom, avg) in self.tree.level(n).iter().zip(&self.averages[n]) {
            for i in atom.leaf_range() {
                values[i] = avg.clone();
            }
        }
        LeafFunction {
            tree: self.tree.clone(),
            values,
        }
    }

    /// `∫_B |f - f_B|^p dP`, accumulated over maximal uniform sub-atoms.
    pub(crate) fn central_sum(&self, atom: AtomId, exponent: Exponent) -> PowerSum<S> {
        self.deviation_sum(atom, self.average(atom), exponent)
    }

    /// `∫_B |f - c|^p dP` for an arbitrary center `c`.
    pub(crate) fn deviation_sum(
        &self,
        atom: AtomId,
        center: &S,
        exponent: Exponent,
    ) -> PowerSum<S> {
        let mut acc = PowerSum::new(exponent);
        if self.is_uniform(atom) && self.average(atom) == center {
            return acc;
        }
        let mut stack = vec![atom];
        while let Some(id) = stack.pop() {
            if self.is_uniform(id) {
                let diff = self.average(id).clone() - center.clone();
                if !diff.is_zero() {
                    acc.add(&diff, self.weight(id), exponent);
                }
            } else {
                let a: &Atom = &self.tree.level(id.level)[id.index];
                stack.extend(a.children());
            }
        }
        acc
    }

    /// `(1/P(B)) ∫_B |f - E_n f|^p dP` as `f64`, exact before the final
    /// conversion for integer `p`.
    pub(crate) fn mean_oscillation(&self, atom: AtomId, exponent: Exponent) -> f64 {
        if self.is_uniform(atom) {
            return 0.0;
        }
        self.central_sum(atom, exponent).mean(self.weight(atom))
    }
}

/// `(f_0, ..., f_N)` with `f_n` constant on level-`n` atoms.
#[derive(Clone, Debug)]
pub struct MartingaleSequence<S = f64> {
    tree: Arc<FiltrationTree>,
    levels: Vec<LeafFunction<S>>,
}

impl<S: Scalar> PartialEq for MartingaleSequence<S> {
    fn eq(&self, other: &Self) -> bool {
        self.levels == other.levels
    }
}

impl<S: Scalar> MartingaleSequence<S> {
    /// Wraps explicit levels; checks count, tree and adaptedness.
    pub fn from_levels(
        tree: Arc<FiltrationTree>,
        levels: Vec<LeafFunction<S>>,
    ) -> Result<Self, FunctionError> {
        if levels.len() != tree.depth() + 1 {
            return Err(FunctionError::LengthMismatch {
                expected: tree.depth() + 1,
                got: levels.len(),
            });
        }
        for (n, f) in levels.iter().enumerate() {
            if !(Arc::ptr_eq(&f.tree, &tree) || *f.tree == *tree) {
                return Err(FunctionError::TreeMismatch);
            }
            if !f.is_measurable_at(n) {
                return Err(FunctionError::WrongLevel {
                    atom: AtomId::new(n, 0),
                    level: n,
                });
            }
        }
        Ok(MartingaleSequence { tree, levels })
    }

    pub fn levels(&self) -> &[LeafFunction<S>] {
        &self.levels
    }

    pub fn level(&self, n: usize) -> &LeafFunction<S> {
        &self.levels[n]
    }

    pub fn last(&self) -> &LeafFunction<S> {
        self.levels.last().expect("at least one level")
    }

    /// `max_n ‖E_n f_{n+1} - f_n‖_∞`, zero for an exact martingale.
    pub fn martingale_defect(&self) -> f64 {
        (0..self.tree.depth())
            .map(|n| {
                let projected = self.levels[n + 1].profile().conditional_expectation(n);
                projected
                    .values
                    .iter()
                    .zip(&self.levels[n].values)
                    .map(|(a, b)| (a.clone() - b.clone()).abs().to_f64())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// Exact check of `E_n f_{n+1} = f_n` for every `n`.
    pub fn is_martingale(&self) -> bool {
        (0..self.tree.depth()).all(|n| {
            self.levels[n + 1]
                .profile()
                .conditional_expectation(n)
                .values
                == self.levels[n].values
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn exact(tree: &Arc<FiltrationTree>, vals: &[(i64, i64)]) -> LeafFunction<Rational> {
        LeafFunction::new(tree.clone(), vals.iter().map(|&(n, d)| q(n, d)).collect()).unwrap()
    }

    #[test]
    fn conditional_expectation_examples() {
        let tree = FiltrationTree::dyadic(2);
        let f = exact(&tree, &[(1, 1), (0, 1), (0, 1), (0, 1)]);
        assert_eq!(f.conditional_expectation(2).unwrap(), f);
        let e0 = f.conditional_expectation(0).unwrap();
        assert!(e0.values().iter().all(|v| *v == q(1, 4)));
        let e1 = f.conditional_expectation(1).unwrap();
        assert_eq!(e1.values(), &[q(1, 2), q(1, 2), q(0, 1), q(0, 1)]);
        assert!(matches!(
            f.conditional_expectation(3),
            Err(FunctionError::LevelOutOfRange { .. })
        ));
    }

    #[test]
    fn atom_average_examples() {
        let tree = FiltrationTree::dyadic(3);
        let c = LeafFunction::constant(tree.clone(), q(7, 3));
        for atom in tree.atoms() {
            assert_eq!(c.atom_average(atom.id()).unwrap(), q(7, 3));
        }
        let chi = LeafFunction::<Rational>::indicator(tree.clone(), AtomId::new(2, 1)).unwrap();
        assert_eq!(chi.atom_average(AtomId::new(1, 0)).unwrap(), q(1, 2));
        let tree1 = FiltrationTree::dyadic(1);
        let f = exact(&tree1, &[(3, 1), (1, 1)]);
        assert_eq!(f.atom_average(AtomId::ROOT).unwrap(), q(2, 1));
    }

    #[test]
    fn central_integral_examples() {
        let tree = FiltrationTree::dyadic(1);
        let f = exact(&tree, &[(1, 1), (0, 1)]);
        assert_eq!(f.central_p_integral(AtomId::ROOT, 0, 1.0).unwrap(), 0.5);
        assert_eq!(f.central_p_integral(AtomId::ROOT, 0, 2.0).unwrap(), 0.25);
        assert_eq!(
            f.central_p_integral(AtomId::new(1, 0), 1, 1.0).unwrap(),
            0.0
        );
        assert!(matches!(
            f.central_p_integral(AtomId::ROOT, 1, 1.0),
            Err(FunctionError::WrongLevel { .. })
        ));
        assert!(matches!(
            f.central_p_integral(AtomId::ROOT, 0, 0.5),
            Err(FunctionError::BadExponent(_))
        ));
    }

    #[test]
    fn martingale_examples() {
        let tree = FiltrationTree::dyadic(2);
        let f = exact(&tree, &[(1, 1), (0, 1), (0, 1), (0, 1)]);
        let m = f.martingale();
        assert!(m.level(0).values().iter().all(|v| *v == q(1, 4)));
        assert_eq!(m.level(1).values(), &[q(1, 2), q(1, 2), q(0, 1), q(0, 1)]);
        assert_eq!(*m.last(), f);
        assert!(m.is_martingale());
        assert_eq!(m.martingale_defect(), 0.0);

        let c = LeafFunction::constant(tree, q(3, 1));
        assert!(c.martingale().levels().iter().all(|l| *l == c));
    }

    #[test]
    fn non_martingale_detected() {
        let tree = FiltrationTree::dyadic(1);
        let f0 = exact(&tree, &[(0, 1), (0, 1)]);
        let f1 = exact(&tree, &[(1, 1), (0, 1)]);
        let seq = MartingaleSequence::from_levels(tree, vec![f0, f1]).unwrap();
        assert!(!seq.is_martingale());
        assert_eq!(seq.martingale_defect(), 0.5);
    }

    #[test]
    fn supporting_norms() {
        let tree = FiltrationTree::dyadic(1);
        let f = LeafFunction::new(tree.clone(), vec![1.0, -1.0]).unwrap();
        assert_eq!(f.linf_norm(), 1.0);
        assert_eq!(f.lp_norm(1.0).unwrap(), 1.0);
        assert_eq!(f.expectation(), 0.0);

        let c = LeafFunction::constant(tree.clone(), -2.5);
        assert_eq!(c.linf_norm(), 2.5);
        assert_eq!(c.lp_norm(3.0).unwrap(), 2.5);
        assert_eq!(c.expectation(), -2.5);

        let deep = FiltrationTree::dyadic(3);
        let chi = LeafFunction::<f64>::indicator(deep, AtomId::new(3, 5)).unwrap();
        assert_eq!(chi.linf_norm(), 1.0);
        assert!((chi.lp_norm(2.0).unwrap() - 0.125f64.sqrt()).abs() < 1e-15);
        assert_eq!(chi.expectation(), 0.125);
    }

    #[test]
    fn rejects_bad_values() {
        let tree = FiltrationTree::dyadic(1);
        assert!(matches!(
            LeafFunction::new(tree.clone(), vec![1.0]),
            Err(FunctionError::LengthMismatch { .. })
        ));
        assert!(matches!(
            LeafFunction::new(tree, vec![1.0, f64::NAN]),
            Err(FunctionError::NonFinite { leaf: 1 })
        ));
    }

    #[test]
    fn restrict_and_lift_roundtrip() {
        let tree = FiltrationTree::dyadic(4);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = LeafFunction::random(tree.clone(), &mut rng);
        let g = f.conditional_expectation(2).unwrap();
        let cut = tree.truncate(2).unwrap();
        assert!(f.restrict(&cut).is_none());
        let small = g.restrict(&cut).unwrap();
        assert_eq!(small.values().len(), 4);
        assert_eq!(small.lift(&tree).unwrap(), g);
    }

    #[test]
    fn uniform_atoms_detected() {
        let tree = FiltrationTree::dyadic(3);
        let chi = LeafFunction::<Rational>::indicator(tree.clone(), AtomId::new(1, 1)).unwrap();
        let profile = chi.profile();
        assert!(!profile.is_uniform(AtomId::ROOT));
        assert!(profile.is_uniform(AtomId::new(1, 0)));
        assert!(profile.is_uniform(AtomId::new(1, 1)));
        assert_eq!(*profile.average(AtomId::ROOT), q(1, 2));
    }
}
