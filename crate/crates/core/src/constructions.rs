//! Explicit chain functions.
//!
//! Along a root-to-leaf chain `B_0 = Ω ⊇ B_1 ⊇ ... ⊇ B_N` put
//! `u_k = φ(P(B_k)) ((P(B_{k-1})/P(B_k)) χ_{B_k} - χ_{B_{k-1}})` and
//! `f = χ_{B_0} + Σ_k u_k`. Each `u_k` has mean zero and vanishes on
//! persistence steps, and `E_n f = χ_{B_0} + Σ_{k<=n} u_k`.

use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::filtration::{AtomId, FiltrationTree, TreeError};
use crate::functions::{FunctionError, LeafFunction, MartingaleSequence};
use crate::norms::{CampanatoNorm, NormError};
use crate::phi::{PhiError, PhiSpec};
use crate::report::{anchors, Check, VerificationReport, SLACK};
use crate::scalar::{Exponent, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructionError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Phi(#[from] PhiError),
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error("leaf index {index} out of range (tree has {leaves} leaves)")]
    LeafIndex { index: usize, leaves: usize },
}

/// `[B_0, ..., B_N]` through the deepest-level atom with the given index.
pub fn chain_through_leaf(
    tree: &FiltrationTree,
    leaf_index: usize,
) -> Result<Vec<AtomId>, ConstructionError> {
    let leaves = tree.num_leaves();
    if leaf_index >= leaves {
        return Err(ConstructionError::LeafIndex {
            index: leaf_index,
            leaves,
        });
    }
    Ok(tree.chain_to_root(AtomId::new(tree.depth(), leaf_index))?)
}

pub fn leftmost_chain(tree: &FiltrationTree) -> Vec<AtomId> {
    (0..=tree.depth()).map(|n| AtomId::new(n, 0)).collect()
}

/// Chains through `count` leaves drawn uniformly by index.
pub fn sample_chains<R: Rng + ?Sized>(
    tree: &FiltrationTree,
    count: usize,
    rng: &mut R,
) -> Vec<Vec<AtomId>> {
    (0..count)
        .map(|_| {
            let leaf = rng.gen_range(0..tree.num_leaves());
            chain_through_leaf(tree, leaf).expect("leaf index in range")
        })
        .collect()
}

/// Chain data shared by the constructions: `c_k = φ(P(B_k))` and
/// `ρ_k = P(B_{k-1})/P(B_k)`, both indexed from `k = 1`.
struct ChainCoefficients<S> {
    coefficients: Vec<S>,
    ratios: Vec<S>,
}

fn coefficients<S: Scalar>(
    tree: &FiltrationTree,
    chain: &[AtomId],
    phi: &PhiSpec,
) -> Result<ChainCoefficients<S>, ConstructionError> {
    tree.validate_chain(chain)?;
    let mut coefficients = Vec::with_capacity(chain.len());
    let mut ratios = Vec::with_capacity(chain.len());
    for k in 1..chain.len() {
        let outer = tree.atom(chain[k - 1])?.measure();
        let inner = tree.atom(chain[k])?.measure();
        coefficients.push(S::from_f64(phi.eval(inner.value())?));
        ratios.push(S::from_measure(&outer.ratio(inner)));
    }
    Ok(ChainCoefficients {
        coefficients,
        ratios,
    })
}

/// For every leaf, the largest `n` with the leaf inside `B_n`.
fn ring_of_leaves(tree: &FiltrationTree, chain: &[AtomId]) -> Vec<usize> {
    let mut ring = vec![0; tree.num_leaves()];
    for (n, id) in chain.iter().enumerate().skip(1) {
        for leaf in tree.level(n)[id.index].leaf_range() {
            ring[leaf] = n;
        }
    }
    ring
}

/// Values `χ_{B_0} + Σ_k u_k` (or `Σ_k u_k` when `include_base` is false).
fn chain_sum<S: Scalar>(
    tree: &Arc<FiltrationTree>,
    chain: &[AtomId],
    coef: &ChainCoefficients<S>,
    include_base: bool,
) -> LeafFunction<S> {
    let depth = chain.len() - 1;
    // prefix[m] = Σ_{k<=m} c_k (ρ_k - 1)
    let mut prefix = Vec::with_capacity(depth + 1);
    prefix.push(if include_base { S::one() } else { S::zero() });
    for k in 1..=depth {
        let step = coef.coefficients[k - 1].clone() * (coef.ratios[k - 1].clone() - S::one());
        prefix.push(prefix[k - 1].clone() + step);
    }
    let ring_values: Vec<S> = (0..=depth)
        .map(|m| {
            if m < depth {
                prefix[m].clone() - coef.coefficients[m].clone()
            } else {
                prefix[m].clone()
            }
        })
        .collect();
    let rings = ring_of_leaves(tree, chain);
    LeafFunction::from_fn(tree.clone(), |leaf| ring_values[rings[leaf]].clone())
}

/// Measured constants of a chain function for one exponent.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ChainBounds {
    pub p: f64,
    pub seminorm: f64,
    /// `C₁`: the tilde norm of `f`.
    pub norm: f64,
    /// `min_n |f_{B_n}| / φ*(P(B_n))`.
    pub lower_ratio_min: f64,
    pub lower_ratio_max: f64,
    /// `C₂` guaranteed by comparing each `c_k (ρ_k - 1)` with
    /// `∫_{P(B_k)}^{P(B_{k-1})} φ(t)/t dt`.
    pub lower_ratio_guaranteed: f64,
    /// `φ(P(B_N)) P(B_N)^{1/p}`, the scale of the omitted tail.
    pub truncation_scale: f64,
}

#[derive(Clone, Debug)]
pub struct ChainConstruction<S = f64> {
    pub chain: Vec<AtomId>,
    pub phi: PhiSpec,
    /// `u_1, ..., u_N`.
    pub u_terms: Vec<LeafFunction<S>>,
    pub f: LeafFunction<S>,
    /// `f_n = χ_{B_0} + Σ_{k<=n} u_k` for `n = 0..=N`.
    pub sequence: MartingaleSequence<S>,
}

/// Builds `u_k`, `f` and the partial sums along `chain`.
pub fn extremal_chain_function<S: Scalar>(
    tree: &Arc<FiltrationTree>,
    chain: &[AtomId],
    phi: &PhiSpec,
) -> Result<ChainConstruction<S>, ConstructionError> {
    let coef = coefficients::<S>(tree, chain, phi)?;
    let mut u_terms = Vec::with_capacity(chain.len() - 1);
    for k in 1..chain.len() {
        let inner = tree.atom(chain[k])?.leaf_range();
        let outer = tree.atom(chain[k - 1])?.leaf_range();
        let c = &coef.coefficients[k - 1];
        let high = c.clone() * (coef.ratios[k - 1].clone() - S::one());
        let low = -c.clone();
        u_terms.push(LeafFunction::from_fn(tree.clone(), |leaf| {
            if inner.contains(&leaf) {
                high.clone()
            } else if outer.contains(&leaf) {
                low.clone()
            } else {
                S::zero()
            }
        }));
    }
    let base = LeafFunction::indicator(tree.clone(), chain[0])?;
    let mut levels = vec![base];
    for u in &u_terms {
        let next = levels.last().expect("nonempty").add(u)?;
        levels.push(next);
    }
    let f = levels.last().expect("nonempty").clone();
    let sequence = MartingaleSequence::from_levels(tree.clone(), levels)?;
    Ok(ChainConstruction {
        chain: chain.to_vec(),
        phi: phi.clone(),
        u_terms,
        f,
        sequence,
    })
}

/// Only the function `f` of the chain construction.
pub fn extremal_function<S: Scalar>(
    tree: &Arc<FiltrationTree>,
    chain: &[AtomId],
    phi: &PhiSpec,
) -> Result<LeafFunction<S>, ConstructionError> {
    let coef = coefficients::<S>(tree, chain, phi)?;
    Ok(chain_sum(tree, chain, &coef, true))
}

/// `h = Σ_{k>=1} u_k = f - χ_Ω`.
pub fn h_function<S: Scalar>(
    tree: &Arc<FiltrationTree>,
    chain: &[AtomId],
    phi: &PhiSpec,
) -> Result<LeafFunction<S>, ConstructionError> {
    let coef = coefficients::<S>(tree, chain, phi)?;
    Ok(chain_sum(tree, chain, &coef, false))
}

/// `h` for the dyadic tree and `ψ(r) = 1/log(e/r)` from the ring formula:
/// with `c_k = 1/(1 + k log 2)`, `h = Σ_{k<=n} c_k - c_{n+1}` on
/// `B_n \ B_{n+1}` and `Σ_{k<=N} c_k` on `B_N`.
pub fn dyadic_h_closed_form(
    depth: usize,
    leaf_index: usize,
) -> Result<LeafFunction<f64>, ConstructionError> {
    let tree = FiltrationTree::dyadic(depth);
    if leaf_index >= tree.num_leaves() {
        return Err(ConstructionError::LeafIndex {
            index: leaf_index,
            leaves: tree.num_leaves(),
        });
    }
    let c = |k: usize| 1.0 / (1.0 + k as f64 * std::f64::consts::LN_2);
    let mut partial = vec![0.0; depth + 1];
    for k in 1..=depth {
        partial[k] = partial[k - 1] + c(k);
    }
    Ok(LeafFunction::from_fn(tree, |leaf| {
        // Leaves `leaf` and `leaf_index` share B_n iff they agree above bit N-n.
        let shared = (leaf ^ leaf_index)
            .checked_ilog2()
            .map_or(depth, |bit| depth - 1 - bit as usize);
        if shared == depth {
            partial[depth]
        } else {
            partial[shared] - c(shared + 1)
        }
    }))
}

/// `g = sin h` with `h` built from the weight `φ/φ*`.
pub fn sin_h_multiplier(
    tree: &Arc<FiltrationTree>,
    chain: &[AtomId],
    phi: &PhiSpec,
) -> Result<LeafFunction<f64>, ConstructionError> {
    let h = h_function::<f64>(tree, chain, &phi.quotient()?)?;
    Ok(h.map(|v| v.sin()))
}

impl<S: Scalar> ChainConstruction<S> {
    pub fn tree(&self) -> &Arc<FiltrationTree> {
        self.f.tree()
    }

    /// `E f_{B_n}` along the chain.
    pub fn chain_averages(&self) -> Result<Vec<S>, ConstructionError> {
        let profile = self.f.profile();
        Ok(self
            .chain
            .iter()
            .map(|id| profile.average(*id).clone())
            .collect())
    }

    /// Measured and guaranteed constants for exponent `p`.
    pub fn bounds(&self, p: f64) -> Result<ChainBounds, ConstructionError> {
        let tree = self.tree();
        let eval = CampanatoNorm::new(tree.clone(), p, &self.phi)?;
        let seminorm = eval.seminorm(&self.f)?.value;
        let norm = seminorm + self.f.expectation().abs().to_f64();
        let mut lower_ratio_min = f64::INFINITY;
        let mut lower_ratio_max = 0.0f64;
        for (id, avg) in self.chain.iter().zip(self.chain_averages()?) {
            let star = self.phi.phi_star(tree.atom(*id)?.prob())?;
            let ratio = avg.abs().to_f64() / star;
            lower_ratio_min = lower_ratio_min.min(ratio);
            lower_ratio_max = lower_ratio_max.max(ratio);
        }
        let mut guaranteed = 1.0f64;
        for k in 1..self.chain.len() {
            let outer = tree.atom(self.chain[k - 1])?.prob();
            let inner = tree.atom(self.chain[k])?.prob();
            if self.chain[k - 1] == self.chain[k] || outer == inner {
                continue;
            }
            let step = self.phi.eval(inner)? * (outer / inner - 1.0);
            let integral = self.phi.phi_star(inner)? - self.phi.phi_star(outer)?;
            guaranteed = guaranteed.min(step / integral);
        }
        let last = tree
            .atom(*self.chain.last().expect("nonempty chain"))?
            .prob();
        let truncation_scale = self.phi.eval(last)? * Exponent::new(p).root(last);
        Ok(ChainBounds {
            p,
            seminorm,
            norm,
            lower_ratio_min,
            lower_ratio_max,
            lower_ratio_guaranteed: guaranteed,
            truncation_scale,
        })
    }

    /// Martingale identity, mean-zero terms, persistence and the lower bound
    /// on atom averages.
    pub fn verify(&self, p: f64) -> Result<VerificationReport, ConstructionError> {
        let mut report = VerificationReport::new("extremal-chain");
        let martingale = self.f.martingale();
        let defect = martingale
            .levels()
            .iter()
            .zip(self.sequence.levels())
            .map(|(a, b)| {
                a.values()
                    .iter()
                    .zip(b.values())
                    .map(|(x, y)| (x.clone() - y.clone()).abs().to_f64())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        let exact = S::MODE == crate::scalar::ArithmeticMode::Exact;
        let tol = if exact { 0.0 } else { SLACK };
        report.push(
            Check::new(
                "E_n f equals partial sum",
                anchors::EXTREMAL_MARTINGALE,
                defect <= tol,
            )
            .measure("max_defect", defect)
            .threshold(tol),
        );
        let tree = self.tree();
        let mut worst_mean = 0.0f64;
        let mut persistence_ok = true;
        for (k, u) in self.u_terms.iter().enumerate() {
            worst_mean = worst_mean.max(u.expectation().abs().to_f64());
            let (outer, inner) = (self.chain[k], self.chain[k + 1]);
            let same = tree.atom(outer)?.leaf_range() == tree.atom(inner)?.leaf_range();
            if same && u.values().iter().any(|v| !v.is_zero()) {
                persistence_ok = false;
            }
        }
        report.push(
            Check::new("u_k mean zero", anchors::EXTREMAL_CHAIN, worst_mean <= tol)
                .measure("max_abs_mean", worst_mean)
                .threshold(tol),
        );
        report.push(Check::new(
            "u_k vanish on persistence steps",
            anchors::EXTREMAL_CHAIN,
            persistence_ok,
        ));
        let bounds = self.bounds(p)?;
        report.push(
            Check::new(
                "atom averages dominate phi_star",
                anchors::EXTREMAL_CHAIN,
                bounds.lower_ratio_min >= bounds.lower_ratio_guaranteed - SLACK,
            )
            .measure("C2", bounds.lower_ratio_min)
            .measure("max_ratio", bounds.lower_ratio_max)
            .threshold(bounds.lower_ratio_guaranteed),
        );
        report.push(
            Check::new(
                "bounded tilde norm",
                anchors::EXTREMAL_CHAIN,
                bounds.norm.is_finite(),
            )
            .measure("C1", bounds.norm)
            .measure("seminorm", bounds.seminorm)
            .measure("truncation_scale", bounds.truncation_scale),
        );
        Ok(report)
    }
}

/// Checks `∫_B |F(f) - E_n F(f)| ≤ 2C ∫_B |f - E_n f|` on every atom, where
/// `composed = F ∘ f` for an `F` with Lipschitz constant `lip_constant`.
pub fn lipschitz_compose_check(
    f: &LeafFunction<f64>,
    lip_constant: f64,
    composed: &LeafFunction<f64>,
) -> VerificationReport {
    let one = Exponent::Integer(1);
    let pf = f.profile();
    let pg = composed.profile();
    let mut worst_ratio = 0.0f64;
    let mut worst_atom = AtomId::ROOT;
    let mut failures = 0usize;
    let mut checked = 0usize;
    for atom in f.tree().atoms() {
        let id = atom.id();
        let lhs = pg.central_sum(id, one).total();
        let rhs = 2.0 * lip_constant * pf.central_sum(id, one).total();
        checked += 1;
        if lhs > rhs + SLACK {
            failures += 1;
        }
        if rhs > 0.0 {
            let ratio = lhs / (rhs / 2.0);
            if ratio > worst_ratio {
                worst_ratio = ratio;
                worst_atom = id;
            }
        }
    }
    let mut report = VerificationReport::new("lipschitz");
    report.push(
        Check::new(
            "factor-2 composition bound",
            anchors::LIPSCHITZ,
            failures == 0,
        )
        .measure("worst_ratio", worst_ratio)
        .measure("atoms", checked as f64)
        .measure("failures", failures as f64)
        .threshold(2.0)
        .witness(worst_atom.to_string()),
    );
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use num_traits::ToPrimitive;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dyadic_bmo_extremal_values() {
        let depth = 6;
        let tree = FiltrationTree::dyadic(depth);
        let chain = leftmost_chain(&tree);
        let c = extremal_chain_function::<Rational>(&tree, &chain, &PhiSpec::One).unwrap();
        for leaf in 0..tree.num_leaves() {
            let ring = if leaf == 0 {
                depth
            } else {
                depth - 1 - leaf.ilog2() as usize
            };
            let want = if ring == depth { depth + 1 } else { ring };
            assert_eq!(
                c.f.values()[leaf],
                Rational::from_integer((want as i64).into())
            );
        }
        for (n, avg) in c.chain_averages().unwrap().iter().enumerate() {
            assert_eq!(*avg, Rational::from_integer((n as i64 + 1).into()));
            let ratio = ToPrimitive::to_f64(avg).unwrap()
                / PhiSpec::One.phi_star(0.5f64.powi(n as i32)).unwrap();
            assert!((1.0..=1.0 / std::f64::consts::LN_2 + 1e-12).contains(&ratio));
        }
        let report = c.verify(1.0).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(c.bounds(1.0).unwrap().lower_ratio_guaranteed, 1.0);
        let fast = extremal_function::<Rational>(&tree, &chain, &PhiSpec::One).unwrap();
        assert_eq!(fast, c.f);
    }

    #[test]
    fn chain_tree_is_trivial() {
        let tree = FiltrationTree::chain(5);
        let chain = leftmost_chain(&tree);
        let c = extremal_chain_function::<f64>(&tree, &chain, &PhiSpec::Psi).unwrap();
        assert!(c.f.values().iter().all(|&v| v == 1.0));
        assert!(c
            .u_terms
            .iter()
            .all(|u| u.values().iter().all(|&v| v == 0.0)));
        let g = sin_h_multiplier(&tree, &chain, &PhiSpec::One).unwrap();
        assert!(g.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn h_is_f_minus_one() {
        let tree = FiltrationTree::dyadic(5);
        let chain = chain_through_leaf(&tree, 13).unwrap();
        let phi = PhiSpec::power(0.3);
        let f = extremal_function::<Rational>(&tree, &chain, &phi).unwrap();
        let h = h_function::<Rational>(&tree, &chain, &phi).unwrap();
        let one = LeafFunction::constant(tree.clone(), Rational::from_integer(1.into()));
        assert_eq!(f.sub(&one).unwrap(), h);
        assert_eq!(h.expectation(), Rational::from_integer(0.into()));
    }

    #[test]
    fn dyadic_h_ring_values() {
        let h = dyadic_h_closed_form(4, 0).unwrap();
        let ln2 = std::f64::consts::LN_2;
        // Leaf 15 lies in B_0 \ B_1, leaf 4 in B_1 \ B_2.
        assert!((h.values()[15] + 1.0 / (1.0 + ln2)).abs() < 1e-15);
        assert!((h.values()[15] + 0.590616).abs() < 1e-6);
        assert!((h.values()[4] - 0.171_556_325).abs() < 1e-9);
        for depth in [4, 8] {
            for leaf in [0, 3, (1 << depth) - 1] {
                let closed = dyadic_h_closed_form(depth, leaf).unwrap();
                let tree = closed.tree().clone();
                let chain = chain_through_leaf(&tree, leaf).unwrap();
                let h = h_function::<f64>(&tree, &chain, &PhiSpec::Psi).unwrap();
                for (a, b) in closed.values().iter().zip(h.values()) {
                    assert!((a - b).abs() <= 1e-12);
                }
            }
        }
        assert!(dyadic_h_closed_form(3, 8).is_err());
    }

    #[test]
    fn sin_h_uses_quotient() {
        let tree = FiltrationTree::dyadic(6);
        let chain = chain_through_leaf(&tree, 5).unwrap();
        let g = sin_h_multiplier(&tree, &chain, &PhiSpec::One).unwrap();
        let h = dyadic_h_closed_form(6, 5).unwrap();
        for (a, b) in g.values().iter().zip(h.values()) {
            assert!((a - b.sin()).abs() < 1e-12);
        }
        assert!(g.linf_norm() <= 1.0);
    }

    #[test]
    fn lipschitz_examples() {
        let tree = FiltrationTree::dyadic(6);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = LeafFunction::random(tree, &mut rng).scale(&5.0);
        let same = lipschitz_compose_check(&f, 1.0, &f);
        assert!(same.passed());
        assert!((same.checks[0].measured["worst_ratio"] - 1.0).abs() < 1e-12);
        let sin = lipschitz_compose_check(&f, 1.0, &f.map(|v| v.sin()));
        assert!(sin.passed());
        let scaled = lipschitz_compose_check(&f.scale(&3.0), 3.0, &f.scale(&9.0));
        assert!(scaled.passed());
    }

    #[test]
    fn rejects_bad_chains() {
        let tree = FiltrationTree::dyadic(3);
        let bad = vec![
            AtomId::new(0, 0),
            AtomId::new(1, 1),
            AtomId::new(2, 0),
            AtomId::new(3, 0),
        ];
        assert!(extremal_function::<f64>(&tree, &bad, &PhiSpec::One).is_err());
        assert!(chain_through_leaf(&tree, 8).is_err());
        let chains = sample_chains(&tree, 5, &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(chains.len(), 5);
        for chain in chains {
            tree.validate_chain(&chain).unwrap();
        }
    }
}
