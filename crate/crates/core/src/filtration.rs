//! Finite atom-generated filtrations.
//!
//! A [`FiltrationTree`] stores the partitions `A(F_0), ..., A(F_N)` as tree
//! levels. Level 0 is the single atom `Ω`. Each atom at level `n < N` has at
//! least one child at level `n + 1`; an atom that does not split has a single
//! child of the same measure (a persistence step). Children of consecutive
//! parents are stored contiguously, so the leaves below any atom form a
//! contiguous range of the deepest level.
//!
//! Measures are exact rationals whenever every split fraction is exact, and
//! `f64` otherwise, with partition sums checked to [`FLOAT_TOLERANCE`].

use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::report::{anchors, Check, VerificationReport};
use crate::scalar::{parse_rational, rational_from_f64, ArithmeticMode, Measure, Rational};

/// Partition-sum tolerance for trees built in floating mode.
pub const FLOAT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TreeError {
    #[error("split fractions at {path} sum to {sum}, expected 1")]
    FractionSum { path: String, sum: String },
    #[error("split fraction {value} at {path} is not positive")]
    NonPositiveFraction { path: String, value: String },
    #[error("atom at {path} has an empty fraction list")]
    EmptySplit { path: String },
    #[error("atom at {path} lists {fractions} fractions but {children} children")]
    ChildCountMismatch {
        path: String,
        fractions: usize,
        children: usize,
    },
    #[error("cannot parse fraction {text:?} at {path}")]
    InvalidFraction { path: String, text: String },
    #[error("atom {0} is not in the tree")]
    AtomNotFound(AtomId),
    #[error("atom {atom} is not a leaf of a depth-{depth} tree")]
    NotALeaf { atom: AtomId, depth: usize },
    #[error("level {level} exceeds tree depth {depth}")]
    LevelOutOfRange { level: usize, depth: usize },
    #[error("chain is not a nested root-to-leaf sequence: {0}")]
    BadChain(String),
}

/// Atom identifier: level and position within the level, in construction order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AtomId {
    pub level: usize,
    pub index: usize,
}

impl AtomId {
    pub const ROOT: AtomId = AtomId { level: 0, index: 0 };

    pub fn new(level: usize, index: usize) -> Self {
        AtomId { level, index }
    }
}

impl fmt::Display for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.level, self.index)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    id: AtomId,
    measure: Measure,
    parent: Option<usize>,
    /// Child positions within level `id.level + 1`.
    children: Range<usize>,
    /// Leaf positions within the deepest level.
    leaves: Range<usize>,
}

impl Atom {
    pub fn id(&self) -> AtomId {
        self.id
    }

    pub fn level(&self) -> usize {
        self.id.level
    }

    pub fn measure(&self) -> &Measure {
        &self.measure
    }

    /// `P(B)` as `f64`.
    pub fn prob(&self) -> f64 {
        self.measure.value()
    }

    pub fn parent(&self) -> Option<AtomId> {
        self.parent.map(|i| AtomId::new(self.id.level - 1, i))
    }

    pub fn children(&self) -> impl ExactSizeIterator<Item = AtomId> + '_ {
        let level = self.id.level + 1;
        self.children.clone().map(move |i| AtomId::new(level, i))
    }

    pub fn child_range(&self) -> Range<usize> {
        self.children.clone()
    }

    pub fn leaf_range(&self) -> Range<usize> {
        self.leaves.clone()
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// Recursive split description used to build trees programmatically.
#[derive(Clone, Debug, PartialEq)]
pub enum SplitSpec {
    /// No further refinement. Padded with persistence steps up to the
    /// tree depth.
    Leaf,
    Split {
        fractions: Vec<Measure>,
        children: Vec<SplitSpec>,
    },
}

impl SplitSpec {
    /// A split into the given exact fractions with leaf children.
    pub fn fractions(fractions: Vec<Rational>) -> Self {
        let children = vec![SplitSpec::Leaf; fractions.len()];
        SplitSpec::Split {
            fractions: fractions.into_iter().map(Measure::exact).collect(),
            children,
        }
    }

    pub fn split(fractions: Vec<Rational>, children: Vec<SplitSpec>) -> Self {
        SplitSpec::Split {
            fractions: fractions.into_iter().map(Measure::exact).collect(),
            children,
        }
    }

    /// A split into floating fractions with leaf children.
    pub fn float_fractions(fractions: Vec<f64>) -> Self {
        let children = vec![SplitSpec::Leaf; fractions.len()];
        SplitSpec::Split {
            fractions: fractions.into_iter().map(Measure::floating).collect(),
            children,
        }
    }

    pub fn persist(child: SplitSpec) -> Self {
        SplitSpec::Split {
            fractions: vec![Measure::one()],
            children: vec![child],
        }
    }

    /// Balanced split repeated `depth` times.
    pub fn uniform(arity: usize, depth: usize) -> Self {
        if depth == 0 {
            return SplitSpec::Leaf;
        }
        let frac = Rational::new(1.into(), (arity as i64).into());
        SplitSpec::split(
            vec![frac; arity],
            vec![SplitSpec::uniform(arity, depth - 1); arity],
        )
    }

    fn depth(&self) -> usize {
        match self {
            SplitSpec::Leaf => 0,
            SplitSpec::Split { children, .. } => {
                1 + children.iter().map(SplitSpec::depth).max().unwrap_or(0)
            }
        }
    }

    fn is_exact(&self) -> bool {
        match self {
            SplitSpec::Leaf => true,
            SplitSpec::Split {
                fractions,
                children,
            } => {
                fractions.iter().all(Measure::is_exact) && children.iter().all(SplitSpec::is_exact)
            }
        }
    }
}

/// JSON tree description: `{"type": "dyadic", "depth": N}` or
/// `{"type": "splits", "root": {...}, "depth": N?}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum TreeSpec {
    Dyadic {
        depth: usize,
    },
    Splits {
        root: SplitNode,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        depth: Option<usize>,
    },
}

/// One node of a `splits` tree file. `"persist"` is a single child of equal
/// measure; an object lists child fractions and optional child nodes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SplitNode {
    Keyword(String),
    Split {
        fractions: Vec<FractionText>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        children: Option<Vec<Option<SplitNode>>>,
    },
}

/// A fraction written as a string (parsed exactly) or a JSON number
/// (floating).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FractionText {
    Text(String),
    Number(f64),
}

impl TreeSpec {
    pub fn build(&self) -> Result<Arc<FiltrationTree>, TreeError> {
        match self {
            TreeSpec::Dyadic { depth } => Ok(FiltrationTree::dyadic(*depth)),
            TreeSpec::Splits { root, depth } => {
                let spec = root.to_split_spec("root")?;
                FiltrationTree::from_splits(&spec, *depth)
            }
        }
    }
}

impl SplitNode {
    pub fn to_split_spec(&self, path: &str) -> Result<SplitSpec, TreeError> {
        match self {
            SplitNode::Keyword(word) if word == "persist" => {
                Ok(SplitSpec::persist(SplitSpec::Leaf))
            }
            SplitNode::Keyword(word) if word == "leaf" => Ok(SplitSpec::Leaf),
            SplitNode::Keyword(word) => Err(TreeError::InvalidFraction {
                path: path.to_string(),
                text: word.clone(),
            }),
            SplitNode::Split {
                fractions,
                children,
            } => {
                let fractions = fractions
                    .iter()
                    .enumerate()
                    .map(|(i, f)| f.to_measure(&format!("{path}.fractions[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                let children = match children {
                    None => vec![SplitSpec::Leaf; fractions.len()],
                    Some(list) => {
                        if list.len() != fractions.len() {
                            return Err(TreeError::ChildCountMismatch {
                                path: path.to_string(),
                                fractions: fractions.len(),
                                children: list.len(),
                            });
                        }
                        list.iter()
                            .enumerate()
                            .map(|(i, c)| match c {
                                None => Ok(SplitSpec::Leaf),
                                Some(node) => node.to_split_spec(&format!("{path}.children[{i}]")),
                            })
                            .collect::<Result<Vec<_>, _>>()?
                    }
                };
                Ok(SplitSpec::Split {
                    fractions,
                    children,
                })
            }
        }
    }
}

impl FractionText {
    fn to_measure(&self, path: &str) -> Result<Measure, TreeError> {
        match self {
            FractionText::Text(text) => {
                parse_rational(text)
                    .map(Measure::exact)
                    .ok_or_else(|| TreeError::InvalidFraction {
                        path: path.to_string(),
                        text: text.clone(),
                    })
            }
            FractionText::Number(x) if x.is_finite() => Ok(Measure::floating(*x)),
            FractionText::Number(x) => Err(TreeError::InvalidFraction {
                path: path.to_string(),
                text: x.to_string(),
            }),
        }
    }
}

/// Finite filtration `F_0 ⊂ F_1 ⊂ ... ⊂ F_N` generated by atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct FiltrationTree {
    levels: Vec<Vec<Atom>>,
    mode: ArithmeticMode,
}

impl FiltrationTree {
    /// Dyadic intervals `[j 2^-n, (j+1) 2^-n)`, `n = 0..=depth`.
    pub fn dyadic(depth: usize) -> Arc<Self> {
        let half = Rational::new(1.into(), 2.into());
        let mut levels: Vec<Vec<Atom>> = Vec::with_capacity(depth + 1);
        let mut measure = Rational::one();
        for level in 0..=depth {
            let width = 1usize << level;
            let leaf_span = 1usize << (depth - level);
            let m = Measure::exact(measure.clone());
            let atoms = (0..width)
                .map(|index| Atom {
                    id: AtomId::new(level, index),
                    measure: m.clone(),
                    parent: (level > 0).then_some(index / 2),
                    children: if level < depth {
                        2 * index..2 * index + 2
                    } else {
                        0..0
                    },
                    leaves: index * leaf_span..(index + 1) * leaf_span,
                })
                .collect();
            levels.push(atoms);
            measure *= half.clone();
        }
        Arc::new(FiltrationTree {
            levels,
            mode: ArithmeticMode::Exact,
        })
    }

    /// Single atom persisting through `depth` levels.
    pub fn chain(depth: usize) -> Arc<Self> {
        let mut spec = SplitSpec::Leaf;
        for _ in 0..depth {
            spec = SplitSpec::persist(spec);
        }
        Self::from_splits(&spec, None).expect("chain spec is valid")
    }

    /// Builds a tree from nested split fractions. Branches shallower than the
    /// target depth (the spec depth, or `depth` when larger) persist down to it.
    pub fn from_splits(spec: &SplitSpec, depth: Option<usize>) -> Result<Arc<Self>, TreeError> {
        let natural = spec.depth();
        let depth = depth.unwrap_or(natural).max(natural);
        let mode = if spec.is_exact() {
            ArithmeticMode::Exact
        } else {
            ArithmeticMode::Floating
        };
        validate_spec(spec, "root", mode)?;

        struct Pending<'a> {
            spec: &'a SplitSpec,
            measure: Measure,
            parent: Option<usize>,
        }
        let persist_leaf = SplitSpec::Leaf;
        let mut levels: Vec<Vec<Atom>> = Vec::with_capacity(depth + 1);
        let mut frontier = vec![Pending {
            spec,
            measure: Measure::one(),
            parent: None,
        }];
        for level in 0..=depth {
            let mut atoms = Vec::with_capacity(frontier.len());
            let mut next = Vec::new();
            for (index, pending) in frontier.into_iter().enumerate() {
                let start = next.len();
                if level < depth {
                    match pending.spec {
                        SplitSpec::Leaf => next.push(Pending {
                            spec: &persist_leaf,
                            measure: pending.measure.clone(),
                            parent: Some(index),
                        }),
                        SplitSpec::Split {
                            fractions,
                            children,
                        } => {
                            for (frac, child) in fractions.iter().zip(children) {
                                let measure = match (pending.measure.as_exact(), frac.as_exact()) {
                                    (Some(a), Some(b)) if mode == ArithmeticMode::Exact => {
                                        Measure::exact(a * b)
                                    }
                                    _ => Measure::floating(pending.measure.value() * frac.value()),
                                };
                                next.push(Pending {
                                    spec: child,
                                    measure,
                                    parent: Some(index),
                                });
                            }
                        }
                    }
                }
                atoms.push(Atom {
                    id: AtomId::new(level, index),
                    measure: pending.measure,
                    parent: pending.parent,
                    children: start..next.len(),
                    leaves: 0..0,
                });
            }
            levels.push(atoms);
            frontier = next;
        }
        // Leaf ranges, bottom-up.
        for i in 0..levels[depth].len() {
            levels[depth][i].leaves = i..i + 1;
        }
        for level in (0..depth).rev() {
            let (upper, lower) = levels.split_at_mut(level + 1);
            for atom in upper[level].iter_mut() {
                let first = &lower[0][atom.children.start];
                let last = &lower[0][atom.children.end - 1];
                atom.leaves = first.leaves.start..last.leaves.end;
            }
        }
        Ok(Arc::new(FiltrationTree { levels, mode }))
    }

    pub fn from_json(text: &str) -> Result<Arc<Self>, TreeSpecError> {
        let spec: TreeSpec = serde_json::from_str(text)?;
        Ok(spec.build()?)
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn mode(&self) -> ArithmeticMode {
        self.mode
    }

    pub fn level(&self, n: usize) -> &[Atom] {
        &self.levels[n]
    }

    pub fn levels(&self) -> impl Iterator<Item = &[Atom]> {
        self.levels.iter().map(Vec::as_slice)
    }

    pub fn leaves(&self) -> &[Atom] {
        &self.levels[self.depth()]
    }

    pub fn num_leaves(&self) -> usize {
        self.leaves().len()
    }

    pub fn num_atoms(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn root(&self) -> &Atom {
        &self.levels[0][0]
    }

    pub fn atom(&self, id: AtomId) -> Result<&Atom, TreeError> {
        self.levels
            .get(id.level)
            .and_then(|level| level.get(id.index))
            .ok_or(TreeError::AtomNotFound(id))
    }

    /// All atoms in (level, index) order.
    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.levels.iter().flatten()
    }

    pub fn children(&self, atom: &Atom) -> &[Atom] {
        if atom.level() >= self.depth() {
            return &[];
        }
        &self.levels[atom.level() + 1][atom.children.clone()]
    }

    pub fn parent(&self, atom: &Atom) -> Option<&Atom> {
        atom.parent.map(|i| &self.levels[atom.level() - 1][i])
    }

    /// Ancestor of `atom` at `level` (the atom itself when the levels match).
    pub fn ancestor_at(&self, atom: AtomId, level: usize) -> Result<AtomId, TreeError> {
        let mut current = self.atom(atom)?;
        if level > current.level() {
            return Err(TreeError::LevelOutOfRange {
                level,
                depth: current.level(),
            });
        }
        while current.level() > level {
            current = self.parent(current).expect("non-root atom has a parent");
        }
        Ok(current.id())
    }

    /// `[B_0, ..., B_n]` ending at `atom`, each the parent of the next.
    pub fn path_from_root(&self, atom: AtomId) -> Result<Vec<AtomId>, TreeError> {
        let mut current = self.atom(atom)?;
        let mut path = vec![current.id()];
        while let Some(parent) = self.parent(current) {
            path.push(parent.id());
            current = parent;
        }
        path.reverse();
        Ok(path)
    }

    /// `[B_0, ..., B_N]` for a deepest-level atom.
    pub fn chain_to_root(&self, leaf: AtomId) -> Result<Vec<AtomId>, TreeError> {
        self.atom(leaf)?;
        if leaf.level != self.depth() {
            return Err(TreeError::NotALeaf {
                atom: leaf,
                depth: self.depth(),
            });
        }
        self.path_from_root(leaf)
    }

    /// Checks that `chain` is `[B_0, ..., B_N]` with each atom the parent of
    /// the next.
    pub fn validate_chain(&self, chain: &[AtomId]) -> Result<(), TreeError> {
        if chain.len() != self.depth() + 1 {
            return Err(TreeError::BadChain(format!(
                "expected {} atoms, got {}",
                self.depth() + 1,
                chain.len()
            )));
        }
        for (n, id) in chain.iter().enumerate() {
            let atom = self.atom(*id)?;
            if atom.level() != n {
                return Err(TreeError::BadChain(format!("atom {id} at position {n}")));
            }
            if n > 0 && atom.parent() != Some(chain[n - 1]) {
                return Err(TreeError::BadChain(format!(
                    "{} is not the parent of {id}",
                    chain[n - 1]
                )));
            }
        }
        Ok(())
    }

    /// Tree restricted to levels `0..=depth`; atom ids are preserved.
    pub fn truncate(&self, depth: usize) -> Result<Arc<Self>, TreeError> {
        if depth > self.depth() {
            return Err(TreeError::LevelOutOfRange {
                level: depth,
                depth: self.depth(),
            });
        }
        let mut levels: Vec<Vec<Atom>> = self.levels[..=depth].to_vec();
        for (i, atom) in levels[depth].iter_mut().enumerate() {
            atom.children = 0..0;
            atom.leaves = i..i + 1;
        }
        for level in (0..depth).rev() {
            let (upper, lower) = levels.split_at_mut(level + 1);
            for atom in upper[level].iter_mut() {
                let first = &lower[0][atom.children.start];
                let last = &lower[0][atom.children.end - 1];
                atom.leaves = first.leaves.start..last.leaves.end;
            }
        }
        Ok(Arc::new(FiltrationTree {
            levels,
            mode: self.mode,
        }))
    }

    /// Partition sum of level `n`, exact when the tree is exact.
    pub fn level_sum(&self, n: usize) -> Measure {
        let level = &self.levels[n];
        if self.mode == ArithmeticMode::Exact {
            let sum = level
                .iter()
                .fold(Rational::zero(), |acc, a| acc + a.measure().to_rational());
            Measure::exact(sum)
        } else {
            Measure::floating(level.iter().map(Atom::prob).sum())
        }
    }

    /// Least `R` with `E_n f <= R E_{n-1} f` for nonnegative martingales:
    /// the largest parent/child measure ratio.
    pub fn regularity_constant(&self) -> f64 {
        let mut best: Option<Measure> = None;
        for atom in self.atoms() {
            if let Some(parent) = self.parent(atom) {
                let ratio = parent.measure().ratio(atom.measure());
                let larger = match &best {
                    None => true,
                    Some(b) => greater(&ratio, b),
                };
                if larger {
                    best = Some(ratio);
                }
            }
        }
        best.map_or(1.0, |m| m.value())
    }

    /// Checks every edge `B_n ⊂ B_{n-1}`: either a persistence step, or
    /// `(1 + 1/R) P(B_n) <= P(B_{n-1}) <= R P(B_n)`.
    pub fn check_chain_gaps(&self, r: f64) -> VerificationReport {
        let mut report = VerificationReport::new("chain-gaps");
        let exact = self.mode == ArithmeticMode::Exact && r.is_finite();
        let r_exact = exact.then(|| rational_from_f64(r));
        let mut edges = 0usize;
        let mut persistence = 0usize;
        let mut violations: Vec<String> = Vec::new();
        let mut worst_lower = f64::INFINITY;
        let mut worst_upper = 0.0f64;
        for atom in self.atoms() {
            let Some(parent) = self.parent(atom) else {
                continue;
            };
            edges += 1;
            let (is_persist, lower_ok, upper_ok) = match &r_exact {
                Some(r) => {
                    let child = atom.measure().to_rational();
                    let par = parent.measure().to_rational();
                    let one = Rational::one();
                    (
                        child == par,
                        (one.clone() + one / r) * child.clone() <= par,
                        par <= r * child,
                    )
                }
                None => {
                    let child = atom.prob();
                    let par = parent.prob();
                    let tol = FLOAT_TOLERANCE * par;
                    (
                        (child - par).abs() <= tol,
                        (1.0 + 1.0 / r) * child <= par + tol,
                        par <= r * child + tol,
                    )
                }
            };
            if is_persist {
                persistence += 1;
                continue;
            }
            let ratio = parent.prob() / atom.prob();
            worst_lower = worst_lower.min(ratio);
            worst_upper = worst_upper.max(ratio);
            if !(lower_ok && upper_ok) {
                violations.push(format!(
                    "{} ⊂ {}: P(parent)/P(child) = {ratio}",
                    atom.id(),
                    parent.id()
                ));
            }
        }
        let mut check = Check::new("chain gaps", anchors::CHAIN_GAPS, violations.is_empty())
            .measure("R", r)
            .measure("edges", edges as f64)
            .measure("persistence_edges", persistence as f64)
            .measure("violations", violations.len() as f64)
            .threshold(r);
        if worst_upper > 0.0 {
            check = check
                .measure("min_split_ratio", worst_lower)
                .measure("max_split_ratio", worst_upper);
        }
        if !violations.is_empty() {
            check = check.witness(violations.join("; "));
        }
        report.push(check);
        report
    }

    /// Structural report: partition sums and refinement.
    pub fn check_partitions(&self) -> VerificationReport {
        let mut report = VerificationReport::new("partitions");
        let mut worst = 0.0f64;
        let mut exact_ok = true;
        for n in 0..=self.depth() {
            let sum = self.level_sum(n);
            match sum.as_exact() {
                Some(s) => exact_ok &= s.is_one(),
                None => worst = worst.max((sum.value() - 1.0).abs()),
            }
        }
        let passed = exact_ok && worst <= FLOAT_TOLERANCE;
        report.push(
            Check::new("level sums equal one", anchors::REGULARITY, passed)
                .measure("max_drift", worst)
                .threshold(FLOAT_TOLERANCE),
        );
        report
    }
}

fn greater(a: &Measure, b: &Measure) -> bool {
    match (a.as_exact(), b.as_exact()) {
        (Some(x), Some(y)) => x > y,
        _ => a.value() > b.value(),
    }
}

fn validate_spec(spec: &SplitSpec, path: &str, mode: ArithmeticMode) -> Result<(), TreeError> {
    let SplitSpec::Split {
        fractions,
        children,
    } = spec
    else {
        return Ok(());
    };
    if fractions.is_empty() {
        return Err(TreeError::EmptySplit {
            path: path.to_string(),
        });
    }
    if fractions.len() != children.len() {
        return Err(TreeError::ChildCountMismatch {
            path: path.to_string(),
            fractions: fractions.len(),
            children: children.len(),
        });
    }
    for frac in fractions {
        let positive = match frac.as_exact() {
            Some(r) => *r > Rational::zero(),
            None => frac.value() > 0.0,
        };
        if !positive {
            return Err(TreeError::NonPositiveFraction {
                path: path.to_string(),
                value: describe(frac),
            });
        }
    }
    match mode {
        ArithmeticMode::Exact => {
            let sum = fractions
                .iter()
                .fold(Rational::zero(), |acc, f| acc + f.to_rational());
            if !sum.is_one() {
                return Err(TreeError::FractionSum {
                    path: path.to_string(),
                    sum: sum.to_string(),
                });
            }
        }
        ArithmeticMode::Floating => {
            let sum: f64 = fractions.iter().map(Measure::value).sum();
            if (sum - 1.0).abs() > FLOAT_TOLERANCE {
                return Err(TreeError::FractionSum {
                    path: path.to_string(),
                    sum: sum.to_string(),
                });
            }
        }
    }
    for (i, child) in children.iter().enumerate() {
        validate_spec(child, &format!("{path}.children[{i}]"), mode)?;
    }
    Ok(())
}

fn describe(m: &Measure) -> String {
    match m.as_exact() {
        Some(r) => r.to_string(),
        None => m.value().to_string(),
    }
}

#[derive(Debug, Error)]
pub enum TreeSpecError {
    #[error("tree spec: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Tree(#[from] TreeError),
}
