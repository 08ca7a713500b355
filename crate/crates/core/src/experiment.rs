//! Config-driven experiment runner behind the command-line tool.
//!
//! Config fields are parsed one at a time from borrowed slices of the
//! file, so every error, including a bad atom or leaf reference found
//! after the tree is built, is reported at the line of its value.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::constructions::{
    chain_through_leaf, extremal_chain_function, extremal_function, h_function, leftmost_chain,
    lipschitz_compose_check, sin_h_multiplier, ConstructionError,
};
use crate::filtration::{AtomId, FiltrationTree, FractionText, TreeError, TreeSpec};
use crate::functions::{FunctionError, LeafFunction};
use crate::multiplier::{
    atom_average_growth_check, check_product_estimate, conditional_multiplier_check,
    linf_bound_check, multiplier_certificate, truncation_check, CertificateStatus, FamilyOptions,
    MultiplierError, MultiplierReport,
};
use crate::norms::{CampanatoNorm, NormError};
use crate::phi::{almost_increasing_weighted, phi_report, Grid, PhiError, PhiReport, PhiSpec};
use crate::report::{anchors, Check, Status, VerificationReport};
use crate::scalar::{parse_rational, ArithmeticMode, Rational, Scalar};

/// Random functions used by `norms` and `verify` when the config lists none.
pub const DEFAULT_RANDOM_FUNCTIONS: usize = 8;
/// Relative tolerance between the indicator closed form and the direct norm.
pub const INDICATOR_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("{path}: {message}")]
    Config { path: String, message: String },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("json output: {0}")]
    Json(#[source] serde_json::Error),
    #[error(transparent)]
    Multiplier(#[from] MultiplierError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Phi(#[from] PhiError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Function(#[from] FunctionError),
}

impl ExperimentError {
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            ExperimentError::Config { .. } | ExperimentError::Read { .. }
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Norms,
    PhiReport,
    Verify,
    Multiplier,
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Norms => "norms",
            Suite::PhiReport => "phi_report",
            Suite::Verify => "verify",
            Suite::Multiplier => "multiplier",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// A single value or a list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x.clone()],
            OneOrMany::Many(xs) => xs.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionKind {
    Indicator {
        atom: AtomId,
    },
    Extremal {
        #[serde(default)]
        leaf: usize,
    },
    H {
        #[serde(default)]
        leaf: usize,
    },
    SinH {
        #[serde(default)]
        leaf: usize,
    },
    /// `count` functions with values uniform in `[-1, 1]` (multiples of
    /// `1/8` in exact mode). Without a seed the config seed is used.
    Random {
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default = "one_usize")]
        count: usize,
    },
    /// One value per leaf; strings are parsed exactly.
    LeafValues {
        values: Vec<FractionText>,
    },
}

fn one_usize() -> usize {
    1
}

/// Named function description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Weight for chain constructions; defaults to the weight being evaluated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<PhiSpec>,
    #[serde(flatten)]
    pub kind: FunctionKind,
}

impl FunctionSpec {
    /// Checks references against `tree`; `seeded` tells whether a config or
    /// command-line seed is available.
    pub fn validate(&self, tree: &FiltrationTree, seeded: bool) -> Result<(), String> {
        if let Some(phi) = &self.phi {
            phi.validate().map_err(|e| e.to_string())?;
        }
        let leaves = tree.num_leaves();
        match &self.kind {
            FunctionKind::Indicator { atom } => {
                tree.atom(*atom).map(|_| ()).map_err(|e| e.to_string())
            }
            FunctionKind::Extremal { leaf }
            | FunctionKind::H { leaf }
            | FunctionKind::SinH { leaf } => {
                if *leaf < leaves {
                    Ok(())
                } else {
                    Err(format!(
                        "leaf {leaf} out of range (tree has {leaves} leaves)"
                    ))
                }
            }
            FunctionKind::Random { seed, count } => {
                if seed.is_none() && !seeded {
                    Err(
                        "random function needs a seed (in the function, the config or --seed)"
                            .to_string(),
                    )
                } else if *count == 0 {
                    Err("random function count must be positive".to_string())
                } else {
                    Ok(())
                }
            }
            FunctionKind::LeafValues { values } => {
                if values.len() != leaves {
                    return Err(format!(
                        "leaf_values has {} entries but the tree has {leaves} leaves",
                        values.len()
                    ));
                }
                values
                    .iter()
                    .try_for_each(|v| fraction_value(v).map(|_| ()))
            }
        }
    }
}

enum LeafValue {
    Exact(Rational),
    Float(f64),
}

fn fraction_value(v: &FractionText) -> Result<LeafValue, String> {
    match v {
        FractionText::Text(t) => parse_rational(t)
            .map(LeafValue::Exact)
            .ok_or_else(|| format!("cannot parse leaf value {t:?}")),
        FractionText::Number(x) if x.is_finite() => Ok(LeafValue::Float(*x)),
        FractionText::Number(x) => Err(format!("leaf value {x} is not finite")),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    pub report: String,
    pub format: Option<OutputFormat>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            dir: None,
            report: "report.json".to_string(),
            format: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MultiplierSpec {
    /// Defaults to `sin h` through leaf 0.
    pub g: Option<FunctionSpec>,
    pub indicators: bool,
    pub sample_chains: usize,
    pub random: usize,
    /// Also run the truncated-filtration multiplier check.
    pub conditional: bool,
}

impl Default for MultiplierSpec {
    fn default() -> Self {
        let family = FamilyOptions::default();
        MultiplierSpec {
            g: None,
            indicators: family.indicators,
            sample_chains: family.sample_chains,
            random: family.random,
            conditional: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum GridSpec {
    Octaves { octaves: u32, per_octave: u32 },
    Decades { r_min: f64, per_decade: u32 },
    Points { points: Vec<f64> },
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid, PhiError> {
        match self {
            GridSpec::Octaves {
                octaves,
                per_octave,
            } => Ok(Grid::octaves(*octaves, *per_octave)),
            GridSpec::Decades { r_min, per_decade } => Grid::decades(*r_min, *per_decade),
            GridSpec::Points { points } => Grid::new(points.clone()),
        }
    }
}

/// Experiment description. Loaded with [`parse_config`], which reports
/// errors at the line of the offending value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub tree: TreeSpec,
    #[serde(default = "default_phi")]
    pub phi: OneOrMany<PhiSpec>,
    #[serde(default = "default_p")]
    pub p: OneOrMany<f64>,
    #[serde(default)]
    pub functions: Vec<FunctionSpec>,
    #[serde(default = "default_suites")]
    pub suites: Vec<Suite>,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub arithmetic: Option<ArithmeticMode>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub multiplier: MultiplierSpec,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    /// Chain-gap constant `R` to verify; defaults to the smallest valid one.
    #[serde(default)]
    pub regularity: Option<f64>,
}

const CONFIG_FIELDS: &[&str] = &[
    "tree",
    "phi",
    "p",
    "functions",
    "suites",
    "output",
    "arithmetic",
    "seed",
    "multiplier",
    "grid",
    "regularity",
];

fn default_phi() -> OneOrMany<PhiSpec> {
    OneOrMany::One(PhiSpec::One)
}

fn default_p() -> OneOrMany<f64> {
    OneOrMany::One(1.0)
}

fn default_suites() -> Vec<Suite> {
    vec![Suite::Norms]
}

/// Command-line overrides applied while loading.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub depth: Option<usize>,
}

/// Builds the tree, with `depth` replacing the dyadic depth or padding /
/// truncating a split tree.
pub fn build_tree(spec: &TreeSpec, depth: Option<usize>) -> Result<Arc<FiltrationTree>, TreeError> {
    match (spec, depth) {
        (_, None) => spec.build(),
        (TreeSpec::Dyadic { .. }, Some(d)) => Ok(FiltrationTree::dyadic(d)),
        (TreeSpec::Splits { root, .. }, Some(d)) => {
            let tree = FiltrationTree::from_splits(&root.to_split_spec("root")?, Some(d))?;
            if tree.depth() > d {
                tree.truncate(d)
            } else {
                Ok(tree)
            }
        }
    }
}

/// A parsed config with its tree and effective seed.
#[derive(Clone, Debug)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub tree: Arc<FiltrationTree>,
    pub seed: u64,
    pub arithmetic: ArithmeticMode,
}

pub fn load_config(path: &Path, overrides: &Overrides) -> Result<LoadedConfig, ExperimentError> {
    let text = fs::read_to_string(path).map_err(|source| ExperimentError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text, &path.display().to_string(), overrides)
}

/// Source text with helpers for locating borrowed sub-slices.
struct Source<'a> {
    text: &'a str,
    origin: &'a str,
}

impl<'a> Source<'a> {
    /// 1-based line and column of a sub-slice of the text.
    fn position(&self, part: &str) -> (usize, usize) {
        let offset = (part.as_ptr() as usize).saturating_sub(self.text.as_ptr() as usize);
        let before = &self.text[..offset.min(self.text.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
        (line, column)
    }

    fn error_at(&self, part: &str, message: impl fmt::Display) -> ExperimentError {
        let (line, column) = self.position(part);
        ExperimentError::Config {
            path: self.origin.to_string(),
            message: format!("{message} at line {line} column {column}"),
        }
    }

    /// Parses one field value, translating positions to the whole file.
    fn parse<T: DeserializeOwned>(&self, key: &str, raw: &RawValue) -> Result<T, ExperimentError> {
        serde_json::from_str(raw.get()).map_err(|e| {
            let (line, column) = self.position(raw.get());
            let (l, c) = if e.line() <= 1 {
                (line, column + e.column().saturating_sub(1))
            } else {
                (line + e.line() - 1, e.column())
            };
            let full = e.to_string();
            let message = full
                .rsplit_once(" at line ")
                .map_or(full.as_str(), |(head, _)| head)
                .to_string();
            ExperimentError::Config {
                path: self.origin.to_string(),
                message: format!("{key}: {message} at line {l} column {c}"),
            }
        })
    }
}

fn tree_error_path(e: &TreeError) -> Option<&str> {
    match e {
        TreeError::FractionSum { path, .. }
        | TreeError::NonPositiveFraction { path, .. }
        | TreeError::EmptySplit { path }
        | TreeError::ChildCountMismatch { path, .. }
        | TreeError::InvalidFraction { path, .. } => Some(path),
        _ => None,
    }
}

/// Follows a split path such as `root.children[1].fractions[0]` from the
/// tree object down to the raw value it names.
fn locate_node<'a>(tree: &'a RawValue, path: &str) -> Option<&'a RawValue> {
    let mut node = tree;
    for segment in path.split('.') {
        let (key, index) = match segment.split_once('[') {
            Some((key, rest)) => (key, Some(rest.trim_end_matches(']').parse::<usize>().ok()?)),
            None => (segment, None),
        };
        let object: BTreeMap<&str, &'a RawValue> = serde_json::from_str(node.get()).ok()?;
        node = object.get(key).copied()?;
        if let Some(i) = index {
            let items: Vec<&'a RawValue> = serde_json::from_str(node.get()).ok()?;
            node = items.get(i).copied()?;
        }
    }
    Some(node)
}

/// Parses config text; `origin` names the source in error messages.
pub fn parse_config(
    text: &str,
    origin: &str,
    overrides: &Overrides,
) -> Result<LoadedConfig, ExperimentError> {
    let src = Source { text, origin };
    let top: BTreeMap<String, &RawValue> =
        serde_json::from_str(text).map_err(|e| ExperimentError::Config {
            path: origin.to_string(),
            message: e.to_string(),
        })?;
    for (key, raw) in &top {
        if !CONFIG_FIELDS.contains(&key.as_str()) {
            return Err(src.error_at(
                raw.get(),
                format!(
                    "unknown field `{key}`, expected one of {}",
                    CONFIG_FIELDS.join(", ")
                ),
            ));
        }
    }
    let field = |key: &str| top.get(key).copied();

    let tree_raw = field("tree").ok_or_else(|| ExperimentError::Config {
        path: origin.to_string(),
        message: "missing field `tree`".to_string(),
    })?;
    let mut tree_spec: TreeSpec = src.parse("tree", tree_raw)?;
    let tree = build_tree(&tree_spec, overrides.depth).map_err(|e| {
        let node = tree_error_path(&e)
            .and_then(|path| locate_node(tree_raw, path))
            .unwrap_or(tree_raw);
        src.error_at(node.get(), format!("tree: {e}"))
    })?;
    if let Some(d) = overrides.depth {
        tree_spec = match tree_spec {
            TreeSpec::Dyadic { .. } => TreeSpec::Dyadic { depth: d },
            TreeSpec::Splits { root, .. } => TreeSpec::Splits {
                root,
                depth: Some(d),
            },
        };
    }

    let file_seed: Option<u64> = field("seed").map(|r| src.parse("seed", r)).transpose()?;
    let seed = overrides.seed.or(file_seed);

    let phi: OneOrMany<PhiSpec> = match field("phi") {
        Some(raw) => {
            let phi: OneOrMany<PhiSpec> = src.parse("phi", raw)?;
            let list = phi.to_vec();
            if list.is_empty() {
                return Err(src.error_at(raw.get(), "phi: list is empty"));
            }
            for p in &list {
                p.validate()
                    .map_err(|e| src.error_at(raw.get(), format!("phi: {e}")))?;
            }
            phi
        }
        None => default_phi(),
    };
    let p: OneOrMany<f64> = match field("p") {
        Some(raw) => {
            let p: OneOrMany<f64> = src.parse("p", raw)?;
            let list = p.to_vec();
            if list.is_empty() {
                return Err(src.error_at(raw.get(), "p: list is empty"));
            }
            if let Some(bad) = list.iter().find(|p| !(p.is_finite() && **p >= 1.0)) {
                return Err(src.error_at(raw.get(), format!("p: exponent {bad} must be >= 1")));
            }
            p
        }
        None => default_p(),
    };

    let mut functions = Vec::new();
    if let Some(raw) = field("functions") {
        let items: Vec<&RawValue> = serde_json::from_str(raw.get())
            .map_err(|e| src.error_at(raw.get(), format!("functions: {e}")))?;
        for (i, item) in items.iter().enumerate() {
            let key = format!("functions[{i}]");
            let spec: FunctionSpec = src.parse(&key, item)?;
            spec.validate(&tree, seed.is_some())
                .map_err(|e| src.error_at(item.get(), format!("{key}: {e}")))?;
            functions.push(spec);
        }
    }

    let multiplier: MultiplierSpec = match field("multiplier") {
        Some(raw) => {
            let m: MultiplierSpec = src.parse("multiplier", raw)?;
            if let Some(g) = &m.g {
                g.validate(&tree, seed.is_some())
                    .map_err(|e| src.error_at(raw.get(), format!("multiplier.g: {e}")))?;
            }
            m
        }
        None => MultiplierSpec::default(),
    };
    let grid: Option<GridSpec> = match field("grid") {
        Some(raw) => {
            let g: GridSpec = src.parse("grid", raw)?;
            g.build()
                .map_err(|e| src.error_at(raw.get(), format!("grid: {e}")))?;
            Some(g)
        }
        None => None,
    };

    let regularity: Option<f64> = match field("regularity") {
        Some(raw) => {
            let r: f64 = src.parse("regularity", raw)?;
            if !(r.is_finite() && r > 1.0) {
                return Err(src.error_at(raw.get(), format!("regularity: R = {r} must be > 1")));
            }
            Some(r)
        }
        None => None,
    };

    let config = ExperimentConfig {
        tree: tree_spec,
        phi,
        p,
        functions,
        suites: field("suites")
            .map(|r| src.parse("suites", r))
            .transpose()?
            .unwrap_or_else(default_suites),
        output: field("output")
            .map(|r| src.parse("output", r))
            .transpose()?
            .unwrap_or_default(),
        arithmetic: field("arithmetic")
            .map(|r| src.parse("arithmetic", r))
            .transpose()?,
        seed,
        multiplier,
        grid,
        regularity,
    };
    let arithmetic = config.arithmetic.unwrap_or(tree.mode());
    Ok(LoadedConfig {
        config,
        tree,
        seed: seed.unwrap_or(0),
        arithmetic,
    })
}

/// A function together with its report label.
#[derive(Clone, Debug)]
pub struct Named<S> {
    pub name: String,
    pub f: LeafFunction<S>,
}

/// Builds every function of `spec`; chain constructions use `spec.phi` or
/// else `phi`.
pub fn build_functions<S: Scalar>(
    spec: &FunctionSpec,
    tree: &Arc<FiltrationTree>,
    phi: &PhiSpec,
    seed: u64,
) -> Result<Vec<Named<S>>, ExperimentError> {
    let phi = spec.phi.as_ref().unwrap_or(phi);
    let named = |default: String, f: LeafFunction<S>| Named {
        name: spec.name.clone().unwrap_or(default),
        f,
    };
    let out = match &spec.kind {
        FunctionKind::Indicator { atom } => {
            vec![named(
                format!("chi{atom}"),
                LeafFunction::indicator(tree.clone(), *atom)?,
            )]
        }
        FunctionKind::Extremal { leaf } => {
            let chain = chain_through_leaf(tree, *leaf)?;
            vec![named(
                format!("extremal[{leaf}]"),
                extremal_function(tree, &chain, phi)?,
            )]
        }
        FunctionKind::H { leaf } => {
            let chain = chain_through_leaf(tree, *leaf)?;
            vec![named(format!("h[{leaf}]"), h_function(tree, &chain, phi)?)]
        }
        FunctionKind::SinH { leaf } => {
            let chain = chain_through_leaf(tree, *leaf)?;
            let g = sin_h_multiplier(tree, &chain, phi)?;
            vec![named(format!("sin_h[{leaf}]"), g.map(|v| S::from_f64(*v)))]
        }
        FunctionKind::Random { seed: own, count } => {
            let s = own.unwrap_or(seed);
            random_functions::<S>(tree, s, *count)
                .into_iter()
                .enumerate()
                .map(|(i, f)| Named {
                    name: match &spec.name {
                        Some(n) if *count == 1 => n.clone(),
                        Some(n) => format!("{n}#{i}"),
                        None => format!("random[{s}]#{i}"),
                    },
                    f,
                })
                .collect()
        }
        FunctionKind::LeafValues { values } => {
            let values = values
                .iter()
                .map(|v| {
                    fraction_value(v).map(|v| match v {
                        LeafValue::Exact(r) => S::from_rational(&r),
                        LeafValue::Float(x) => S::from_f64(x),
                    })
                })
                .collect::<Result<Vec<_>, _>>()
                .map_err(|message| ExperimentError::Config {
                    path: "functions".to_string(),
                    message,
                })?;
            vec![named(
                "leaf_values".to_string(),
                LeafFunction::new(tree.clone(), values)?,
            )]
        }
    };
    Ok(out)
}

/// Seeded random functions: uniform in `[-1, 1]` in floating mode,
/// multiples of `1/8` in `[-1, 1]` in exact mode.
pub fn random_functions<S: Scalar>(
    tree: &Arc<FiltrationTree>,
    seed: u64,
    count: usize,
) -> Vec<LeafFunction<S>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exact = S::MODE == ArithmeticMode::Exact;
    (0..count)
        .map(|_| {
            LeafFunction::from_fn(tree.clone(), |_| {
                let x = if exact {
                    rng.gen_range(-8i32..=8) as f64 / 8.0
                } else {
                    rng.gen_range(-1.0..=1.0)
                };
                S::from_f64(x)
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeSummary {
    pub depth: usize,
    pub atoms: usize,
    pub leaves: usize,
    pub mode: ArithmeticMode,
    /// `R` of the chain-gap condition.
    pub regularity_constant: f64,
}

impl TreeSummary {
    pub fn of(tree: &FiltrationTree) -> Self {
        TreeSummary {
            depth: tree.depth(),
            atoms: tree.num_atoms(),
            leaves: tree.num_leaves(),
            mode: tree.mode(),
            regularity_constant: tree.regularity_constant(),
        }
    }
}

/// One row of the norm table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormRow {
    pub function: String,
    pub phi: String,
    pub p: f64,
    pub seminorm: f64,
    pub tilde_norm: f64,
    pub expectation: f64,
    pub witness_level: usize,
    pub witness: String,
}

/// One row of the weight table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiRow {
    pub phi: String,
    pub r: f64,
    pub phi_r: f64,
    pub phi_star: f64,
    pub quotient: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiSection {
    pub report: PhiReport,
    pub checks: VerificationReport,
    pub table: Vec<PhiRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifySection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    pub reports: Vec<VerificationReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplierSection {
    pub phi: String,
    pub p: f64,
    pub certificate: MultiplierReport,
    pub linf: VerificationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conditional: Option<VerificationReport>,
}

/// Everything in a report except the timestamp and the hash.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportBody {
    pub tool: String,
    pub suites: Vec<Suite>,
    pub arithmetic: ArithmeticMode,
    pub seed: u64,
    pub tree: TreeSummary,
    pub phi: Vec<PhiSpec>,
    pub p: Vec<f64>,
    pub functions: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub norms: Vec<NormRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub phi_reports: Vec<PhiSection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub verification: Vec<VerifySection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub multipliers: Vec<MultiplierSection>,
    pub status: Status,
}

impl ReportBody {
    /// Every verification report in registry order, labelled by section.
    pub fn all_checks(&self) -> Vec<(String, &VerificationReport)> {
        let mut out = Vec::new();
        for s in &self.phi_reports {
            out.push((format!("phi={}", s.report.phi), &s.checks));
        }
        for s in &self.verification {
            let label = match (&s.phi, s.p) {
                (Some(phi), Some(p)) => format!("phi={phi} p={p}"),
                _ => "tree".to_string(),
            };
            for r in &s.reports {
                out.push((label.clone(), r));
            }
        }
        for s in &self.multipliers {
            let label = format!("phi={} p={}", s.phi, s.p);
            out.push((label.clone(), &s.certificate.checks));
            out.push((label.clone(), &s.linf));
            if let Some(c) = &s.conditional {
                out.push((label.clone(), c));
            }
        }
        out
    }

    fn compute_status(&self) -> Status {
        let reports_ok = self.all_checks().iter().all(|(_, r)| r.passed());
        let certs_ok = self
            .multipliers
            .iter()
            .all(|m| m.certificate.status != CertificateStatus::Failed);
        if reports_ok && certs_ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    /// Hex SHA-256 of the canonical JSON of the body.
    pub fn content_hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("report body serializes");
        Sha256::digest(&bytes)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    /// ISO-8601 UTC; excluded from the hash.
    pub generated_at: String,
    /// SHA-256 of everything else.
    pub content_hash: String,
    #[serde(flatten)]
    pub body: ReportBody,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.body.status == Status::Pass
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}

/// Runs `suites` (or the config's own list) in registry order.
pub fn run(loaded: &LoadedConfig, suites: Option<&[Suite]>) -> Result<Report, ExperimentError> {
    match loaded.arithmetic {
        ArithmeticMode::Exact => run_with::<Rational>(loaded, suites),
        ArithmeticMode::Floating => run_with::<f64>(loaded, suites),
    }
}

fn run_with<S: Scalar>(
    loaded: &LoadedConfig,
    suites: Option<&[Suite]>,
) -> Result<Report, ExperimentError> {
    let cfg = &loaded.config;
    let tree = &loaded.tree;
    let phis = cfg.phi.to_vec();
    let ps = cfg.p.to_vec();
    let suites: Vec<Suite> = suites.map_or_else(|| cfg.suites.clone(), <[Suite]>::to_vec);
    let grid = match &cfg.grid {
        Some(g) => g.build()?,
        None => Grid::default(),
    };

    let mut functions: Vec<Named<S>> = Vec::new();
    for spec in &cfg.functions {
        functions.extend(build_functions::<S>(spec, tree, &phis[0], loaded.seed)?);
    }
    if functions.is_empty()
        && suites
            .iter()
            .any(|s| matches!(s, Suite::Norms | Suite::Verify))
    {
        functions = random_functions::<S>(tree, loaded.seed, DEFAULT_RANDOM_FUNCTIONS)
            .into_iter()
            .enumerate()
            .map(|(i, f)| Named {
                name: format!("random[{}]#{i}", loaded.seed),
                f,
            })
            .collect();
    }

    let mut body = ReportBody {
        tool: format!("campanato-lab {}", env!("CARGO_PKG_VERSION")),
        suites: suites.clone(),
        arithmetic: loaded.arithmetic,
        seed: loaded.seed,
        tree: TreeSummary::of(tree),
        phi: phis.clone(),
        p: ps.clone(),
        functions: functions.iter().map(|f| f.name.clone()).collect(),
        norms: Vec::new(),
        phi_reports: Vec::new(),
        verification: Vec::new(),
        multipliers: Vec::new(),
        status: Status::Pass,
    };

    for suite in &suites {
        log::info!("running suite {suite}");
        match suite {
            Suite::Norms => body.norms = norms_suite(tree, &functions, &phis, &ps)?,
            Suite::PhiReport => {
                body.phi_reports = phis
                    .iter()
                    .map(|phi| phi_suite(phi, &ps, &grid))
                    .collect::<Result<_, _>>()?
            }
            Suite::Verify => body.verification = verify_suite(loaded, &functions, &phis, &ps)?,
            Suite::Multiplier => body.multipliers = multiplier_suite(loaded, &phis, &ps)?,
        }
    }
    body.status = body.compute_status();
    Ok(Report {
        generated_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        content_hash: body.content_hash(),
        body,
    })
}

fn norms_suite<S: Scalar>(
    tree: &Arc<FiltrationTree>,
    functions: &[Named<S>],
    phis: &[PhiSpec],
    ps: &[f64],
) -> Result<Vec<NormRow>, ExperimentError> {
    let mut rows = Vec::new();
    for phi in phis {
        for &p in ps {
            let eval = CampanatoNorm::new(tree.clone(), p, phi)?;
            let part = functions
                .par_iter()
                .map(|named| {
                    let semi = eval.seminorm(&named.f)?;
                    let expectation = named.f.expectation().to_f64();
                    Ok(NormRow {
                        function: named.name.clone(),
                        phi: phi.to_string(),
                        p,
                        seminorm: semi.value,
                        tilde_norm: semi.value + expectation.abs(),
                        expectation,
                        witness_level: semi.witness.level,
                        witness: semi.witness.to_string(),
                    })
                })
                .collect::<Result<Vec<_>, NormError>>()?;
            rows.extend(part);
        }
    }
    Ok(rows)
}

fn phi_suite(phi: &PhiSpec, ps: &[f64], grid: &Grid) -> Result<PhiSection, ExperimentError> {
    let report = phi_report(phi, ps, grid)?;
    let mut table = Vec::with_capacity(grid.len());
    let mut worst = 0.0f64;
    let mut witness = String::new();
    let mut compared = 0usize;
    for &r in grid.points().iter().rev() {
        let v = phi.eval(r)?;
        let star = phi.phi_star(r)?;
        if let Some(closed) = phi.phi_star_closed_form(r) {
            let quad = phi.phi_star_quadrature(r)?;
            let err = (quad - closed).abs() / closed.abs().max(1.0);
            compared += 1;
            if err > worst {
                worst = err;
                witness = format!("r={r}");
            }
        }
        table.push(PhiRow {
            phi: phi.to_string(),
            r,
            phi_r: v,
            phi_star: star,
            quotient: v / star,
        });
    }
    let mut checks = VerificationReport::new("phi");
    if compared > 0 {
        checks.push(
            Check::new(
                "phi_star quadrature matches closed form",
                anchors::PHI_CONDITIONS,
                worst <= 1e-8,
            )
            .measure("max_rel_error", worst)
            .measure("points", compared as f64)
            .threshold(1e-8)
            .witness(witness),
        );
    }
    Ok(PhiSection {
        report,
        checks,
        table,
    })
}

/// Folds per-instance reports into one report with one check per name:
/// passed iff every instance passed, each measured key maximized, witness
/// naming the first failing instance.
fn aggregate(suite: &str, instances: Vec<(String, VerificationReport)>) -> VerificationReport {
    let mut merged: Vec<(Check, usize, usize)> = Vec::new();
    for (label, report) in instances {
        for check in report.checks {
            let slot = match merged.iter().position(|(c, _, _)| c.name == check.name) {
                Some(i) => i,
                None => {
                    let mut first = check.clone();
                    first.passed = true;
                    first.witness = None;
                    merged.push((first, 0, 0));
                    merged.len() - 1
                }
            };
            let (acc, count, failures) = &mut merged[slot];
            *count += 1;
            for (k, v) in &check.measured {
                let e = acc.measured.entry(k.clone()).or_insert(*v);
                if v > e {
                    *e = *v;
                }
            }
            if !check.passed {
                *failures += 1;
                if acc.passed {
                    acc.passed = false;
                    let detail = check.witness.as_deref().unwrap_or("");
                    acc.witness = Some(format!("{label} {detail}").trim().to_string());
                }
            }
        }
    }
    let mut out = VerificationReport::new(suite);
    for (mut check, count, failures) in merged {
        check.measured.insert("instances".to_string(), count as f64);
        check
            .measured
            .insert("failures".to_string(), failures as f64);
        out.push(check);
    }
    out
}

fn verify_suite<S: Scalar>(
    loaded: &LoadedConfig,
    functions: &[Named<S>],
    phis: &[PhiSpec],
    ps: &[f64],
) -> Result<Vec<VerifySection>, ExperimentError> {
    let tree = &loaded.tree;
    let floats: Vec<LeafFunction<f64>> = functions.iter().map(|n| n.f.to_f64()).collect();

    let mut tree_reports = Vec::new();
    let r = loaded
        .config
        .regularity
        .unwrap_or_else(|| tree.regularity_constant());
    let mut gaps = tree.check_chain_gaps(r);
    gaps.extend(tree.check_partitions());
    tree_reports.push(gaps);
    let lipschitz = functions
        .par_iter()
        .zip(&floats)
        .map(|(n, f)| {
            (
                n.name.clone(),
                lipschitz_compose_check(f, 1.0, &f.map(|v| v.sin())),
            )
        })
        .collect();
    tree_reports.push(aggregate("lipschitz-sin", lipschitz));
    let mut sections = vec![VerifySection {
        phi: None,
        p: None,
        reports: tree_reports,
    }];

    for phi in phis {
        for &p in ps {
            log::info!("verify: phi={phi} p={p}");
            let mut reports = vec![indicator_report::<S>(tree, p, phi)?];
            reports.push(atom_average_growth_check(&floats, p, phi)?.report);

            let chain = leftmost_chain(tree);
            reports.push(extremal_chain_function::<S>(tree, &chain, phi)?.verify(p)?);

            let pairs = (0..functions.len())
                .into_par_iter()
                .map(|i| {
                    let f = &functions[i];
                    let g = &functions[(i + 1) % functions.len()];
                    let r = check_product_estimate(&f.f, &g.f, p, phi)?;
                    Ok((format!("{} x {}", f.name, g.name), r))
                })
                .collect::<Result<Vec<_>, MultiplierError>>()?;
            reports.push(aggregate("product-estimate", pairs));

            let truncations = functions
                .par_iter()
                .map(|n| Ok((n.name.clone(), truncation_check(&n.f, p, phi)?)))
                .collect::<Result<Vec<_>, MultiplierError>>()?;
            reports.push(aggregate("truncation", truncations));

            let chain0 = chain_through_leaf(tree, 0)?;
            let g = sin_h_multiplier(tree, &chain0, phi)?;
            let opts = FamilyOptions {
                indicators: true,
                sample_chains: 4,
                random: 4,
                seed: loaded.seed,
            };
            reports.push(conditional_multiplier_check(&g, p, phi, &opts)?.report);

            sections.push(VerifySection {
                phi: Some(phi.to_string()),
                p: Some(p),
                reports,
            });
        }
    }
    Ok(sections)
}

/// Closed form against the direct seminorm of `χ_B`, and
/// `‖χ_B‖_{L̃} φ(P(B)) <= (2A)^{1/p} + A^{1/p} φ(1)` with `A` the
/// almost-increasing constant of `r φ(r)^p` over the atom measures.
fn indicator_report<S: Scalar>(
    tree: &Arc<FiltrationTree>,
    p: f64,
    phi: &PhiSpec,
) -> Result<VerificationReport, ExperimentError> {
    let eval = CampanatoNorm::new(tree.clone(), p, phi)?;
    let measures = Grid::new(tree.atoms().map(|a| a.prob()).collect())?;
    let a = almost_increasing_weighted(phi, p, &measures)?;
    let bound = (2.0 * a).powf(1.0 / p) + a.powf(1.0 / p) * phi.at_one();
    let ids: Vec<AtomId> = tree.atoms().skip(1).map(|a| a.id()).collect();
    let rows = ids
        .par_iter()
        .map(|&id| {
            let chi = LeafFunction::<S>::indicator(tree.clone(), id)?;
            let direct = eval.seminorm(&chi)?.value;
            let closed = eval.chi_closed_form(id)?.value;
            let rel = (direct - closed).abs() / direct.abs().max(f64::MIN_POSITIVE);
            let rel = if direct == closed { 0.0 } else { rel };
            let scaled = (direct + chi.expectation().to_f64().abs()) * eval.phi_at(id);
            Ok((id, rel, scaled))
        })
        .collect::<Result<Vec<_>, NormError>>()?;
    let mut worst_rel = (0.0f64, AtomId::ROOT);
    let mut worst_scaled = (0.0f64, AtomId::ROOT);
    for (id, rel, scaled) in rows {
        if rel > worst_rel.0 {
            worst_rel = (rel, id);
        }
        if scaled > worst_scaled.0 {
            worst_scaled = (scaled, id);
        }
    }
    let mut report = VerificationReport::new("indicator");
    report.push(
        Check::new(
            "closed form equals direct seminorm",
            anchors::INDICATOR_CLOSED_FORM,
            worst_rel.0 <= INDICATOR_TOLERANCE,
        )
        .measure("max_rel_diff", worst_rel.0)
        .measure("atoms", ids.len() as f64)
        .threshold(INDICATOR_TOLERANCE)
        .witness(worst_rel.1.to_string()),
    );
    report.push(
        Check::new(
            "tilde norm times phi bounded",
            anchors::INDICATOR_NORM,
            worst_scaled.0 <= bound * (1.0 + 1e-12),
        )
        .measure("C", worst_scaled.0)
        .measure("A", a)
        .threshold(bound)
        .witness(worst_scaled.1.to_string()),
    );
    Ok(report)
}

fn multiplier_suite(
    loaded: &LoadedConfig,
    phis: &[PhiSpec],
    ps: &[f64],
) -> Result<Vec<MultiplierSection>, ExperimentError> {
    let tree = &loaded.tree;
    let spec = &loaded.config.multiplier;
    let opts = FamilyOptions {
        indicators: spec.indicators,
        sample_chains: spec.sample_chains,
        random: spec.random,
        seed: loaded.seed,
    };
    let g_spec = spec.g.clone().unwrap_or(FunctionSpec {
        name: None,
        phi: None,
        kind: FunctionKind::SinH { leaf: 0 },
    });
    let mut sections = Vec::new();
    for phi in phis {
        let built = build_functions::<f64>(&g_spec, tree, phi, loaded.seed)?;
        let g = built
            .into_iter()
            .next()
            .expect("a function spec yields at least one function");
        for &p in ps {
            log::info!("multiplier: {} phi={phi} p={p}", g.name);
            let certificate = multiplier_certificate(&g.f, &g.name, p, phi, &opts)?;
            let linf = linf_bound_check(&g.f, p, phi)?;
            let conditional = if spec.conditional {
                Some(conditional_multiplier_check(&g.f, p, phi, &opts)?.report)
            } else {
                None
            };
            sections.push(MultiplierSection {
                phi: phi.to_string(),
                p,
                certificate,
                linf,
                conditional,
            });
        }
    }
    Ok(sections)
}

fn create_file(path: &Path) -> Result<fs::File, ExperimentError> {
    fs::File::create(path).map_err(|source| ExperimentError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes the JSON report and CSV tables into `dir`. `format` restricts
/// output to one kind; `None` writes both.
pub fn write_outputs(
    report: &Report,
    dir: &Path,
    report_name: &str,
    format: Option<OutputFormat>,
) -> Result<Vec<PathBuf>, ExperimentError> {
    fs::create_dir_all(dir).map_err(|source| ExperimentError::Write {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    if format != Some(OutputFormat::Csv) {
        let path = dir.join(report_name);
        let mut text = serde_json::to_string_pretty(report).map_err(ExperimentError::Json)?;
        text.push('\n');
        fs::write(&path, text).map_err(|source| ExperimentError::Write {
            path: path.clone(),
            source,
        })?;
        written.push(path);
    }
    if format != Some(OutputFormat::Json) {
        let body = &report.body;
        if !body.norms.is_empty() {
            let path = dir.join("norms.csv");
            let mut w = csv::Writer::from_writer(create_file(&path)?);
            for row in &body.norms {
                w.serialize(row)?;
            }
            w.flush().map_err(|source| ExperimentError::Write {
                path: path.clone(),
                source,
            })?;
            written.push(path);
        }
        if !body.phi_reports.is_empty() {
            let path = dir.join("phi.csv");
            let mut w = csv::Writer::from_writer(create_file(&path)?);
            for row in body.phi_reports.iter().flat_map(|s| &s.table) {
                w.serialize(row)?;
            }
            w.flush().map_err(|source| ExperimentError::Write {
                path: path.clone(),
                source,
            })?;
            written.push(path);
        }
        let checks = body.all_checks();
        if !checks.is_empty() {
            let path = dir.join("checks.csv");
            let mut w = csv::Writer::from_writer(create_file(&path)?);
            w.write_record([
                "section",
                "suite",
                "check",
                "anchor",
                "passed",
                "threshold",
                "measured",
                "witness",
            ])?;
            for (section, report) in checks {
                for c in &report.checks {
                    let measured = c
                        .measured
                        .iter()
                        .map(|(k, v)| format!("{k}={v}"))
                        .collect::<Vec<_>>()
                        .join(";");
                    w.write_record([
                        section.as_str(),
                        report.suite.as_str(),
                        c.name.as_str(),
                        c.anchor.as_str(),
                        if c.passed { "pass" } else { "fail" },
                        &c.threshold.map(|t| t.to_string()).unwrap_or_default(),
                        &measured,
                        c.witness.as_deref().unwrap_or(""),
                    ])?;
                }
            }
            w.flush().map_err(|source| ExperimentError::Write {
                path: path.clone(),
                source,
            })?;
            written.push(path);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<LoadedConfig, ExperimentError> {
        parse_config(text, "test.json", &Overrides::default())
    }

    #[test]
    fn defaults_fill_in() {
        let loaded = parse(r#"{"tree": {"type": "dyadic", "depth": 3}}"#).unwrap();
        assert_eq!(loaded.config.phi.to_vec(), vec![PhiSpec::One]);
        assert_eq!(loaded.config.p.to_vec(), vec![1.0]);
        assert_eq!(loaded.config.suites, vec![Suite::Norms]);
        assert_eq!(loaded.tree.depth(), 3);
        assert_eq!(loaded.arithmetic, ArithmeticMode::Exact);
    }

    #[test]
    fn bad_fraction_sum_reports_line() {
        let text = "{\n  \"tree\": {\n    \"type\": \"splits\",\n    \"root\": {\"fractions\": [\"1/2\", \"1/3\"]}\n  }\n}";
        let err = parse(text).unwrap_err();
        assert!(err.is_config_error());
        let msg = err.to_string();
        assert!(msg.contains("sum to 5/6"), "{msg}");
        assert!(msg.contains("line 4"), "{msg}");
    }

    #[test]
    fn missing_atom_reports_line() {
        let text = "{\"tree\": {\"type\": \"dyadic\", \"depth\": 2},\n\"functions\": [\n {\"kind\": \"indicator\", \"atom\": {\"level\": 3, \"index\": 0}}\n]}";
        let msg = parse(text).unwrap_err().to_string();
        assert!(msg.contains("(3,0)") && msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn random_without_seed_rejected() {
        let text = r#"{"tree": {"type": "dyadic", "depth": 2}, "functions": [{"kind": "random", "count": 2}]}"#;
        assert!(parse(text).unwrap_err().to_string().contains("seed"));
        let seeded = r#"{"seed": 3, "tree": {"type": "dyadic", "depth": 2}, "functions": [{"kind": "random", "count": 2}]}"#;
        assert!(parse(seeded).is_ok());
        let overridden = Overrides {
            seed: Some(1),
            depth: None,
        };
        assert!(parse_config(text, "t", &overridden).is_ok());
    }

    #[test]
    fn unknown_field_rejected() {
        let text = r#"{"tree": {"type": "dyadic", "depth": 2}, "sutes": ["norms"]}"#;
        assert!(parse(text).unwrap_err().to_string().contains("sutes"));
    }

    #[test]
    fn depth_override_pads_and_truncates() {
        let text = r#"{"tree": {"type": "splits", "root": {"fractions": ["1/3", "2/3"], "children": [{"fractions": ["1/2", "1/2"]}, null]}}}"#;
        let deeper = Overrides {
            seed: None,
            depth: Some(4),
        };
        assert_eq!(parse_config(text, "t", &deeper).unwrap().tree.depth(), 4);
        let shallower = Overrides {
            seed: None,
            depth: Some(1),
        };
        let t = parse_config(text, "t", &shallower).unwrap().tree;
        assert_eq!((t.depth(), t.num_leaves()), (1, 2));
    }

    #[test]
    fn leaf_values_length_checked() {
        let text = r#"{"tree": {"type": "dyadic", "depth": 1}, "functions": [{"kind": "leaf_values", "values": ["1/2"]}]}"#;
        assert!(parse(text).unwrap_err().to_string().contains("2 leaves"));
    }

    #[test]
    fn exact_leaf_values_stay_exact() {
        let text = r#"{"tree": {"type": "dyadic", "depth": 1}, "functions": [{"kind": "leaf_values", "name": "v", "values": ["1/3", 2]}]}"#;
        let loaded = parse(text).unwrap();
        let fs = build_functions::<Rational>(
            &loaded.config.functions[0],
            &loaded.tree,
            &PhiSpec::One,
            0,
        )
        .unwrap();
        assert_eq!(fs[0].name, "v");
        assert_eq!(fs[0].f.expectation(), parse_rational("7/6").unwrap());
    }

    #[test]
    fn aggregate_keeps_first_failure() {
        let mut a = VerificationReport::new("x");
        a.push(Check::new("c", anchors::TRUNCATION, true).measure("gap", 1.0));
        let mut b = VerificationReport::new("x");
        b.push(
            Check::new("c", anchors::TRUNCATION, false)
                .measure("gap", 3.0)
                .witness("w"),
        );
        let merged = aggregate("x", vec![("a".into(), a), ("b".into(), b)]);
        let c = merged.check("c").unwrap();
        assert!(!c.passed);
        assert_eq!(c.measured["gap"], 3.0);
        assert_eq!(c.measured["failures"], 1.0);
        assert_eq!(c.witness.as_deref(), Some("b w"));
    }

    #[test]
    fn hash_ignores_timestamp() {
        let loaded =
            parse(r#"{"seed": 5, "tree": {"type": "dyadic", "depth": 3}, "suites": ["norms"]}"#)
                .unwrap();
        let a = run(&loaded, None).unwrap();
        let mut b = run(&loaded, None).unwrap();
        b.generated_at = "1970-01-01T00:00:00Z".to_string();
        assert_eq!(a.content_hash, b.content_hash);
        assert_eq!(a.body, b.body);
    }
}
