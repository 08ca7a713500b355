//! Martingale Campanato spaces on finite atom-tree filtrations.

pub mod constructions;
pub mod experiment;
pub mod filtration;
pub mod functions;
pub mod multiplier;
pub mod norms;
pub mod phi;
pub mod report;
pub mod scalar;
