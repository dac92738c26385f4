//! Channel space gridization: a physics-based RSRP forward model, a
//! quantizing autoencoder that jointly estimates channel angular power
//! spectra and partitions samples into channel-consistent grids, the PIDA
//! training scheme, classical baselines, and evaluation metrics.

pub mod error;
pub mod lscm;
pub mod par;

pub use error::{Error, Result};
