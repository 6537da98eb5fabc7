//! Decentralized clustering and linking over multi-task networks.
//!
//! Agents run local stochastic-gradient learners, decide online which
//! neighbors observe the same task through smoothed proximity tests, and
//! combine only those neighbors' iterates. The optional linking extension
//! relays useful iterates across links that clustering otherwise ignores.
//!
//! Module map:
//! - [`model`]: topology, ground-truth models, per-agent data sources.
//! - [`config`]: the scenario document (TOML) and edge-list parsing.
//! - [`learning`]: adapt and fusion steps.
//! - [`clustering`]: proximity test, trust smoothing, cluster decisions.
//! - [`linking`]: relay-vector selection and the linked round.
//! - [`network`]: round-synchronous execution of one simulation run.
//! - [`analysis`]: metrics, empirical estimators, theory calculators.
//! - [`harness`]: Monte-Carlo experiments, sweeps, comparisons, outputs.
//! - [`plot`]: static SVG line charts.

pub mod analysis;
pub mod clustering;
pub mod config;
pub mod error;
pub mod harness;
pub mod learning;
pub mod linking;
pub mod model;
pub mod network;
pub mod plot;
pub mod rng;
mod vecops;

pub use vecops::Iterates;

pub use error::{Error, Result};
