//! Graph embeddings from closed-form random-walk co-occurrence matrices.
//!
//! The pipeline: load an undirected graph, form the random-walk transition
//! matrix, compute the expected window co-occurrence statistics in closed
//! form (joint distribution `J`, shifted-PMI argument `Q`, or transformed
//! variants), factor the result with a seeded randomized truncated SVD, and
//! score node pairs with the sigmoid of embedding dot products.
//!
//! A Monte-Carlo walk sampler ([`walks`]) provides an independent estimate
//! of the same statistics for validating the closed forms, and
//! [`linkpred`] runs k-fold edge cross-validation over a menu of matrix
//! recipes.
//!
//! Everything downstream of a seed is deterministic: reruns with the same
//! inputs produce byte-identical outputs.

pub mod config;
pub mod dense;
pub mod error;
pub mod graph;
pub mod heatmap;
pub mod linkpred;
pub mod matrices;
pub mod report;
pub mod rng;
pub mod sparse;
pub mod svd;
pub mod transforms;
pub mod walks;

pub use error::{Error, Result};
