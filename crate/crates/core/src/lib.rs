//! Impact-oriented scholar profiling over self-citation graphs.
//!
//! A scholar's profile is a timed directed acyclic graph: nodes are the
//! scholar's papers (with citation, date, order and topic attributes),
//! edges are reversed self-citations. The crate builds these profiles from
//! a line-delimited bibliographic corpus, scores nodes by author
//! contribution (backed by unsupervised advisor-advisee detection), scores
//! edges by extend-type citation probability (an extremely-randomized-trees
//! classifier over 20 interpretable features), learns graph-level
//! representations with a small GNN, and evaluates everything on award
//! inference against indicator and bibliometric-network baselines.
//!
//! Modules map onto pipeline stages:
//!
//! - [`corpus`]: load/validate/index the paper, citation, context and topic
//!   files that everything else reads.
//! - [`topic_embed`]: classical MDS over the topic hierarchy, per-paper
//!   topic vectors.
//! - [`gfgraph`]: full and core profile construction, JSON/DOT export.
//! - [`node_profile`]: alphabetical-authorship testing, author
//!   contribution, advisor-advisee detection.
//! - [`edge_profile`]: citation-link feature extraction and the
//!   extend-type classifier.
//! - [`represent`]: node encoding, message-passing GNN, trainer and
//!   gradient checking.
//! - [`baselines`]: h-index and friends, co-citation / bibliographic
//!   coupling / co-authorship networks, indicator regression.
//! - [`metrics`]: stratified cross-validation, F1/AUC/ACC, paired tests.
//! - [`harness`]: award-inference protocol, edge-removal sweeps.
//! - [`synth`]: deterministic synthetic corpora with planted ground truth.

pub mod baselines;
pub mod corpus;
pub mod edge_profile;
pub mod error;
pub mod gfgraph;
pub mod harness;
pub mod jsonl;
pub mod metrics;
pub mod node_profile;
pub mod represent;
pub mod rng;
pub mod synth;
pub mod topic_embed;

pub use error::{GfError, Result};
