//! Random key graphs intersected with random geometric graphs.
//!
//! Nodes are placed uniformly at random in the unit square and each node
//! independently draws a ring of `K` distinct keys from a pool of `P` keys.
//! Two nodes are linked when they are within the transmission radius *and*
//! their key rings intersect. This crate provides:
//!
//! * exact combinatorial link probabilities and their exponential bounds
//!   ([`combinatorics`]),
//! * reproducible instance sampling and graph construction ([`graph`]),
//! * connectivity analysis ([`connectivity`]),
//! * dual offset tessellations of the unit square used to certify
//!   connectivity from local denseness ([`tessellation`]),
//! * closed-form probability bounds on isolation, disconnection, and cell
//!   denseness ([`bounds`]),
//! * a Monte Carlo harness that solves parameter regimes, runs trials, and
//!   aggregates estimates with Wilson confidence intervals ([`harness`]),
//! * text/JSON/CSV interchange formats ([`formats`]).

pub mod bounds;
pub mod combinatorics;
pub mod connectivity;
pub mod formats;
pub mod graph;
pub mod harness;
pub mod tessellation;
