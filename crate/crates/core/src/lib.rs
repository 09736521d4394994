//! Fault location on branched power-line networks by electromagnetic time
//! reversal.
//!
//! The pipeline records a fault transient at one measurement node
//! ([`sim::simulate_fault`]), reverses it in time, and re-injects it into a
//! model of the healthy network with a trial shunt placed at candidate
//! positions ([`sim::back_inject`]). The candidate whose shunt draws the most
//! current energy is the located fault. Candidates are searched along a
//! minimal set of edge-disjoint paths covering the network
//! ([`graph::decompose_into_paths`]), one annealing run per path
//! ([`anneal::sa_maximize`]).

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod anneal;
pub mod graph;
pub mod locator;
pub mod network;
pub mod oracle;
pub mod sim;
