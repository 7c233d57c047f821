//! Exact tooling for δ-tours on the continuous graph model.
//!
//! A graph is read as a metric space in which every edge is a unit-length
//! continuum of points; a δ-tour is a closed walk in that space coming
//! within distance δ of every point of every edge. This crate provides:
//!
//! - the exact point metric and the finite discretization of optimal tours
//!   ([`graph`], [`point`], [`discretization`]),
//! - tours, niceness and normalization ([`tour`], [`normalize`]),
//! - two independent coverage verifiers ([`coverage`]),
//! - optimal-tour solvers ([`solver`]),
//! - a kernelization-based fixed-parameter decision procedure ([`kernel`]),
//! - generators for the reduction instances relating δ-tours to vertex
//!   cover, cycle subpartitions, TSP, dominating set and binary CSPs
//!   ([`reductions`]),
//! - brute-force companion-problem oracles ([`oracle`]),
//! - text/JSON formats and the command-line front end ([`io`], [`cli`]).
//!
//! All quantities are exact rationals; no floating point is used anywhere.
//!
//! Start with the runnable examples in `examples/` — each one demonstrates a
//! single capability end to end.

pub mod cli;
pub mod coverage;
pub mod discretization;
pub mod graph;
pub mod io;
pub mod kernel;
pub mod normalize;
pub mod oracle;
pub mod point;
pub mod rational;
pub mod reductions;
pub mod solver;
pub mod tour;

pub use coverage::{covered_intervals, distance_point_to_tour, edge_covered_by_lemmas, is_delta_tour, CoverageReport};
pub use discretization::{candidate_points, discretization_set, step_width, DiscretizationData};
pub use graph::{Edge, Graph, GraphError, VertexId};
pub use point::{point_distance, Point};
pub use rational::Rational;
pub use tour::{Tour, TourError};
