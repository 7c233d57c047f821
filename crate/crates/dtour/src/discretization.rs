//! The finite offset set S_δ, its minimum gap s_δ, and candidate points.
//!
//! Optimal tours may be assumed to stop only at offsets from S_δ (taken from
//! either edge orientation), which turns the continuous search space into a
//! finite one.

use crate::graph::Graph;
use crate::point::Point;
use crate::rational::Rational;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiscretizationError {
    #[error("no qualifying offset pair; step width undefined")]
    DegenerateStep,
}

/// S_δ = {0, δ−⌊δ⌋, 1/2+δ−⌊1/2+δ⌋, 2δ−⌊2δ⌋}, duplicates collapsed.
pub fn discretization_set(delta: &Rational) -> BTreeSet<Rational> {
    let half = Rational::new(1, 2);
    let two = Rational::from_int(2);
    [
        Rational::zero(),
        delta.fract(),
        (half + *delta).fract(),
        (two * *delta).fract(),
    ]
    .into_iter()
    .collect()
}

/// Offsets that appear in S_δ from either orientation: S_δ ∪ (1 − S_δ).
pub fn offset_witnesses(delta: &Rational) -> BTreeSet<Rational> {
    let s = discretization_set(delta);
    let mut w = s.clone();
    for x in &s {
        w.insert(Rational::one() - *x);
    }
    w
}

/// s_δ = min |s₁−s₂| over s₁, s₂ with {sᵢ, 1−sᵢ} ∩ S_δ ≠ ∅ and
/// s₁ ∉ {s₂, 1−s₂}, by exhaustive enumeration over the finite witness set.
pub fn step_width(delta: &Rational) -> Result<Rational, DiscretizationError> {
    let witnesses: Vec<Rational> = offset_witnesses(delta).into_iter().collect();
    let mut best: Option<Rational> = None;
    for s1 in &witnesses {
        for s2 in &witnesses {
            if s1 == s2 || *s1 == Rational::one() - *s2 {
                continue;
            }
            let gap = (*s1 - *s2).abs();
            best = Some(match best {
                None => gap,
                Some(b) => b.min(gap),
            });
        }
    }
    best.ok_or(DiscretizationError::DegenerateStep)
}

/// P_δ(G): canonical points p(u, v, λ) with uv ∈ E and λ ∈ S_δ taken from
/// both edge orientations, deduplicated. Sorted for deterministic iteration.
pub fn candidate_points(g: &Graph, delta: &Rational) -> Vec<Point> {
    let s = discretization_set(delta);
    let mut points = BTreeSet::new();
    for e in g.edges() {
        for lambda in &s {
            points.insert(Point::on_edge(e.u, e.v, *lambda).unwrap());
            points.insert(Point::on_edge(e.v, e.u, *lambda).unwrap());
        }
    }
    points.into_iter().collect()
}

/// Interior peek depths available at offset granularity: the witness offsets
/// strictly between 0 and 1.
pub fn interior_depths(delta: &Rational) -> Vec<Rational> {
    offset_witnesses(delta)
        .into_iter()
        .filter(|x| !x.is_zero() && *x < Rational::one())
        .collect()
}

/// Bundle of the discretization data for one δ on one graph.
#[derive(Debug)]
pub struct DiscretizationData {
    pub delta: Rational,
    pub s_set: BTreeSet<Rational>,
    pub step: Rational,
    pub candidate_points: Vec<Point>,
}

impl DiscretizationData {
    pub fn new(g: &Graph, delta: Rational) -> Result<Self, DiscretizationError> {
        Ok(DiscretizationData {
            s_set: discretization_set(&delta),
            step: step_width(&delta)?,
            candidate_points: candidate_points(g, &delta),
            delta,
        })
    }
}
