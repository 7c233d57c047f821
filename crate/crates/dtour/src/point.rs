//! Points of the continuous graph model and the exact point metric.
//!
//! Each edge is a unit-length continuum. A point is addressed as
//! `p(u, v, λ)` with `p(u, v, λ) = p(v, u, 1−λ)`; the canonical form stores
//! interior points with `u < v` and `λ ∈ (0, 1)`, and collapses `λ ∈ {0, 1}`
//! to the vertex itself so that the same vertex reached from different edges
//! compares equal.

use crate::graph::{Graph, VertexId};
use crate::rational::Rational;
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Point {
    Vertex(VertexId),
    /// Strictly interior point of edge `uv` with `u < v` and `λ ∈ (0,1)`
    /// measured from `u`.
    Interior {
        u: VertexId,
        v: VertexId,
        lambda: Rational,
    },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PointError {
    #[error("offset {0} outside [0, 1]")]
    OffsetOutOfRange(Rational),
    #[error("degenerate edge {0}-{0}")]
    DegenerateEdge(VertexId),
    #[error("point not on graph: {0}")]
    PointNotOnGraph(String),
}

impl Point {
    /// Canonical `p(u, v, λ)`.
    pub fn on_edge(u: VertexId, v: VertexId, lambda: Rational) -> Result<Point, PointError> {
        if u == v {
            return Err(PointError::DegenerateEdge(u));
        }
        if lambda.is_negative() || lambda > Rational::one() {
            return Err(PointError::OffsetOutOfRange(lambda));
        }
        if lambda.is_zero() {
            Ok(Point::Vertex(u))
        } else if lambda == Rational::one() {
            Ok(Point::Vertex(v))
        } else if u < v {
            Ok(Point::Interior { u, v, lambda })
        } else {
            Ok(Point::Interior {
                u: v,
                v: u,
                lambda: Rational::one() - lambda,
            })
        }
    }

    pub fn vertex(v: VertexId) -> Point {
        Point::Vertex(v)
    }

    pub fn is_vertex(&self) -> bool {
        matches!(self, Point::Vertex(_))
    }

    pub fn as_vertex(&self) -> Option<VertexId> {
        match self {
            Point::Vertex(v) => Some(*v),
            Point::Interior { .. } => None,
        }
    }

    /// Offset of this point from vertex `w` along edge `(w, other)`, if the
    /// point lies on that edge (vertices lie on every incident edge).
    pub fn offset_from(&self, w: VertexId, other: VertexId) -> Option<Rational> {
        match *self {
            Point::Vertex(x) if x == w => Some(Rational::zero()),
            Point::Vertex(x) if x == other => Some(Rational::one()),
            Point::Vertex(_) => None,
            Point::Interior { u, v, lambda } => {
                if u == w && v == other {
                    Some(lambda)
                } else if u == other && v == w {
                    Some(Rational::one() - lambda)
                } else {
                    None
                }
            }
        }
    }

    /// True iff the point lies on edge `{a, b}`.
    pub fn lies_on(&self, a: VertexId, b: VertexId) -> bool {
        match *self {
            Point::Vertex(x) => x == a || x == b,
            Point::Interior { u, v, .. } => {
                (u == a && v == b) || (u == b && v == a)
            }
        }
    }

    /// Checks the point addresses an actual edge of `g`.
    pub fn validate(&self, g: &Graph) -> Result<(), PointError> {
        match *self {
            Point::Vertex(v) => {
                if v < g.vertex_count() {
                    Ok(())
                } else {
                    Err(PointError::PointNotOnGraph(self.to_string()))
                }
            }
            Point::Interior { u, v, .. } => {
                if g.has_edge(u, v) {
                    Ok(())
                } else {
                    Err(PointError::PointNotOnGraph(self.to_string()))
                }
            }
        }
    }

    /// Some edge of `g` the point lies on (its own edge for interior points,
    /// the smallest incident edge for vertices).
    pub fn host_edge(&self, g: &Graph) -> Option<(VertexId, VertexId)> {
        match *self {
            Point::Interior { u, v, .. } => Some((u, v)),
            Point::Vertex(w) => g.neighbors(w).first().map(|&x| {
                let e = crate::graph::Edge::new(w, x);
                (e.u, e.v)
            }),
        }
    }

    /// True iff two points lie on a common edge of `g`.
    pub fn shares_edge_with(&self, other: &Point, g: &Graph) -> bool {
        match (*self, *other) {
            (Point::Vertex(a), Point::Vertex(b)) => a == b || g.has_edge(a, b),
            (Point::Vertex(a), Point::Interior { u, v, .. })
            | (Point::Interior { u, v, .. }, Point::Vertex(a)) => a == u || a == v,
            (
                Point::Interior { u, v, .. },
                Point::Interior { u: u2, v: v2, .. },
            ) => u == u2 && v == v2,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Vertex(v) => write!(f, "{}", v),
            Point::Interior { u, v, lambda } => write!(f, "{} {} {}", u, v, lambda),
        }
    }
}

/// Exact distance from vertex `w` to point `q` in a connected graph.
fn vertex_to_point(g: &Graph, w: VertexId, q: &Point) -> Rational {
    let d = g.all_pairs_distances().expect("connected graph");
    match *q {
        Point::Vertex(x) => Rational::from(d[w as usize][x as usize]),
        Point::Interior { u, v, lambda } => {
            let via_u = Rational::from(d[w as usize][u as usize]) + lambda;
            let via_v = Rational::from(d[w as usize][v as usize]) + (Rational::one() - lambda);
            via_u.min(via_v)
        }
    }
}

/// Exact distance between two points of a connected graph.
///
/// Same-edge pairs take the shorter of the direct offset difference and the
/// routes through the edge endpoints; general pairs minimize over the four
/// endpoint routes.
pub fn point_distance(g: &Graph, p: &Point, q: &Point) -> Rational {
    match (*p, *q) {
        (Point::Vertex(a), _) => vertex_to_point(g, a, q),
        (_, Point::Vertex(b)) => vertex_to_point(g, b, p),
        (
            Point::Interior { u, v, lambda },
            Point::Interior {
                u: u2,
                v: v2,
                lambda: mu,
            },
        ) => {
            let via_u = lambda + vertex_to_point(g, u, q);
            let via_v = (Rational::one() - lambda) + vertex_to_point(g, v, q);
            let mut best = via_u.min(via_v);
            if u == u2 && v == v2 {
                best = best.min((lambda - mu).abs());
            }
            best
        }
    }
}
