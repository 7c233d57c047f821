//! Tours: closed point sequences, their lengths, niceness, and truncation.

use crate::graph::{Edge, Graph, VertexId};
use crate::point::{Point, PointError};
use crate::rational::Rational;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TourError {
    #[error("tour must have at least one stop")]
    Empty,
    #[error("consecutive stops {0} and {1} do not lie on a common edge")]
    NoCommonEdge(String, String),
    #[error("consecutive stops coincide at {0}")]
    RepeatedStop(String),
    #[error(transparent)]
    BadPoint(#[from] PointError),
    #[error("tour has fewer than 3 segments")]
    TooShort,
}

/// A closed tour, stored without the repeated closing point; all iteration
/// is cyclic. A single-stop tour (discrete length 0) is allowed.
#[derive(Clone, Debug)]
pub struct Tour {
    host: Arc<Graph>,
    stops: Vec<Point>,
}

impl PartialEq for Tour {
    fn eq(&self, other: &Self) -> bool {
        self.stops == other.stops && Arc::ptr_eq(&self.host, &other.host)
    }
}

impl Tour {
    /// Validates that consecutive stops (cyclically) are distinct and share
    /// an edge, and that every stop lies on the graph.
    pub fn new(host: Arc<Graph>, stops: Vec<Point>) -> Result<Tour, TourError> {
        if stops.is_empty() {
            return Err(TourError::Empty);
        }
        for p in &stops {
            p.validate(&host)?;
        }
        if stops.len() > 1 {
            for i in 0..stops.len() {
                let p = &stops[i];
                let q = &stops[(i + 1) % stops.len()];
                if p == q {
                    return Err(TourError::RepeatedStop(p.to_string()));
                }
                if !p.shares_edge_with(q, &host) {
                    return Err(TourError::NoCommonEdge(p.to_string(), q.to_string()));
                }
            }
        }
        Ok(Tour { host, stops })
    }

    pub fn single(host: Arc<Graph>, p: Point) -> Result<Tour, TourError> {
        Tour::new(host, vec![p])
    }

    pub fn host(&self) -> &Arc<Graph> {
        &self.host
    }

    pub fn graph(&self) -> &Graph {
        &self.host
    }

    pub fn stops(&self) -> &[Point] {
        &self.stops
    }

    /// Number of segments z (0 for a single-stop tour).
    pub fn discrete_length(&self) -> usize {
        if self.stops.len() <= 1 {
            0
        } else {
            self.stops.len()
        }
    }

    /// Cyclic consecutive pairs; empty for a single-stop tour.
    pub fn segments(&self) -> impl Iterator<Item = (&Point, &Point)> {
        let z = self.discrete_length();
        (0..z).map(move |i| (&self.stops[i], &self.stops[(i + 1) % self.stops.len()]))
    }

    /// The unique edge shared by two consecutive stops, with the offsets of
    /// both stops along it.
    pub fn segment_edge(&self, p: &Point, q: &Point) -> (Edge, Rational, Rational) {
        let (u, v) = match (*p, *q) {
            (Point::Interior { u, v, .. }, _) => (u, v),
            (_, Point::Interior { u, v, .. }) => (u, v),
            (Point::Vertex(a), Point::Vertex(b)) => (a.min(b), a.max(b)),
        };
        let a = p.offset_from(u, v).expect("stop on segment edge");
        let b = q.offset_from(u, v).expect("stop on segment edge");
        (Edge::new(u, v), a, b)
    }

    /// ℓ(T): sum of offset differences along the shared edge per segment.
    pub fn length(&self) -> Rational {
        self.segments()
            .map(|(p, q)| {
                let (_, a, b) = self.segment_edge(p, q);
                (a - b).abs()
            })
            .sum()
    }

    /// Multiplicity of full edge traversals (segments between both endpoint
    /// vertices), per edge.
    pub fn traversal_counts(&self) -> HashMap<Edge, usize> {
        let mut counts = HashMap::new();
        for (p, q) in self.segments() {
            if let (Point::Vertex(a), Point::Vertex(b)) = (*p, *q) {
                *counts.entry(Edge::new(a, b)).or_insert(0) += 1;
            }
        }
        counts
    }

    pub fn traverses(&self, e: Edge) -> bool {
        self.segments().any(|(p, q)| {
            matches!((*p, *q), (Point::Vertex(a), Point::Vertex(b)) if Edge::new(a, b) == e)
        })
    }

    pub fn stops_at_vertex(&self, w: VertexId) -> bool {
        self.stops.contains(&Point::Vertex(w))
    }

    /// Whether the tour interacts with every edge in one of the four
    /// canonical ways. Requires at least 3 segments.
    pub fn is_nice(&self) -> Result<bool, TourError> {
        if self.discrete_length() < 3 {
            return Err(TourError::TooShort);
        }
        let z = self.stops.len();
        let at = |i: usize| &self.stops[i % z];
        // no two consecutive stops inside an edge
        for i in 0..z {
            if !at(i).is_vertex() && !at(i + 1).is_vertex() {
                return Ok(false);
            }
        }
        // interior stops are U-turns
        for i in 0..z {
            if !at(i).is_vertex() && at(i + z - 1) != at(i + 1) {
                return Ok(false);
            }
        }
        // at most one interior stop per edge
        let mut interior_per_edge: HashMap<Edge, usize> = HashMap::new();
        for p in &self.stops {
            if let Point::Interior { u, v, .. } = p {
                *interior_per_edge.entry(Edge::new(*u, *v)).or_insert(0) += 1;
            }
        }
        if interior_per_edge.values().any(|&c| c > 1) {
            return Ok(false);
        }
        // no interior stop on a traversed edge, every edge traversed <= twice
        let traversals = self.traversal_counts();
        if traversals.values().any(|&c| c > 2) {
            return Ok(false);
        }
        if interior_per_edge
            .keys()
            .any(|e| traversals.contains_key(e))
        {
            return Ok(false);
        }
        Ok(true)
    }

    /// ⌊T⌋: interior U-turn excursions from a vertex collapsed to their base
    /// vertex, consecutive duplicates merged, iterated to a fixpoint.
    pub fn truncate(&self) -> Tour {
        let mut stops = self.stops.clone();
        loop {
            let mut changed = false;
            // collapse one vertex-based U-turn per pass
            if stops.len() >= 2 {
                let z = stops.len();
                let mut remove: Option<usize> = None;
                for i in 0..z {
                    let prev = &stops[(i + z - 1) % z];
                    let cur = &stops[i];
                    let next = &stops[(i + 1) % z];
                    if !cur.is_vertex() && prev.is_vertex() && prev == next {
                        remove = Some(i);
                        break;
                    }
                }
                if let Some(i) = remove {
                    stops.remove(i);
                    changed = true;
                }
            }
            // merge cyclically consecutive duplicates
            let mut i = 0;
            while stops.len() > 1 && i < stops.len() {
                let next = (i + 1) % stops.len();
                if stops[i] == stops[next] {
                    stops.remove(next.max(i).min(stops.len() - 1));
                    changed = true;
                } else {
                    i += 1;
                }
            }
            if !changed {
                break;
            }
        }
        Tour {
            host: Arc::clone(&self.host),
            stops,
        }
    }
}

impl fmt::Display for Tour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.stops.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{}", p)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    fn triangle() -> Arc<Graph> {
        Arc::new(Graph::from_edge_list(&[(0, 1), (1, 2), (2, 0)]).unwrap())
    }

    fn pt(u: u32, v: u32, n: i128, d: i128) -> Point {
        Point::on_edge(u, v, r(n, d)).unwrap()
    }

    #[test]
    fn lengths() {
        let k2 = Arc::new(Graph::from_edge_list(&[(0, 1)]).unwrap());
        let single = Tour::single(Arc::clone(&k2), Point::vertex(0)).unwrap();
        assert_eq!(single.length(), Rational::zero());
        assert_eq!(single.discrete_length(), 0);

        let zigzag = Tour::new(
            Arc::clone(&k2),
            vec![pt(0, 1, 1, 4), pt(0, 1, 3, 4)],
        )
        .unwrap();
        assert_eq!(zigzag.length(), Rational::one());
        assert_eq!(zigzag.discrete_length(), 2);

        let tri = triangle();
        let t = Tour::new(
            Arc::clone(&tri),
            vec![Point::vertex(0), Point::vertex(1), Point::vertex(2)],
        )
        .unwrap();
        assert_eq!(t.length(), Rational::from_int(3));
        assert_eq!(t.discrete_length(), 3);

        let back_and_forth = Tour::new(
            Arc::clone(&tri),
            vec![Point::vertex(0), Point::vertex(1)],
        )
        .unwrap();
        assert_eq!(back_and_forth.discrete_length(), 2);
        assert_eq!(back_and_forth.length(), Rational::from_int(2));
    }

    #[test]
    fn rejects_invalid_sequences() {
        let tri = triangle();
        let g4 = Arc::new(Graph::from_edge_list(&[(0, 1), (1, 2), (2, 3)]).unwrap());
        assert!(matches!(
            Tour::new(Arc::clone(&g4), vec![Point::vertex(0), Point::vertex(2)]),
            Err(TourError::NoCommonEdge(..))
        ));
        assert!(matches!(
            Tour::new(
                Arc::clone(&tri),
                vec![Point::vertex(0), Point::vertex(0)]
            ),
            Err(TourError::RepeatedStop(..))
        ));
    }

    #[test]
    fn niceness() {
        let tri = triangle();
        let t = Tour::new(
            Arc::clone(&tri),
            vec![Point::vertex(0), Point::vertex(1), Point::vertex(2)],
        )
        .unwrap();
        assert!(t.is_nice().unwrap());

        // stop inside a traversed edge
        let bad = Tour::new(
            Arc::clone(&tri),
            vec![Point::vertex(0), pt(0, 1, 1, 2), Point::vertex(1)],
        )
        .unwrap();
        assert!(!bad.is_nice().unwrap());

        // star: peeks into two edges from the center
        let star = Arc::new(Graph::from_edge_list(&[(0, 1), (0, 2)]).unwrap());
        let peeks = Tour::new(
            Arc::clone(&star),
            vec![
                Point::vertex(0),
                pt(0, 1, 1, 3),
                Point::vertex(0),
                pt(0, 2, 1, 3),
            ],
        )
        .unwrap();
        assert!(peeks.is_nice().unwrap());

        let short = Tour::new(Arc::clone(&tri), vec![Point::vertex(0), Point::vertex(1)]).unwrap();
        assert_eq!(short.is_nice().unwrap_err(), TourError::TooShort);
    }

    #[test]
    fn truncation() {
        let tri = triangle();
        let t = Tour::new(
            Arc::clone(&tri),
            vec![
                Point::vertex(0),
                pt(0, 1, 1, 3),
                Point::vertex(0),
                Point::vertex(1),
            ],
        )
        .unwrap();
        let tt = t.truncate();
        assert_eq!(tt.stops(), &[Point::vertex(0), Point::vertex(1)]);
        assert!(tt.length() <= t.length());

        let integral = Tour::new(
            Arc::clone(&tri),
            vec![Point::vertex(0), Point::vertex(1), Point::vertex(2)],
        )
        .unwrap();
        assert_eq!(integral.truncate().stops(), integral.stops());

        let collapse = Tour::new(
            Arc::clone(&tri),
            vec![Point::vertex(0), pt(0, 1, 1, 2)],
        )
        .unwrap();
        assert_eq!(collapse.truncate().stops(), &[Point::vertex(0)]);
    }

    #[test]
    fn truncation_stops_are_original_stops() {
        let tri = triangle();
        let t = Tour::new(
            Arc::clone(&tri),
            vec![
                Point::vertex(0),
                pt(0, 1, 1, 2),
                Point::vertex(0),
                Point::vertex(2),
                pt(2, 1, 1, 4),
                Point::vertex(2),
            ],
        )
        .unwrap();
        let tt = t.truncate();
        for p in tt.stops() {
            assert!(t.stops().contains(p));
        }
        assert!(tt.length() <= t.length());
    }
}
