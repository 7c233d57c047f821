//! Two independent δ-coverage verifiers.
//!
//! The interval verifier is the ground-truth oracle for arbitrary tours: per
//! edge it accumulates the exact set of offsets within distance δ of the
//! tour's stops and passed segments and checks that the union is the whole
//! edge. The characterization verifier evaluates the per-edge coverage
//! conditions for nice tours and must agree with it.

use crate::graph::{Edge, Graph, VertexId};
use crate::point::{point_distance, Point};
use crate::rational::Rational;
use crate::tour::Tour;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoverageError {
    #[error("tour is not nice; characterization lemmas do not apply")]
    NotNice,
}

/// Outcome of a δ-coverage check.
#[derive(Debug, Clone)]
pub struct CoverageReport {
    pub covered: bool,
    /// An uncovered point when `covered` is false; its distance to the tour
    /// exceeds δ and can be rechecked with `distance_point_to_tour`.
    pub witness: Option<Point>,
    /// Covered offset intervals per edge (merged, ascending).
    pub per_edge: BTreeMap<Edge, Vec<(Rational, Rational)>>,
}

/// Deduplicated stops and passed sub-segments of a tour.
pub(crate) struct TourGeometry {
    pub stops: Vec<Point>,
    /// Passed sub-intervals per edge, as (lo, hi) offsets from the smaller
    /// endpoint; unmerged.
    pub passed: BTreeMap<Edge, Vec<(Rational, Rational)>>,
}

impl TourGeometry {
    pub fn of(t: &Tour) -> Self {
        let stops: BTreeSet<Point> = t.stops().iter().copied().collect();
        let mut passed: BTreeMap<Edge, Vec<(Rational, Rational)>> = BTreeMap::new();
        let mut seen = BTreeSet::new();
        for (p, q) in t.segments() {
            let (e, a, b) = t.segment_edge(p, q);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            if seen.insert((e, lo, hi)) {
                passed.entry(e).or_default().push((lo, hi));
            }
        }
        TourGeometry {
            stops: stops.into_iter().collect(),
            passed,
        }
    }
}

/// Exact distance from a point to the set of points passed by the tour.
pub fn distance_point_to_tour(t: &Tour, p: &Point) -> Rational {
    let g = t.graph();
    let geom = TourGeometry::of(t);
    let mut best: Option<Rational> = None;
    let mut consider = |d: Rational| {
        best = Some(match best {
            None => d,
            Some(b) => b.min(d),
        });
    };
    for q in &geom.stops {
        consider(point_distance(g, p, q));
    }
    for (e, intervals) in &geom.passed {
        for &(lo, hi) in intervals {
            // a route from outside the host edge meets the segment at one of
            // its endpoints
            let pa = Point::on_edge(e.u, e.v, lo).unwrap();
            let pb = Point::on_edge(e.u, e.v, hi).unwrap();
            consider(point_distance(g, p, &pa));
            consider(point_distance(g, p, &pb));
            if let Some(off) = p.offset_from(e.u, e.v) {
                let within = if off < lo {
                    lo - off
                } else if off > hi {
                    off - hi
                } else {
                    Rational::zero()
                };
                consider(within);
            }
        }
    }
    best.expect("tour has at least one stop")
}

fn clip_push(intervals: &mut Vec<(Rational, Rational)>, lo: Rational, hi: Rational) {
    let lo = lo.max(Rational::zero());
    let hi = hi.min(Rational::one());
    if lo <= hi {
        intervals.push((lo, hi));
    }
}

/// Merge closed intervals; touching intervals coalesce.
pub(crate) fn merge_intervals(mut intervals: Vec<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
    intervals.sort();
    let mut merged: Vec<(Rational, Rational)> = Vec::new();
    for (lo, hi) in intervals {
        match merged.last_mut() {
            Some((_, phi)) if lo <= *phi => {
                if hi > *phi {
                    *phi = hi;
                }
            }
            _ => merged.push((lo, hi)),
        }
    }
    merged
}

fn covered_intervals_from_geometry(
    g: &Graph,
    geom: &TourGeometry,
    delta: &Rational,
    e: Edge,
) -> Vec<(Rational, Rational)> {
    let mut raw = Vec::new();
    let mut add_point_ball = |q: &Point| {
        // offsets λ on e with d(p(λ), q) ≤ δ, split by route
        let du = point_distance(g, &Point::vertex(e.u), q);
        let dv = point_distance(g, &Point::vertex(e.v), q);
        if *delta - du >= Rational::zero() {
            clip_push(&mut raw, Rational::zero(), *delta - du);
        }
        if *delta - dv >= Rational::zero() {
            clip_push(&mut raw, Rational::one() - (*delta - dv), Rational::one());
        }
        if let Some(off) = q.offset_from(e.u, e.v) {
            clip_push(&mut raw, off - *delta, off + *delta);
        }
    };
    for q in &geom.stops {
        add_point_ball(q);
    }
    for (f, intervals) in &geom.passed {
        for &(lo, hi) in intervals {
            add_point_ball(&Point::on_edge(f.u, f.v, lo).unwrap());
            add_point_ball(&Point::on_edge(f.u, f.v, hi).unwrap());
        }
    }
    drop(add_point_ball);
    if let Some(intervals) = geom.passed.get(&e) {
        for &(lo, hi) in intervals {
            clip_push(&mut raw, lo - *delta, hi + *delta);
        }
    }
    merge_intervals(raw)
}

/// Exact union of covered offset intervals on one edge.
pub fn covered_intervals(t: &Tour, delta: &Rational, e: Edge) -> Vec<(Rational, Rational)> {
    covered_intervals_from_geometry(t.graph(), &TourGeometry::of(t), delta, e)
}

/// Decides whether `t` δ-covers the whole point space of its host graph.
///
/// When it does not, the report carries the midpoint of the first maximal
/// uncovered gap in canonical edge order.
pub fn is_delta_tour(t: &Tour, delta: &Rational) -> CoverageReport {
    let g = t.graph();
    let geom = TourGeometry::of(t);
    let mut per_edge = BTreeMap::new();
    let mut witness = None;
    let mut covered = true;
    for &e in g.edges() {
        let merged = covered_intervals_from_geometry(g, &geom, delta, e);
        if witness.is_none() {
            if let Some((glo, ghi)) = first_gap(&merged) {
                covered = false;
                let mid = (glo + ghi) / Rational::from_int(2);
                witness = Some(Point::on_edge(e.u, e.v, mid).unwrap());
            }
        }
        per_edge.insert(e, merged);
    }
    CoverageReport {
        covered,
        witness,
        per_edge,
    }
}

/// First positive-length gap of a merged interval list inside [0, 1].
fn first_gap(merged: &[(Rational, Rational)]) -> Option<(Rational, Rational)> {
    let mut cursor = Rational::zero();
    for &(lo, hi) in merged {
        if lo > cursor {
            return Some((cursor, lo));
        }
        if hi > cursor {
            cursor = hi;
        }
    }
    if cursor < Rational::one() {
        Some((cursor, Rational::one()))
    } else {
        None
    }
}

/// Largest offset of a stop on edge `(from, to)` measured from `from`, below
/// the `exclusive_top` bound; stops not on the edge are ignored.
fn max_offset_from(stops: &[Point], from: VertexId, to: VertexId) -> Option<Rational> {
    stops
        .iter()
        .filter_map(|q| q.offset_from(from, to))
        .filter(|off| *off < Rational::one())
        .max()
}

/// Coverage of one edge decided by the characterization lemmas.
///
/// Dispatches on how many endpoints of `e` the tour stops at. Requires a
/// nice tour; tours with at most two stops fall back to the interval oracle.
pub fn edge_covered_by_lemmas(
    t: &Tour,
    delta: &Rational,
    e: Edge,
) -> Result<bool, CoverageError> {
    let g = t.graph();
    if t.discrete_length() < 3 {
        let merged = covered_intervals(t, delta, e);
        return Ok(first_gap(&merged).is_none());
    }
    if !t.is_nice().expect("length checked") {
        return Err(CoverageError::NotNice);
    }
    let stops: Vec<Point> = {
        let s: BTreeSet<Point> = t.stops().iter().copied().collect();
        s.into_iter().collect()
    };
    let d = g.all_pairs_distances().expect("connected graph");
    let (x1, x2) = (e.u, e.v);
    let stops_x1 = stops.contains(&Point::vertex(x1));
    let stops_x2 = stops.contains(&Point::vertex(x2));
    let two = Rational::from_int(2);
    let half = Rational::new(1, 2);

    match (stops_x1, stops_x2) {
        (true, true) => {
            // traversal, large δ, or a deep enough U-turn into the edge
            if t.traverses(e) {
                return Ok(true);
            }
            if *delta >= half {
                return Ok(true);
            }
            let threshold = Rational::one() - two * *delta;
            for &(base, other) in &[(x1, x2), (x2, x1)] {
                if let Some(off) = max_offset_from(&stops, base, other) {
                    if !off.is_zero() && off >= threshold {
                        return Ok(true);
                    }
                }
            }
            Ok(false)
        }
        (true, false) | (false, true) => {
            let (sx, ux) = if stops_x1 { (x1, x2) } else { (x2, x1) };
            // (ii): a stop on the edge at offset ≥ 1−δ from the stopped end
            let on_edge = stops
                .iter()
                .filter_map(|q| q.offset_from(sx, ux))
                .collect::<Vec<_>>();
            if on_edge
                .iter()
                .any(|off| *off >= Rational::one() - *delta)
            {
                return Ok(true);
            }
            // (i): λ₁ on the edge plus λ₂ on any edge into the unstopped end
            let lambda1 = on_edge
                .iter()
                .filter(|off| **off < Rational::one())
                .max()
                .copied();
            let lambda2 = g
                .neighbors(ux)
                .iter()
                .filter_map(|&v| max_offset_from(&stops, v, ux))
                .max();
            match (lambda1, lambda2) {
                (Some(l1), Some(l2)) => Ok(l1 + l2 >= two - two * *delta),
                _ => Ok(false),
            }
        }
        (false, false) => {
            // (ii): two interior stops on the edge near opposite ends
            let offs: Vec<Rational> = stops
                .iter()
                .filter_map(|q| q.offset_from(x1, x2))
                .collect();
            let near1 = offs
                .iter()
                .any(|o| *o > Rational::zero() && *o <= *delta);
            let near2 = offs
                .iter()
                .any(|o| *o >= Rational::one() - *delta && *o < Rational::one());
            if near1 && near2 {
                return Ok(true);
            }
            // (i): stops reach both ends through their far representations
            let reach = |x: VertexId| -> Option<Rational> {
                let mut best: Option<Rational> = None;
                let mut consider = |val: Rational| {
                    best = Some(match best {
                        None => val,
                        Some(b) => b.max(val),
                    });
                };
                for q in &stops {
                    match *q {
                        Point::Vertex(w) => {
                            for &y in g.neighbors(w) {
                                consider(-Rational::from(d[x as usize][y as usize]));
                            }
                        }
                        Point::Interior { u, v, lambda } => {
                            consider(lambda - Rational::from(d[x as usize][v as usize]));
                            consider(
                                (Rational::one() - lambda)
                                    - Rational::from(d[x as usize][u as usize]),
                            );
                        }
                    }
                }
                best
            };
            match (reach(x1), reach(x2)) {
                (Some(r1), Some(r2)) => {
                    Ok(r1 + r2 >= Rational::from_int(3) - two * *delta)
                }
                _ => Ok(false),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    fn pt(u: u32, v: u32, n: i128, d: i128) -> Point {
        Point::on_edge(u, v, r(n, d)).unwrap()
    }

    #[test]
    fn distance_to_tour_examples() {
        let k2 = Arc::new(Graph::from_edge_list(&[(0, 1)]).unwrap());
        let t = Tour::single(Arc::clone(&k2), Point::vertex(0)).unwrap();
        assert_eq!(
            distance_point_to_tour(&t, &Point::vertex(1)),
            Rational::one()
        );
        assert_eq!(
            distance_point_to_tour(&t, &Point::vertex(0)),
            Rational::zero()
        );

        let p3 = Arc::new(Graph::from_edge_list(&[(0, 1), (1, 2)]).unwrap());
        let t = Tour::new(Arc::clone(&p3), vec![Point::vertex(0), Point::vertex(1)]).unwrap();
        assert_eq!(
            distance_point_to_tour(&t, &pt(1, 2, 1, 2)),
            r(1, 2)
        );
        // A stopping point is at distance zero.
        assert_eq!(
            distance_point_to_tour(&t, &Point::vertex(1)),
            Rational::zero()
        );
    }

    #[test]
    fn covered_interval_examples() {
        let k2 = Arc::new(Graph::from_edge_list(&[(0, 1)]).unwrap());
        let e = Edge::new(0, 1);

        let t = Tour::new(Arc::clone(&k2), vec![Point::vertex(0), Point::vertex(1)]).unwrap();
        assert_eq!(
            covered_intervals(&t, &Rational::zero(), e),
            vec![(Rational::zero(), Rational::one())]
        );

        let t = Tour::single(Arc::clone(&k2), Point::vertex(0)).unwrap();
        assert_eq!(
            covered_intervals(&t, &r(1, 2), e),
            vec![(Rational::zero(), r(1, 2))]
        );

        let t = Tour::new(Arc::clone(&k2), vec![pt(0, 1, 1, 4), pt(0, 1, 3, 4)]).unwrap();
        assert_eq!(
            covered_intervals(&t, &r(1, 4), e),
            vec![(Rational::zero(), Rational::one())]
        );
    }

    #[test]
    fn delta_tour_check_and_witness() {
        let tri = Arc::new(Graph::from_edge_list(&[(0, 1), (1, 2), (2, 0)]).unwrap());
        let t = Tour::new(
            Arc::clone(&tri),
            vec![Point::vertex(0), Point::vertex(1), Point::vertex(2)],
        )
        .unwrap();
        assert!(is_delta_tour(&t, &Rational::zero()).covered);

        let k2 = Arc::new(Graph::from_edge_list(&[(0, 1)]).unwrap());
        let t = Tour::single(Arc::clone(&k2), Point::vertex(0)).unwrap();
        let report = is_delta_tour(&t, &r(1, 4));
        assert!(!report.covered);
        let w = report.witness.unwrap();
        assert_eq!(w, pt(0, 1, 5, 8));
        assert!(distance_point_to_tour(&t, &w) > r(1, 4));
    }

    #[test]
    fn coverage_is_monotone_in_delta() {
        let c4 = Arc::new(Graph::from_edge_list(&[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap());
        let t = Tour::new(Arc::clone(&c4), vec![Point::vertex(0), Point::vertex(1)]).unwrap();
        let mut last = false;
        for num in 0..10 {
            let covered = is_delta_tour(&t, &r(num, 4)).covered;
            assert!(covered || !last, "coverage lost as delta grew");
            last = covered;
        }
    }

    #[test]
    fn lemma_verifier_both_endpoints() {
        let c4 = Arc::new(Graph::from_edge_list(&[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap());
        let t = Tour::new(
            Arc::clone(&c4),
            vec![
                Point::vertex(0),
                Point::vertex(1),
                Point::vertex(2),
                Point::vertex(3),
            ],
        )
        .unwrap();
        // δ = 1/2: every edge with both endpoints stopped is covered
        for &e in c4.edges() {
            assert!(edge_covered_by_lemmas(&t, &r(1, 2), e).unwrap());
        }
        // δ = 1/4, traversed edges are covered, and all are traversed
        for &e in c4.edges() {
            assert!(edge_covered_by_lemmas(&t, &r(1, 4), e).unwrap());
        }
    }

    #[test]
    fn lemma_verifier_one_endpoint() {
        // P3, tour peeking from the middle: edge (1,2) has one endpoint
        // stopped and no qualifying deep stop for δ = 1/4.
        let p3 = Arc::new(Graph::from_edge_list(&[(0, 1), (1, 2)]).unwrap());
        let t = Tour::new(
            Arc::clone(&p3),
            vec![
                Point::vertex(1),
                pt(0, 1, 3, 4),
                Point::vertex(1),
                pt(1, 2, 1, 4),
            ],
        )
        .unwrap();
        assert!(t.is_nice().unwrap());
        let e12 = Edge::new(1, 2);
        let by_lemma = edge_covered_by_lemmas(&t, &r(1, 4), e12).unwrap();
        let by_intervals = first_gap(&covered_intervals(&t, &r(1, 4), e12)).is_none();
        assert_eq!(by_lemma, by_intervals);
        assert!(!by_lemma);

        // depth 3/4 = 1-δ reaches the far end
        let t = Tour::new(
            Arc::clone(&p3),
            vec![
                Point::vertex(1),
                pt(0, 1, 1, 4),
                Point::vertex(1),
                pt(1, 2, 3, 4),
            ],
        )
        .unwrap();
        assert!(edge_covered_by_lemmas(&t, &r(1, 4), e12).unwrap());
    }

    #[test]
    fn witness_soundness_random_small() {
        let g = Arc::new(Graph::from_edge_list(&[(0, 1), (1, 2), (2, 3), (3, 0), (1, 3)]).unwrap());
        let tours = vec![
            Tour::new(Arc::clone(&g), vec![Point::vertex(0), Point::vertex(1)]).unwrap(),
            Tour::new(
                Arc::clone(&g),
                vec![Point::vertex(1), pt(1, 3, 1, 2), Point::vertex(1), Point::vertex(2)],
            )
            .unwrap(),
        ];
        for t in &tours {
            for num in 0..6 {
                let delta = r(num, 4);
                let report = is_delta_tour(&t, &delta);
                if let Some(w) = &report.witness {
                    assert!(!report.covered);
                    assert!(distance_point_to_tour(t, w) > delta);
                }
            }
        }
    }
}
