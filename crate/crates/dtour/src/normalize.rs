//! Rewriting arbitrary tours into nice ones.
//!
//! The rewrite system works toward the canonical per-edge interactions:
//! interior runs are swept into a single traversal or U-turn (R1/R2),
//! multiple interior stops on one edge are merged or promoted to a double
//! traversal (R3), U-turns on traversed edges are deleted (R4), and edges
//! traversed three or more times lose a pair of traversals (R5). Every
//! applied rewrite strictly decreases (length, stop count) lexicographically,
//! so the loop terminates. Rewrites that could shrink the covered set are
//! guarded by a coverage re-check when a covering radius is supplied.

use crate::coverage::is_delta_tour;
use crate::graph::{Edge, Graph, VertexId};
use crate::oracle::euler_vertex_walk;
use crate::point::Point;
use crate::rational::Rational;
use crate::tour::Tour;
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NormalizeError {
    #[error("rewrite system reached a fixpoint that is neither nice nor a ≤2-stop tour")]
    NormalizationFailed,
}

/// Normalizes `t` into a tour that is nice or has at most two stops, never
/// longer than `t`.
///
/// When `delta` is supplied the input must be a δ-tour; rewrites that could
/// lose coverage are then only applied if the result still δ-covers, so the
/// output is a δ-tour as well.
pub fn normalize_nice(t: &Tour, delta: Option<&Rational>) -> Result<Tour, NormalizeError> {
    if t.discrete_length() <= 2 {
        return Ok(t.clone());
    }
    if t.is_nice().expect("length checked") {
        return Ok(t.clone());
    }
    let host = Arc::clone(t.host());
    let mut stops = t.stops().to_vec();
    rotate_to_vertex(&mut stops);
    loop {
        let before = measure(&host, &stops);
        let changed = apply_sweep(&mut stops)
            || stops.len() > 2
                && (apply_drop_on_traversed(&host, &mut stops)
                    || apply_merge_peeks(&host, &mut stops, delta)
                    || apply_traversal_reduce(&host, &mut stops));
        if !changed {
            break;
        }
        let after = measure(&host, &stops);
        assert!(after < before, "rewrite did not decrease the measure");
        if stops.len() <= 2 {
            break;
        }
    }
    let out = Tour::new(host, stops).expect("rewrites preserve tour validity");
    assert!(out.length() <= t.length());
    if out.discrete_length() <= 2 || out.is_nice().expect("length checked") {
        Ok(out)
    } else {
        Err(NormalizeError::NormalizationFailed)
    }
}

fn measure(host: &Arc<Graph>, stops: &[Point]) -> (Rational, usize) {
    let t = Tour::new(Arc::clone(host), stops.to_vec()).expect("valid stops");
    (t.length(), stops.len())
}

/// Rotate so position 0 holds a vertex stop, if there is one.
fn rotate_to_vertex(stops: &mut Vec<Point>) {
    if let Some(i) = stops.iter().position(|p| p.is_vertex()) {
        stops.rotate_left(i);
    }
}

fn merge_cyclic_duplicates(stops: &mut Vec<Point>) {
    let mut i = 0;
    while stops.len() > 1 && i < stops.len() {
        let next = (i + 1) % stops.len();
        if stops[i] == stops[next] {
            stops.remove(next);
            if next < i {
                i -= 1;
            }
        } else {
            i += 1;
        }
    }
}

/// R1/R2: canonicalize one maximal run of interior stops. A run between
/// boundary vertices `w_b`, `w_a` on edge e passes exactly the offset span
/// it touched; the replacement realizes that span with the fewest stops:
/// a traversal when the boundaries differ, a single deepest U-turn when
/// they coincide. Preserves the passed set exactly.
fn apply_sweep(stops: &mut Vec<Point>) -> bool {
    if stops.iter().all(|p| !p.is_vertex()) {
        // whole tour inside one edge: canonical two-stop sweep
        let (u, v) = match stops[0] {
            Point::Interior { u, v, .. } => (u, v),
            Point::Vertex(_) => unreachable!(),
        };
        let offs: Vec<Rational> = stops.iter().map(|p| p.offset_from(u, v).unwrap()).collect();
        let lo = *offs.iter().min().unwrap();
        let hi = *offs.iter().max().unwrap();
        let replacement = vec![
            Point::on_edge(u, v, lo).unwrap(),
            Point::on_edge(u, v, hi).unwrap(),
        ];
        if *stops == replacement {
            return false;
        }
        *stops = replacement;
        return true;
    }
    rotate_to_vertex(stops);
    let z = stops.len();
    let mut i = 0;
    while i < z {
        if stops[i].is_vertex() {
            i += 1;
            continue;
        }
        let start = i;
        let mut end = i;
        while end + 1 < z && !stops[end + 1].is_vertex() {
            end += 1;
        }
        // boundaries exist because position 0 is a vertex
        let w_before = stops[start - 1];
        let w_after = stops[(end + 1) % z];
        let (u, v) = match stops[start] {
            Point::Interior { u, v, .. } => (u, v),
            Point::Vertex(_) => unreachable!(),
        };
        let run_is_single_uturn = start == end && w_before == w_after;
        if !run_is_single_uturn {
            let base = w_before.as_vertex().expect("boundary is a vertex");
            let exit = w_after.as_vertex().expect("boundary is a vertex");
            let mut offs: Vec<Rational> = stops[start..=end]
                .iter()
                .map(|p| p.offset_from(base, other_end(u, v, base)) .unwrap())
                .collect();
            offs.push(Rational::zero());
            offs.push(
                w_after
                    .offset_from(base, other_end(u, v, base))
                    .expect("boundary on run edge"),
            );
            let hi = offs.iter().max().copied().unwrap();
            let replacement: Vec<Point> = if exit == base {
                vec![Point::on_edge(base, other_end(u, v, base), hi).unwrap()]
            } else {
                // boundary vertices differ: both ends of the edge are passed
                Vec::new()
            };
            stops.splice(start..=end, replacement);
            merge_cyclic_duplicates(stops);
            return true;
        }
        i = end + 1;
    }
    false
}

fn other_end(u: VertexId, v: VertexId, base: VertexId) -> VertexId {
    if base == u {
        v
    } else {
        debug_assert_eq!(base, v);
        u
    }
}

/// Post-sweep view of the interior stops: index, base vertex, far end,
/// depth from the base.
fn peek_sites(stops: &[Point]) -> Vec<(usize, VertexId, VertexId, Rational)> {
    let z = stops.len();
    let mut out = Vec::new();
    for (i, p) in stops.iter().enumerate() {
        if let Point::Interior { u, v, .. } = p {
            let prev = &stops[(i + z - 1) % z];
            let base = prev.as_vertex().expect("interior stops are U-turns after sweeping");
            let far = other_end(*u, *v, base);
            let depth = p.offset_from(base, far).unwrap();
            out.push((i, base, far, depth));
        }
    }
    out
}

/// Remove the interior stop at `i` together with the duplicated base stop.
fn drop_peek(stops: &mut Vec<Point>, i: usize) {
    stops.remove(i);
    merge_cyclic_duplicates(stops);
}

/// R4: delete a U-turn into an edge the tour also traverses.
fn apply_drop_on_traversed(host: &Arc<Graph>, stops: &mut Vec<Point>) -> bool {
    let t = Tour::new(Arc::clone(host), stops.to_vec()).expect("valid stops");
    let traversed = t.traversal_counts();
    for (i, _base, _far, _depth) in peek_sites(stops) {
        if let Point::Interior { u, v, .. } = stops[i] {
            if traversed.contains_key(&Edge::new(u, v)) {
                drop_peek(stops, i);
                return true;
            }
        }
    }
    false
}

/// R3: resolve edges carrying more than one interior stop. Same-side peeks
/// keep only the deepest; opposite-side peeks whose spans meet become a
/// double traversal; disjoint opposite-side peeks drop one side, guarded by
/// a coverage re-check when δ is given.
fn apply_merge_peeks(host: &Arc<Graph>, stops: &mut Vec<Point>, delta: Option<&Rational>) -> bool {
    let sites = peek_sites(stops);
    let mut by_edge: BTreeMap<Edge, Vec<(usize, VertexId, VertexId, Rational)>> = BTreeMap::new();
    for s in &sites {
        if let Point::Interior { u, v, .. } = stops[s.0] {
            by_edge.entry(Edge::new(u, v)).or_default().push(*s);
        }
    }
    for (_e, group) in by_edge.iter().filter(|(_, g)| g.len() > 1) {
        // same-base pair: drop the shallower (the deeper one's segment
        // contains it, so no passed point is lost)
        for a in 0..group.len() {
            for b in a + 1..group.len() {
                let (ia, base_a, _, da) = group[a];
                let (ib, base_b, _, db) = group[b];
                if base_a == base_b {
                    let drop_idx = if da <= db { ia } else { ib };
                    drop_peek(stops, drop_idx);
                    return true;
                }
            }
        }
        // opposite bases: take the first two
        let (ia, base_a, _far_a, da) = group[0];
        let (ib, _base_b, _far_b, db) = group[1];
        if da + db >= Rational::one() {
            // spans meet: the whole edge is cheaper as a double traversal
            let far = other_end_of(&stops[ia], base_a);
            stops[ia] = Point::vertex(far);
            let ib = stops
                .iter()
                .position(|p| *p == stops_ib_point(&sites, ib))
                .expect("second peek still present");
            drop_peek(stops, ib);
            merge_cyclic_duplicates(stops);
            return true;
        }
        // disjoint spans: dropping a side loses passed points; only allowed
        // if coverage survives (or no δ was supplied)
        let candidates = if da <= db { [ia, ib] } else { [ib, ia] };
        for &idx in &candidates {
            let mut trial = stops.clone();
            drop_peek(&mut trial, idx);
            let ok = match delta {
                None => true,
                Some(d) => {
                    let before = Tour::new(Arc::clone(host), stops.to_vec()).expect("valid");
                    let after = Tour::new(Arc::clone(host), trial.clone()).expect("valid");
                    is_delta_tour(&after, d).covered || !is_delta_tour(&before, d).covered
                }
            };
            if ok {
                *stops = trial;
                return true;
            }
        }
    }
    false
}

fn other_end_of(p: &Point, base: VertexId) -> VertexId {
    match *p {
        Point::Interior { u, v, .. } => other_end(u, v, base),
        Point::Vertex(_) => unreachable!("peek site is interior"),
    }
}

fn stops_ib_point(sites: &[(usize, VertexId, VertexId, Rational)], idx: usize) -> Point {
    // the point originally at site index idx: reconstruct from its site data
    let &(_, base, far, depth) = sites.iter().find(|s| s.0 == idx).expect("site exists");
    Point::on_edge(base, far, depth).unwrap()
}

/// R5: an edge traversed three or more times loses two traversals; the
/// remaining multigraph keeps its support, so it stays connected and even,
/// and the skeleton is re-assembled by an Euler walk with the peeks
/// re-attached at the first visit of their base.
fn apply_traversal_reduce(host: &Arc<Graph>, stops: &mut Vec<Point>) -> bool {
    let t = Tour::new(Arc::clone(host), stops.to_vec()).expect("valid stops");
    let mut counts: BTreeMap<Edge, usize> = BTreeMap::new();
    for (e, c) in t.traversal_counts() {
        counts.insert(e, c);
    }
    let Some((&e, _)) = counts.iter().find(|(_, &c)| c >= 3) else {
        return false;
    };
    *counts.get_mut(&e).unwrap() -= 2;
    debug_assert!(counts[&e] >= 1);
    let peeks: Vec<(VertexId, Point)> = peek_sites(stops)
        .into_iter()
        .map(|(i, base, _, _)| (base, stops[i]))
        .collect();
    *stops = assemble_walk(host.vertex_count(), &counts, &peeks)
        .expect("reduced multigraph still connected and even");
    true
}

/// Builds a stop sequence from a traversal multigraph plus U-turn peeks,
/// inserting each base's peeks at its first visit. With an empty multigraph
/// the walk degenerates to the (unique) base vertex of the peeks.
pub(crate) fn assemble_walk(
    n: u32,
    counts: &BTreeMap<Edge, usize>,
    peeks: &[(VertexId, Point)],
) -> Option<Vec<Point>> {
    let walk: Vec<VertexId> = if counts.values().all(|&c| c == 0) {
        let base = peeks.first()?.0;
        if peeks.iter().any(|&(b, _)| b != base) {
            return None;
        }
        vec![base]
    } else {
        euler_vertex_walk(n, counts)?
    };
    let mut pending: BTreeMap<VertexId, Vec<Point>> = BTreeMap::new();
    for &(base, tip) in peeks {
        pending.entry(base).or_default().push(tip);
    }
    let mut out = Vec::new();
    for v in walk {
        out.push(Point::vertex(v));
        if let Some(tips) = pending.remove(&v) {
            for tip in tips {
                out.push(tip);
                out.push(Point::vertex(v));
            }
        }
    }
    if !pending.is_empty() {
        return None; // a peek base was never visited
    }
    // the closing wrap-around may duplicate the first vertex
    if out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    Some(out)
}
