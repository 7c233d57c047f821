//! Optimal δ-tour computation: constructive upper bounds, the exact
//! discretized search, budgeted decision, and the XP algorithm for the
//! parameter ⌈n/δ⌉.

mod search;
mod walks;
mod xp;

pub use walks::shortest_walk_between_points;
pub use xp::xp_large_delta_shortest;

pub(crate) use search::{search, SearchOptions};

use crate::coverage::is_delta_tour;
use crate::graph::{Edge, Graph};
use crate::oracle::euler_tour;
use crate::point::Point;
use crate::rational::Rational;
use crate::tour::Tour;
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("spanning tour bound requires delta >= 1/2, got {0}")]
    DeltaTooSmall(Rational),
}

static SOLVER_THREADS: AtomicUsize = AtomicUsize::new(1);

/// Worker count for the solver internals. Results are identical for every
/// value; only wall-clock time changes.
pub fn set_solver_threads(threads: usize) {
    SOLVER_THREADS.store(threads.max(1), Ordering::Relaxed);
}

pub fn solver_threads() -> usize {
    SOLVER_THREADS.load(Ordering::Relaxed)
}

/// Integral tour traversing every edge exactly twice (an Euler tour of the
/// doubled multigraph): a 0-tour, hence a δ-tour for every δ ≥ 0.
pub fn double_all_edges_tour(g: &Arc<Graph>) -> Tour {
    assert!(g.is_connected());
    if g.vertex_count() == 1 {
        return Tour::single(Arc::clone(g), Point::vertex(0)).unwrap();
    }
    let counts: BTreeMap<Edge, usize> = g.edges().iter().map(|&e| (e, 2)).collect();
    euler_tour(g, &counts).expect("doubled connected graph is Eulerian")
}

/// Integral tour stopping at every vertex with length at most 2n−2, built
/// from a doubled BFS tree. A δ-tour for every δ ≥ 1/2.
pub fn spanning_tour_upper_bound(g: &Arc<Graph>, delta: &Rational) -> Result<Tour, SolverError> {
    if *delta < Rational::new(1, 2) {
        return Err(SolverError::DeltaTooSmall(*delta));
    }
    assert!(g.is_connected());
    if g.vertex_count() == 1 {
        return Ok(Tour::single(Arc::clone(g), Point::vertex(0)).unwrap());
    }
    let dist = g.bfs_distances(0);
    let mut counts: BTreeMap<Edge, usize> = BTreeMap::new();
    for v in 1..g.vertex_count() {
        let parent = *g
            .neighbors(v)
            .iter()
            .find(|&&w| dist[w as usize] + 1 == dist[v as usize])
            .expect("BFS parent");
        counts.insert(Edge::new(v, parent), 2);
    }
    let t = euler_tour(g, &counts).expect("doubled tree is Eulerian");
    debug_assert!(t.length() <= Rational::from_int(2 * g.vertex_count() as i128 - 2));
    debug_assert!(is_delta_tour(&t, delta).covered);
    Ok(t)
}

/// Shortest δ-tour. The search space is the discretized nice-tour structure
/// space plus all tours with at most two stops; every candidate is verified
/// before acceptance. Deterministic for fixed inputs.
pub fn brute_force_shortest(g: &Arc<Graph>, delta: &Rational) -> Tour {
    search(
        g,
        delta,
        SearchOptions {
            threads: solver_threads(),
            ..SearchOptions::default()
        },
    )
    .expect("a connected graph always has a delta-tour")
}

/// A δ-tour of length at most `budget` with all stops in the candidate
/// point set and discrete length at most ⌈budget/s_δ⌉, if one exists.
pub fn brute_force_decide(g: &Arc<Graph>, delta: &Rational, budget: &Rational) -> Option<Tour> {
    if budget.is_negative() {
        return None;
    }
    search(
        g,
        delta,
        SearchOptions {
            cap: Some(*budget),
            stop_at_first: true,
            threads: 1,
            ..SearchOptions::default()
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::step_width;

    fn arc(edges: &[(u32, u32)]) -> Arc<Graph> {
        Arc::new(Graph::from_edge_list(edges).unwrap())
    }

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn double_all_edges_examples() {
        let k2 = arc(&[(0, 1)]);
        let t = double_all_edges_tour(&k2);
        assert_eq!(t.length(), Rational::from_int(2));

        let tri = arc(&[(0, 1), (1, 2), (2, 0)]);
        assert_eq!(double_all_edges_tour(&tri).length(), Rational::from_int(6));

        let star = arc(&[(0, 1), (0, 2), (0, 3)]);
        assert_eq!(double_all_edges_tour(&star).length(), Rational::from_int(6));
    }

    #[test]
    fn spanning_bound_examples() {
        let p3 = arc(&[(0, 1), (1, 2)]);
        let t = spanning_tour_upper_bound(&p3, &r(1, 2)).unwrap();
        assert_eq!(t.length(), Rational::from_int(4));
        assert!(is_delta_tour(&t, &r(1, 2)).covered);

        let k4 = arc(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let t = spanning_tour_upper_bound(&k4, &r(1, 2)).unwrap();
        assert!(t.length() <= Rational::from_int(6));
        assert!(is_delta_tour(&t, &r(1, 2)).covered);

        let single = Arc::new(Graph::from_edges(1, &[]).unwrap());
        let t = spanning_tour_upper_bound(&single, &r(1, 2)).unwrap();
        assert_eq!(t.length(), Rational::zero());

        assert_eq!(
            spanning_tour_upper_bound(&p3, &r(1, 4)).unwrap_err(),
            SolverError::DeltaTooSmall(r(1, 4))
        );
    }

    #[test]
    fn single_edge_optimum_closed_form() {
        // 2−4δ for δ < 1/2, 0 at δ = 1/2
        let k2 = arc(&[(0, 1)]);
        for (num, den) in [(1i128, 8i128), (1, 4), (3, 8)] {
            let delta = r(num, den);
            let t = brute_force_shortest(&k2, &delta);
            assert_eq!(
                t.length(),
                Rational::from_int(2) - Rational::from_int(4) * delta,
                "delta {}",
                delta
            );
        }
        let t = brute_force_shortest(&k2, &r(1, 2));
        assert_eq!(t.length(), Rational::zero());
        assert_eq!(t.stops(), &[Point::on_edge(0, 1, r(1, 2)).unwrap()]);
    }

    #[test]
    fn decide_examples() {
        let k2 = arc(&[(0, 1)]);
        assert!(brute_force_decide(&k2, &r(1, 4), &Rational::one()).is_some());
        assert!(brute_force_decide(&k2, &r(1, 4), &r(99, 100)).is_none());

        // a huge delta admits a single-stop tour of length 0
        let tri = arc(&[(0, 1), (1, 2), (2, 0)]);
        let t = brute_force_decide(&tri, &Rational::from_int(3), &Rational::zero()).unwrap();
        assert_eq!(t.length(), Rational::zero());
    }

    #[test]
    fn p3_optimum_at_half() {
        let p3 = arc(&[(0, 1), (1, 2)]);
        let t = brute_force_shortest(&p3, &r(1, 2));
        assert_eq!(t.length(), Rational::from_int(2));
    }

    #[test]
    fn p3_optimum_at_quarter() {
        // both leaf edges take a peek of depth 3/4 from the middle
        let p3 = arc(&[(0, 1), (1, 2)]);
        let t = brute_force_shortest(&p3, &r(1, 4));
        assert_eq!(t.length(), r(3, 1));
    }

    #[test]
    fn triangle_small_delta() {
        // every edge traversed once beats U-turns for δ = 1/4:
        // cycle cost 3 vs 2 + 2(1−2δ) = 3 for two traversals + one U-turn;
        // equal length is fine, the optimum is 3 either way
        let tri = arc(&[(0, 1), (1, 2), (2, 0)]);
        let t = brute_force_shortest(&tri, &r(1, 4));
        assert_eq!(t.length(), Rational::from_int(3));
    }

    #[test]
    fn shortest_below_spanning_bound() {
        let g = arc(&[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (1, 3)]);
        let delta = r(1, 2);
        let upper = spanning_tour_upper_bound(&g, &delta).unwrap();
        let opt = brute_force_shortest(&g, &delta);
        assert!(opt.length() <= upper.length());
        assert!(opt.length() <= Rational::from_int(2 * 5 - 2));
    }

    #[test]
    fn discrete_length_respects_step_bound() {
        let g = arc(&[(0, 1), (1, 2), (2, 0), (2, 3)]);
        for delta in [r(1, 4), r(1, 2), r(5, 4), r(3, 1)] {
            let t = brute_force_shortest(&g, &delta);
            let s = step_width(&delta).unwrap();
            assert!(t.discrete_length() as i128 <= (t.length() / s).ceil());
            assert!(is_delta_tour(&t, &delta).covered);
        }
    }
}
