//! XP algorithm for the parameter k = ⌈n/δ⌉.
//!
//! For n < 12k the order-of-magnitude assumptions behind the anchor lemma
//! fail and the exact solver is used directly. Otherwise some shortest tour
//! is a cyclic concatenation of shortest walks between at most 12k
//! candidate points, so those sequences are enumerated with length pruning,
//! starting from the spanning-tour upper bound.

use super::walks::shortest_walk_between_points;
use crate::coverage::is_delta_tour;
use crate::discretization::candidate_points;
use crate::graph::Graph;
use crate::point::{point_distance, Point};
use crate::rational::Rational;
use crate::tour::Tour;
use std::sync::Arc;

pub fn xp_large_delta_shortest(g: &Arc<Graph>, delta: &Rational) -> Tour {
    assert!(g.is_connected());
    assert!(*delta > Rational::zero());
    let n = g.vertex_count();
    let k = (Rational::from(n) / *delta).ceil().max(1) as u64;
    if (n as u64) < 12 * k {
        return super::brute_force_shortest(g, delta);
    }
    // n ≥ 12k forces δ ≥ 12, so the spanning bound applies
    let seed = super::spanning_tour_upper_bound(g, delta).expect("delta >= 12");
    let mut best_len = seed.length();
    let mut best = seed;
    let points = candidate_points(g, delta);
    let q_max = (12 * k) as usize;

    struct Dfs<'a> {
        g: &'a Arc<Graph>,
        delta: &'a Rational,
        points: &'a [Point],
        q_max: usize,
        seq: Vec<Point>,
        best_len: Rational,
        best: Option<Tour>,
    }

    impl Dfs<'_> {
        fn run(&mut self, acc: Rational) {
            if self.best_len.is_zero() {
                return;
            }
            // close the cycle at the current sequence
            let closing = point_distance(self.g, self.seq.last().unwrap(), &self.seq[0]);
            let total = acc + closing;
            if total < self.best_len {
                if let Some(t) = concatenate_cycle(self.g, &self.seq) {
                    if is_delta_tour(&t, self.delta).covered {
                        self.best_len = t.length();
                        self.best = Some(t);
                    }
                }
            }
            if self.seq.len() >= self.q_max {
                return;
            }
            for i in 0..self.points.len() {
                let p = self.points[i];
                let step = point_distance(self.g, self.seq.last().unwrap(), &p);
                let next = acc + step;
                if next >= self.best_len {
                    continue;
                }
                self.seq.push(p);
                self.run(next);
                self.seq.pop();
                if self.best_len.is_zero() {
                    return;
                }
            }
        }
    }

    let mut dfs = Dfs {
        g,
        delta,
        points: &points,
        q_max,
        seq: Vec::new(),
        best_len,
        best: None,
    };
    for i in 0..points.len() {
        dfs.seq.push(points[i]);
        dfs.run(Rational::zero());
        dfs.seq.pop();
        if dfs.best_len.is_zero() {
            break;
        }
    }
    if let Some(t) = dfs.best {
        best_len = dfs.best_len;
        best = t;
    }
    let _ = best_len;
    best
}

/// Cyclic concatenation of shortest walks between consecutive sequence
/// entries; collapses to a single stop when everything coincides.
fn concatenate_cycle(g: &Arc<Graph>, seq: &[Point]) -> Option<Tour> {
    let mut stops: Vec<Point> = Vec::new();
    for i in 0..seq.len() {
        let from = &seq[i];
        let to = &seq[(i + 1) % seq.len()];
        let walk = shortest_walk_between_points(g, from, to);
        // drop the shared endpoint; the next walk starts with it
        stops.extend_from_slice(&walk[..walk.len().max(1) - 1]);
    }
    // merge cyclically adjacent duplicates
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
    if stops.is_empty() {
        stops.push(seq[0]);
    }
    Tour::new(Arc::clone(g), stops).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(edges: &[(u32, u32)]) -> Arc<Graph> {
        Arc::new(Graph::from_edge_list(edges).unwrap())
    }

    #[test]
    fn delegates_below_twelve_k() {
        // star K1,9 with δ = 10: k = 1, n = 10 < 12
        let edges: Vec<(u32, u32)> = (1..10).map(|i| (0, i)).collect();
        let star = arc(&edges);
        let t = xp_large_delta_shortest(&star, &Rational::from_int(10));
        assert_eq!(t.length(), Rational::zero());

        // P3 with δ = 3: any single candidate point within distance 3 works
        let p3 = arc(&[(0, 1), (1, 2)]);
        let t = xp_large_delta_shortest(&p3, &Rational::from_int(3));
        assert_eq!(t.length(), Rational::zero());
        assert!(is_delta_tour(&t, &Rational::from_int(3)).covered);
    }

    #[test]
    fn enumeration_branch_on_a_cycle() {
        // C12 with δ = 12: n = 12 = 12k, the sequence enumeration runs and
        // the very first candidate point already covers everything
        let edges: Vec<(u32, u32)> = (0..12).map(|i| (i, (i + 1) % 12)).collect();
        let c12 = arc(&edges);
        let t = xp_large_delta_shortest(&c12, &Rational::from_int(12));
        assert_eq!(t.length(), Rational::zero());
    }

    #[test]
    fn agrees_with_exact_solver_small() {
        for edges in [
            vec![(0u32, 1u32), (1, 2), (2, 3), (3, 0)],
            vec![(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)],
        ] {
            let g = arc(&edges);
            let n = g.vertex_count() as i128;
            for delta in [
                Rational::from_int(n),
                Rational::new(n, 2),
                Rational::new(3 * n, 4),
            ] {
                let a = xp_large_delta_shortest(&g, &delta);
                let b = super::super::brute_force_shortest(&g, &delta);
                assert_eq!(a.length(), b.length(), "delta {}", delta);
            }
        }
    }
}
