//! Independent brute-force oracles for the companion problems.
//!
//! These are deliberately separate code paths from the tour solvers so the
//! two sides can certify each other. All oracles enforce instance-size caps
//! with explicit errors rather than running unbounded.

use crate::graph::{Edge, Graph, VertexId};
use crate::point::{point_distance, Point};
use crate::rational::Rational;
use crate::tour::Tour;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance with {0} vertices exceeds the cap of {1}")]
    TooLarge(u32, u32),
    #[error("multigraph has a vertex of odd degree")]
    OddDegree,
    #[error("multigraph is disconnected")]
    Disconnected,
    #[error("graph is not a split graph")]
    NotSplit,
    #[error("tour has fewer than 3 stops")]
    TooShort,
}

pub const DEFAULT_SUBSET_CAP: u32 = 20;
pub const DEFAULT_CYCLE_CAP: u32 = 12;
pub const DEFAULT_TSP_CAP: u32 = 18;

/// A set of pairwise vertex-disjoint cycles together with the four weight
/// parameters: weight = α|C| + β|V ∖ V(C)| + γ|V| + κ.
#[derive(Debug, Clone)]
pub struct CycleSubpartition {
    pub cycles: Vec<Vec<VertexId>>,
    pub alpha: Rational,
    pub beta: Rational,
    pub gamma: Rational,
    pub kappa: Rational,
}

impl CycleSubpartition {
    pub fn weight(&self, g: &Graph) -> Rational {
        let covered: usize = self.cycles.iter().map(|c| c.len()).sum();
        self.alpha * Rational::from_int(self.cycles.len() as i128)
            + self.beta * Rational::from_int(g.vertex_count() as i128 - covered as i128)
            + self.gamma * Rational::from_int(g.vertex_count() as i128)
            + self.kappa
    }

    /// Cycles must be vertex-disjoint simple cycles of `g`.
    pub fn validate(&self, g: &Graph) -> bool {
        let mut seen = vec![false; g.vertex_count() as usize];
        for c in &self.cycles {
            if c.len() < 3 {
                return false;
            }
            for (i, &v) in c.iter().enumerate() {
                if seen[v as usize] {
                    return false;
                }
                seen[v as usize] = true;
                let w = c[(i + 1) % c.len()];
                if !g.has_edge(v, w) {
                    return false;
                }
            }
        }
        true
    }
}

/// Deterministic Euler walk of a multigraph given as (edge, multiplicity)
/// pairs: the closed vertex sequence without the repeated endpoint.
///
/// Returns `None` when some degree is odd or the support is disconnected
/// (isolated vertices are ignored). The empty multigraph has no walk.
pub(crate) fn euler_vertex_walk(
    n: u32,
    multiplicities: &BTreeMap<Edge, usize>,
) -> Option<Vec<VertexId>> {
    let mut adj: Vec<Vec<VertexId>> = vec![Vec::new(); n as usize];
    let mut edge_total = 0usize;
    for (e, &m) in multiplicities {
        for _ in 0..m {
            adj[e.u as usize].push(e.v);
            adj[e.v as usize].push(e.u);
            edge_total += 1;
        }
    }
    if edge_total == 0 {
        return None;
    }
    if adj.iter().any(|l| l.len() % 2 == 1) {
        return None;
    }
    for l in adj.iter_mut() {
        l.sort_unstable();
        l.reverse(); // pop() takes the smallest neighbor first
    }
    let start = (0..n).find(|&v| !adj[v as usize].is_empty())?;
    // connectivity of the support
    {
        let mut seen = vec![false; n as usize];
        let mut stack = vec![start];
        seen[start as usize] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v as usize] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    stack.push(w);
                }
            }
        }
        if (0..n).any(|v| !adj[v as usize].is_empty() && !seen[v as usize]) {
            return None;
        }
    }
    // Hierholzer; adjacency entries are mirrored, so track how many copies
    // of each edge are still usable
    let mut remaining: HashMap<Edge, usize> = multiplicities
        .iter()
        .filter(|(_, &m)| m > 0)
        .map(|(&e, &m)| (e, m))
        .collect();
    let mut stack = vec![start];
    let mut walk = Vec::with_capacity(edge_total + 1);
    while let Some(&v) = stack.last() {
        let next = loop {
            match adj[v as usize].pop() {
                None => break None,
                Some(w) => {
                    let e = Edge::new(v, w);
                    match remaining.get_mut(&e) {
                        Some(m) if *m > 0 => {
                            *m -= 1;
                            break Some(w);
                        }
                        _ => continue, // mirror entry already consumed
                    }
                }
            }
        };
        match next {
            Some(w) => stack.push(w),
            None => {
                walk.push(v);
                stack.pop();
            }
        }
    }
    walk.reverse();
    // closed walk: first equals last; store without the duplicate
    debug_assert_eq!(walk.first(), walk.last());
    walk.pop();
    Some(walk)
}

/// Euler tour of a multigraph over the vertices of `g`, as an integral tour.
pub fn euler_tour(
    g: &Arc<Graph>,
    multiplicities: &BTreeMap<Edge, usize>,
) -> Result<Tour, OracleError> {
    let mut degree = vec![0usize; g.vertex_count() as usize];
    for (e, &m) in multiplicities {
        degree[e.u as usize] += m;
        degree[e.v as usize] += m;
    }
    if degree.iter().any(|&d| d % 2 == 1) {
        return Err(OracleError::OddDegree);
    }
    let walk =
        euler_vertex_walk(g.vertex_count(), multiplicities).ok_or(OracleError::Disconnected)?;
    let stops = walk.into_iter().map(Point::vertex).collect();
    Ok(Tour::new(Arc::clone(g), stops).expect("euler walk is a valid tour"))
}

fn check_cap(g: &Graph, cap: u32) -> Result<(), OracleError> {
    if g.vertex_count() > cap {
        Err(OracleError::TooLarge(g.vertex_count(), cap))
    } else {
        Ok(())
    }
}

fn combinations(n: u32, k: u32) -> Vec<Vec<VertexId>> {
    fn rec(n: u32, k: u32, start: u32, cur: &mut Vec<VertexId>, out: &mut Vec<Vec<VertexId>>) {
        if cur.len() as u32 == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            if n - v < k - cur.len() as u32 {
                break;
            }
            cur.push(v);
            rec(n, k, v + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, 0, &mut Vec::new(), &mut out);
    out
}

/// Subsets of `0..n` in (cardinality, lexicographic) order.
fn subsets_by_size(n: u32) -> impl Iterator<Item = Vec<VertexId>> {
    (0..=n).flat_map(move |k| combinations(n, k))
}

/// Minimum vertex cover by subset enumeration; lexicographically least among
/// the minimum-cardinality covers.
pub fn min_vertex_cover_bf(g: &Graph) -> Result<Vec<VertexId>, OracleError> {
    check_cap(g, DEFAULT_SUBSET_CAP)?;
    for set in subsets_by_size(g.vertex_count()) {
        let mut in_set = vec![false; g.vertex_count() as usize];
        for &v in &set {
            in_set[v as usize] = true;
        }
        if g.edges()
            .iter()
            .all(|e| in_set[e.u as usize] || in_set[e.v as usize])
        {
            return Ok(set);
        }
    }
    unreachable!("the full vertex set is a cover")
}

/// Minimum dominating set by subset enumeration; lexicographic tie-break.
pub fn min_dominating_set_bf(g: &Graph) -> Result<Vec<VertexId>, OracleError> {
    check_cap(g, DEFAULT_SUBSET_CAP)?;
    for set in subsets_by_size(g.vertex_count()) {
        let mut dominated = vec![false; g.vertex_count() as usize];
        for &v in &set {
            dominated[v as usize] = true;
            for &w in g.neighbors(v) {
                dominated[w as usize] = true;
            }
        }
        if dominated.iter().all(|&d| d) {
            return Ok(set);
        }
    }
    unreachable!("the full vertex set dominates")
}

/// Minimum-weight cycle subpartition by enumeration over edge subsets whose
/// degrees are all 0 or 2 and whose components are single cycles.
pub fn min_cycle_subpartition_bf(
    g: &Graph,
    alpha: Rational,
    beta: Rational,
    gamma: Rational,
    kappa: Rational,
) -> Result<CycleSubpartition, OracleError> {
    check_cap(g, DEFAULT_CYCLE_CAP)?;
    let m = g.edge_count();
    assert!(m <= 24, "edge count {} too large for subset enumeration", m);
    let mut best: Option<(Rational, CycleSubpartition)> = None;
    for mask in 0u64..(1u64 << m) {
        let mut degree = vec![0u8; g.vertex_count() as usize];
        let mut ok = true;
        for (i, e) in g.edges().iter().enumerate() {
            if mask >> i & 1 == 1 {
                degree[e.u as usize] += 1;
                degree[e.v as usize] += 1;
                if degree[e.u as usize] > 2 || degree[e.v as usize] > 2 {
                    ok = false;
                    break;
                }
            }
        }
        if !ok || degree.iter().any(|&d| d == 1) {
            continue;
        }
        // trace the cycles
        let mut adj: Vec<Vec<VertexId>> = vec![Vec::new(); g.vertex_count() as usize];
        for (i, e) in g.edges().iter().enumerate() {
            if mask >> i & 1 == 1 {
                adj[e.u as usize].push(e.v);
                adj[e.v as usize].push(e.u);
            }
        }
        let mut seen = vec![false; g.vertex_count() as usize];
        let mut cycles = Vec::new();
        for s in 0..g.vertex_count() {
            if degree[s as usize] == 2 && !seen[s as usize] {
                let mut cycle = vec![s];
                seen[s as usize] = true;
                let mut prev = s;
                let mut cur = adj[s as usize][0];
                while cur != s {
                    seen[cur as usize] = true;
                    cycle.push(cur);
                    let next = *adj[cur as usize].iter().find(|&&w| w != prev).unwrap();
                    prev = cur;
                    cur = next;
                }
                cycles.push(cycle);
            }
        }
        let cand = CycleSubpartition {
            cycles,
            alpha,
            beta,
            gamma,
            kappa,
        };
        let w = cand.weight(g);
        if best.as_ref().map_or(true, |(bw, _)| w < *bw) {
            best = Some((w, cand));
        }
    }
    Ok(best.expect("empty subpartition always exists").1)
}

/// Length of a shortest closed walk stopping at every vertex (graphic TSP),
/// by Held–Karp dynamic programming over the metric closure.
pub fn tsp_shortest_bf(g: &Graph) -> Result<Rational, OracleError> {
    check_cap(g, DEFAULT_TSP_CAP)?;
    let n = g.vertex_count() as usize;
    if n <= 1 {
        return Ok(Rational::zero());
    }
    let d = g
        .all_pairs_distances()
        .map_err(|_| OracleError::Disconnected)?;
    const INF: u32 = u32::MAX / 2;
    // dp[mask][last]: shortest walk from vertex 0 visiting exactly the
    // closure-vertices of mask, ending at last (0 always in mask)
    let full = 1usize << n;
    let mut dp = vec![vec![INF; n]; full];
    dp[1][0] = 0;
    for mask in 1..full {
        if mask & 1 == 0 {
            continue;
        }
        for last in 0..n {
            let cur = dp[mask][last];
            if cur == INF {
                continue;
            }
            for next in 1..n {
                if mask >> next & 1 == 1 {
                    continue;
                }
                let cand = cur + d[last][next];
                let slot = &mut dp[mask | 1 << next][next];
                if cand < *slot {
                    *slot = cand;
                }
            }
        }
    }
    let best = (0..n)
        .map(|last| dp[full - 1][last] + d[last][0])
        .min()
        .unwrap();
    Ok(Rational::from_int(best as i128))
}

/// Split partition (C, I): degree-ordered greedy construction with a
/// certificate check; C is nonempty for connected graphs on ≥ 2 vertices.
pub fn split_partition(g: &Graph) -> Result<(Vec<VertexId>, Vec<VertexId>), OracleError> {
    let n = g.vertex_count();
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let mut order: Vec<VertexId> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    // try every prefix of the degree order as the clique side
    for cut in (0..=n as usize).rev() {
        let clique = &order[..cut];
        let indep = &order[cut..];
        let clique_ok = clique
            .iter()
            .enumerate()
            .all(|(i, &u)| clique[i + 1..].iter().all(|&v| g.has_edge(u, v)));
        if !clique_ok {
            continue;
        }
        let indep_ok = indep
            .iter()
            .enumerate()
            .all(|(i, &u)| indep[i + 1..].iter().all(|&v| !g.has_edge(u, v)));
        if indep_ok {
            let mut c: Vec<VertexId> = clique.to_vec();
            let mut i: Vec<VertexId> = indep.to_vec();
            c.sort_unstable();
            i.sort_unstable();
            return Ok((c, i));
        }
    }
    Err(OracleError::NotSplit)
}

/// Vertices with no tour stop strictly within distance 1.
pub fn neglected_vertices(t: &Tour) -> Result<Vec<VertexId>, OracleError> {
    if t.stops().len() < 3 {
        return Err(OracleError::TooShort);
    }
    let g = t.graph();
    let mut out = Vec::new();
    for v in 0..g.vertex_count() {
        let p = Point::vertex(v);
        let neglected = t
            .stops()
            .iter()
            .all(|q| point_distance(g, &p, q) >= Rational::one());
        if neglected {
            out.push(v);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(edges: &[(u32, u32)]) -> Arc<Graph> {
        Arc::new(Graph::from_edge_list(edges).unwrap())
    }

    fn multiset(edges: &[(u32, u32, usize)]) -> BTreeMap<Edge, usize> {
        edges
            .iter()
            .map(|&(u, v, m)| (Edge::new(u, v), m))
            .collect()
    }

    #[test]
    fn euler_triangle_and_doubled_edge() {
        let tri = arc(&[(0, 1), (1, 2), (2, 0)]);
        let t = euler_tour(&tri, &multiset(&[(0, 1, 1), (1, 2, 1), (2, 0, 1)])).unwrap();
        assert_eq!(t.length(), Rational::from_int(3));

        let k2 = arc(&[(0, 1)]);
        let t = euler_tour(&k2, &multiset(&[(0, 1, 2)])).unwrap();
        assert_eq!(t.length(), Rational::from_int(2));
        assert_eq!(t.stops().len(), 2);
    }

    #[test]
    fn euler_two_triangles_sharing_a_vertex() {
        let g = arc(&[(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)]);
        let ms = multiset(&[
            (0, 1, 1),
            (1, 2, 1),
            (2, 0, 1),
            (0, 3, 1),
            (3, 4, 1),
            (4, 0, 1),
        ]);
        let t = euler_tour(&g, &ms).unwrap();
        assert_eq!(t.length(), Rational::from_int(6));
        // each edge used exactly its multiplicity
        let counts = t.traversal_counts();
        for (e, m) in ms {
            assert_eq!(counts.get(&e).copied().unwrap_or(0), m);
        }
    }

    #[test]
    fn euler_rejects_odd_and_disconnected() {
        let p3 = arc(&[(0, 1), (1, 2)]);
        assert_eq!(
            euler_tour(&p3, &multiset(&[(0, 1, 1), (1, 2, 1)])).unwrap_err(),
            OracleError::OddDegree
        );
        let two = arc(&[(0, 1), (2, 3)]);
        assert_eq!(
            euler_tour(&two, &multiset(&[(0, 1, 2), (2, 3, 2)])).unwrap_err(),
            OracleError::Disconnected
        );
    }

    #[test]
    fn vertex_cover_examples() {
        let k2 = arc(&[(0, 1)]);
        assert_eq!(min_vertex_cover_bf(&k2).unwrap(), vec![0]);

        let k4 = arc(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(min_vertex_cover_bf(&k4).unwrap().len(), 3);

        let star = arc(&[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]);
        assert_eq!(min_vertex_cover_bf(&star).unwrap(), vec![0]);
    }

    #[test]
    fn cubic_cover_at_least_half() {
        // cubic graphs need |Z| ≥ n/2
        let k4 = arc(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert!(min_vertex_cover_bf(&k4).unwrap().len() * 2 >= 4);
        let k33 = arc(&[
            (0, 3),
            (0, 4),
            (0, 5),
            (1, 3),
            (1, 4),
            (1, 5),
            (2, 3),
            (2, 4),
            (2, 5),
        ]);
        assert!(min_vertex_cover_bf(&k33).unwrap().len() * 2 >= 6);
    }

    #[test]
    fn dominating_set_examples() {
        let k4 = arc(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(min_dominating_set_bf(&k4).unwrap().len(), 1);
        let p3 = arc(&[(0, 1), (1, 2)]);
        assert_eq!(min_dominating_set_bf(&p3).unwrap(), vec![1]);
        let c6 = arc(&[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]);
        assert_eq!(min_dominating_set_bf(&c6).unwrap().len(), 2);
    }

    #[test]
    fn dominating_set_clique_side_optimum_on_split_graphs() {
        // a split graph: clique {0,1,2}, independent {3,4} attached
        let g = arc(&[(0, 1), (0, 2), (1, 2), (0, 3), (1, 4)]);
        let (c, _i) = split_partition(&g).unwrap();
        let opt = min_dominating_set_bf(&g).unwrap();
        // re-minimize restricted to the clique side
        let mut best_clique: Option<usize> = None;
        for k in 0..=c.len() {
            'outer: for comb in combinations(c.len() as u32, k as u32) {
                let set: Vec<VertexId> = comb.iter().map(|&i| c[i as usize]).collect();
                let mut dominated = vec![false; g.vertex_count() as usize];
                for &v in &set {
                    dominated[v as usize] = true;
                    for &w in g.neighbors(v) {
                        dominated[w as usize] = true;
                    }
                }
                if dominated.iter().all(|&d| d) {
                    best_clique = Some(k);
                    break 'outer;
                }
            }
            if best_clique.is_some() {
                break;
            }
        }
        assert_eq!(best_clique.unwrap(), opt.len());
    }

    #[test]
    fn cycle_subpartition_examples() {
        let r = |n, d| Rational::new(n, d);
        // params for δ = 1/4: (4δ, 1, 2−2δ, −4δ)
        let (a, b, gm, k) = (r(1, 1), r(1, 1), r(3, 2), r(-1, 1));
        let k4 = arc(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let best = min_cycle_subpartition_bf(&k4, a, b, gm, k).unwrap();
        assert_eq!(best.weight(&k4), Rational::from_int(6));
        assert!(best.validate(&k4));

        let k33 = arc(&[
            (0, 3),
            (0, 4),
            (0, 5),
            (1, 3),
            (1, 4),
            (1, 5),
            (2, 3),
            (2, 4),
            (2, 5),
        ]);
        let best = min_cycle_subpartition_bf(&k33, a, b, gm, k).unwrap();
        assert_eq!(best.weight(&k33), Rational::from_int(9));

        // forests admit only the empty subpartition
        let star = arc(&[(0, 1), (0, 2), (0, 3)]);
        let best = min_cycle_subpartition_bf(&star, a, b, gm, k).unwrap();
        assert!(best.cycles.is_empty());
        assert_eq!(best.weight(&star), r(4, 1) + r(6, 1) - r(1, 1));
    }

    #[test]
    fn tsp_examples() {
        let tri = arc(&[(0, 1), (1, 2), (2, 0)]);
        assert_eq!(tsp_shortest_bf(&tri).unwrap(), Rational::from_int(3));
        let k33 = arc(&[
            (0, 3),
            (0, 4),
            (0, 5),
            (1, 3),
            (1, 4),
            (1, 5),
            (2, 3),
            (2, 4),
            (2, 5),
        ]);
        assert_eq!(tsp_shortest_bf(&k33).unwrap(), Rational::from_int(6));
        let star = arc(&[(0, 1), (0, 2), (0, 3)]);
        assert_eq!(tsp_shortest_bf(&star).unwrap(), Rational::from_int(6));
    }

    #[test]
    fn split_partition_examples() {
        let k4 = arc(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let (c, i) = split_partition(&k4).unwrap();
        assert_eq!(c.len(), 4);
        assert!(i.is_empty());

        let star = arc(&[(0, 1), (0, 2), (0, 3)]);
        let (c, i) = split_partition(&star).unwrap();
        assert!(c.contains(&0));
        assert_eq!(c.len() + i.len(), 4);
        for (x, &u) in c.iter().enumerate() {
            for &v in &c[x + 1..] {
                assert!(star.has_edge(u, v));
            }
        }
        for (x, &u) in i.iter().enumerate() {
            for &v in &i[x + 1..] {
                assert!(!star.has_edge(u, v));
            }
        }

        let c5 = arc(&[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert_eq!(split_partition(&c5).unwrap_err(), OracleError::NotSplit);
    }

    #[test]
    fn neglected_vertices_examples() {
        let tri = arc(&[(0, 1), (1, 2), (2, 0)]);
        let t = Tour::new(
            Arc::clone(&tri),
            vec![Point::vertex(0), Point::vertex(1), Point::vertex(2)],
        )
        .unwrap();
        assert!(neglected_vertices(&t).unwrap().is_empty());

        // star K1,5 with interior peeks toward leaves 1 and 2 only
        let star = arc(&[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]);
        let half = Rational::new(1, 2);
        let t = Tour::new(
            Arc::clone(&star),
            vec![
                Point::vertex(0),
                Point::on_edge(0, 1, half).unwrap(),
                Point::vertex(0),
                Point::on_edge(0, 2, half).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(neglected_vertices(&t).unwrap(), vec![3, 4, 5]);
    }
}
