//! Simple undirected unweighted graphs with exact all-pairs vertex distances.

use std::sync::OnceLock;
use thiserror::Error;

pub type VertexId = u32;

/// An unordered edge, stored with the smaller endpoint first.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
}

impl Edge {
    pub fn new(a: VertexId, b: VertexId) -> Self {
        if a <= b {
            Edge { u: a, v: b }
        } else {
            Edge { u: b, v: a }
        }
    }

    pub fn has_endpoint(&self, w: VertexId) -> bool {
        self.u == w || self.v == w
    }

    /// The endpoint other than `w`; panics if `w` is not an endpoint.
    pub fn other(&self, w: VertexId) -> VertexId {
        if w == self.u {
            self.v
        } else {
            assert_eq!(w, self.v);
            self.u
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("loop edge at vertex {0}")]
    LoopEdge(VertexId),
    #[error("parallel edge {0}-{1}")]
    ParallelEdge(VertexId, VertexId),
    #[error("vertex id {0} out of range for {1} vertices")]
    DanglingVertexId(VertexId, u32),
    #[error("graph is disconnected")]
    Disconnected,
}

/// A simple undirected graph: CSR adjacency plus a sorted edge list.
///
/// The distance matrix is filled once on first use and shared afterwards;
/// everything else is immutable, so a `Graph` can be shared across threads.
#[derive(Debug)]
pub struct Graph {
    n: u32,
    edges: Vec<Edge>,
    adj_offsets: Vec<u32>,
    adj_targets: Vec<VertexId>,
    distances: OnceLock<Vec<Vec<u32>>>,
}

/// Marker for unreachable vertex pairs in the distance matrix.
/// Connected inputs never produce it.
pub const UNREACHABLE: u32 = u32::MAX;

impl Graph {
    /// Builds a graph on vertices `0..n` from an edge list.
    ///
    /// Rejects loops, parallel edges (in either orientation) and endpoint
    /// ids outside `0..n`.
    pub fn from_edges(n: u32, edge_list: &[(VertexId, VertexId)]) -> Result<Self, GraphError> {
        let mut edges = Vec::with_capacity(edge_list.len());
        for &(a, b) in edge_list {
            if a == b {
                return Err(GraphError::LoopEdge(a));
            }
            if a >= n {
                return Err(GraphError::DanglingVertexId(a, n));
            }
            if b >= n {
                return Err(GraphError::DanglingVertexId(b, n));
            }
            edges.push(Edge::new(a, b));
        }
        edges.sort_unstable();
        for w in edges.windows(2) {
            if w[0] == w[1] {
                return Err(GraphError::ParallelEdge(w[0].u, w[0].v));
            }
        }
        let mut degrees = vec![0u32; n as usize];
        for e in &edges {
            degrees[e.u as usize] += 1;
            degrees[e.v as usize] += 1;
        }
        let mut adj_offsets = Vec::with_capacity(n as usize + 1);
        let mut acc = 0u32;
        adj_offsets.push(0);
        for d in &degrees {
            acc += d;
            adj_offsets.push(acc);
        }
        let mut cursor: Vec<u32> = adj_offsets[..n as usize].to_vec();
        let mut adj_targets = vec![0 as VertexId; 2 * edges.len()];
        for e in &edges {
            adj_targets[cursor[e.u as usize] as usize] = e.v;
            cursor[e.u as usize] += 1;
            adj_targets[cursor[e.v as usize] as usize] = e.u;
            cursor[e.v as usize] += 1;
        }
        // neighbor lists come out sorted because edges are sorted by (u, v)
        // only for the u side; sort both for determinism
        for v in 0..n as usize {
            let (lo, hi) = (adj_offsets[v] as usize, adj_offsets[v + 1] as usize);
            adj_targets[lo..hi].sort_unstable();
        }
        Ok(Graph {
            n,
            edges,
            adj_offsets,
            adj_targets,
            distances: OnceLock::new(),
        })
    }

    /// Convenience builder: vertex count inferred as `max id + 1`.
    pub fn from_edge_list(edge_list: &[(VertexId, VertexId)]) -> Result<Self, GraphError> {
        let n = edge_list
            .iter()
            .map(|&(a, b)| a.max(b) + 1)
            .max()
            .unwrap_or(0);
        Self::from_edges(n, edge_list)
    }

    pub fn vertex_count(&self) -> u32 {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        if a == b || a >= self.n || b >= self.n {
            return false;
        }
        let e = Edge::new(a, b);
        self.edges.binary_search(&e).is_ok()
    }

    /// Index of the edge in the sorted edge list.
    pub fn edge_index(&self, e: Edge) -> Option<usize> {
        self.edges.binary_search(&e).ok()
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        let (lo, hi) = (
            self.adj_offsets[v as usize] as usize,
            self.adj_offsets[v as usize + 1] as usize,
        );
        &self.adj_targets[lo..hi]
    }

    pub fn degree(&self, v: VertexId) -> u32 {
        self.adj_offsets[v as usize + 1] - self.adj_offsets[v as usize]
    }

    /// True iff every vertex is reachable from vertex 0 (or n ≤ 1).
    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let mut seen = vec![false; self.n as usize];
        let mut stack = vec![0 as VertexId];
        seen[0] = true;
        let mut count = 1u32;
        while let Some(v) = stack.pop() {
            for &w in self.neighbors(v) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// All-pairs shortest-path matrix, computed once and cached.
    ///
    /// Returns an error if the graph is disconnected.
    pub fn all_pairs_distances(&self) -> Result<&Vec<Vec<u32>>, GraphError> {
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(self.distances.get_or_init(|| self.compute_distances()))
    }

    /// Shortest-path distance between two vertices of a connected graph.
    pub fn vertex_distance(&self, a: VertexId, b: VertexId) -> u32 {
        self.all_pairs_distances().expect("connected graph")[a as usize][b as usize]
    }

    fn compute_distances(&self) -> Vec<Vec<u32>> {
        let n = self.n as usize;
        // Floyd–Warshall on small graphs, repeated BFS otherwise; both are
        // exact, BFS is what the big generated instances can afford.
        if n <= 128 {
            let mut d = vec![vec![UNREACHABLE; n]; n];
            for (i, row) in d.iter_mut().enumerate() {
                row[i] = 0;
            }
            for e in &self.edges {
                d[e.u as usize][e.v as usize] = 1;
                d[e.v as usize][e.u as usize] = 1;
            }
            for k in 0..n {
                for i in 0..n {
                    let dik = d[i][k];
                    if dik == UNREACHABLE {
                        continue;
                    }
                    for j in 0..n {
                        let dkj = d[k][j];
                        if dkj == UNREACHABLE {
                            continue;
                        }
                        if dik + dkj < d[i][j] {
                            d[i][j] = dik + dkj;
                        }
                    }
                }
            }
            d
        } else {
            (0..self.n).map(|s| self.bfs_distances(s)).collect()
        }
    }

    /// Single-source BFS distances (UNREACHABLE where not reachable).
    pub fn bfs_distances(&self, source: VertexId) -> Vec<u32> {
        let mut dist = vec![UNREACHABLE; self.n as usize];
        let mut queue = std::collections::VecDeque::new();
        dist[source as usize] = 0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v as usize];
            for &w in self.neighbors(v) {
                if dist[w as usize] == UNREACHABLE {
                    dist[w as usize] = dv + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// One shortest path between two vertices, as a vertex sequence
    /// including both ends. Deterministic: always takes the smallest-id
    /// predecessor.
    pub fn shortest_vertex_path(&self, a: VertexId, b: VertexId) -> Vec<VertexId> {
        if a == b {
            return vec![a];
        }
        let d = self.all_pairs_distances().expect("connected graph");
        let mut path = vec![b];
        let mut cur = b;
        while cur != a {
            let need = d[a as usize][cur as usize] - 1;
            let next = *self
                .neighbors(cur)
                .iter()
                .find(|&&w| d[a as usize][w as usize] == need)
                .expect("predecessor on shortest path");
            path.push(next);
            cur = next;
        }
        path.reverse();
        path
    }

    /// Induced subgraph on `keep` (ids are remapped to 0..keep.len() in the
    /// order given); returns the subgraph and the map new id -> old id.
    pub fn induced_subgraph(&self, keep: &[VertexId]) -> (Graph, Vec<VertexId>) {
        let mut old_to_new = vec![u32::MAX; self.n as usize];
        for (new, &old) in keep.iter().enumerate() {
            old_to_new[old as usize] = new as u32;
        }
        let mut edges = Vec::new();
        for e in &self.edges {
            let (nu, nv) = (old_to_new[e.u as usize], old_to_new[e.v as usize]);
            if nu != u32::MAX && nv != u32::MAX {
                edges.push((nu, nv));
            }
        }
        let g = Graph::from_edges(keep.len() as u32, &edges).expect("induced subgraph is simple");
        (g, keep.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_smallest_graph() {
        let g = Graph::from_edge_list(&[(0, 1)]).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn builds_triangle() {
        let g = Graph::from_edge_list(&[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert!(g.has_edge(2, 1));
    }

    #[test]
    fn rejects_parallel_edges() {
        assert_eq!(
            Graph::from_edge_list(&[(0, 1), (0, 1)]).unwrap_err(),
            GraphError::ParallelEdge(0, 1)
        );
        assert_eq!(
            Graph::from_edge_list(&[(0, 1), (1, 0)]).unwrap_err(),
            GraphError::ParallelEdge(0, 1)
        );
    }

    #[test]
    fn rejects_loops_and_dangling_ids() {
        assert_eq!(
            Graph::from_edges(3, &[(1, 1)]).unwrap_err(),
            GraphError::LoopEdge(1)
        );
        assert_eq!(
            Graph::from_edges(2, &[(0, 2)]).unwrap_err(),
            GraphError::DanglingVertexId(2, 2)
        );
    }

    #[test]
    fn connectivity() {
        let triangle = Graph::from_edge_list(&[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(triangle.is_connected());
        let two_edges = Graph::from_edge_list(&[(0, 1), (2, 3)]).unwrap();
        assert!(!two_edges.is_connected());
        let lonely = Graph::from_edges(1, &[]).unwrap();
        assert!(lonely.is_connected());
    }

    #[test]
    fn distances() {
        let path = Graph::from_edge_list(&[(0, 1), (1, 2)]).unwrap();
        let d = path.all_pairs_distances().unwrap();
        assert_eq!(d[0][2], 2);
        assert_eq!(d[2][0], 2);
        assert_eq!(d[1][1], 0);

        let triangle = Graph::from_edge_list(&[(0, 1), (1, 2), (2, 0)]).unwrap();
        let d = triangle.all_pairs_distances().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(d[i][j], u32::from(i != j));
            }
        }

        let c4 = Graph::from_edge_list(&[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert_eq!(c4.vertex_distance(0, 2), 2);
    }

    #[test]
    fn disconnected_distance_errors() {
        let g = Graph::from_edge_list(&[(0, 1), (2, 3)]).unwrap();
        assert_eq!(g.all_pairs_distances().unwrap_err(), GraphError::Disconnected);
    }

    #[test]
    fn shortest_path_endpoints() {
        let c4 = Graph::from_edge_list(&[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let p = c4.shortest_vertex_path(0, 2);
        assert_eq!(p.len(), 3);
        assert_eq!(p[0], 0);
        assert_eq!(p[2], 2);
    }
}
