//! Exact search over the canonical structure of optimal tours.
//!
//! A shortest δ-tour may be assumed to be nice (or have ≤ 2 stops) with all
//! stops at discretized offsets. A nice tour decomposes into a connected
//! even traversal multigraph on the stopped vertices plus U-turn peeks of
//! discretized depth, and its covered set depends only on that structure.
//! The search enumerates the structures exactly:
//!
//! - tours with at most two stops, directly over candidate points;
//! - for δ < 1/2, the per-edge form of shortest tours fixes the stopped
//!   vertices to the non-leaf vertices and each edge to "traversed", a
//!   U-turn of depth 1−2δ (internal) or 1−δ (leaf edge), leaving only the
//!   traversal support to optimize;
//! - for δ ≥ 1/2, the stopped vertex set is enumerated (smallest first,
//!   collapsing false twins), the walk cost is a minimum closed walk through
//!   it, and the peeks are optimized exactly from the per-edge coverage
//!   characterizations.
//!
//! Every accepted candidate is re-verified by the interval verifier before
//! it can become the incumbent, so outputs are always sound.

use super::walks::{
    closed_walk_visiting, expand_closure_order, ClosedWalkTable, CLOSED_WALK_TABLE_MAX,
};
use crate::coverage::is_delta_tour;
use crate::discretization::{candidate_points, interior_depths, offset_witnesses, step_width};
use crate::graph::{Edge, Graph, VertexId};
use crate::normalize::assemble_walk;
use crate::point::Point;
use crate::rational::Rational;
use crate::tour::Tour;
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

#[derive(Clone, Copy)]
pub(crate) struct SearchOptions {
    /// Accept only tours of length at most this; prune everything above.
    pub cap: Option<Rational>,
    /// Return the first acceptable tour instead of the optimum.
    pub stop_at_first: bool,
    /// Restrict to nice (≥ 3 stop) candidates; used by the kernel decision
    /// procedure, which needs witnesses that survive the twin mapping.
    pub require_nice: bool,
    pub threads: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            cap: None,
            stop_at_first: false,
            require_nice: false,
            threads: 1,
        }
    }
}

pub(crate) struct Ctx<'a> {
    g: &'a Arc<Graph>,
    delta: &'a Rational,
    opts: SearchOptions,
    step: Rational,
    best: Option<(Rational, Tour)>,
    done: bool,
}

impl<'a> Ctx<'a> {
    fn prune_value(&self, v: &Rational) -> bool {
        if let Some(cap) = &self.opts.cap {
            if *v > *cap {
                return true;
            }
        }
        if let Some((b, _)) = &self.best {
            if *v >= *b {
                return true;
            }
        }
        false
    }

    /// Verify and possibly install a candidate. Returns true if accepted.
    fn consider(&mut self, t: Tour) -> bool {
        let len = t.length();
        if self.prune_value(&len) {
            return false;
        }
        if self.opts.require_nice
            && !(t.discrete_length() >= 3 && t.is_nice().expect("length checked"))
        {
            return false;
        }
        if !is_delta_tour(&t, self.delta).covered {
            return false;
        }
        // discrete length respects the discretization bound
        assert!(
            t.discrete_length() as i128 <= (len / self.step).ceil(),
            "discrete length {} exceeds ceil(length/step) for length {} step {}",
            t.discrete_length(),
            len,
            self.step
        );
        let zero = len.is_zero();
        self.best = Some((len, t));
        if self.opts.stop_at_first || zero {
            self.done = true;
        }
        true
    }
}

/// Core search; `None` only in budgeted mode when no tour fits the cap.
pub(crate) fn search(g: &Arc<Graph>, delta: &Rational, opts: SearchOptions) -> Option<Tour> {
    assert!(g.is_connected(), "solver requires a connected graph");
    assert!(*delta > Rational::zero(), "solver requires delta > 0");
    let n = g.vertex_count();
    assert!(n <= 64, "structural solver supports at most 64 vertices");
    let mut ctx = Ctx {
        g,
        delta,
        opts,
        step: step_width(delta).expect("positive delta"),
        best: None,
        done: false,
    };
    if n == 1 {
        ctx.consider(Tour::single(Arc::clone(g), Point::vertex(0)).unwrap());
        return ctx.best.map(|(_, t)| t);
    }

    // cheap verified upper bounds
    ctx.consider(super::double_all_edges_tour(g));
    if !ctx.done && *delta >= Rational::new(1, 2) {
        if let Ok(t) = super::spanning_tour_upper_bound(g, delta) {
            ctx.consider(t);
        }
    }
    if !ctx.done && !ctx.opts.require_nice {
        two_stop_layer(&mut ctx);
    }
    if !ctx.done {
        if *delta < Rational::new(1, 2) {
            regime_small_delta(&mut ctx);
        } else {
            regime_large_delta(&mut ctx);
        }
    }
    ctx.best.map(|(_, t)| t)
}

/// Tours with one stop (any candidate point) or two stops on a common edge.
fn two_stop_layer(ctx: &mut Ctx) {
    let g = Arc::clone(ctx.g);
    for p in candidate_points(&g, ctx.delta) {
        if ctx.consider(Tour::single(Arc::clone(&g), p).unwrap()) && ctx.done {
            return;
        }
    }
    let offsets: Vec<Rational> = offset_witnesses(ctx.delta).into_iter().collect();
    let two = Rational::from_int(2);
    for &e in g.edges() {
        for i in 0..offsets.len() {
            for j in (i + 1)..offsets.len() {
                let len = two * (offsets[j] - offsets[i]);
                if ctx.prune_value(&len) {
                    continue;
                }
                let a = Point::on_edge(e.u, e.v, offsets[i]).unwrap();
                let b = Point::on_edge(e.u, e.v, offsets[j]).unwrap();
                let t = Tour::new(Arc::clone(&g), vec![a, b]).unwrap();
                if ctx.consider(t) && ctx.done {
                    return;
                }
            }
        }
    }
}

/// δ < 1/2: the visited vertices are exactly the non-leaf vertices; leaf
/// edges carry a forced peek of depth 1−δ, omitted internal edges one of
/// depth 1−2δ. Only the traversal support S over the internal edges is
/// searched, with the doubled part being a minimum T-join inside S.
fn regime_small_delta(ctx: &mut Ctx) {
    let g = Arc::clone(ctx.g);
    let n = g.vertex_count();
    let internal: Vec<VertexId> = (0..n).filter(|&v| g.degree(v) >= 2).collect();
    if internal.is_empty() {
        return; // K2: the two-stop layer is complete
    }
    let one = Rational::one();
    let two = Rational::from_int(2);
    let leaf_depth = one - *ctx.delta;
    let uturn_depth = one - two * *ctx.delta;
    let mut leaf_peeks: Vec<(VertexId, Point)> = Vec::new();
    let mut leaf_cost = Rational::zero();
    let mut int_edges: Vec<Edge> = Vec::new();
    for &e in g.edges() {
        let u_leaf = g.degree(e.u) == 1;
        let v_leaf = g.degree(e.v) == 1;
        if u_leaf || v_leaf {
            let (base, leaf) = if u_leaf { (e.v, e.u) } else { (e.u, e.v) };
            leaf_peeks.push((base, Point::on_edge(base, leaf, leaf_depth).unwrap()));
            leaf_cost += two * leaf_depth;
        } else {
            int_edges.push(e);
        }
    }

    let is_internal: Vec<bool> = (0..n).map(|v| g.degree(v) >= 2).collect();
    if internal.len() == 1 {
        // all edges are leaf edges around a single center
        let counts = BTreeMap::new();
        if let Some(stops) = assemble_walk(n, &counts, &leaf_peeks) {
            let t = Tour::new(Arc::clone(&g), stops).unwrap();
            ctx.consider(t);
        }
        return;
    }

    let penalty = two * uturn_depth;
    let m = int_edges.len();
    let per_edge_floor = Rational::one().min(penalty);
    // degrees within the internal edge set
    let full_deg: Vec<u32> = (0..n)
        .map(|v| {
            int_edges
                .iter()
                .filter(|e| e.has_endpoint(v))
                .count() as u32
        })
        .collect();

    struct DfsState<'b, 'c> {
        ctx: &'b mut Ctx<'c>,
        int_edges: Vec<Edge>,
        chosen: Vec<bool>,
        chosen_deg: Vec<u32>,
        undecided_deg: Vec<u32>,
        is_internal: Vec<bool>,
        internal: Vec<VertexId>,
        leaf_peeks: Vec<(VertexId, Point)>,
        leaf_cost: Rational,
        penalty: Rational,
        per_edge_floor: Rational,
        uturn_depth: Rational,
    }

    impl DfsState<'_, '_> {
        fn run(&mut self, i: usize, chosen_count: usize) {
            if self.ctx.done {
                return;
            }
            let m = self.int_edges.len();
            let omitted = i - chosen_count;
            let partial = Rational::from_int(chosen_count as i128)
                + self.penalty * Rational::from_int(omitted as i128)
                + self.leaf_cost
                + self.per_edge_floor * Rational::from_int((m - i) as i128);
            if self.ctx.prune_value(&partial) {
                return;
            }
            if i == m {
                self.finish(chosen_count);
                return;
            }
            let e = self.int_edges[i];
            self.undecided_deg[e.u as usize] -= 1;
            self.undecided_deg[e.v as usize] -= 1;
            let order = if Rational::one() <= self.penalty {
                [true, false]
            } else {
                [false, true]
            };
            for take in order {
                if !take {
                    // omitting must not strand a vertex with no traversals left
                    let strands = |v: VertexId| {
                        self.chosen_deg[v as usize] == 0 && self.undecided_deg[v as usize] == 0
                    };
                    if strands(e.u) || strands(e.v) {
                        continue;
                    }
                    self.run(i + 1, chosen_count);
                } else {
                    self.chosen[i] = true;
                    self.chosen_deg[e.u as usize] += 1;
                    self.chosen_deg[e.v as usize] += 1;
                    self.run(i + 1, chosen_count + 1);
                    self.chosen_deg[e.u as usize] -= 1;
                    self.chosen_deg[e.v as usize] -= 1;
                    self.chosen[i] = false;
                }
                if self.ctx.done {
                    break;
                }
            }
            self.undecided_deg[e.u as usize] += 1;
            self.undecided_deg[e.v as usize] += 1;
        }

        fn finish(&mut self, chosen_count: usize) {
            let s_edges: Vec<Edge> = self
                .int_edges
                .iter()
                .zip(&self.chosen)
                .filter(|(_, &c)| c)
                .map(|(&e, _)| e)
                .collect();
            // S must span the internal vertices and connect them
            if self
                .internal
                .iter()
                .any(|&v| self.chosen_deg[v as usize] == 0)
            {
                return;
            }
            if !spans_connected(&s_edges, &self.internal) {
                return;
            }
            let Some(join) = min_tjoin(&s_edges, &self.internal) else {
                return;
            };
            let total = Rational::from_int((s_edges.len() + join.len()) as i128)
                + self.penalty
                    * Rational::from_int((self.int_edges.len() - chosen_count) as i128)
                + self.leaf_cost;
            if self.ctx.prune_value(&total) {
                return;
            }
            let mut counts: BTreeMap<Edge, usize> = BTreeMap::new();
            for &e in &s_edges {
                *counts.entry(e).or_insert(0) += 1;
            }
            for &e in &join {
                *counts.entry(e).or_insert(0) += 1;
            }
            let mut peeks = self.leaf_peeks.clone();
            for (&e, &c) in self.int_edges.iter().zip(&self.chosen) {
                if !c {
                    peeks.push((e.u, Point::on_edge(e.u, e.v, self.uturn_depth).unwrap()));
                }
            }
            peeks.sort_by_key(|&(base, tip)| (base, tip));
            let n = self.ctx.g.vertex_count();
            if let Some(stops) = assemble_walk(n, &counts, &peeks) {
                let t = Tour::new(Arc::clone(self.ctx.g), stops).unwrap();
                debug_assert_eq!(t.length(), total);
                self.ctx.consider(t);
            }
        }
    }

    let mut st = DfsState {
        ctx,
        int_edges,
        chosen: vec![false; m],
        chosen_deg: vec![0; n as usize],
        undecided_deg: full_deg,
        is_internal,
        internal,
        leaf_peeks,
        leaf_cost,
        penalty,
        per_edge_floor,
        uturn_depth,
    };
    let _ = &st.is_internal;
    st.run(0, 0);
}

/// Connectivity of (vertices, edges) restricted to `vertices`.
fn spans_connected(edges: &[Edge], vertices: &[VertexId]) -> bool {
    if vertices.len() <= 1 {
        return true;
    }
    let mut adj: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for e in edges {
        adj.entry(e.u).or_default().push(e.v);
        adj.entry(e.v).or_default().push(e.u);
    }
    let mut seen = BTreeSet::new();
    let mut stack = vec![vertices[0]];
    seen.insert(vertices[0]);
    while let Some(v) = stack.pop() {
        if let Some(ns) = adj.get(&v) {
            for &w in ns {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
    }
    vertices.iter().all(|v| seen.contains(v))
}

/// Minimum set J ⊆ S with ∂J = odd-degree vertices of S, as the symmetric
/// difference of shortest paths inside S of a minimum pairing.
fn min_tjoin(s_edges: &[Edge], vertices: &[VertexId]) -> Option<Vec<Edge>> {
    let mut deg: BTreeMap<VertexId, u32> = BTreeMap::new();
    for e in s_edges {
        *deg.entry(e.u).or_insert(0) += 1;
        *deg.entry(e.v).or_insert(0) += 1;
    }
    let odds: Vec<VertexId> = vertices
        .iter()
        .copied()
        .filter(|v| deg.get(v).map_or(false, |d| d % 2 == 1))
        .collect();
    if odds.is_empty() {
        return Some(Vec::new());
    }
    // BFS inside the S-subgraph from every odd vertex
    let mut adj: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for e in s_edges {
        adj.entry(e.u).or_default().push(e.v);
        adj.entry(e.v).or_default().push(e.u);
    }
    let bfs = |s: VertexId| -> BTreeMap<VertexId, (u32, VertexId)> {
        let mut out = BTreeMap::new();
        out.insert(s, (0, s));
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            let dv = out[&v].0;
            if let Some(ns) = adj.get(&v) {
                for &w in ns {
                    if !out.contains_key(&w) {
                        out.insert(w, (dv + 1, v));
                        queue.push_back(w);
                    }
                }
            }
        }
        out
    };
    let trees: Vec<_> = odds.iter().map(|&s| bfs(s)).collect();
    // minimum pairing by branch and bound
    let k = odds.len();
    let dist = |i: usize, j: usize| trees[i].get(&odds[j]).map(|&(d, _)| d);
    let mut best: Option<(u32, Vec<(usize, usize)>)> = None;
    fn pair_rec(
        k: usize,
        used: &mut Vec<bool>,
        cur: u32,
        pairs: &mut Vec<(usize, usize)>,
        dist: &dyn Fn(usize, usize) -> Option<u32>,
        best: &mut Option<(u32, Vec<(usize, usize)>)>,
    ) {
        if let Some((b, _)) = best {
            if cur >= *b {
                return;
            }
        }
        let Some(i) = (0..k).find(|&i| !used[i]) else {
            *best = Some((cur, pairs.clone()));
            return;
        };
        used[i] = true;
        for j in (i + 1)..k {
            if used[j] {
                continue;
            }
            if let Some(d) = dist(i, j) {
                used[j] = true;
                pairs.push((i, j));
                pair_rec(k, used, cur + d, pairs, dist, best);
                pairs.pop();
                used[j] = false;
            }
        }
        used[i] = false;
    }
    pair_rec(
        k,
        &mut vec![false; k],
        0,
        &mut Vec::new(),
        &|i, j| dist(i, j),
        &mut best,
    );
    let (total, pairs) = best?;
    // symmetric difference of the matched paths
    let mut join: BTreeSet<Edge> = BTreeSet::new();
    for (i, j) in pairs {
        let mut cur = odds[j];
        while cur != odds[i] {
            let (_, parent) = trees[i][&cur];
            let e = Edge::new(cur, parent);
            if !join.remove(&e) {
                join.insert(e);
            }
            cur = parent;
        }
    }
    debug_assert_eq!(join.len() as u32, total);
    Some(join.into_iter().collect())
}

/// δ ≥ 1/2: enumerate the stopped vertex set (ascending size, false twins
/// collapsed to their lowest-id representatives), optimize the peeks
/// exactly against the dangling/far coverage constraints, and add a minimum
/// closed walk through the set.
fn regime_large_delta(ctx: &mut Ctx) {
    let g = Arc::clone(ctx.g);
    let n = g.vertex_count();
    let d = g.all_pairs_distances().expect("connected").clone();
    let depths: Vec<Rational> = interior_depths(ctx.delta);
    // canonical constraint: a vertex may join only after its earlier twins
    let mut twin_prev: Vec<Option<VertexId>> = vec![None; n as usize];
    {
        let mut groups: BTreeMap<Vec<VertexId>, Vec<VertexId>> = BTreeMap::new();
        for v in 0..n {
            groups
                .entry(g.neighbors(v).to_vec())
                .or_default()
                .push(v);
        }
        for members in groups.values() {
            for w in members.windows(2) {
                twin_prev[w[1] as usize] = Some(w[0]);
            }
        }
    }
    let table = if n <= CLOSED_WALK_TABLE_MAX {
        Some(ClosedWalkTable::build(&g))
    } else {
        None
    };
    let delta = *ctx.delta;
    let eval = |mask: u64| -> Option<Rational> {
        evaluate_value(&g, &d, &delta, &depths, table.as_ref(), mask)
    };

    for size in 1..=n {
        if ctx.done {
            return;
        }
        if size >= 2 && ctx.prune_value(&Rational::from_int(size as i128)) {
            break; // any structure on ≥ size vertices walks at least that far
        }
        let masks = canonical_subsets(&g, &twin_prev, size);
        if ctx.opts.threads > 1 && !ctx.opts.stop_at_first && masks.len() > 256 {
            let values: Vec<Option<Rational>> = masks.par_iter().map(|&m| eval(m)).collect();
            for (mask, value) in masks.iter().zip(values) {
                if let Some(v) = value {
                    if !ctx.prune_value(&v) {
                        realize_candidate(ctx, &d, &depths, *mask);
                    }
                }
            }
        } else {
            for &mask in &masks {
                if ctx.done {
                    return;
                }
                if let Some(v) = eval(mask) {
                    if !ctx.prune_value(&v) {
                        realize_candidate(ctx, &d, &depths, mask);
                    }
                }
            }
        }
    }
}

/// Connected canonical vertex subsets of the given size, as bitmasks in
/// ascending order.
fn canonical_subsets(g: &Graph, twin_prev: &[Option<VertexId>], size: u32) -> Vec<u64> {
    let mut out = Vec::new();
    let mut cur: Vec<VertexId> = Vec::new();
    fn rec(
        g: &Graph,
        twin_prev: &[Option<VertexId>],
        size: u32,
        start: u32,
        cur: &mut Vec<VertexId>,
        out: &mut Vec<u64>,
    ) {
        if cur.len() as u32 == size {
            if induced_connected(g, cur) {
                let mask = cur.iter().fold(0u64, |m, &v| m | 1 << v);
                out.push(mask);
            }
            return;
        }
        let n = g.vertex_count();
        for v in start..n {
            if n - v < size - cur.len() as u32 {
                break;
            }
            if let Some(p) = twin_prev[v as usize] {
                if !cur.contains(&p) {
                    continue;
                }
            }
            cur.push(v);
            rec(g, twin_prev, size, v + 1, cur, out);
            cur.pop();
        }
    }
    rec(g, twin_prev, size, 0, &mut cur, &mut out);
    out
}

fn induced_connected(g: &Graph, set: &[VertexId]) -> bool {
    if set.len() <= 1 {
        return true;
    }
    let mask: u64 = set.iter().fold(0, |m, &v| m | 1 << v);
    let mut seen: u64 = 1 << set[0];
    let mut stack = vec![set[0]];
    while let Some(v) = stack.pop() {
        for &w in g.neighbors(v) {
            if mask >> w & 1 == 1 && seen >> w & 1 == 0 {
                seen |= 1 << w;
                stack.push(w);
            }
        }
    }
    seen == mask
}

struct EdgeSplit {
    /// dangling edges grouped by their outside endpoint
    groups: BTreeMap<VertexId, Vec<Edge>>,
    /// edges with both endpoints outside the visited set
    far: Vec<(VertexId, VertexId)>,
}

fn split_edges(g: &Graph, mask: u64) -> EdgeSplit {
    let mut groups: BTreeMap<VertexId, Vec<Edge>> = BTreeMap::new();
    let mut far = Vec::new();
    for &e in g.edges() {
        let iu = mask >> e.u & 1 == 1;
        let iv = mask >> e.v & 1 == 1;
        match (iu, iv) {
            (true, true) => {}
            (true, false) => groups.entry(e.v).or_default().push(e),
            (false, true) => groups.entry(e.u).or_default().push(e),
            (false, false) => far.push((e.u, e.v)),
        }
    }
    EdgeSplit { groups, far }
}

/// Feasible (max-depth, cost) options for one dangling group, cheapest
/// first. The deepest peek ("carrier") costs 2ρ; the remaining edges of the
/// group only need enough depth to pair with it.
fn group_options(
    group_size: usize,
    delta: &Rational,
    depths: &[Rational],
) -> Vec<(Rational, Rational)> {
    let one = Rational::one();
    let two = Rational::from_int(2);
    let two_minus = two - two * *delta;
    let one_minus = one - *delta;
    let mut opts = Vec::new();
    if two_minus <= Rational::zero() {
        opts.push((Rational::zero(), Rational::zero()));
    }
    for &rho in depths {
        if rho < one_minus {
            continue; // the deepest peek cannot cover its own edge
        }
        let needed = (two_minus - rho).max(Rational::zero()).min(one_minus);
        let dd = if needed.is_zero() {
            Rational::zero()
        } else {
            match depths.iter().find(|&&x| x >= needed) {
                Some(&x) if x <= rho => x,
                _ => continue,
            }
        };
        let cost = two * rho + Rational::from_int(group_size as i128 - 1) * two * dd;
        opts.push((rho, cost));
    }
    opts.sort_by(|a, b| (a.1, a.0).cmp(&(b.1, b.0)));
    opts
}

/// Exact minimum peek cost for a visited set, with the chosen per-group
/// max depths. `None` when no peek assignment covers everything.
fn peek_opt(
    g: &Graph,
    d: &[Vec<u32>],
    delta: &Rational,
    depths: &[Rational],
    mask: u64,
    split: &EdgeSplit,
) -> Option<(Rational, BTreeMap<VertexId, Rational>)> {
    let bound_vertices: Vec<VertexId> = split.groups.keys().copied().collect();
    let options: Vec<Vec<(Rational, Rational)>> = bound_vertices
        .iter()
        .map(|c| group_options(split.groups[c].len(), delta, depths))
        .collect();
    if options.iter().any(|o| o.is_empty()) {
        return None;
    }
    let three_minus = Rational::from_int(3) - Rational::from_int(2) * *delta;
    let free_reach = |x: VertexId| -> Rational {
        let dist = (0..g.vertex_count())
            .filter(|&w| mask >> w & 1 == 1)
            .map(|w| d[w as usize][x as usize])
            .min()
            .expect("nonempty visited set");
        Rational::one() - Rational::from(dist)
    };
    let reach_with = |x: VertexId, assign: &dyn Fn(usize) -> Rational| -> Rational {
        let mut r = free_reach(x);
        for (i, &c) in bound_vertices.iter().enumerate() {
            let rho = assign(i);
            if !rho.is_zero() {
                let via = rho - Rational::from(d[c as usize][x as usize]);
                r = r.max(via);
            }
        }
        r
    };
    let far_ok = |assign: &dyn Fn(usize) -> Rational| -> bool {
        split
            .far
            .iter()
            .all(|&(x, y)| reach_with(x, assign) + reach_with(y, assign) >= three_minus)
    };

    // baseline: per-group cheapest
    let baseline: Vec<(Rational, Rational)> = options.iter().map(|o| o[0]).collect();
    let baseline_assign = |i: usize| baseline[i].0;
    if split.far.is_empty() || far_ok(&baseline_assign) {
        let cost = baseline.iter().map(|&(_, c)| c).sum();
        let map = bound_vertices
            .iter()
            .zip(&baseline)
            .map(|(&c, &(rho, _))| (c, rho))
            .collect();
        return Some((cost, map));
    }

    // optimistic feasibility with every group at its deepest option
    let max_rho: Vec<Rational> = options
        .iter()
        .map(|o| o.iter().map(|&(r, _)| r).max().unwrap())
        .collect();
    if !far_ok(&|i| max_rho[i]) {
        return None;
    }

    // exact assignment over the groups that can outdo the free reach
    let useful: Vec<usize> = (0..bound_vertices.len())
        .filter(|&i| {
            let c = bound_vertices[i];
            split.far.iter().any(|&(x, y)| {
                [x, y].iter().any(|&z| {
                    max_rho[i] - Rational::from(d[c as usize][z as usize]) > free_reach(z)
                })
            })
        })
        .collect();
    let mut best: Option<(Rational, Vec<Rational>)> = None;
    let mut chosen: Vec<Rational> = baseline.iter().map(|&(r, _)| r).collect();
    fn dfs(
        idx: usize,
        useful: &[usize],
        options: &[Vec<(Rational, Rational)>],
        baseline: &[(Rational, Rational)],
        chosen: &mut Vec<Rational>,
        cost_so_far: Rational,
        min_rest: &[Rational],
        far_ok: &dyn Fn(&dyn Fn(usize) -> Rational) -> bool,
        best: &mut Option<(Rational, Vec<Rational>)>,
    ) {
        if let Some((b, _)) = best {
            if cost_so_far + min_rest[idx] >= *b {
                return;
            }
        }
        if idx == useful.len() {
            let assign = |i: usize| chosen[i];
            if far_ok(&assign) {
                *best = Some((cost_so_far, chosen.clone()));
            }
            return;
        }
        let gi = useful[idx];
        for &(rho, cost) in &options[gi] {
            chosen[gi] = rho;
            dfs(
                idx + 1,
                useful,
                options,
                baseline,
                chosen,
                cost_so_far + cost,
                min_rest,
                far_ok,
                best,
            );
        }
        chosen[gi] = baseline[gi].0;
    }
    // suffix sums of minimum group costs over the useful groups
    let mut min_rest = vec![Rational::zero(); useful.len() + 1];
    for i in (0..useful.len()).rev() {
        min_rest[i] = min_rest[i + 1] + options[useful[i]][0].1;
    }
    let pinned_cost: Rational = (0..bound_vertices.len())
        .filter(|i| !useful.contains(i))
        .map(|i| baseline[i].1)
        .sum();
    dfs(
        0,
        &useful,
        &options,
        &baseline,
        &mut chosen,
        pinned_cost,
        &min_rest,
        &far_ok,
        &mut best,
    );
    let (cost, rhos) = best?;
    let map = bound_vertices
        .iter()
        .zip(&rhos)
        .map(|(&c, &rho)| (c, rho))
        .collect();
    Some((cost, map))
}

/// Value of a visited-set candidate without building the tour.
fn evaluate_value(
    g: &Graph,
    d: &[Vec<u32>],
    delta: &Rational,
    depths: &[Rational],
    table: Option<&ClosedWalkTable>,
    mask: u64,
) -> Option<Rational> {
    let split = split_edges(g, mask);
    let (peek_cost, _) = peek_opt(g, d, delta, depths, mask, &split)?;
    let walk = walk_value(g, table, mask);
    Some(Rational::from(walk) + peek_cost)
}

fn walk_value(g: &Graph, table: Option<&ClosedWalkTable>, mask: u64) -> u32 {
    if mask.count_ones() <= 1 {
        return 0;
    }
    match table {
        Some(t) => t.get(mask),
        None => {
            let set: Vec<VertexId> = (0..g.vertex_count()).filter(|&v| mask >> v & 1 == 1).collect();
            closed_walk_visiting(g, &set).0
        }
    }
}

/// Build the tour for a surviving candidate and offer it to the context.
fn realize_candidate(ctx: &mut Ctx, d: &[Vec<u32>], depths: &[Rational], mask: u64) {
    let g = Arc::clone(ctx.g);
    let split = split_edges(&g, mask);
    let Some((_, rhos)) = peek_opt(&g, d, ctx.delta, depths, mask, &split) else {
        return;
    };
    let one_minus = Rational::one() - *ctx.delta;
    let two_minus = Rational::from_int(2) - Rational::from_int(2) * *ctx.delta;
    let mut peeks: Vec<(VertexId, Point)> = Vec::new();
    for (&c, edges) in &split.groups {
        let rho = rhos[&c];
        if rho.is_zero() {
            continue;
        }
        let needed = (two_minus - rho).max(Rational::zero()).min(one_minus);
        let dd = if needed.is_zero() {
            Rational::zero()
        } else {
            *depths.iter().find(|&&x| x >= needed).expect("option was feasible")
        };
        for (i, e) in edges.iter().enumerate() {
            let base = e.other(c);
            let depth = if i == 0 { rho } else { dd };
            if !depth.is_zero() {
                peeks.push((base, Point::on_edge(base, c, depth).unwrap()));
            }
        }
    }
    peeks.sort_by_key(|&(base, tip)| (base, tip));
    let set: Vec<VertexId> = (0..g.vertex_count()).filter(|&v| mask >> v & 1 == 1).collect();
    let counts = if set.len() == 1 {
        BTreeMap::new()
    } else {
        let (_, order) = closed_walk_visiting(&g, &set);
        let counts = expand_closure_order(&g, &order);
        assert!(
            counts.values().all(|&c| c <= 2),
            "optimal closure expansion uses an edge more than twice"
        );
        counts
    };
    let stop_count: usize = counts.values().sum::<usize>() + 2 * peeks.len();
    if stop_count < 3 {
        return; // covered by the two-stop layer
    }
    if let Some(stops) = assemble_walk(g.vertex_count(), &counts, &peeks) {
        let t = Tour::new(Arc::clone(&g), stops).unwrap();
        ctx.consider(t);
    }
}
