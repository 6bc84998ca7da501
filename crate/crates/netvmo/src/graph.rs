//! The undirected communication graph: neighbor sets, connectivity and
//! diameter, exhaustive spanning-tree enumeration, and the tree path-load
//! quantity `W` with its per-tree building blocks.
//!
//! Node indices are 1-based, matching the scenario file convention. The
//! spanning-tree machinery is exact and exponential; it only feeds analysis
//! reporting, never the control loop, so a hard size guard keeps it honest.

use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Node-count guard for the exhaustive spanning-tree routines.
pub const MAX_TREE_NODES: usize = 12;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("node index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("graph must have at least one node")]
    Empty,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("spanning-tree enumeration is limited to {MAX_TREE_NODES} nodes, got {0}")]
    SizeLimit(usize),
}

/// Fixed undirected communication graph over camera indices `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl CommGraph {
    /// Builds a graph from unordered index pairs. Self-loops and out-of-range
    /// indices are rejected; connectivity is a separate query because
    /// disconnected graphs must be representable to be diagnosed.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            for index in [a, b] {
                if index < 1 || index > n {
                    return Err(GraphError::IndexOutOfRange { index, n });
                }
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(CommGraph { n, edges: set })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    /// Neighbor set of node `i`; symmetric since the graph is undirected.
    pub fn neighbors(&self, i: usize) -> BTreeSet<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == i {
                    Some(b)
                } else if b == i {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    fn bfs_depths(&self, start: usize) -> BTreeMap<usize, usize> {
        let mut depth = BTreeMap::new();
        depth.insert(start, 0);
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let d = depth[&v];
            for w in self.neighbors(v) {
                if let std::collections::btree_map::Entry::Vacant(e) = depth.entry(w) {
                    e.insert(d + 1);
                    queue.push_back(w);
                }
            }
        }
        depth
    }

    /// True iff every node is reachable from node 1.
    pub fn is_connected(&self) -> bool {
        self.bfs_depths(1).len() == self.n
    }

    /// Longest shortest path over all node pairs.
    pub fn diameter(&self) -> Result<usize, GraphError> {
        let mut diam = 0;
        for s in 1..=self.n {
            let depths = self.bfs_depths(s);
            if depths.len() != self.n {
                return Err(GraphError::Disconnected);
            }
            diam = diam.max(*depths.values().max().unwrap());
        }
        Ok(diam)
    }

    /// Every spanning tree of the graph, rooted at `root`, each exactly once.
    pub fn enumerate_spanning_trees(&self, root: usize) -> Result<Vec<SpanningTree>, GraphError> {
        if self.n > MAX_TREE_NODES {
            return Err(GraphError::SizeLimit(self.n));
        }
        if root < 1 || root > self.n {
            return Err(GraphError::IndexOutOfRange { index: root, n: self.n });
        }
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        let edges: Vec<(usize, usize)> = self.edges.iter().copied().collect();
        let mut chosen = Vec::new();
        let mut out = Vec::new();
        enumerate_rec(self.n, &edges, 0, &mut chosen, &mut out);
        Ok(out
            .into_iter()
            .map(|edge_set| SpanningTree::from_edges(root, &edge_set))
            .collect())
    }

    /// Number of spanning trees by the matrix-tree theorem (exact integer
    /// determinant of a Laplacian minor).
    pub fn spanning_tree_count(&self) -> u128 {
        if self.n == 1 {
            return 1;
        }
        let k = self.n - 1;
        let mut lap = vec![vec![0i128; k]; k];
        for &(a, b) in &self.edges {
            let (a, b) = (a - 1, b - 1);
            if a < k {
                lap[a][a] += 1;
            }
            if b < k {
                lap[b][b] += 1;
            }
            if a < k && b < k {
                lap[a][b] -= 1;
                lap[b][a] -= 1;
            }
        }
        let det = bareiss_determinant(&mut lap);
        det.max(0) as u128
    }

    /// The minimum over roots and spanning trees of the worst edge load
    /// [`tree_cost`], together with an achieving root and tree.
    pub fn compute_w(&self) -> Result<WResult, GraphError> {
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        let mut best: Option<WResult> = None;
        for root in 1..=self.n {
            for tree in self.enumerate_spanning_trees(root)? {
                let cost = tree_cost(&tree);
                if best.as_ref().is_none_or(|b| cost < b.w) {
                    best = Some(WResult { w: cost, root, tree });
                }
            }
        }
        Ok(best.expect("connected graph has at least one spanning tree"))
    }
}

/// Recursive include/exclude enumeration over the sorted edge list. An edge
/// is included only if it joins two distinct components of the chosen set,
/// and a branch is abandoned as soon as the chosen plus remaining edges can
/// no longer connect the graph.
fn enumerate_rec(
    n: usize,
    edges: &[(usize, usize)],
    next: usize,
    chosen: &mut Vec<(usize, usize)>,
    out: &mut Vec<Vec<(usize, usize)>>,
) {
    if chosen.len() == n - 1 {
        out.push(chosen.clone());
        return;
    }
    if next >= edges.len() {
        return;
    }
    // Pruning: all remaining edges plus the chosen ones must still connect.
    if !connects(n, chosen.iter().chain(edges[next..].iter())) {
        return;
    }
    let e = edges[next];
    if !same_component(n, chosen, e.0, e.1) {
        chosen.push(e);
        enumerate_rec(n, edges, next + 1, chosen, out);
        chosen.pop();
    }
    enumerate_rec(n, edges, next + 1, chosen, out);
}

fn connects<'a>(n: usize, edges: impl Iterator<Item = &'a (usize, usize)>) -> bool {
    let mut uf = UnionFind::new(n);
    let mut components = n;
    for &(a, b) in edges {
        if uf.union(a - 1, b - 1) {
            components -= 1;
        }
    }
    components == 1
}

fn same_component(n: usize, edges: &[(usize, usize)], a: usize, b: usize) -> bool {
    let mut uf = UnionFind::new(n);
    for &(x, y) in edges {
        uf.union(x - 1, y - 1);
    }
    uf.find(a - 1) == uf.find(b - 1)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// Fraction-free Gaussian elimination; exact for integer matrices whose
/// intermediate minors fit in `i128` (comfortably true for n <= 12 Laplacians).
fn bareiss_determinant(m: &mut [Vec<i128>]) -> i128 {
    let k = m.len();
    if k == 0 {
        return 1;
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for i in 0..k - 1 {
        if m[i][i] == 0 {
            let Some(swap) = (i + 1..k).find(|&r| m[r][i] != 0) else {
                return 0;
            };
            m.swap(i, swap);
            sign = -sign;
        }
        for r in i + 1..k {
            for c in i + 1..k {
                m[r][c] = (m[r][c] * m[i][i] - m[r][i] * m[i][c]) / prev;
            }
            m[r][i] = 0;
        }
        prev = m[i][i];
    }
    sign * m[k - 1][k - 1]
}

/// A spanning tree directed away from its root, stored as a parent map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    root: usize,
    parent: BTreeMap<usize, usize>,
}

impl SpanningTree {
    /// Roots an undirected spanning edge set at `root` by breadth-first
    /// traversal.
    fn from_edges(root: usize, edges: &[(usize, usize)]) -> Self {
        let mut adjacency: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(a, b) in edges {
            adjacency.entry(a).or_default().push(b);
            adjacency.entry(b).or_default().push(a);
        }
        let mut parent = BTreeMap::new();
        let mut seen = BTreeSet::from([root]);
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &w in adjacency.get(&v).into_iter().flatten() {
                if seen.insert(w) {
                    parent.insert(w, v);
                    queue.push_back(w);
                }
            }
        }
        SpanningTree { root, parent }
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parent.get(&i).copied()
    }

    /// Number of nodes including the root.
    pub fn node_count(&self) -> usize {
        self.parent.len() + 1
    }

    /// Directed tree edges `(parent, child)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parent.iter().map(|(&child, &parent)| (parent, child))
    }

    /// Path length from the root; 0 for the root itself.
    pub fn depth(&self, i: usize) -> usize {
        let mut d = 0;
        let mut v = i;
        while let Some(&p) = self.parent.get(&v) {
            d += 1;
            v = p;
        }
        d
    }

    pub fn height(&self) -> usize {
        self.parent.keys().map(|&i| self.depth(i)).max().unwrap_or(0)
    }
}

/// Worst edge load of a rooted tree: for each tree edge, the sum of `depth(i)`
/// over all nodes `i` whose root path uses that edge; the maximum over edges.
pub fn tree_cost(tree: &SpanningTree) -> usize {
    let mut load: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for &node in tree.parent.keys() {
        let d = tree.depth(node);
        let mut v = node;
        while let Some(p) = tree.parent(v) {
            *load.entry((p, v)).or_insert(0) += d;
            v = p;
        }
    }
    load.values().copied().max().unwrap_or(0)
}

/// Result of [`CommGraph::compute_w`]: the value and an achieving witness.
#[derive(Debug, Clone)]
pub struct WResult {
    pub w: usize,
    pub root: usize,
    pub tree: SpanningTree,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn five_camera_graph() -> CommGraph {
        CommGraph::new(5, &[(1, 2), (1, 3), (1, 5), (2, 3), (3, 4), (4, 5)]).unwrap()
    }

    fn path(n: usize) -> CommGraph {
        let edges: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
        CommGraph::new(n, &edges).unwrap()
    }

    fn complete(n: usize) -> CommGraph {
        let mut edges = Vec::new();
        for a in 1..=n {
            for b in a + 1..=n {
                edges.push((a, b));
            }
        }
        CommGraph::new(n, &edges).unwrap()
    }

    #[test]
    fn rejects_self_loops_and_bad_indices() {
        assert!(matches!(CommGraph::new(3, &[(1, 1)]), Err(GraphError::SelfLoop(1))));
        assert!(matches!(
            CommGraph::new(3, &[(1, 4)]),
            Err(GraphError::IndexOutOfRange { index: 4, n: 3 })
        ));
        assert!(matches!(CommGraph::new(0, &[]), Err(GraphError::Empty)));
    }

    #[test]
    fn neighbors_of_five_camera_graph() {
        let g = five_camera_graph();
        assert_eq!(g.neighbors(1), BTreeSet::from([2, 3, 5]));
        assert_eq!(g.neighbors(4), BTreeSet::from([3, 5]));
    }

    #[test]
    fn neighbors_of_path_midpoint() {
        assert_eq!(path(3).neighbors(2), BTreeSet::from([1, 3]));
    }

    #[test]
    fn isolated_node_has_no_neighbors() {
        let g = CommGraph::new(3, &[(1, 2)]).unwrap();
        assert!(g.neighbors(3).is_empty());
        assert!(!g.is_connected());
    }

    #[test]
    fn connectivity() {
        assert!(five_camera_graph().is_connected());
        assert!(!CommGraph::new(2, &[]).unwrap().is_connected());
        assert!(complete(5).is_connected());
        assert!(CommGraph::new(1, &[]).unwrap().is_connected());
        assert!(matches!(
            CommGraph::new(2, &[]).unwrap().compute_w(),
            Err(GraphError::Disconnected)
        ));
    }

    #[test]
    fn diameter_of_standard_graphs() {
        assert_eq!(complete(5).diameter().unwrap(), 1);
        assert_eq!(path(4).diameter().unwrap(), 3);
        assert!(matches!(CommGraph::new(2, &[]).unwrap().diameter(), Err(GraphError::Disconnected)));
    }

    /// All simple paths between two nodes, by exhaustive depth-first search.
    fn shortest_by_path_enumeration(g: &CommGraph, s: usize, t: usize) -> usize {
        fn dfs(g: &CommGraph, v: usize, t: usize, visited: &mut Vec<usize>, best: &mut usize) {
            if v == t {
                *best = (*best).min(visited.len() - 1);
                return;
            }
            for w in g.neighbors(v) {
                if !visited.contains(&w) {
                    visited.push(w);
                    dfs(g, w, t, visited, best);
                    visited.pop();
                }
            }
        }
        let mut best = usize::MAX;
        dfs(g, s, t, &mut vec![s], &mut best);
        best
    }

    #[test]
    fn five_camera_diameter_cross_checked_by_path_enumeration() {
        let g = five_camera_graph();
        let mut diam = 0;
        for s in 1..=5 {
            for t in s + 1..=5 {
                diam = diam.max(shortest_by_path_enumeration(&g, s, t));
            }
        }
        assert_eq!(g.diameter().unwrap(), diam);
        assert_eq!(diam, 2);
    }

    #[test]
    fn spanning_tree_counts_for_known_graphs() {
        assert_eq!(complete(3).spanning_tree_count(), 3);
        assert_eq!(path(4).spanning_tree_count(), 1);
        assert_eq!(complete(5).spanning_tree_count(), 125);
    }

    #[test]
    fn enumeration_matches_known_counts() {
        assert_eq!(complete(3).enumerate_spanning_trees(1).unwrap().len(), 3);
        assert_eq!(path(5).enumerate_spanning_trees(2).unwrap().len(), 1);
        let g = five_camera_graph();
        assert_eq!(
            g.enumerate_spanning_trees(1).unwrap().len() as u128,
            g.spanning_tree_count()
        );
    }

    #[test]
    fn enumeration_yields_distinct_valid_trees() {
        let g = five_camera_graph();
        let trees = g.enumerate_spanning_trees(3).unwrap();
        let mut seen = BTreeSet::new();
        for t in &trees {
            assert_eq!(t.root(), 3);
            assert_eq!(t.node_count(), 5);
            let mut edges: Vec<_> = t.edges().map(|(a, b)| (a.min(b), a.max(b))).collect();
            edges.sort_unstable();
            for &(a, b) in &edges {
                assert!(g.has_edge(a, b), "tree edge ({a},{b}) not in the base graph");
            }
            assert!(seen.insert(edges), "duplicate tree emitted");
        }
    }

    #[test]
    fn enumeration_size_guard() {
        let g = complete(13);
        assert!(matches!(g.enumerate_spanning_trees(1), Err(GraphError::SizeLimit(13))));
        assert!(matches!(g.compute_w(), Err(GraphError::SizeLimit(13))));
    }

    #[test]
    fn star_tree_cost_is_one_from_center() {
        let g = CommGraph::new(4, &[(1, 2), (1, 3), (1, 4)]).unwrap();
        let trees = g.enumerate_spanning_trees(1).unwrap();
        assert_eq!(trees.len(), 1);
        assert_eq!(tree_cost(&trees[0]), 1);
    }

    #[test]
    fn path_tree_cost_from_one_end() {
        // Rooted at 1, the edge (1,2) carries node 2 at depth 1 and node 3 at
        // depth 2, so its load is 3; the edge (2,3) carries only node 3.
        let g = path(3);
        let trees = g.enumerate_spanning_trees(1).unwrap();
        assert_eq!(trees.len(), 1);
        assert_eq!(tree_cost(&trees[0]), 3);
    }

    /// Brute-force tree cost that explicitly rebuilds every root path.
    fn tree_cost_by_paths(tree: &SpanningTree) -> usize {
        let mut worst = 0;
        for (a, b) in tree.edges() {
            let mut load = 0;
            for node in tree.edges().map(|(_, child)| child) {
                // Walk the root path of `node` and look for edge (a, b).
                let mut v = node;
                let mut uses = false;
                let mut depth = 0;
                while let Some(p) = tree.parent(v) {
                    if (p, v) == (a, b) {
                        uses = true;
                    }
                    depth += 1;
                    v = p;
                }
                if uses {
                    load += depth;
                }
            }
            worst = worst.max(load);
        }
        worst
    }

    fn random_connected_graph(rng: &mut impl Rng, n: usize) -> CommGraph {
        // Random spanning tree first, then extra edges with probability 0.4.
        let mut edges = Vec::new();
        for v in 2..=n {
            edges.push((rng.random_range(1..v), v));
        }
        for a in 1..=n {
            for b in a + 1..=n {
                if !edges.contains(&(a, b)) && rng.random_bool(0.4) {
                    edges.push((a, b));
                }
            }
        }
        CommGraph::new(n, &edges).unwrap()
    }

    #[test]
    fn tree_cost_matches_brute_force_on_random_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..40 {
            let n = rng.random_range(2..8);
            let g = random_connected_graph(&mut rng, n);
            let root = rng.random_range(1..=n);
            for tree in g.enumerate_spanning_trees(root).unwrap().iter().take(10) {
                assert_eq!(tree_cost(tree), tree_cost_by_paths(tree));
                assert!(tree_cost(tree) >= tree.height());
            }
        }
    }

    #[test]
    fn w_of_path_and_star() {
        let w = path(3).compute_w().unwrap();
        assert_eq!(w.w, 1);
        assert_eq!(w.root, 2);
        let star = CommGraph::new(4, &[(1, 2), (1, 3), (1, 4)]).unwrap();
        let w = star.compute_w().unwrap();
        assert_eq!(w.w, 1);
        assert_eq!(w.root, 1);
    }

    #[test]
    fn w_of_five_camera_graph_is_stable() {
        let g = five_camera_graph();
        let a = g.compute_w().unwrap();
        let b = g.compute_w().unwrap();
        assert_eq!(a.w, b.w);
        assert_eq!(a.w, 3);
        assert_eq!(tree_cost(&a.tree), a.w);
    }

    /// Independent W: iterate raw edge subsets of size n-1, keep those that
    /// connect all nodes, and evaluate loads via the path-walking cost.
    pub(crate) fn w_by_subset_enumeration(g: &CommGraph) -> usize {
        let edges: Vec<_> = g.edges().collect();
        let n = g.node_count();
        let mut best = usize::MAX;
        let k = n - 1;
        let mut index = vec![0usize; k];
        fn subsets(
            edges: &[(usize, usize)],
            k: usize,
            start: usize,
            index: &mut Vec<usize>,
            depth: usize,
            visit: &mut impl FnMut(&[usize]),
        ) {
            if depth == k {
                visit(index);
                return;
            }
            for i in start..edges.len() {
                index[depth] = i;
                subsets(edges, k, i + 1, index, depth + 1, visit);
            }
        }
        subsets(&edges, k, 0, &mut index, 0, &mut |chosen| {
            let subset: Vec<_> = chosen.iter().map(|&i| edges[i]).collect();
            if !connects(n, subset.iter()) {
                return;
            }
            for root in 1..=n {
                let tree = SpanningTree::from_edges(root, &subset);
                best = best.min(tree_cost_by_paths(&tree));
            }
        });
        best
    }

    #[test]
    fn w_matches_subset_enumeration_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for _ in 0..15 {
            let n = rng.random_range(2..=6);
            let g = random_connected_graph(&mut rng, n);
            assert_eq!(g.compute_w().unwrap().w, w_by_subset_enumeration(&g));
        }
    }

    #[test]
    fn enumeration_count_matches_kirchhoff_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        for _ in 0..50 {
            let n = rng.random_range(2..=7);
            let g = random_connected_graph(&mut rng, n);
            assert_eq!(
                g.enumerate_spanning_trees(1).unwrap().len() as u128,
                g.spanning_tree_count(),
            );
        }
    }
}
