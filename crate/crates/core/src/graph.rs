//! Finite undirected graphs with rational node labels, rooted trees, and the
//! straight-path unrolling behind the tree-model property.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A finite undirected graph whose nodes `0..node_count` carry label vectors
/// of a shared dimension. Self-loops are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    label_dim: usize,
    /// Each undirected edge once, as `(min, max)`.
    edges: BTreeSet<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    labels: Vec<Vec<Rational>>,
}

impl LabeledGraph {
    /// Builds a graph from labels (one vector per node) and an edge list.
    /// Edges may be given in either orientation; duplicates collapse.
    pub fn new(
        label_dim: usize,
        labels: Vec<Vec<Rational>>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let count = labels.len();
        for l in &labels {
            if l.len() != label_dim {
                return Err(Error::DimensionMismatch {
                    context: "node label",
                    expected: label_dim,
                    found: l.len(),
                });
            }
        }
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            for node in [u, v] {
                if node >= count {
                    return Err(Error::NodeOutOfRange { node, count });
                }
            }
            set.insert((u.min(v), u.max(v)));
        }
        let mut g = LabeledGraph {
            label_dim,
            edges: set,
            adjacency: Vec::new(),
            labels,
        };
        g.rebuild_adjacency();
        Ok(g)
    }

    /// A graph with no nodes.
    pub fn empty(label_dim: usize) -> Self {
        LabeledGraph {
            label_dim,
            edges: BTreeSet::new(),
            adjacency: Vec::new(),
            labels: Vec::new(),
        }
    }

    fn rebuild_adjacency(&mut self) {
        let mut adj = vec![Vec::new(); self.labels.len()];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            if u != v {
                adj[v].push(u);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        self.adjacency = adj;
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn label_dim(&self) -> usize {
        self.label_dim
    }

    pub fn label(&self, v: usize) -> &[Rational] {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[Vec<Rational>] {
        &self.labels
    }

    /// Undirected edges, each once with `u <= v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    fn check_node(&self, v: usize) -> Result<()> {
        if v >= self.node_count() {
            return Err(Error::NodeOutOfRange {
                node: v,
                count: self.node_count(),
            });
        }
        Ok(())
    }

    /// `Neigh(v)`, sorted ascending.
    pub fn neighbors(&self, v: usize) -> Result<&[usize]> {
        self.check_node(v)?;
        Ok(&self.adjacency[v])
    }

    /// Same as [`neighbors`](Self::neighbors) for indices known to be valid.
    pub(crate) fn adj(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    /// Maximum neighbourhood size, 0 for edgeless graphs.
    pub fn degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Sum of the labels of `v`'s neighbours.
    pub fn neighbor_sum(&self, v: usize) -> Vec<Rational> {
        let mut acc = vec![Rational::default(); self.label_dim];
        for &u in &self.adjacency[v] {
            for (a, x) in acc.iter_mut().zip(&self.labels[u]) {
                *a += x;
            }
        }
        acc
    }

    /// Sum of all node labels.
    pub fn label_sum(&self) -> Vec<Rational> {
        let mut acc = vec![Rational::default(); self.label_dim];
        for l in &self.labels {
            for (a, x) in acc.iter_mut().zip(l) {
                *a += x;
            }
        }
        acc
    }

    pub fn set_label(&mut self, v: usize, label: Vec<Rational>) -> Result<()> {
        self.check_node(v)?;
        if label.len() != self.label_dim {
            return Err(Error::DimensionMismatch {
                context: "node label",
                expected: self.label_dim,
                found: label.len(),
            });
        }
        self.labels[v] = label;
        Ok(())
    }

    pub fn set_label_entry(&mut self, v: usize, dim: usize, value: Rational) {
        self.labels[v][dim] = value;
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<bool> {
        self.check_node(u)?;
        self.check_node(v)?;
        let added = self.edges.insert((u.min(v), u.max(v)));
        if added {
            self.rebuild_adjacency();
        }
        Ok(added)
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        let removed = self.edges.remove(&(u.min(v), u.max(v)));
        if removed {
            self.rebuild_adjacency();
        }
        removed
    }

    /// Relabels node `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> LabeledGraph {
        let mut labels = vec![Vec::new(); self.node_count()];
        for (v, l) in self.labels.iter().enumerate() {
            labels[perm[v]] = l.clone();
        }
        let edges = self.edges.iter().map(|&(u, v)| (perm[u], perm[v]));
        LabeledGraph::new(self.label_dim, labels, edges).expect("permutation keeps graph valid")
    }

    /// Breadth-first distances from `root`; `None` for unreachable nodes.
    pub fn distances(&self, root: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.node_count()];
        let mut queue = VecDeque::new();
        dist[root] = Some(0);
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &w in &self.adjacency[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Whether the graph is a tree layered from `root` whose degree is at most `d`.
    pub fn is_d_tree(&self, root: usize, d: usize) -> bool {
        root < self.node_count() && self.tree_depth(root).is_some() && self.degree() <= d
    }

    /// Depth of the layered tree rooted at `root`, or `None` if the graph is not one.
    pub fn tree_depth(&self, root: usize) -> Option<usize> {
        let dist = self.distances(root);
        if dist.iter().any(Option::is_none) {
            return None;
        }
        let dist: Vec<usize> = dist.into_iter().map(Option::unwrap).collect();
        for &(u, v) in &self.edges {
            if dist[u].abs_diff(dist[v]) != 1 {
                return None;
            }
        }
        for v in 0..self.node_count() {
            if v == root {
                continue;
            }
            let parents = self.adjacency[v]
                .iter()
                .filter(|&&u| dist[u] + 1 == dist[v])
                .count();
            if parents != 1 {
                return None;
            }
        }
        dist.into_iter().max()
    }
}

/// A straight path `v0 v1 .. vi`: consecutive nodes adjacent and
/// `v_{j-1} != v_{j+1}` for all `j`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StraightPath(pub Vec<usize>);

impl StraightPath {
    pub fn last(&self) -> usize {
        *self.0.last().expect("paths are nonempty")
    }

    pub fn len_edges(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_straight_in(&self, g: &LabeledGraph) -> bool {
        let p = &self.0;
        !p.is_empty()
            && p.windows(2).all(|w| g.has_edge(w[0], w[1]))
            && p.windows(3).all(|w| w[0] != w[2])
    }
}

/// A rooted tree together with the graph node each tree node came from.
#[derive(Clone, Debug)]
pub struct RootedTree {
    pub graph: LabeledGraph,
    pub root: usize,
    pub depth: usize,
    /// Parent of each tree node (`None` for the root).
    pub parent: Vec<Option<usize>>,
    /// Distance of each node from the root.
    pub level: Vec<usize>,
    /// For unrolled trees, the straight path each tree node stands for.
    pub paths: Vec<StraightPath>,
}

impl RootedTree {
    /// Builds a rooted tree from a parent array; node 0 must be the root and
    /// parents must precede their children.
    pub fn from_parents(parent: Vec<Option<usize>>, labels: Vec<Vec<Rational>>, label_dim: usize) -> Result<Self> {
        let mut level = Vec::with_capacity(parent.len());
        let mut edges = Vec::new();
        for (v, p) in parent.iter().enumerate() {
            match p {
                None if v == 0 => level.push(0),
                Some(p) if *p < v => {
                    level.push(level[*p] + 1);
                    edges.push((*p, v));
                }
                _ => return Err(Error::Format(format!("bad parent entry for tree node {v}"))),
            }
        }
        let graph = LabeledGraph::new(label_dim, labels, edges)?;
        let depth = level.iter().copied().max().unwrap_or(0);
        Ok(RootedTree {
            graph,
            root: 0,
            depth,
            paths: Vec::new(),
            parent,
            level,
        })
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn children(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.parent.len()).filter(move |&c| self.parent[c] == Some(v))
    }

    /// The same shape carrying `labels` of dimension `label_dim`.
    pub fn with_labels(&self, labels: Vec<Vec<Rational>>, label_dim: usize) -> Result<RootedTree> {
        let mut t = RootedTree::from_parents(self.parent.clone(), labels, label_dim)?;
        t.paths = self.paths.clone();
        Ok(t)
    }
}

/// Unrolls `g` around `v` into the tree of straight paths of length at most `k`.
///
/// Tree nodes are the straight paths themselves (in breadth-first order, the
/// root being the one-node path `v`); each carries the label of its last node.
pub fn unroll(g: &LabeledGraph, v: usize, k: usize) -> Result<RootedTree> {
    g.check_node(v)?;
    let mut paths = vec![StraightPath(vec![v])];
    let mut parent = vec![None];
    let mut level = vec![0];
    let mut frontier = 0..1;
    for depth in 1..=k {
        let start = paths.len();
        for idx in frontier.clone() {
            let p = paths[idx].0.clone();
            let last = *p.last().unwrap();
            let before = if p.len() >= 2 { Some(p[p.len() - 2]) } else { None };
            for &next in g.adj(last) {
                if Some(next) == before {
                    continue;
                }
                let mut q = p.clone();
                q.push(next);
                paths.push(StraightPath(q));
                parent.push(Some(idx));
                level.push(depth);
            }
        }
        frontier = start..paths.len();
        if frontier.is_empty() {
            break;
        }
    }
    let labels = paths.iter().map(|p| g.label(p.last()).to_vec()).collect();
    let edges: Vec<(usize, usize)> = parent
        .iter()
        .enumerate()
        .filter_map(|(c, p)| p.map(|p| (p, c)))
        .collect();
    let graph = LabeledGraph::new(g.label_dim(), labels, edges)?;
    let depth = level.iter().copied().max().unwrap_or(0);
    Ok(RootedTree {
        graph,
        root: 0,
        depth,
        parent,
        level,
        paths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn unlabeled(n: usize, edges: &[(usize, usize)]) -> LabeledGraph {
        LabeledGraph::new(1, (0..n).map(|i| vec![int(i as i64)]).collect(), edges.iter().copied()).unwrap()
    }

    #[test]
    fn neighbors_follow_edges() {
        let path = unlabeled(3, &[(0, 1), (1, 2)]);
        assert_eq!(path.neighbors(1).unwrap(), &[0, 2]);
        let isolated = unlabeled(2, &[(0, 0)]);
        assert_eq!(isolated.neighbors(1).unwrap(), &[] as &[usize]);
        assert_eq!(isolated.neighbors(0).unwrap(), &[0]);
        assert!(matches!(path.neighbors(3), Err(Error::NodeOutOfRange { node: 3, count: 3 })));
    }

    #[test]
    fn degree_examples() {
        assert_eq!(unlabeled(3, &[(0, 1), (1, 2), (2, 0)]).degree(), 2);
        assert_eq!(unlabeled(1, &[]).degree(), 0);
        assert_eq!(unlabeled(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).degree(), 4);
    }

    #[test]
    fn d_tree_examples() {
        assert!(unlabeled(3, &[(0, 1), (1, 2)]).is_d_tree(0, 2));
        let tri = unlabeled(3, &[(0, 1), (1, 2), (2, 0)]);
        for root in 0..3 {
            for d in 0..5 {
                assert!(!tri.is_d_tree(root, d));
            }
        }
        assert!(!unlabeled(4, &[(0, 1), (0, 2), (0, 3)]).is_d_tree(0, 2));
        assert!(unlabeled(4, &[(0, 1), (0, 2), (0, 3)]).is_d_tree(0, 3));
        assert!(!unlabeled(2, &[(0, 0), (0, 1)]).is_d_tree(0, 5));
        assert!(!unlabeled(3, &[(0, 1)]).is_d_tree(0, 5));
    }

    #[test]
    fn unroll_path() {
        let g = unlabeled(3, &[(0, 1), (1, 2)]);
        let t = unroll(&g, 0, 2).unwrap();
        let paths: Vec<_> = t.paths.iter().map(|p| p.0.clone()).collect();
        assert_eq!(paths, vec![vec![0], vec![0, 1], vec![0, 1, 2]]);
        assert_eq!(t.depth, 2);
        assert!(t.graph.is_d_tree(0, 2));
    }

    #[test]
    fn unroll_triangle() {
        let g = unlabeled(3, &[(0, 1), (1, 2), (2, 0)]);
        // root v = 1, children 0 and 2, then 0 -> 2 and 2 -> 0.
        let t = unroll(&g, 1, 2).unwrap();
        let paths: Vec<_> = t.paths.iter().map(|p| p.0.clone()).collect();
        assert_eq!(paths, vec![vec![1], vec![1, 0], vec![1, 2], vec![1, 0, 2], vec![1, 2, 0]]);
        assert_eq!(t.graph.label(3), g.label(2));
    }

    #[test]
    fn unroll_zero_depth() {
        let g = unlabeled(3, &[(0, 1), (1, 2), (2, 0)]);
        let t = unroll(&g, 2, 0).unwrap();
        assert_eq!(t.node_count(), 1);
        assert_eq!(t.graph.label(0), g.label(2));
    }

    #[test]
    fn unroll_self_loop_once() {
        let g = unlabeled(2, &[(0, 0), (0, 1)]);
        let t = unroll(&g, 0, 2).unwrap();
        let paths: Vec<_> = t.paths.iter().map(|p| p.0.clone()).collect();
        assert_eq!(
            paths,
            vec![vec![0], vec![0, 0], vec![0, 1], vec![0, 0, 1]]
        );
    }
}
