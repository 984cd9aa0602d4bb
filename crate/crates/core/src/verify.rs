//! Output reachability and robustness of node-classifier MPNNs over
//! degree-bounded input specifications: every candidate input graph is
//! replaced by a bounded-degree tree, each tree shape is unrolled into a
//! plain ReLU network, and each network is handed to the exact solver.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};
use crate::graph::{LabeledGraph, RootedTree};
use crate::mpnn::{ClassifierKind, Mpnn};
use crate::rational::{int, Rational};
use crate::reach::{solve_union, LinearConstraint, Polytope, ReachResult};
use crate::relu::{Affine, Circuit, ReluNetwork};

/// Every rooted tree shape with root degree `<= d`, other nodes with at
/// most `d - 1` children, and depth `<= k`, one per isomorphism class.
///
/// Nodes are numbered breadth-first; children of a node are ordered by
/// their canonical encoding.
pub fn enumerate_trees(d: usize, k: usize) -> Vec<RootedTree> {
    #[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
    struct Shape(Vec<Shape>);

    // All shapes of height <= h whose root has at most c children, each
    // child having at most d - 1 children.
    fn shapes(h: usize, c: usize, d: usize, memo: &mut BTreeMap<(usize, usize), Vec<Shape>>) -> Vec<Shape> {
        if let Some(s) = memo.get(&(h, c)) {
            return s.clone();
        }
        let subs = if h == 0 { Vec::new() } else { shapes(h - 1, d.saturating_sub(1), d, memo) };
        let mut out = Vec::new();
        // Non-decreasing index sequences pick each multiset of children once.
        fn pick(subs: &[Shape], from: usize, left: usize, cur: &mut Vec<Shape>, out: &mut Vec<Shape>) {
            out.push(Shape(cur.clone()));
            if left == 0 {
                return;
            }
            for i in from..subs.len() {
                cur.push(subs[i].clone());
                pick(subs, i, left - 1, cur, out);
                cur.pop();
            }
        }
        pick(&subs, 0, c, &mut Vec::new(), &mut out);
        memo.insert((h, c), out.clone());
        out
    }

    let mut memo = BTreeMap::new();
    shapes(k, d, d, &mut memo)
        .into_iter()
        .map(|s| {
            let mut parent = vec![None];
            let mut queue = std::collections::VecDeque::from([(0usize, s)]);
            while let Some((v, Shape(children))) = queue.pop_front() {
                for c in children {
                    parent.push(Some(v));
                    queue.push_back((parent.len() - 1, c));
                }
            }
            let n = parent.len();
            RootedTree::from_parents(parent, vec![Vec::new(); n], 0).expect("breadth-first parents")
        })
        .collect()
}

/// A single ReLU network computing the root output of `n` on `shape`, with
/// the labels of all tree nodes concatenated (node order) as its input.
pub fn unroll_mpnn_over_tree(n: &Mpnn, shape: &RootedTree) -> Result<ReluNetwork> {
    if n.kind() != ClassifierKind::Node {
        return Err(Error::KindMismatch { expected: "node", found: n.kind().name() });
    }
    let dim = n.label_dim();
    let count = shape.node_count();
    let layers = n.layers().len();
    let mut c = Circuit::new(count * dim);
    let mut state: Vec<Vec<Affine>> = (0..count).map(|v| (0..dim).map(|j| Affine::input(v * dim + j)).collect()).collect();
    let adj: Vec<Vec<usize>> = (0..count).map(|v| shape.graph.neighbors(v).map(<[usize]>::to_vec)).collect::<Result<_>>()?;
    for (i, net) in n.layers().iter().enumerate() {
        // Only nodes within `layers - i - 1` of the root influence the result.
        let horizon = layers - i - 1;
        let mut next = vec![Vec::new(); count];
        for v in (0..count).filter(|&v| shape.level[v] <= horizon) {
            let width = state[v].len();
            let mut input = state[v].clone();
            for j in 0..width {
                input.push(adj[v].iter().map(|&u| state[u][j].clone()).sum());
            }
            next[v] = c.import(net, &input);
        }
        state = next;
    }
    let out = c.import(n.readout(), &state[shape.root]);
    Ok(c.lower(&out))
}

/// Degree bound, radius and per-distance label polytopes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundedInputSpec {
    pub degree: usize,
    pub radius: usize,
    /// Label constraints for nodes at a given distance from the centre.
    pub labels: BTreeMap<usize, Polytope>,
    /// Used for distances `<= radius` missing from `labels`.
    pub default: Option<Polytope>,
}

impl BoundedInputSpec {
    /// The same label polytope at every distance up to `radius`.
    pub fn uniform(degree: usize, radius: usize, labels: Polytope) -> Self {
        BoundedInputSpec { degree, radius, labels: BTreeMap::new(), default: Some(labels) }
    }

    pub fn at(&self, distance: usize) -> Option<&Polytope> {
        if distance > self.radius {
            return None;
        }
        self.labels.get(&distance).or(self.default.as_ref())
    }

    fn check_dims(&self, label_dim: usize) -> Result<()> {
        for p in self.labels.values().chain(&self.default) {
            if p.dim != label_dim {
                return Err(Error::DimensionMismatch { context: "label polytope", expected: label_dim, found: p.dim });
            }
        }
        Ok(())
    }

    /// Whether `(g, v)` satisfies the specification.
    pub fn admits(&self, g: &LabeledGraph, v: usize) -> bool {
        if g.degree() > self.degree {
            return false;
        }
        g.distances(v).iter().enumerate().all(|(u, d)| match d.and_then(|d| self.at(d)) {
            Some(p) => p.contains(g.label(u)),
            None => true,
        })
    }
}

/// A labelled tree and the root output it produces.
#[derive(Clone, Debug)]
pub struct Witness {
    pub tree: RootedTree,
    pub output: Vec<Rational>,
}

#[derive(Clone, Debug)]
pub enum VerifyOutcome {
    Reachable(Witness),
    Unreachable,
    Holds,
    Violated(Witness),
}

impl VerifyOutcome {
    pub fn witness(&self) -> Option<&Witness> {
        match self {
            VerifyOutcome::Reachable(w) | VerifyOutcome::Violated(w) => Some(w),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            VerifyOutcome::Reachable(_) => "REACHABLE",
            VerifyOutcome::Unreachable => "UNREACHABLE",
            VerifyOutcome::Holds => "HOLDS",
            VerifyOutcome::Violated(_) => "VIOLATED",
        }
    }
}

fn tree_query(n: &Mpnn, spec: &BoundedInputSpec, shape: &RootedTree, out: &[Polytope]) -> Result<Option<Witness>> {
    let net = unroll_mpnn_over_tree(n, shape)?;
    let dim = n.label_dim();
    let total = shape.node_count() * dim;
    let mut constraints: Vec<LinearConstraint> = Vec::new();
    for v in 0..shape.node_count() {
        if let Some(p) = spec.at(shape.level[v]) {
            constraints.extend(p.embed(v * dim, total));
        }
    }
    let input = Polytope { dim: total, constraints };
    match solve_union(&net, &input, out)? {
        ReachResult::Unsat => Ok(None),
        ReachResult::Sat(x) => {
            let labels = (0..shape.node_count()).map(|v| x[v * dim..(v + 1) * dim].to_vec()).collect();
            let tree = shape.with_labels(labels, dim)?;
            let output = n.eval_node(&tree.graph, tree.root)?;
            Ok(Some(Witness { tree, output }))
        }
    }
}

/// Tree depth used for `n` under `spec`: the larger of the layer count and
/// the specification radius.
pub fn search_depth(n: &Mpnn, spec: &BoundedInputSpec) -> usize {
    n.layers().len().max(spec.radius)
}

/// Is some output in the union `out` produced at the centre of a graph
/// satisfying `spec`?
pub fn verify_orp(n: &Mpnn, spec: &BoundedInputSpec, out: &[Polytope]) -> Result<VerifyOutcome> {
    verify_orp_jobs(n, spec, out, 1)
}

/// [`verify_orp`] spreading tree shapes over `jobs` threads. The reported
/// witness is the one for the earliest shape in enumeration order.
pub fn verify_orp_jobs(n: &Mpnn, spec: &BoundedInputSpec, out: &[Polytope], jobs: usize) -> Result<VerifyOutcome> {
    if n.kind() != ClassifierKind::Node {
        return Err(Error::KindMismatch { expected: "node", found: n.kind().name() });
    }
    spec.check_dims(n.label_dim())?;
    for p in out {
        if p.dim != n.output_dim() {
            return Err(Error::DimensionMismatch { context: "output polytope", expected: n.output_dim(), found: p.dim });
        }
    }
    let shapes = enumerate_trees(spec.degree, search_depth(n, spec));
    let results: Vec<Option<Result<Option<Witness>>>> = if jobs <= 1 {
        let mut rs = Vec::new();
        for s in &shapes {
            let r = tree_query(n, spec, s, out);
            let stop = !matches!(r, Ok(None));
            rs.push(Some(r));
            if stop {
                break;
            }
        }
        rs
    } else {
        let next = AtomicUsize::new(0);
        let best = AtomicUsize::new(usize::MAX);
        let slots: Vec<std::sync::Mutex<Option<Result<Option<Witness>>>>> =
            shapes.iter().map(|_| std::sync::Mutex::new(None)).collect();
        std::thread::scope(|scope| {
            for _ in 0..jobs {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    if i >= shapes.len() || i > best.load(Ordering::SeqCst) {
                        break;
                    }
                    let r = tree_query(n, spec, &shapes[i], out);
                    if !matches!(r, Ok(None)) {
                        best.fetch_min(i, Ordering::SeqCst);
                    }
                    *slots[i].lock().expect("no poisoned workers") = Some(r);
                });
            }
        });
        slots.into_iter().map(|m| m.into_inner().expect("no poisoned workers")).collect()
    };
    for r in results.into_iter().flatten() {
        if let Some(w) = r? {
            return Ok(VerifyOutcome::Reachable(w));
        }
    }
    Ok(VerifyOutcome::Unreachable)
}

/// Does every graph satisfying `spec` produce an output in `out_conj`?
/// Decided as the non-reachability of the complement.
pub fn verify_arp(n: &Mpnn, spec: &BoundedInputSpec, out_conj: &Polytope) -> Result<VerifyOutcome> {
    verify_arp_jobs(n, spec, out_conj, 1)
}

pub fn verify_arp_jobs(n: &Mpnn, spec: &BoundedInputSpec, out_conj: &Polytope, jobs: usize) -> Result<VerifyOutcome> {
    Ok(match verify_orp_jobs(n, spec, &out_conj.complement(), jobs)? {
        VerifyOutcome::Reachable(w) => VerifyOutcome::Violated(w),
        _ => VerifyOutcome::Holds,
    })
}

/// `x_i > x_j` for every `j != i`: output `i` is the unique maximum.
pub fn class_spec(dim: usize, i: usize) -> Polytope {
    let mut p = Polytope::new(dim);
    for j in (0..dim).filter(|&j| j != i) {
        let mut a = vec![int(0); dim];
        a[j] = int(1);
        a[i] = int(-1);
        p.constraints.push(LinearConstraint::lt(a, int(0)));
    }
    p
}

/// The complement of [`class_spec`]: `x_i <= x_j` for some `j != i`.
pub fn leq_union(dim: usize, i: usize) -> Vec<Polytope> {
    class_spec(dim, i).complement()
}
