//! Graph linear programs: node conditions over a node's own label and the
//! summed labels of its neighbours, graph conditions over the summed labels
//! of all nodes, and the discretised fragment (DGLP).

mod parse;
mod sugar;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::LabeledGraph;
use crate::rational::{int, Rational};

pub use parse::{parse_graph_condition, parse_node_condition};
pub use sugar::{desugar_abbreviations, Ref, Sugar, VarNames};

fn collect(terms: impl IntoIterator<Item = (usize, Rational)>) -> BTreeMap<usize, Rational> {
    let mut map = BTreeMap::new();
    for (i, c) in terms {
        *map.entry(i).or_insert_with(Rational::zero) += c;
    }
    map.retain(|_, c: &mut Rational| !c.is_zero());
    map
}

fn weighted(coeffs: &BTreeMap<usize, Rational>, x: &[Rational]) -> Rational {
    coeffs.iter().map(|(i, c)| c * &x[*i]).sum()
}

/// `sum a_i x_i + b_i agg(x_i) <= c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearNodeTerm {
    pub a: BTreeMap<usize, Rational>,
    pub b: BTreeMap<usize, Rational>,
    pub c: Rational,
}

impl LinearNodeTerm {
    pub fn new(
        a: impl IntoIterator<Item = (usize, Rational)>,
        b: impl IntoIterator<Item = (usize, Rational)>,
        c: Rational,
    ) -> Self {
        LinearNodeTerm {
            a: collect(a),
            b: collect(b),
            c,
        }
    }

    /// `0 <= 0`.
    pub fn truth() -> Self {
        LinearNodeTerm::new([], [], Rational::zero())
    }

    /// `0 <= -1`.
    pub fn falsity() -> Self {
        LinearNodeTerm::new([], [], -Rational::one())
    }

    pub fn negated_sides(&self) -> Self {
        LinearNodeTerm {
            a: self.a.iter().map(|(i, c)| (*i, -c)).collect(),
            b: self.b.iter().map(|(i, c)| (*i, -c)).collect(),
            c: -self.c.clone(),
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.a.keys().chain(self.b.keys()).copied()
    }

    /// Left-hand side on a node with label `own` and neighbour sum `agg`.
    pub fn lhs(&self, own: &[Rational], agg: &[Rational]) -> Rational {
        weighted(&self.a, own) + weighted(&self.b, agg)
    }

    pub fn holds(&self, own: &[Rational], agg: &[Rational]) -> bool {
        self.lhs(own, agg) <= self.c
    }
}

/// `sum a_i x_i <= c` over graph-summed labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearGraphTerm {
    pub a: BTreeMap<usize, Rational>,
    pub c: Rational,
}

impl LinearGraphTerm {
    pub fn new(a: impl IntoIterator<Item = (usize, Rational)>, c: Rational) -> Self {
        LinearGraphTerm { a: collect(a), c }
    }

    pub fn lhs(&self, sums: &[Rational]) -> Rational {
        weighted(&self.a, sums)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NodeCondition {
    Atom(LinearNodeTerm),
    And(Box<NodeCondition>, Box<NodeCondition>),
    Or(Box<NodeCondition>, Box<NodeCondition>),
}

/// Folds `items` into a balanced binary tree with `join`, or `unit` if empty.
fn balanced<T>(items: Vec<T>, unit: impl FnOnce() -> T, join: &impl Fn(T, T) -> T) -> T {
    fn fold<T>(mut items: Vec<T>, join: &impl Fn(T, T) -> T) -> T {
        if items.len() == 1 {
            return items.pop().unwrap();
        }
        let right = items.split_off(items.len() / 2);
        let l = fold(items, join);
        let r = fold(right, join);
        join(l, r)
    }
    if items.is_empty() {
        unit()
    } else {
        fold(items, join)
    }
}

impl NodeCondition {
    pub fn atom(t: LinearNodeTerm) -> Self {
        NodeCondition::Atom(t)
    }

    pub fn and(l: NodeCondition, r: NodeCondition) -> Self {
        NodeCondition::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: NodeCondition, r: NodeCondition) -> Self {
        NodeCondition::Or(Box::new(l), Box::new(r))
    }

    pub fn truth() -> Self {
        NodeCondition::Atom(LinearNodeTerm::truth())
    }

    pub fn falsity() -> Self {
        NodeCondition::Atom(LinearNodeTerm::falsity())
    }

    /// Balanced conjunction; `0 <= 0` when empty.
    pub fn and_all(items: Vec<NodeCondition>) -> Self {
        balanced(items, NodeCondition::truth, &NodeCondition::and)
    }

    /// Balanced disjunction; `0 <= -1` when empty.
    pub fn or_all(items: Vec<NodeCondition>) -> Self {
        balanced(items, NodeCondition::falsity, &NodeCondition::or)
    }

    /// `t = c` as `t <= c & -t <= -c`.
    pub fn equality(t: LinearNodeTerm) -> Self {
        let neg = t.negated_sides();
        NodeCondition::and(NodeCondition::Atom(t), NodeCondition::Atom(neg))
    }

    /// `x_i = value`.
    pub fn var_equals(i: usize, value: Rational) -> Self {
        NodeCondition::equality(LinearNodeTerm::new([(i, int(1))], [], value))
    }

    pub fn atoms(&self) -> Vec<&LinearNodeTerm> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            match n {
                NodeCondition::Atom(t) => out.push(t),
                NodeCondition::And(l, r) | NodeCondition::Or(l, r) => {
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        out
    }

    /// `Var(phi)`: variables with a nonzero coefficient somewhere.
    pub fn vars(&self) -> BTreeSet<usize> {
        self.atoms().into_iter().flat_map(|t| t.vars()).collect()
    }

    pub fn max_var(&self) -> Option<usize> {
        self.vars().last().copied()
    }

    pub fn size(&self) -> usize {
        match self {
            NodeCondition::Atom(_) => 1,
            NodeCondition::And(l, r) | NodeCondition::Or(l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            NodeCondition::Atom(_) => 0,
            NodeCondition::And(l, r) | NodeCondition::Or(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    pub fn eval(&self, own: &[Rational], agg: &[Rational]) -> bool {
        match self {
            NodeCondition::Atom(t) => t.holds(own, agg),
            NodeCondition::And(l, r) => l.eval(own, agg) && r.eval(own, agg),
            NodeCondition::Or(l, r) => l.eval(own, agg) || r.eval(own, agg),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GraphCondition {
    Atom(LinearGraphTerm),
    And(Box<GraphCondition>, Box<GraphCondition>),
}

impl GraphCondition {
    pub fn and(l: GraphCondition, r: GraphCondition) -> Self {
        GraphCondition::And(Box::new(l), Box::new(r))
    }

    pub fn truth() -> Self {
        GraphCondition::Atom(LinearGraphTerm::new([], Rational::zero()))
    }

    pub fn and_all(items: Vec<GraphCondition>) -> Self {
        balanced(items, GraphCondition::truth, &GraphCondition::and)
    }

    /// `t = c` as `t <= c & -t <= -c`.
    pub fn equality(t: LinearGraphTerm) -> Self {
        let neg = LinearGraphTerm {
            a: t.a.iter().map(|(i, c)| (*i, -c)).collect(),
            c: -t.c.clone(),
        };
        GraphCondition::and(GraphCondition::Atom(t), GraphCondition::Atom(neg))
    }

    pub fn atoms(&self) -> Vec<&LinearGraphTerm> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            match n {
                GraphCondition::Atom(t) => out.push(t),
                GraphCondition::And(l, r) => {
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        out
    }

    pub fn max_var(&self) -> Option<usize> {
        self.atoms().into_iter().flat_map(|t| t.a.keys().copied()).max()
    }

    pub fn eval(&self, sums: &[Rational]) -> bool {
        self.atoms().into_iter().all(|t| t.lhs(sums) <= t.c)
    }
}

fn check_dim(max_var: Option<usize>, dim: usize) -> Result<()> {
    match max_var {
        Some(i) if i >= dim => Err(Error::DimensionMismatch {
            context: "condition variable vs label dimension",
            expected: dim,
            found: i + 1,
        }),
        _ => Ok(()),
    }
}

/// Whether `v` is in the node set induced by `phi`.
pub fn check_node(g: &LabeledGraph, v: usize, phi: &NodeCondition) -> Result<bool> {
    check_dim(phi.max_var(), g.label_dim())?;
    g.neighbors(v)?;
    Ok(phi.eval(g.label(v), &g.neighbor_sum(v)))
}

pub fn check_graph(g: &LabeledGraph, psi: &GraphCondition) -> Result<bool> {
    check_dim(psi.max_var(), g.label_dim())?;
    Ok(psi.eval(&g.label_sum()))
}

/// `g` satisfies `psi` and every node satisfies `phi`.
pub fn check_program(g: &LabeledGraph, prog: &GlpProgram) -> Result<bool> {
    if g.label_dim() != prog.num_vars {
        return Err(Error::DimensionMismatch {
            context: "graph label vs program variables",
            expected: prog.num_vars,
            found: g.label_dim(),
        });
    }
    if !check_graph(g, &prog.psi)? {
        return Ok(false);
    }
    for v in 0..g.node_count() {
        if !prog.phi.eval(g.label(v), &g.neighbor_sum(v)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Index of the first node violating `phi`, if any.
pub fn first_violating_node(g: &LabeledGraph, phi: &NodeCondition) -> Option<usize> {
    (0..g.node_count()).find(|&v| !phi.eval(g.label(v), &g.neighbor_sum(v)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlpProgram {
    pub num_vars: usize,
    pub phi: NodeCondition,
    pub psi: GraphCondition,
}

impl GlpProgram {
    pub fn new(num_vars: usize, phi: NodeCondition, psi: GraphCondition) -> Result<Self> {
        for i in [phi.max_var(), psi.max_var()].into_iter().flatten() {
            if i >= num_vars {
                return Err(Error::UnknownVariable(i));
            }
        }
        Ok(GlpProgram { num_vars, phi, psi })
    }
}

/// Every `Or` in `phi_prime` has a disjunct free of non-discrete variables.
pub fn is_dglp(phi_prime: &NodeCondition, discrete: &BTreeSet<usize>) -> bool {
    fn walk(n: &NodeCondition, discrete: &BTreeSet<usize>) -> (bool, bool) {
        // (side condition holds below, mentions a non-discrete variable)
        match n {
            NodeCondition::Atom(t) => (true, t.vars().any(|i| !discrete.contains(&i))),
            NodeCondition::And(l, r) => {
                let (okl, nl) = walk(l, discrete);
                let (okr, nr) = walk(r, discrete);
                (okl && okr, nl || nr)
            }
            NodeCondition::Or(l, r) => {
                let (okl, nl) = walk(l, discrete);
                let (okr, nr) = walk(r, discrete);
                (okl && okr && !(nl && nr), nl || nr)
            }
        }
    }
    walk(phi_prime, discrete).0
}

/// A GLP whose node condition is `phi_prime & phi_discr`, where
/// `phi_discr` pins each discrete variable to its finite set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DglpProgram {
    pub base: GlpProgram,
    pub discrete: BTreeMap<usize, Vec<u64>>,
    pub phi_prime: NodeCondition,
}

impl DglpProgram {
    pub fn new(
        num_vars: usize,
        phi_prime: NodeCondition,
        psi: GraphCondition,
        discrete: BTreeMap<usize, Vec<u64>>,
    ) -> Result<Self> {
        for (&i, set) in &discrete {
            if i >= num_vars {
                return Err(Error::UnknownVariable(i));
            }
            if set.is_empty() || set.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Format(format!(
                    "discrete set of x{i} must be nonempty and strictly increasing"
                )));
            }
        }
        let phi = if discrete.is_empty() {
            phi_prime.clone()
        } else {
            NodeCondition::and(phi_prime.clone(), Self::discretisation(&discrete))
        };
        Ok(DglpProgram {
            base: GlpProgram::new(num_vars, phi, psi)?,
            discrete,
            phi_prime,
        })
    }

    /// `AND_i OR_{m in M_i} x_i = m`.
    pub fn discretisation(discrete: &BTreeMap<usize, Vec<u64>>) -> NodeCondition {
        NodeCondition::and_all(
            discrete
                .iter()
                .map(|(&i, set)| {
                    NodeCondition::or_all(set.iter().map(|&m| NodeCondition::var_equals(i, int(m as i64))).collect())
                })
                .collect(),
        )
    }

    pub fn num_vars(&self) -> usize {
        self.base.num_vars
    }

    pub fn psi(&self) -> &GraphCondition {
        &self.base.psi
    }

    pub fn discrete_vars(&self) -> BTreeSet<usize> {
        self.discrete.keys().copied().collect()
    }

    pub fn is_dglp(&self) -> bool {
        is_dglp(&self.phi_prime, &self.discrete_vars())
    }
}

impl fmt::Display for NodeCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&parse::print_node_condition(self))
    }
}

impl fmt::Display for GraphCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&parse::print_graph_condition(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, zero};

    fn star() -> LabeledGraph {
        LabeledGraph::new(1, vec![vec![zero()], vec![int(1)], vec![int(1)], vec![int(1)]], [(0, 1), (0, 2), (0, 3)]).unwrap()
    }

    #[test]
    fn agg_atom_on_star() {
        let phi = parse_node_condition("agg(x0) <= 2").unwrap();
        assert!(!check_node(&star(), 0, &phi).unwrap());
        assert!(check_node(&star(), 1, &phi).unwrap());
    }

    #[test]
    fn tautology_everywhere() {
        let phi = parse_node_condition("0*x0 <= 0").unwrap();
        assert_eq!(phi, NodeCondition::truth());
        for v in 0..4 {
            assert!(check_node(&star(), v, &phi).unwrap());
        }
    }

    #[test]
    fn graph_sum_condition() {
        let g = LabeledGraph::new(1, vec![vec![int(2)], vec![int(3)], vec![int(4)]], []).unwrap();
        assert!(check_graph(&g, &parse_graph_condition("x0 <= 10").unwrap()).unwrap());
        assert!(!check_graph(&g, &parse_graph_condition("x0 <= 8").unwrap()).unwrap());
    }

    #[test]
    fn empty_graph_checks_psi_at_zero() {
        let g = LabeledGraph::empty(1);
        let phi = NodeCondition::falsity();
        let ok = GlpProgram::new(1, phi.clone(), parse_graph_condition("x0 <= 0").unwrap()).unwrap();
        let bad = GlpProgram::new(1, phi, parse_graph_condition("-1*x0 <= -1").unwrap()).unwrap();
        assert!(check_program(&g, &ok).unwrap());
        assert!(!check_program(&g, &bad).unwrap());
    }

    #[test]
    fn dimension_checks() {
        let phi = parse_node_condition("x3 <= 0").unwrap();
        assert!(matches!(check_node(&star(), 0, &phi), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(
            GlpProgram::new(2, phi, GraphCondition::truth()),
            Err(Error::UnknownVariable(3))
        ));
    }

    #[test]
    fn dglp_side_condition() {
        let d: BTreeSet<usize> = [0].into();
        assert!(is_dglp(&parse_node_condition("x0 <= 1 | x1 <= 2").unwrap(), &d));
        assert!(!is_dglp(&parse_node_condition("x1 <= 1 | x1 <= 2").unwrap(), &d));
        assert!(!is_dglp(&parse_node_condition("x0 <= 0 & (x1 <= 1 | x0 + agg(x1) <= 2)").unwrap(), &d));
        assert!(is_dglp(&parse_node_condition("(x0 <= 0 | x0 <= 1) | x1 <= 2").unwrap(), &d));
    }

    #[test]
    fn discretisation_is_conjoined() {
        let prog = DglpProgram::new(
            2,
            parse_node_condition("x1 <= 5").unwrap(),
            GraphCondition::truth(),
            [(0, vec![0, 2])].into(),
        )
        .unwrap();
        let g = |x0| LabeledGraph::new(2, vec![vec![x0, int(1)]], []).unwrap();
        assert!(check_program(&g(int(2)), &prog.base).unwrap());
        assert!(!check_program(&g(int(1)), &prog.base).unwrap());
        assert!(!check_program(&g(rat(1, 2)), &prog.base).unwrap());
        assert!(DglpProgram::new(2, NodeCondition::truth(), GraphCondition::truth(), [(0, vec![])].into()).is_err());
    }

    /// The node set of a condition computed by explicit set operations.
    fn denotation(g: &LabeledGraph, phi: &NodeCondition) -> BTreeSet<usize> {
        match phi {
            NodeCondition::Atom(t) => (0..g.node_count())
                .filter(|&v| t.holds(g.label(v), &g.neighbor_sum(v)))
                .collect(),
            NodeCondition::And(l, r) => denotation(g, l).intersection(&denotation(g, r)).copied().collect(),
            NodeCondition::Or(l, r) => denotation(g, l).union(&denotation(g, r)).copied().collect(),
        }
    }

    #[test]
    fn semantics_match_set_denotation() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..6);
            let labels = (0..n).map(|_| vec![int(rng.gen_range(-2..3)), rat(rng.gen_range(-3..4), 2)]).collect();
            let edges: Vec<(usize, usize)> = (0..n).flat_map(|u| (u..n).map(move |v| (u, v))).filter(|_| rng.gen_bool(0.4)).collect();
            let g = LabeledGraph::new(2, labels, edges).unwrap();
            let phi = parse::tests::random_condition(&mut rng, 3, 2, true);
            let set = denotation(&g, &phi);
            for v in 0..n {
                assert_eq!(check_node(&g, v, &phi).unwrap(), set.contains(&v));
            }
        }
    }

    #[test]
    fn equality_is_exact() {
        let eq = parse_node_condition("x0 + agg(x0) = 3/2").unwrap();
        let g = LabeledGraph::new(1, vec![vec![rat(1, 2)], vec![int(1)], vec![rat(1, 3)]], [(0, 1), (1, 2)]).unwrap();
        assert!(check_node(&g, 0, &eq).unwrap());
        assert!(!check_node(&g, 1, &eq).unwrap());
        assert!(!check_node(&g, 2, &eq).unwrap());
    }
}
