//! Exact output reachability for ReLU networks: a rational LP feasibility
//! check for polytopes with strict constraints, and a complete depth-first
//! search over activation phases.

mod simplex;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

pub use simplex::{maximise, LpOutcome};

use crate::error::{Error, Result};
use crate::rational::{dot, int, one, Rational};
use crate::relu::{Affine, Circuit, ReluNetwork, Signal};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
}

/// `a . x <= b` or `a . x < b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearConstraint {
    pub a: Vec<Rational>,
    pub b: Rational,
    pub rel: Relation,
}

impl LinearConstraint {
    pub fn le(a: Vec<Rational>, b: Rational) -> Self {
        LinearConstraint { a, b, rel: Relation::Le }
    }

    pub fn lt(a: Vec<Rational>, b: Rational) -> Self {
        LinearConstraint { a, b, rel: Relation::Lt }
    }

    pub fn is_strict(&self) -> bool {
        self.rel == Relation::Lt
    }

    pub fn holds(&self, x: &[Rational]) -> bool {
        let lhs = dot(&self.a, x);
        match self.rel {
            Relation::Le => lhs <= self.b,
            Relation::Lt => lhs < self.b,
        }
    }

    /// The complement `-a . x < -b` (resp. `<=` for a strict constraint).
    pub fn negated(&self) -> Self {
        LinearConstraint {
            a: self.a.iter().map(|v| -v).collect(),
            b: -self.b.clone(),
            rel: match self.rel {
                Relation::Le => Relation::Lt,
                Relation::Lt => Relation::Le,
            },
        }
    }
}

/// A conjunction of linear constraints; no constraints is the whole space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polytope {
    pub dim: usize,
    pub constraints: Vec<LinearConstraint>,
}

impl Polytope {
    pub fn new(dim: usize) -> Self {
        Polytope { dim, constraints: Vec::new() }
    }

    pub fn with(dim: usize, constraints: Vec<LinearConstraint>) -> Result<Self> {
        let mut p = Polytope::new(dim);
        for c in constraints {
            p.push(c)?;
        }
        Ok(p)
    }

    pub fn push(&mut self, c: LinearConstraint) -> Result<()> {
        if c.a.len() != self.dim {
            return Err(Error::DimensionMismatch {
                context: "constraint coefficients",
                expected: self.dim,
                found: c.a.len(),
            });
        }
        self.constraints.push(c);
        Ok(())
    }

    fn unit(&self, i: usize, s: i64) -> Vec<Rational> {
        let mut a = vec![Rational::zero(); self.dim];
        a[i] = int(s);
        a
    }

    /// `lo <= x_i <= hi`.
    pub fn bound(&mut self, i: usize, lo: Rational, hi: Rational) {
        let (up, down) = (self.unit(i, 1), self.unit(i, -1));
        self.constraints.push(LinearConstraint::le(up, hi));
        self.constraints.push(LinearConstraint::le(down, -lo));
    }

    /// Every coordinate in `[lo, hi]`.
    pub fn cube(dim: usize, lo: &Rational, hi: &Rational) -> Self {
        let mut p = Polytope::new(dim);
        for i in 0..dim {
            p.bound(i, lo.clone(), hi.clone());
        }
        p
    }

    /// `a . x = b` as two non-strict constraints.
    pub fn push_eq(&mut self, a: Vec<Rational>, b: Rational) -> Result<()> {
        let neg = a.iter().map(|v| -v).collect();
        self.push(LinearConstraint::le(a, b.clone()))?;
        self.push(LinearConstraint::le(neg, -b))
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.dim && self.constraints.iter().all(|c| c.holds(x))
    }

    /// The complement as a union of single strict (or non-strict)
    /// constraints; the complement of the full space is empty.
    pub fn complement(&self) -> Vec<Polytope> {
        self.constraints
            .iter()
            .map(|c| Polytope { dim: self.dim, constraints: vec![c.negated()] })
            .collect()
    }

    /// Constraints on a block of `dim` coordinates starting at `offset`
    /// inside a space of dimension `total`.
    pub fn embed(&self, offset: usize, total: usize) -> Vec<LinearConstraint> {
        self.constraints
            .iter()
            .map(|c| {
                let mut a = vec![Rational::zero(); total];
                a[offset..offset + self.dim].clone_from_slice(&c.a);
                LinearConstraint { a, b: c.b.clone(), rel: c.rel }
            })
            .collect()
    }
}

/// A point satisfying every constraint (strict ones strictly), if one
/// exists.
///
/// Maximises a common slack `t` in `[0, 1]` on the strict constraints; the
/// system is feasible iff the closure is feasible and the optimum is
/// positive.
pub fn lp_feasible(p: &Polytope) -> Option<Vec<Rational>> {
    let n = p.dim;
    let strict = p.constraints.iter().any(|c| c.is_strict());
    let cols = 2 * n + usize::from(strict);
    let mut a = Vec::with_capacity(p.constraints.len() + 1);
    let mut b = Vec::with_capacity(p.constraints.len() + 1);
    for c in &p.constraints {
        let mut row = vec![Rational::zero(); cols];
        for (j, v) in c.a.iter().enumerate() {
            if !v.is_zero() {
                row[j] = v.clone();
                row[n + j] = -v;
            }
        }
        if c.is_strict() {
            row[2 * n] = one();
        }
        a.push(row);
        b.push(c.b.clone());
    }
    let mut obj = vec![Rational::zero(); cols];
    if strict {
        let mut row = vec![Rational::zero(); cols];
        row[2 * n] = one();
        a.push(row);
        b.push(one());
        obj[2 * n] = one();
    }
    match maximise(&a, &b, &obj) {
        LpOutcome::Infeasible => None,
        LpOutcome::Unbounded => unreachable!("slack is capped at 1"),
        LpOutcome::Optimal { point, value } => {
            if strict && !value.is_positive() {
                return None;
            }
            Some((0..n).map(|j| &point[j] - &point[n + j]).collect())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachQuery {
    pub net: ReluNetwork,
    pub input: Polytope,
    pub output: Polytope,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReachResult {
    Sat(Vec<Rational>),
    Unsat,
}

impl ReachResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, ReachResult::Sat(_))
    }
}

/// Affine function of the network input: coefficients, then the constant.
type Expr = Vec<Rational>;

struct Search<'a> {
    circuit: Circuit,
    outputs: Vec<Affine>,
    input: &'a Polytope,
    output: &'a Polytope,
    /// Value of each decided unit as an affine function of the input.
    values: Vec<Expr>,
    constraints: Vec<LinearConstraint>,
    lp_calls: usize,
}

impl Search<'_> {
    fn n(&self) -> usize {
        self.input.dim
    }

    fn expr(&self, a: &Affine) -> Expr {
        let n = self.n();
        let mut e = vec![Rational::zero(); n + 1];
        e[n] = a.constant_term().clone();
        for (s, c) in a.terms() {
            match s {
                Signal::Input(i) => e[*i] += c,
                Signal::Unit(u) => {
                    for (acc, v) in e.iter_mut().zip(&self.values[*u]) {
                        if !v.is_zero() {
                            *acc += c * v;
                        }
                    }
                }
            }
        }
        e
    }

    fn feasible_with(&mut self, extra: Vec<LinearConstraint>) -> Option<Vec<Rational>> {
        self.lp_calls += 1;
        let mut all = self.constraints.clone();
        all.extend(extra);
        lp_feasible(&Polytope { dim: self.n(), constraints: all })
    }

    /// `e > 0` (sign 1) or `e < 0` (sign -1) somewhere in the current region.
    fn strictly(&mut self, e: &Expr, sign: i64) -> bool {
        let n = self.n();
        let s = int(-sign);
        let a = e[..n].iter().map(|v| v * &s).collect();
        self.feasible_with(vec![LinearConstraint::lt(a, &e[n] * int(sign))]).is_some()
    }

    /// `e >= 0` if `active`, else `e <= 0`.
    fn phase(&self, e: &Expr, active: bool) -> LinearConstraint {
        let n = self.n();
        if active {
            LinearConstraint::le(e[..n].iter().map(|v| -v).collect(), e[n].clone())
        } else {
            LinearConstraint::le(e[..n].to_vec(), -e[n].clone())
        }
    }

    fn leaf(&mut self) -> Option<Vec<Rational>> {
        let n = self.n();
        let outs: Vec<Expr> = self.outputs.clone().iter().map(|o| self.expr(o)).collect();
        let mut extra = Vec::with_capacity(self.output.constraints.len());
        for c in &self.output.constraints {
            let mut a = vec![Rational::zero(); n];
            let mut b = c.b.clone();
            for (k, o) in c.a.iter().zip(&outs) {
                if k.is_zero() {
                    continue;
                }
                for (acc, v) in a.iter_mut().zip(o) {
                    *acc += k * v;
                }
                b -= k * &o[n];
            }
            extra.push(LinearConstraint { a, b, rel: c.rel });
        }
        self.feasible_with(extra)
    }

    fn dfs(&mut self, u: usize) -> Option<Vec<Rational>> {
        if u == self.circuit.unit_count() {
            return self.leaf();
        }
        let e = self.expr(&self.circuit.units()[u].clone());
        let n = self.n();
        let mut branches = Vec::with_capacity(2);
        if e[..n].iter().all(|v| v.is_zero()) {
            branches.push(e[n].is_positive());
        } else {
            // Only split where the pre-activation takes both signs.
            let pos = self.strictly(&e, 1);
            let neg = self.strictly(&e, -1);
            if pos {
                branches.push(true);
            }
            if neg || !pos {
                branches.push(false);
            }
        }
        let split = branches.len() == 2;
        for active in branches {
            let mut pushed = false;
            if split {
                self.constraints.push(self.phase(&e, active));
                pushed = true;
            }
            self.values.push(if active { e.clone() } else { vec![Rational::zero(); n + 1] });
            let found = self.dfs(u + 1);
            self.values.pop();
            if pushed {
                self.constraints.pop();
            }
            if found.is_some() {
                return found;
            }
        }
        None
    }
}

fn check_dims(net: &ReluNetwork, input: &Polytope, output: &Polytope) -> Result<()> {
    if input.dim != net.input_dim() {
        return Err(Error::DimensionMismatch { context: "input polytope", expected: net.input_dim(), found: input.dim });
    }
    if output.dim != net.output_dim() {
        return Err(Error::DimensionMismatch { context: "output polytope", expected: net.output_dim(), found: output.dim });
    }
    Ok(())
}

/// Statistics of one reachability search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub units: usize,
    pub lp_calls: usize,
}

/// Decides whether some input in `q.input` is mapped into `q.output`.
pub fn solve(q: &ReachQuery) -> Result<ReachResult> {
    solve_with_stats(q).map(|(r, _)| r)
}

pub fn solve_with_stats(q: &ReachQuery) -> Result<(ReachResult, SearchStats)> {
    check_dims(&q.net, &q.input, &q.output)?;
    let n = q.net.input_dim();
    let mut circuit = Circuit::new(n);
    let xs = circuit.inputs();
    let outputs = circuit.import(&q.net, &xs);
    let mut s = Search {
        circuit,
        outputs,
        input: &q.input,
        output: &q.output,
        values: Vec::new(),
        constraints: q.input.constraints.clone(),
        lp_calls: 0,
    };
    let found = if lp_feasible(&q.input).is_some() { s.dfs(0) } else { None };
    let stats = SearchStats { units: s.circuit.unit_count(), lp_calls: s.lp_calls };
    let result = match found {
        Some(x) => {
            debug_assert!(q.input.contains(&x));
            debug_assert!(q.output.contains(&q.net.eval(&x).expect("dimension checked")));
            ReachResult::Sat(x)
        }
        None => ReachResult::Unsat,
    };
    Ok((result, stats))
}

/// Reachability of any polytope in `outputs`, tried in order.
pub fn solve_union(net: &ReluNetwork, input: &Polytope, outputs: &[Polytope]) -> Result<ReachResult> {
    for out in outputs {
        check_dims(net, input, out)?;
    }
    for out in outputs {
        let q = ReachQuery { net: net.clone(), input: input.clone(), output: out.clone() };
        if let r @ ReachResult::Sat(_) = solve(&q)? {
            return Ok(r);
        }
    }
    Ok(ReachResult::Unsat)
}

#[cfg(test)]
mod tests;
