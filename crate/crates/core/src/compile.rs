//! Compilation of a DGLP into a one-layer graph-classifier MPNN that outputs
//! 0 exactly on the graphs satisfying the program.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glp::{DglpProgram, LinearNodeTerm, NodeCondition};
use crate::mpnn::{ClassifierKind, Mpnn};
use crate::rational::{denominator_lcm, floor, int, one, zero, Rational};
use crate::relu::{Affine, Circuit};

/// Names of the label dimensions and of the message-passing layer outputs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionMap {
    pub inputs: Vec<String>,
    pub layer_outputs: Vec<String>,
}

impl DimensionMap {
    pub fn new(num_vars: usize) -> Self {
        let inputs: Vec<String> = (0..num_vars).map(|i| format!("x{i}")).collect();
        let mut layer_outputs = vec!["y_discr".to_string(), "y_cond".to_string()];
        layer_outputs.extend(inputs.iter().cloned());
        DimensionMap { inputs, layer_outputs }
    }

    /// Replaces the default `x<i>` names.
    pub fn with_names(mut self, names: &[String]) -> Self {
        for (i, n) in names.iter().enumerate().take(self.inputs.len()) {
            self.inputs[i] = n.clone();
            self.layer_outputs[i + 2] = n.clone();
        }
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledProgram {
    pub mpnn: Mpnn,
    pub source: DglpProgram,
    pub layout: DimensionMap,
}

/// A gadget expression with its certified upper bound.
struct Bounded {
    value: Affine,
    bound: Rational,
}

struct Translator<'a> {
    circuit: Circuit,
    prog: &'a DglpProgram,
    n: usize,
}

impl Translator<'_> {
    fn is_discrete(&self, phi: &NodeCondition) -> bool {
        phi.vars().iter().all(|i| self.prog.discrete.contains_key(i))
    }

    /// Integer coefficients and an integer bound for atoms over discrete
    /// variables, so any violation is at least 1.
    fn normalise(&self, t: &LinearNodeTerm) -> LinearNodeTerm {
        if !t.vars().all(|i| self.prog.discrete.contains_key(&i)) {
            return t.clone();
        }
        let l = Rational::from_integer(denominator_lcm(t.a.values().chain(t.b.values())));
        let scale = |m: &std::collections::BTreeMap<usize, Rational>| m.iter().map(|(&i, c)| (i, c * &l)).collect::<Vec<_>>();
        LinearNodeTerm::new(scale(&t.a), scale(&t.b), floor(&(&t.c * &l)))
    }

    fn atom(&mut self, t: &LinearNodeTerm) -> Bounded {
        let t = self.normalise(t);
        let lhs = Affine::linear(
            t.a.iter().map(|(&i, c)| (i, c)).chain(t.b.iter().map(|(&i, c)| (self.n + i, c))),
            zero(),
        );
        Bounded { value: self.circuit.leq(&lhs, &t.c), bound: one() }
    }

    fn cond(&mut self, phi: &NodeCondition) -> Bounded {
        match phi {
            NodeCondition::Atom(t) => self.atom(t),
            NodeCondition::And(l, r) => {
                let (l, r) = (self.cond(l), self.cond(r));
                Bounded { value: l.value + r.value, bound: l.bound + r.bound }
            }
            NodeCondition::Or(l, r) => {
                let (d, other) = if self.is_discrete(l) { (l, r) } else { (r, l) };
                let f1 = self.cond(d);
                let f2 = self.cond(other);
                let value = self.circuit.disjunction(&f1.value, &f2.value, &f2.bound);
                Bounded { value, bound: f2.bound }
            }
        }
    }
}

fn build(prog: &DglpProgram, leq_variant: bool) -> Result<CompiledProgram> {
    if !prog.is_dglp() {
        return Err(Error::NotDglp("a disjunction has two disjuncts with non-discrete variables".into()));
    }
    let n = prog.num_vars();
    let mut t = Translator { circuit: Circuit::new(2 * n), prog, n };
    let mut y_discr = Affine::constant(zero());
    for (&i, set) in &prog.discrete {
        let set: Vec<Rational> = set.iter().map(|&m| int(m as i64)).collect();
        y_discr = y_discr + t.circuit.in_set(&Affine::input(i), &set);
    }
    let y_cond = t.cond(&prog.phi_prime).value;
    let mut outs = vec![y_discr, y_cond];
    for i in 0..n {
        let x = Affine::input(i);
        outs.push(t.circuit.identity(&x));
    }
    let layer = t.circuit.lower(&outs);

    let mut r = Circuit::new(n + 2);
    let mut out = r.eq(&Affine::input(0), &zero()) + r.eq(&Affine::input(1), &zero());
    for atom in prog.psi().atoms() {
        let lhs = Affine::linear(atom.a.iter().map(|(&i, c)| (i + 2, c)), zero());
        out = out + r.leq(&lhs, &atom.c);
    }
    let mut outputs = vec![out];
    if leq_variant {
        outputs.push(Affine::constant(zero()));
    }
    let readout = r.lower(&outputs);
    let mpnn = Mpnn::new(ClassifierKind::Graph, n, vec![layer], readout)?;
    Ok(CompiledProgram { mpnn, source: prog.clone(), layout: DimensionMap::new(n) })
}

pub fn compile(prog: &DglpProgram) -> Result<CompiledProgram> {
    build(prog, false)
}

/// Two outputs: the [`compile`] output and a constant 0.
pub fn compile_leq_variant(prog: &DglpProgram) -> Result<Mpnn> {
    Ok(build(prog, true)?.mpnn)
}
