//! A hash-consed ReLU circuit: every unit is `re(affine combination of
//! inputs and earlier units)`. Circuits are lowered into layered
//! [`ReluNetwork`]s, forwarding values through intermediate layers where a
//! consumer sits more than one level above its producer.

use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Signed, Zero};

use super::network::{Layer, ReluNetwork, SparseMatrix};
use crate::rational::{one, relu, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Signal {
    Input(usize),
    Unit(usize),
}

/// `constant + sum(coefficient * signal)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Affine {
    terms: BTreeMap<Signal, Rational>,
    constant: Rational,
}

impl Affine {
    pub fn constant(c: Rational) -> Self {
        Affine {
            terms: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn signal(s: Signal) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(s, one());
        Affine {
            terms,
            constant: Rational::zero(),
        }
    }

    pub fn input(i: usize) -> Self {
        Affine::signal(Signal::Input(i))
    }

    /// `sum(coefficients[i] * x_i) + constant`, skipping zero coefficients.
    pub fn linear<'a>(coefficients: impl IntoIterator<Item = (usize, &'a Rational)>, constant: Rational) -> Self {
        let mut a = Affine::constant(constant);
        for (i, c) in coefficients {
            a.add_term(Signal::Input(i), c.clone());
        }
        a
    }

    pub fn add_term(&mut self, s: Signal, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(s).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&s);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Signal, &Rational)> {
        self.terms.iter()
    }

    pub fn constant_term(&self) -> &Rational {
        &self.constant
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scaled(&self, k: &Rational) -> Affine {
        if k.is_zero() {
            return Affine::default();
        }
        Affine {
            terms: self.terms.iter().map(|(s, c)| (*s, c * k)).collect(),
            constant: &self.constant * k,
        }
    }

    pub fn add_scaled(&mut self, other: &Affine, k: &Rational) {
        if k.is_zero() {
            return;
        }
        for (s, c) in &other.terms {
            self.add_term(*s, c * k);
        }
        self.constant += &other.constant * k;
    }

    /// True when the value is nonnegative for every input: only unit terms
    /// with nonnegative coefficients and a nonnegative constant.
    fn provably_nonnegative(&self) -> bool {
        !self.constant.is_negative()
            && self
                .terms
                .iter()
                .all(|(s, c)| matches!(s, Signal::Unit(_)) && !c.is_negative())
    }

    /// Evaluates given the input vector and all unit values.
    pub fn eval(&self, inputs: &[Rational], units: &[Rational]) -> Rational {
        let mut acc = self.constant.clone();
        for (s, c) in &self.terms {
            let v = match s {
                Signal::Input(i) => &inputs[*i],
                Signal::Unit(u) => &units[*u],
            };
            acc += c * v;
        }
        acc
    }
}

impl Add for Affine {
    type Output = Affine;
    fn add(mut self, rhs: Affine) -> Affine {
        self.add_scaled(&rhs, &one());
        self
    }
}

impl Sub for Affine {
    type Output = Affine;
    fn sub(mut self, rhs: Affine) -> Affine {
        self.add_scaled(&rhs, &-one());
        self
    }
}

impl Neg for Affine {
    type Output = Affine;
    fn neg(self) -> Affine {
        self.scaled(&-one())
    }
}

impl Mul<&Rational> for Affine {
    type Output = Affine;
    fn mul(self, k: &Rational) -> Affine {
        self.scaled(k)
    }
}

impl Add<Rational> for Affine {
    type Output = Affine;
    fn add(mut self, c: Rational) -> Affine {
        self.constant += c;
        self
    }
}

impl Sub<Rational> for Affine {
    type Output = Affine;
    fn sub(mut self, c: Rational) -> Affine {
        self.constant -= c;
        self
    }
}

impl std::iter::Sum for Affine {
    fn sum<I: Iterator<Item = Affine>>(iter: I) -> Affine {
        iter.fold(Affine::default(), |a, b| a + b)
    }
}

/// Builder for ReLU circuits with structural sharing of identical units.
#[derive(Clone, Debug)]
pub struct Circuit {
    inputs: usize,
    units: Vec<Affine>,
    index: HashMap<Affine, usize>,
}

impl Circuit {
    pub fn new(inputs: usize) -> Self {
        Circuit {
            inputs,
            units: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn input_count(&self) -> usize {
        self.inputs
    }

    pub fn unit_count(&self) -> usize {
        self.units.len()
    }

    /// Unit arguments in creation (topological) order.
    pub fn units(&self) -> &[Affine] {
        &self.units
    }

    pub fn inputs(&self) -> Vec<Affine> {
        (0..self.inputs).map(Affine::input).collect()
    }

    /// `re(a)`, reusing an existing unit for the same argument.
    pub fn relu(&mut self, a: Affine) -> Affine {
        if a.is_constant() {
            return Affine::constant(relu(&a.constant));
        }
        if a.provably_nonnegative() {
            return a;
        }
        if let Some(&u) = self.index.get(&a) {
            return Affine::signal(Signal::Unit(u));
        }
        let u = self.units.len();
        self.units.push(a.clone());
        self.index.insert(a, u);
        Affine::signal(Signal::Unit(u))
    }

    /// Feeds `inputs` through `net`, returning its outputs as affine
    /// expressions over this circuit.
    pub fn import(&mut self, net: &ReluNetwork, inputs: &[Affine]) -> Vec<Affine> {
        assert_eq!(inputs.len(), net.input_dim(), "import dimension");
        let mut cur = inputs.to_vec();
        for layer in net.layers() {
            let mut next = Vec::with_capacity(layer.output_dim());
            for (row, b) in layer.weights.rows().iter().zip(&layer.bias) {
                let mut a = Affine::constant(b.clone());
                for (c, w) in row {
                    a.add_scaled(&cur[*c], w);
                }
                next.push(if layer.relu { self.relu(a) } else { a });
            }
            cur = next;
        }
        cur
    }

    /// Evaluates the outputs directly on the circuit.
    pub fn eval(&self, outputs: &[Affine], x: &[Rational]) -> Vec<Rational> {
        let mut vals: Vec<Rational> = Vec::with_capacity(self.units.len());
        for a in &self.units {
            let v = a.eval(x, &vals);
            vals.push(relu(&v));
        }
        outputs.iter().map(|o| o.eval(x, &vals)).collect()
    }

    /// Lowers the circuit computing `outputs` into a layered network: all
    /// hidden layers ReLU-activated, the last layer affine.
    pub fn lower(&self, outputs: &[Affine]) -> ReluNetwork {
        let n = self.units.len();
        // Units reachable from the outputs.
        let mut live = vec![false; n];
        let mut stack: Vec<usize> = Vec::new();
        let mark = |a: &Affine, live: &mut Vec<bool>, stack: &mut Vec<usize>| {
            for s in a.terms.keys() {
                if let Signal::Unit(u) = s {
                    if !live[*u] {
                        live[*u] = true;
                        stack.push(*u);
                    }
                }
            }
        };
        for o in outputs {
            mark(o, &mut live, &mut stack);
        }
        while let Some(u) = stack.pop() {
            mark(&self.units[u], &mut live, &mut stack);
        }

        // Units only reference earlier units, so index order is topological.
        let sig_level = |s: &Signal, level: &[usize]| match s {
            Signal::Input(_) => 0,
            Signal::Unit(u) => level[*u],
        };
        let mut level = vec![0usize; n];
        for u in 0..n {
            if live[u] {
                level[u] = 1 + self.units[u].terms.keys().map(|s| sig_level(s, &level)).max().unwrap_or(0);
            }
        }
        let depth = outputs
            .iter()
            .flat_map(|o| o.terms.keys())
            .map(|s| sig_level(s, &level))
            .max()
            .unwrap_or(0);

        // Highest level at which each signal must still be readable.
        let mut need_unit = vec![0usize; n];
        let mut need_input = vec![0usize; self.inputs];
        let note = |s: &Signal, at: usize, need_unit: &mut Vec<usize>, need_input: &mut Vec<usize>| match s {
            Signal::Input(i) => need_input[*i] = need_input[*i].max(at),
            Signal::Unit(u) => need_unit[*u] = need_unit[*u].max(at),
        };
        for u in (0..n).filter(|&u| live[u]) {
            for s in self.units[u].terms.keys() {
                note(s, level[u] - 1, &mut need_unit, &mut need_input);
            }
        }
        for o in outputs {
            for s in o.terms.keys() {
                note(s, depth, &mut need_unit, &mut need_input);
            }
        }

        if depth == 0 {
            let rows = outputs
                .iter()
                .map(|o| {
                    o.terms
                        .iter()
                        .map(|(s, c)| match s {
                            Signal::Input(i) => (*i, c.clone()),
                            Signal::Unit(_) => unreachable!("depth 0 has no units"),
                        })
                        .collect()
                })
                .collect();
            let w = SparseMatrix::from_rows(self.inputs, rows).expect("valid columns");
            let b = outputs.iter().map(|o| o.constant.clone()).collect();
            let layer = Layer::new(w, b, false).expect("consistent layer");
            return ReluNetwork::new(self.inputs, vec![layer]).expect("consistent network");
        }

        #[derive(Clone, Copy)]
        enum Slot {
            Unit(usize),
            CopyUnit(usize),
            Pos(usize),
            Neg(usize),
        }
        // slots[t] lists the units of layer t (1-based; index 0 unused).
        let mut slots: Vec<Vec<Slot>> = vec![Vec::new(); depth + 1];
        let mut unit_slot: HashMap<(usize, usize), usize> = HashMap::new();
        let mut input_slot: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for t in 1..=depth {
            for i in 0..self.inputs {
                if need_input[i] >= t {
                    let p = slots[t].len();
                    slots[t].push(Slot::Pos(i));
                    slots[t].push(Slot::Neg(i));
                    input_slot.insert((i, t), (p, p + 1));
                }
            }
            for u in (0..n).filter(|&u| live[u]) {
                if level[u] == t {
                    unit_slot.insert((u, t), slots[t].len());
                    slots[t].push(Slot::Unit(u));
                } else if level[u] < t && need_unit[u] >= t {
                    unit_slot.insert((u, t), slots[t].len());
                    slots[t].push(Slot::CopyUnit(u));
                }
            }
        }

        let read = |s: &Signal, at: usize, c: &Rational, row: &mut Vec<(usize, Rational)>| match s {
            Signal::Input(i) if at == 0 => row.push((*i, c.clone())),
            Signal::Input(i) => {
                let (p, q) = input_slot[&(*i, at)];
                row.push((p, c.clone()));
                row.push((q, -c.clone()));
            }
            Signal::Unit(u) => row.push((unit_slot[&(*u, at)], c.clone())),
        };

        let mut layers = Vec::with_capacity(depth + 1);
        for t in 1..=depth {
            let cols = if t == 1 { self.inputs } else { slots[t - 1].len() };
            let mut rows = Vec::with_capacity(slots[t].len());
            let mut bias = Vec::with_capacity(slots[t].len());
            for slot in &slots[t] {
                let mut row = Vec::new();
                match *slot {
                    Slot::Unit(u) => {
                        for (s, c) in &self.units[u].terms {
                            read(s, t - 1, c, &mut row);
                        }
                        bias.push(self.units[u].constant.clone());
                    }
                    Slot::CopyUnit(u) => {
                        read(&Signal::Unit(u), t - 1, &one(), &mut row);
                        bias.push(Rational::zero());
                    }
                    Slot::Pos(i) => {
                        if t == 1 {
                            row.push((i, one()));
                        } else {
                            row.push((input_slot[&(i, t - 1)].0, one()));
                        }
                        bias.push(Rational::zero());
                    }
                    Slot::Neg(i) => {
                        if t == 1 {
                            row.push((i, -one()));
                        } else {
                            row.push((input_slot[&(i, t - 1)].1, one()));
                        }
                        bias.push(Rational::zero());
                    }
                }
                rows.push(row);
            }
            let w = SparseMatrix::from_rows(cols, rows).expect("valid columns");
            layers.push(Layer::new(w, bias, true).expect("consistent layer"));
        }
        let mut rows = Vec::with_capacity(outputs.len());
        for o in outputs {
            let mut row = Vec::new();
            for (s, c) in &o.terms {
                read(s, depth, c, &mut row);
            }
            rows.push(row);
        }
        let w = SparseMatrix::from_rows(slots[depth].len(), rows).expect("valid columns");
        let b = outputs.iter().map(|o| o.constant.clone()).collect();
        layers.push(Layer::new(w, b, false).expect("consistent layer"));
        ReluNetwork::new(self.inputs, layers).expect("consistent network")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn probes() -> Vec<Rational> {
        vec![int(-3), rat(-1, 2), int(0), rat(2, 3), int(5)]
    }

    #[test]
    fn shares_identical_units() {
        let mut c = Circuit::new(1);
        let a = c.relu(Affine::input(0) - int(1));
        let b = c.relu(Affine::input(0) - int(1));
        assert_eq!(a, b);
        assert_eq!(c.unit_count(), 1);
    }

    #[test]
    fn lowering_forwards_inputs_and_units() {
        // out = x + re(re(x) - 1) + re(x): mixes levels 0, 1 and 2.
        let mut c = Circuit::new(1);
        let x = Affine::input(0);
        let r = c.relu(x.clone());
        let rr = c.relu(r.clone() - int(1));
        let out = x + rr + r;
        let net = c.lower(std::slice::from_ref(&out));
        assert_eq!(net.layers().len(), 3);
        for p in probes() {
            assert_eq!(net.eval(&[p.clone()]).unwrap(), c.eval(std::slice::from_ref(&out), &[p]));
        }
    }

    #[test]
    fn affine_only_lowers_to_single_layer() {
        let c = Circuit::new(2);
        let out = Affine::input(0) * &int(3) - Affine::input(1) + int(2);
        let net = c.lower(&[out]);
        assert_eq!(net.layers().len(), 1);
        assert_eq!(net.eval(&[int(1), int(4)]).unwrap(), vec![int(1)]);
    }

    #[test]
    fn nonnegative_relu_is_elided() {
        let mut c = Circuit::new(1);
        let r = c.relu(Affine::input(0));
        let again = c.relu(r.clone() * &int(2) + int(1));
        assert_eq!(again, r * &int(2) + int(1));
        assert_eq!(c.unit_count(), 1);
    }
}
