//! Concrete syntax for node and graph conditions.
//!
//! ```text
//! or    := and ('|' and)*
//! and   := unit ('&' unit)*
//! unit  := '(' or ')' | lin ('<=' | '=') rat
//! lin   := sterm (('+' | '-') sterm)*
//! sterm := [rat '*'] ('x' nat | 'agg(' 'x' nat ')')
//! rat   := ['-'] nat ['/' nat]
//! ```

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{GraphCondition, LinearGraphTerm, LinearNodeTerm, NodeCondition};
use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    graph: bool,
}

struct Lin {
    a: Vec<(usize, Rational)>,
    b: Vec<(usize, Rational)>,
}

enum Tree {
    Atom(Lin, Rational),
    And(Box<Tree>, Box<Tree>),
    Or(Box<Tree>, Box<Tree>),
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, graph: bool) -> Self {
        Parser {
            src: src.as_bytes(),
            pos: 0,
            graph,
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.err(format!("expected `{tok}`"))
        }
    }

    fn nat(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a natural number");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(text.parse().expect("digits parse"))
    }

    fn index(&mut self) -> Result<usize> {
        let n = self.nat()?;
        match usize::try_from(n) {
            Ok(i) => Ok(i),
            Err(_) => self.err("variable index too large"),
        }
    }

    /// `nat ['/' nat]` after an optional sign has been consumed.
    fn unsigned_rat(&mut self) -> Result<Rational> {
        let num = self.nat()?;
        if self.eat("/") {
            let den = self.nat()?;
            if den.is_zero() {
                return self.err("zero denominator");
            }
            Ok(Rational::new(num, den))
        } else {
            Ok(Rational::from_integer(num))
        }
    }

    fn rat(&mut self) -> Result<Rational> {
        let neg = self.eat("-");
        let r = self.unsigned_rat()?;
        Ok(if neg { -r } else { r })
    }

    fn or(&mut self) -> Result<Tree> {
        let mut left = self.and()?;
        while !self.graph && self.eat("|") {
            let right = self.and()?;
            left = Tree::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Tree> {
        let mut left = self.unit()?;
        while self.eat("&") {
            let right = self.unit()?;
            left = Tree::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn unit(&mut self) -> Result<Tree> {
        if self.eat("(") {
            let inner = self.or()?;
            self.expect(")")?;
            return Ok(inner);
        }
        let lin = self.lin()?;
        if self.eat("<=") {
            let c = self.rat()?;
            Ok(Tree::Atom(lin, c))
        } else if self.eat("=") {
            let c = self.rat()?;
            let neg = Lin {
                a: lin.a.iter().map(|(i, x)| (*i, -x)).collect(),
                b: lin.b.iter().map(|(i, x)| (*i, -x)).collect(),
            };
            Ok(Tree::And(Box::new(Tree::Atom(lin, c.clone())), Box::new(Tree::Atom(neg, -c))))
        } else {
            self.err("expected `<=` or `=`")
        }
    }

    fn lin(&mut self) -> Result<Lin> {
        let mut lin = Lin { a: Vec::new(), b: Vec::new() };
        self.sterm(Rational::one(), &mut lin)?;
        loop {
            let sign = if self.eat("+") {
                Rational::one()
            } else if self.peek() == Some(b'-') {
                self.pos += 1;
                -Rational::one()
            } else {
                break;
            };
            self.sterm(sign, &mut lin)?;
        }
        Ok(lin)
    }

    fn sterm(&mut self, sign: Rational, lin: &mut Lin) -> Result<()> {
        let mut coef = sign;
        if self.eat("-") {
            coef = -coef;
        }
        if matches!(self.peek(), Some(b'0'..=b'9')) {
            coef *= self.unsigned_rat()?;
            self.expect("*")?;
            if self.eat("-") {
                coef = -coef;
            }
        }
        if self.eat("agg(") {
            if self.graph {
                return self.err("`agg` is not allowed in graph conditions");
            }
            self.expect("x")?;
            let i = self.index()?;
            self.expect(")")?;
            lin.b.push((i, coef));
        } else if self.eat("x") {
            let i = self.index()?;
            lin.a.push((i, coef));
        } else {
            return self.err("expected `x<index>` or `agg(x<index>)`");
        }
        Ok(())
    }

    fn finish(&mut self) -> Result<()> {
        if self.peek().is_some() {
            return self.err("unexpected trailing input");
        }
        Ok(())
    }
}

fn to_node(t: Tree) -> NodeCondition {
    match t {
        Tree::Atom(lin, c) => NodeCondition::Atom(LinearNodeTerm::new(lin.a, lin.b, c)),
        Tree::And(l, r) => NodeCondition::and(to_node(*l), to_node(*r)),
        Tree::Or(l, r) => NodeCondition::or(to_node(*l), to_node(*r)),
    }
}

fn to_graph(t: Tree) -> GraphCondition {
    match t {
        Tree::Atom(lin, c) => GraphCondition::Atom(LinearGraphTerm::new(lin.a, c)),
        Tree::And(l, r) => GraphCondition::and(to_graph(*l), to_graph(*r)),
        Tree::Or(..) => unreachable!("graph parser never builds disjunctions"),
    }
}

pub fn parse_node_condition(text: &str) -> Result<NodeCondition> {
    let mut p = Parser::new(text, false);
    let t = p.or()?;
    p.finish()?;
    Ok(to_node(t))
}

pub fn parse_graph_condition(text: &str) -> Result<GraphCondition> {
    let mut p = Parser::new(text, true);
    let t = p.or()?;
    p.finish()?;
    Ok(to_graph(t))
}

fn print_lin(a: &BTreeMap<usize, Rational>, b: &BTreeMap<usize, Rational>, out: &mut String) {
    let terms: Vec<(String, &Rational)> = a
        .iter()
        .map(|(i, c)| (format!("x{i}"), c))
        .chain(b.iter().map(|(i, c)| (format!("agg(x{i})"), c)))
        .collect();
    if terms.is_empty() {
        out.push_str("0*x0");
        return;
    }
    for (k, (var, c)) in terms.iter().enumerate() {
        let mag = if k == 0 {
            (*c).clone()
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
            c.abs()
        };
        if !mag.is_one() {
            out.push_str(&format_rational(&mag));
            out.push('*');
        }
        out.push_str(var);
    }
}

fn print_node(n: &NodeCondition, out: &mut String) {
    let wrapped = |n: &NodeCondition, plain: bool, out: &mut String| {
        if plain {
            print_node(n, out);
        } else {
            out.push('(');
            print_node(n, out);
            out.push(')');
        }
    };
    match n {
        NodeCondition::Atom(t) => {
            print_lin(&t.a, &t.b, out);
            out.push_str(" <= ");
            out.push_str(&format_rational(&t.c));
        }
        NodeCondition::And(l, r) => {
            wrapped(l, !matches!(**l, NodeCondition::Or(..)), out);
            out.push_str(" & ");
            wrapped(r, matches!(**r, NodeCondition::Atom(_)), out);
        }
        NodeCondition::Or(l, r) => {
            print_node(l, out);
            out.push_str(" | ");
            wrapped(r, !matches!(**r, NodeCondition::Or(..)), out);
        }
    }
}

fn print_graph(n: &GraphCondition, out: &mut String) {
    match n {
        GraphCondition::Atom(t) => {
            print_lin(&t.a, &BTreeMap::new(), out);
            out.push_str(" <= ");
            out.push_str(&format_rational(&t.c));
        }
        GraphCondition::And(l, r) => {
            print_graph(l, out);
            out.push_str(" & ");
            if matches!(**r, GraphCondition::Atom(_)) {
                print_graph(r, out);
            } else {
                out.push('(');
                print_graph(r, out);
                out.push(')');
            }
        }
    }
}

pub fn print_node_condition(n: &NodeCondition) -> String {
    let mut out = String::new();
    print_node(n, &mut out);
    out
}

pub fn print_graph_condition(n: &GraphCondition) -> String {
    let mut out = String::new();
    print_graph(n, &mut out);
    out
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use rand::Rng;

    pub(crate) fn random_condition(rng: &mut impl Rng, depth: usize, vars: usize, agg: bool) -> NodeCondition {
        if depth == 0 || rng.gen_bool(0.3) {
            let coef = |rng: &mut dyn rand::RngCore| match rng.gen_range(0..4) {
                0 => int(0),
                1 => int(1),
                2 => int(-1),
                _ => rat(rng.gen_range(-5..6), rng.gen_range(1..4)),
            };
            let a: Vec<(usize, Rational)> = (0..vars).map(|i| (i, coef(rng))).collect();
            let b: Vec<(usize, Rational)> = if agg { (0..vars).map(|i| (i, coef(rng))).collect() } else { vec![] };
            let c = rat(rng.gen_range(-4..5), rng.gen_range(1..3));
            return NodeCondition::Atom(LinearNodeTerm::new(a, b, c));
        }
        let l = random_condition(rng, depth - 1, vars, agg);
        let r = random_condition(rng, depth - 1, vars, agg);
        if rng.gen_bool(0.5) {
            NodeCondition::and(l, r)
        } else {
            NodeCondition::or(l, r)
        }
    }

    #[test]
    fn atom_with_agg() {
        let phi = parse_node_condition("x1 + 2*agg(x2) <= 5").unwrap();
        assert_eq!(phi, NodeCondition::Atom(LinearNodeTerm::new([(1, int(1))], [(2, int(2))], int(5))));
    }

    #[test]
    fn equality_desugars() {
        let phi = parse_node_condition("x0 = 3").unwrap();
        let le = LinearNodeTerm::new([(0, int(1))], [], int(3));
        let ge = LinearNodeTerm::new([(0, int(-1))], [], int(-3));
        assert_eq!(phi, NodeCondition::and(NodeCondition::Atom(le), NodeCondition::Atom(ge)));
    }

    #[test]
    fn precedence() {
        let phi = parse_node_condition("(x0 <= 1 | x1 <= 0) & x2 <= 2").unwrap();
        match phi {
            NodeCondition::And(l, r) => {
                assert!(matches!(*l, NodeCondition::Or(..)));
                assert!(matches!(*r, NodeCondition::Atom(_)));
            }
            _ => panic!("expected conjunction"),
        }
        let psi = parse_node_condition("x0 <= 1 | x1 <= 0 & x2 <= 2").unwrap();
        assert!(matches!(psi, NodeCondition::Or(..)));
    }

    #[test]
    fn signs_and_fractions() {
        let phi = parse_node_condition("-x0 - 1/2*agg(x1) + -3*x2 <= -7/3").unwrap();
        let want = LinearNodeTerm::new([(0, int(-1)), (2, int(-3))], [(1, rat(-1, 2))], rat(-7, 3));
        assert_eq!(phi, NodeCondition::Atom(want));
    }

    #[test]
    fn syntax_errors_are_located() {
        for (text, pos) in [("x0 <= ", 6), ("x0 < 1", 3), ("y0 <= 1", 0), ("x0 <= 1/0", 9), ("(x0 <= 1", 8), ("x0 <= 1 x", 8)] {
            match parse_node_condition(text) {
                Err(Error::Syntax { pos: p, .. }) => assert_eq!(p, pos, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
        assert!(parse_graph_condition("agg(x0) <= 1").is_err());
        assert!(parse_graph_condition("x0 <= 1 | x1 <= 1").is_err());
    }

    #[test]
    fn round_trip_random() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let phi = random_condition(&mut rng, 4, 3, true);
            let text = print_node_condition(&phi);
            assert_eq!(parse_node_condition(&text).unwrap(), phi, "{text}");
        }
        let psi = GraphCondition::and(
            GraphCondition::Atom(LinearGraphTerm::new([(0, int(2))], int(1))),
            GraphCondition::and(GraphCondition::truth(), GraphCondition::Atom(LinearGraphTerm::new([(1, rat(-1, 3))], int(0)))),
        );
        assert_eq!(parse_graph_condition(&print_graph_condition(&psi)).unwrap(), psi);
    }
}
