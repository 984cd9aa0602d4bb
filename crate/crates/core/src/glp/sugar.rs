//! Named-variable formulas with the colour abbreviations used by the PCP
//! reduction: `colour(C)`, `exactly_one(C)`, `c -> phi` and `!c -> phi`.

use std::collections::HashMap;

use super::{LinearNodeTerm, NodeCondition};
use crate::error::{Error, Result};
use crate::rational::{int, Rational};

/// Dense, insertion-ordered variable names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarNames {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl VarNames {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `name`, returning its index; panics on duplicates.
    pub fn push(&mut self, name: impl Into<String>) -> usize {
        let name = name.into();
        let i = self.names.len();
        let prev = self.index.insert(name.clone(), i);
        assert!(prev.is_none(), "duplicate variable name {name}");
        self.names.push(name);
        i
    }

    pub fn get(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// A variable reference: the node's own value or the neighbour sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ref {
    Own(String),
    Agg(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sugar {
    /// `sum coef * ref <= c`
    Leq(Vec<(Rational, Ref)>, Rational),
    /// `sum coef * ref = c`
    Eq(Vec<(Rational, Ref)>, Rational),
    /// `x_c = 1`
    Is(String),
    /// `x_c = 0`
    Not(String),
    Colour(Vec<String>),
    ExactlyOne(Vec<String>),
    /// `c -> phi := (x_c = 0) | phi`
    Implies(String, Box<Sugar>),
    /// `!c -> phi := (x_c = 1) | phi`
    NotImplies(String, Box<Sugar>),
    And(Vec<Sugar>),
    Or(Vec<Sugar>),
}

impl Sugar {
    pub fn implies(c: impl Into<String>, body: Sugar) -> Sugar {
        Sugar::Implies(c.into(), Box::new(body))
    }

    pub fn not_implies(c: impl Into<String>, body: Sugar) -> Sugar {
        Sugar::NotImplies(c.into(), Box::new(body))
    }

    pub fn is(c: impl Into<String>) -> Sugar {
        Sugar::Is(c.into())
    }

    pub fn not(c: impl Into<String>) -> Sugar {
        Sugar::Not(c.into())
    }

    /// `agg(x_name) = value`
    pub fn agg_eq(name: impl Into<String>, value: i64) -> Sugar {
        Sugar::Eq(vec![(int(1), Ref::Agg(name.into()))], int(value))
    }

    /// `x_name = value`
    pub fn own_eq(name: impl Into<String>, value: i64) -> Sugar {
        Sugar::Eq(vec![(int(1), Ref::Own(name.into()))], int(value))
    }
}

fn linear(terms: &[(Rational, Ref)], c: &Rational, names: &VarNames) -> Result<LinearNodeTerm> {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (coef, r) in terms {
        match r {
            Ref::Own(n) => a.push((names.get(n)?, coef.clone())),
            Ref::Agg(n) => b.push((names.get(n)?, coef.clone())),
        }
    }
    Ok(LinearNodeTerm::new(a, b, c.clone()))
}

fn var_is(name: &str, value: i64, names: &VarNames) -> Result<NodeCondition> {
    Ok(NodeCondition::var_equals(names.get(name)?, int(value)))
}

/// Expands every abbreviation; big conjunctions and disjunctions become
/// balanced binary trees, empty ones the atoms `0 <= 0` and `0 <= -1`.
pub fn desugar_abbreviations(spec: &Sugar, names: &VarNames) -> Result<NodeCondition> {
    Ok(match spec {
        Sugar::Leq(t, c) => NodeCondition::Atom(linear(t, c, names)?),
        Sugar::Eq(t, c) => NodeCondition::equality(linear(t, c, names)?),
        Sugar::Is(c) => var_is(c, 1, names)?,
        Sugar::Not(c) => var_is(c, 0, names)?,
        Sugar::Colour(set) => {
            let mut parts = Vec::with_capacity(set.len());
            for c in set {
                parts.push(NodeCondition::or(var_is(c, 0, names)?, var_is(c, 1, names)?));
            }
            NodeCondition::and_all(parts)
        }
        Sugar::ExactlyOne(set) => {
            let mut parts = Vec::with_capacity(set.len());
            for c in set {
                let others: Vec<&String> = set.iter().filter(|o| *o != c).collect();
                let mut none = Vec::new();
                let mut some = Vec::new();
                for o in &others {
                    none.push(var_is(o, 0, names)?);
                    some.push(var_is(o, 1, names)?);
                }
                let if_set = NodeCondition::or(var_is(c, 0, names)?, NodeCondition::and_all(none));
                let if_unset = NodeCondition::or(var_is(c, 1, names)?, NodeCondition::or_all(some));
                parts.push(NodeCondition::and(if_set, if_unset));
            }
            NodeCondition::and_all(parts)
        }
        Sugar::Implies(c, body) => NodeCondition::or(var_is(c, 0, names)?, desugar_abbreviations(body, names)?),
        Sugar::NotImplies(c, body) => NodeCondition::or(var_is(c, 1, names)?, desugar_abbreviations(body, names)?),
        Sugar::And(items) => NodeCondition::and_all(
            items
                .iter()
                .map(|s| desugar_abbreviations(s, names))
                .collect::<Result<_>>()?,
        ),
        Sugar::Or(items) => NodeCondition::or_all(
            items
                .iter()
                .map(|s| desugar_abbreviations(s, names))
                .collect::<Result<_>>()?,
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glp::parse_node_condition;

    fn names() -> VarNames {
        let mut n = VarNames::new();
        n.push("c");
        n.push("d");
        n.push("y");
        n
    }

    #[test]
    fn colour_of_singleton() {
        let got = desugar_abbreviations(&Sugar::Colour(vec!["c".into()]), &names()).unwrap();
        assert_eq!(got, parse_node_condition("(x0 = 0) | x0 = 1").unwrap());
    }

    #[test]
    fn exactly_one_singleton_uses_lattice_units() {
        let got = desugar_abbreviations(&Sugar::ExactlyOne(vec!["c".into()]), &names()).unwrap();
        let want = NodeCondition::and(
            NodeCondition::or(NodeCondition::var_equals(0, int(0)), NodeCondition::truth()),
            NodeCondition::or(NodeCondition::var_equals(0, int(1)), NodeCondition::falsity()),
        );
        assert_eq!(got, want);
    }

    #[test]
    fn implication() {
        let body = Sugar::Leq(vec![(int(1), Ref::Own("y".into()))], int(2));
        let got = desugar_abbreviations(&Sugar::implies("c", body), &names()).unwrap();
        assert_eq!(got, parse_node_condition("(x0 = 0) | x2 <= 2").unwrap());
    }

    #[test]
    fn exactly_one_semantics() {
        let phi = desugar_abbreviations(&Sugar::ExactlyOne(vec!["c".into(), "d".into()]), &names()).unwrap();
        let zero = vec![int(0); 3];
        for (c, d, want) in [(0, 0, false), (1, 0, true), (0, 1, true), (1, 1, false)] {
            assert_eq!(phi.eval(&[int(c), int(d), int(5)], &zero), want);
        }
    }

    #[test]
    fn unknown_colour() {
        assert!(matches!(
            desugar_abbreviations(&Sugar::is("nope"), &names()),
            Err(Error::UnknownName(_))
        ));
    }
}
