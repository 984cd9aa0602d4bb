use num_traits::Zero;

use super::circuit::{Affine, Circuit};
use super::network::ReluNetwork;
use crate::error::{Error, Result};
use crate::rational::{int, one, rat, Rational};

impl Circuit {
    /// `<a <= m> = re(re(a - m) - re(a - (m + 1)))`, bounded by 1.
    pub fn leq(&mut self, a: &Affine, m: &Rational) -> Affine {
        let lo = self.relu(a.clone() - m.clone());
        let hi = self.relu(a.clone() - (m + one()));
        self.relu(lo - hi)
    }

    /// `<a in [m; n]>`; zero exactly on the closed interval.
    pub fn interval(&mut self, a: &Affine, m: &Rational, n: &Rational) -> Affine {
        let above = self.relu(a.clone() - n.clone());
        let above1 = self.relu(a.clone() - (n + one()));
        let below = self.relu(-a.clone() + m.clone());
        let below1 = self.relu(-a.clone() + (m - one()));
        self.relu(above - above1 + below + below1)
    }

    /// `<a in M>` for a strictly increasing, nonempty `M`.
    pub fn in_set(&mut self, a: &Affine, set: &[Rational]) -> Affine {
        let (first, last) = (&set[0], &set[set.len() - 1]);
        let mut acc = self.interval(a, first, last);
        for w in set.windows(2) {
            let half = (&w[1] - &w[0]) * rat(1, 2);
            let mid = &w[0] + &half;
            let right = self.relu(a.clone() - mid.clone());
            let left = self.relu(-a.clone() + mid);
            let gap = self.relu(Affine::constant(half) - right - left);
            acc = acc + gap;
        }
        self.relu(acc)
    }

    /// `<a = m> = <-a <= -m> + <a <= m>`, bounded by 2.
    pub fn eq(&mut self, a: &Affine, m: &Rational) -> Affine {
        let lower = self.leq(&-a.clone(), &-m.clone());
        let upper = self.leq(a, m);
        lower + upper
    }

    /// `re(f2 - k re(1 - f1))`: zero when `f1 = 0` (given `f2 <= k`), `f2`
    /// when `f1 >= 1`.
    pub fn disjunction(&mut self, f1: &Affine, f2: &Affine, k: &Rational) -> Affine {
        let gate = self.relu(Affine::constant(one()) - f1.clone());
        self.relu(f2.clone() - gate * k)
    }

    /// `re(a) - re(-a)`.
    pub fn identity(&mut self, a: &Affine) -> Affine {
        let pos = self.relu(a.clone());
        let neg = self.relu(-a.clone());
        pos - neg
    }
}

fn single(build: impl FnOnce(&mut Circuit, &Affine) -> Affine, bound: Option<Rational>) -> ReluNetwork {
    let mut c = Circuit::new(1);
    let x = Affine::input(0);
    let out = build(&mut c, &x);
    c.lower(&[out]).with_bounds(vec![bound])
}

pub fn gadget_leq(m: &Rational) -> ReluNetwork {
    single(|c, x| c.leq(x, m), Some(one()))
}

pub fn gadget_interval(m: &Rational, n: &Rational) -> Result<ReluNetwork> {
    if m > n {
        return Err(Error::InvalidGadget(format!("empty interval [{m}; {n}]")));
    }
    Ok(single(|c, x| c.interval(x, m, n), None))
}

pub fn gadget_in_set(set: &[u64]) -> Result<ReluNetwork> {
    if set.is_empty() {
        return Err(Error::InvalidGadget("empty set".into()));
    }
    if set.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidGadget("set must be strictly increasing".into()));
    }
    let set: Vec<Rational> = set.iter().map(|&i| int(i as i64)).collect();
    Ok(single(|c, x| c.in_set(x, &set), None))
}

pub fn gadget_eq(m: &Rational) -> ReluNetwork {
    single(|c, x| c.eq(x, m), Some(int(2)))
}

pub fn gadget_identity() -> ReluNetwork {
    single(|c, x| c.identity(x), None)
}

fn single_output(net: &ReluNetwork, what: &'static str) -> Result<()> {
    if net.output_dim() != 1 {
        return Err(Error::DimensionMismatch {
            context: what,
            expected: 1,
            found: net.output_dim(),
        });
    }
    Ok(())
}

/// `re(f2 - k re(1 - f1))` with an explicit `k`, which must dominate the
/// certified bound of `f2`.
pub fn gadget_disjunction(f1: &ReluNetwork, f2: &ReluNetwork, k: &Rational) -> Result<ReluNetwork> {
    single_output(f1, "disjunction left output")?;
    single_output(f2, "disjunction right output")?;
    if f1.input_dim() != f2.input_dim() {
        return Err(Error::DimensionMismatch {
            context: "disjunction input",
            expected: f1.input_dim(),
            found: f2.input_dim(),
        });
    }
    let bound = f2.upper_bound().upper.ok_or(Error::MissingBound)?;
    if &bound > k || k.is_zero() && !bound.is_zero() {
        return Err(Error::MissingBound);
    }
    let mut c = Circuit::new(f1.input_dim());
    let xs = c.inputs();
    let a = c.import(f1, &xs).remove(0);
    let b = c.import(f2, &xs).remove(0);
    let out = c.disjunction(&a, &b, k);
    Ok(c.lower(&[out]).with_bounds(vec![Some(bound)]))
}

/// Disjunction using the certified bound of `f2` as `k`.
pub fn gadget_disjunction_certified(f1: &ReluNetwork, f2: &ReluNetwork) -> Result<ReluNetwork> {
    let k = f2.upper_bound().upper.ok_or(Error::MissingBound)?;
    gadget_disjunction(f1, f2, &k)
}
