use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::rational::{int, rat};
use crate::relu::{gadget_identity, Layer, SparseMatrix};

/// Fourier-Motzkin elimination with strictness tracking.
pub(crate) fn fm_feasible(p: &Polytope) -> bool {
    let mut rows: Vec<(Vec<Rational>, Rational, bool)> =
        p.constraints.iter().map(|c| (c.a.clone(), c.b.clone(), c.is_strict())).collect();
    for j in 0..p.dim {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for r in rows {
            if r.0[j].is_positive() {
                pos.push(r);
            } else if r.0[j].is_negative() {
                neg.push(r);
            } else {
                rest.push(r);
            }
        }
        for (pa, pb, ps) in &pos {
            for (na, nb, ns) in &neg {
                let (fp, fnn) = (-&na[j], pa[j].clone());
                let a = pa.iter().zip(na).map(|(x, y)| x * &fp + y * &fnn).collect();
                rest.push((a, pb * &fp + nb * &fnn, *ps || *ns));
            }
        }
        rows = rest;
    }
    rows.iter().all(|(_, b, s)| if *s { b.is_positive() } else { !b.is_negative() })
}

fn poly(dim: usize, rows: &[(&[i64], i64, bool)]) -> Polytope {
    Polytope {
        dim,
        constraints: rows
            .iter()
            .map(|(a, b, s)| LinearConstraint {
                a: a.iter().map(|&v| int(v)).collect(),
                b: int(*b),
                rel: if *s { Relation::Lt } else { Relation::Le },
            })
            .collect(),
    }
}

#[test]
fn feasibility_examples() {
    assert_eq!(lp_feasible(&poly(1, &[(&[1], 1, false), (&[-1], -2, false)])), None);
    let x = lp_feasible(&poly(1, &[(&[1], 1, false), (&[-1], 0, false)])).unwrap();
    assert!(x[0] >= int(0) && x[0] <= int(1));
    let x = lp_feasible(&poly(1, &[(&[1], 0, true), (&[-1], 1, true)])).unwrap();
    assert!(x[0] < int(0) && x[0] > int(-1));
    assert_eq!(lp_feasible(&poly(1, &[(&[1], 0, true), (&[-1], 0, false)])), None);
    assert_eq!(lp_feasible(&Polytope::new(0)), Some(vec![]));
    assert_eq!(lp_feasible(&poly(0, &[(&[], -1, false)])), None);
}

fn random_poly(rng: &mut ChaCha8Rng, dim: usize, max: usize) -> Polytope {
    let count = rng.gen_range(0..=max);
    let constraints = (0..count)
        .map(|_| LinearConstraint {
            a: (0..dim).map(|_| int(rng.gen_range(-3..=3))).collect(),
            b: rat(rng.gen_range(-4..=4), rng.gen_range(1..=2)),
            rel: if rng.gen_bool(0.3) { Relation::Lt } else { Relation::Le },
        })
        .collect();
    Polytope { dim, constraints }
}

#[test]
fn lp_agrees_with_fourier_motzkin() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..400 {
        let dim = rng.gen_range(1..=3);
        let p = random_poly(&mut rng, dim, 6);
        let got = lp_feasible(&p);
        assert_eq!(got.is_some(), fm_feasible(&p), "{p:?}");
        if let Some(x) = got {
            assert!(p.contains(&x));
        }
    }
}

fn layer(rows: Vec<Vec<Rational>>, bias: Vec<Rational>, relu: bool) -> Layer {
    let cols = rows[0].len();
    Layer::new(SparseMatrix::from_dense(cols, rows).unwrap(), bias, relu).unwrap()
}

fn relu_net() -> ReluNetwork {
    ReluNetwork::new(1, vec![layer(vec![vec![int(1)]], vec![int(0)], true), layer(vec![vec![int(1)]], vec![int(0)], false)])
        .unwrap()
}

#[test]
fn solve_examples() {
    let id = ReluNetwork::identity(1);
    let q = ReachQuery { net: id, input: Polytope::cube(1, &int(0), &int(1)), output: poly(1, &[(&[-1], -2, false)]) };
    assert_eq!(solve(&q).unwrap(), ReachResult::Unsat);

    let q = ReachQuery {
        net: relu_net(),
        input: poly(1, &[(&[1], -1, false), (&[-1], 2, false)]),
        output: poly(1, &[(&[1], 0, false)]),
    };
    let ReachResult::Sat(x) = solve(&q).unwrap() else { panic!() };
    assert!(x[0] >= int(-2) && x[0] <= int(-1));

    let mut input = Polytope::new(1);
    input.push_eq(vec![int(1)], rat(3, 2)).unwrap();
    let mut output = Polytope::new(1);
    output.push_eq(vec![int(1)], rat(3, 2)).unwrap();
    let q = ReachQuery { net: gadget_identity(), input, output };
    assert_eq!(solve(&q).unwrap(), ReachResult::Sat(vec![rat(3, 2)]));
}

#[test]
fn union_examples() {
    let net = relu_net();
    let input = poly(1, &[(&[1], 1, false), (&[-1], 1, false)]);
    let bad = poly(1, &[(&[1], 1, true), (&[-1], -1, true)]);
    assert!(solve_union(&net, &input, &[bad, Polytope::new(1)]).unwrap().is_sat());
    assert_eq!(solve_union(&net, &input, &[]).unwrap(), ReachResult::Unsat);

    let input = Polytope::cube(1, &int(-1), &rat(-1, 2));
    let zero = poly(1, &[(&[1], 0, false), (&[-1], 0, false)]);
    assert_eq!(zero.complement().len(), 2);
    assert_eq!(solve_union(&net, &input, &zero.complement()).unwrap(), ReachResult::Unsat);
}

/// Checks every activation pattern of the layered network independently.
pub(crate) fn brute_force(net: &ReluNetwork, input: &Polytope, output: &Polytope) -> bool {
    let n = net.input_dim();
    let r = net.relu_count();
    for pattern in 0u64..(1 << r) {
        let mut cons = input.constraints.clone();
        let mut cur: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                let mut e = vec![Rational::zero(); n + 1];
                e[i] = int(1);
                e
            })
            .collect();
        let mut bit = 0;
        for l in net.layers() {
            let w = l.weights.to_dense();
            let mut next = Vec::new();
            for (row, b) in w.iter().zip(&l.bias) {
                let mut e = vec![Rational::zero(); n + 1];
                e[n] = b.clone();
                for (wj, src) in row.iter().zip(&cur) {
                    for (acc, v) in e.iter_mut().zip(src) {
                        *acc += wj * v;
                    }
                }
                if l.relu {
                    let active = pattern >> bit & 1 == 1;
                    bit += 1;
                    let sign = if active { int(-1) } else { int(1) };
                    cons.push(LinearConstraint::le(e[..n].iter().map(|v| v * &sign).collect(), -&e[n] * &sign));
                    if !active {
                        e = vec![Rational::zero(); n + 1];
                    }
                }
                next.push(e);
            }
            cur = next;
        }
        for c in &output.constraints {
            let mut a = vec![Rational::zero(); n];
            let mut b = c.b.clone();
            for (k, o) in c.a.iter().zip(&cur) {
                for (acc, v) in a.iter_mut().zip(o) {
                    *acc += k * v;
                }
                b -= k * &o[n];
            }
            cons.push(LinearConstraint { a, b, rel: c.rel });
        }
        if fm_feasible(&Polytope { dim: n, constraints: cons }) {
            return true;
        }
    }
    false
}

pub(crate) fn random_net(rng: &mut ChaCha8Rng, max_relus: usize) -> ReluNetwork {
    let n = rng.gen_range(1..=2);
    let mut dims = vec![n];
    let mut budget = rng.gen_range(1..=max_relus);
    while budget > 0 {
        let w = rng.gen_range(1..=budget.min(3));
        dims.push(w);
        budget -= w;
    }
    dims.push(rng.gen_range(1..=2));
    let mut layers = Vec::new();
    let weight = |rng: &mut ChaCha8Rng| rat(rng.gen_range(-3..=3), rng.gen_range(1..=2));
    for (i, pair) in dims.windows(2).enumerate() {
        let rows = (0..pair[1]).map(|_| (0..pair[0]).map(|_| weight(rng)).collect()).collect();
        let bias = (0..pair[1]).map(|_| weight(rng)).collect();
        layers.push(layer(rows, bias, i + 2 < dims.len()));
    }
    ReluNetwork::new(n, layers).unwrap()
}

#[test]
fn solve_agrees_with_pattern_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..120 {
        let net = random_net(&mut rng, 6);
        let input = random_poly(&mut rng, net.input_dim(), 3);
        let output = random_poly(&mut rng, net.output_dim(), 2);
        let want = brute_force(&net, &input, &output);
        let q = ReachQuery { net: net.clone(), input: input.clone(), output: output.clone() };
        match solve(&q).unwrap() {
            ReachResult::Sat(x) => {
                assert!(want, "{q:?}");
                assert!(input.contains(&x));
                assert!(output.contains(&net.eval(&x).unwrap()));
            }
            ReachResult::Unsat => assert!(!want, "{q:?}"),
        }
    }
}

#[test]
fn dimension_mismatch() {
    let q = ReachQuery { net: relu_net(), input: Polytope::new(2), output: Polytope::new(1) };
    assert!(solve(&q).is_err());
}
