//! The DGLP `(phi_P, psi_P)` whose models are exactly the labelled
//! PCP-structures encoding solutions of `P`.

use std::collections::BTreeMap;

use super::layout::{name, Dir, Marker, VarLayout};
use super::PcpInstance;
use crate::glp::{desugar_abbreviations, DglpProgram, GraphCondition, LinearGraphTerm, Ref, Sugar};
use crate::rational::{int, Rational};

fn own(n: String) -> Ref {
    Ref::Own(n)
}

fn agg(n: String) -> Ref {
    Ref::Agg(n)
}

/// `lhs - rhs = 0`
fn same(lhs: Ref, rhs: Ref) -> Sugar {
    Sugar::Eq(vec![(int(1), lhs), (int(-1), rhs)], int(0))
}

/// `lhs - rhs <= c`
fn at_most(lhs: Ref, rhs: Ref, c: i64) -> Sugar {
    Sugar::Leq(vec![(int(1), lhs), (int(-1), rhs)], int(c))
}

fn chain_ladder() -> Sugar {
    let mut cond = Vec::new();
    for i in 1..=3 {
        let c = name::colour(i);
        let (s, m, e) = (name::kind(i, 's'), name::kind(i, 'm'), name::kind(i, 'e'));
        let (id, eid) = (name::id(i), name::end_id(i));
        cond.push(Sugar::not_implies(
            c.clone(),
            Sugar::And(vec![
                Sugar::not(s.clone()),
                Sugar::not(m.clone()),
                Sugar::not(e.clone()),
                Sugar::own_eq(id.clone(), 0),
                Sugar::own_eq(eid.clone(), 0),
            ]),
        ));
        cond.push(Sugar::implies(c.clone(), Sugar::Or(vec![Sugar::agg_eq(c.clone(), 1), Sugar::agg_eq(c.clone(), 2)])));
        cond.push(Sugar::implies(
            s,
            Sugar::And(vec![
                Sugar::agg_eq(c.clone(), 1),
                Sugar::own_eq(id.clone(), 1),
                Sugar::agg_eq(id.clone(), 2),
                Sugar::own_eq(eid.clone(), 0),
            ]),
        ));
        cond.push(Sugar::implies(
            m,
            Sugar::And(vec![
                Sugar::agg_eq(c.clone(), 2),
                Sugar::Eq(vec![(int(2), own(id.clone())), (int(-1), agg(id.clone()))], int(0)),
                Sugar::own_eq(eid.clone(), 0),
            ]),
        ));
        // The end node's single chain neighbour has the preceding id.
        cond.push(Sugar::implies(
            e,
            Sugar::And(vec![
                Sugar::agg_eq(c, 1),
                at_most(agg(id.clone()), own(id.clone()), -1),
                same(own(eid), own(id)),
            ]),
        ));
    }
    for (i, o) in [(1, 2), (2, 1)] {
        cond.push(Sugar::implies(
            name::colour(i),
            Sugar::And(vec![Sugar::agg_eq(name::colour(o), 1), same(own(name::id(i)), agg(name::id(o)))]),
        ));
    }
    let c3: Vec<String> = (1..=3).map(name::colour).collect();
    let t: Vec<String> = (1..=3).flat_map(|i| ['s', 'm', 'e'].map(|k| name::kind(i, k))).collect();
    Sugar::And(vec![
        Sugar::And(cond),
        Sugar::Colour(c3.iter().chain(&t).cloned().collect()),
        Sugar::ExactlyOne(c3),
        Sugar::ExactlyOne(t),
    ])
}

fn pcp_structure() -> Sugar {
    let mut cond = Vec::new();
    for i in 1..=3 {
        cond.push(Sugar::not_implies(
            name::colour(i),
            Sugar::And(Dir::ALL.iter().map(|&d| Sugar::not(name::dir(i, d))).collect()),
        ));
    }
    for i in 1..=3 {
        cond.push(Sugar::implies(
            name::kind(i, 's'),
            Sugar::And(vec![Sugar::is(name::dir(i, Dir::L)), Sugar::agg_eq(name::dir(i, Dir::M), 1)]),
        ));
        let middle = Dir::ALL
            .iter()
            .map(|&d| {
                let mut parts = vec![Sugar::is(name::dir(i, d))];
                parts.extend(Dir::ALL.iter().filter(|&&o| o != d).map(|&o| Sugar::agg_eq(name::dir(i, o), 1)));
                Sugar::And(parts)
            })
            .collect();
        cond.push(Sugar::implies(name::kind(i, 'm'), Sugar::Or(middle)));
    }
    for i in 1..=2 {
        cond.push(Sugar::implies(
            name::colour(i),
            Sugar::Leq(vec![(int(1), agg(name::colour(3)))], int(1)),
        ));
    }
    cond.push(Sugar::implies(
        name::colour(3),
        Sugar::And(vec![Sugar::agg_eq(name::colour(1), 1), Sugar::agg_eq(name::colour(2), 1)]),
    ));
    for d in Dir::ALL {
        let c3d = name::dir(3, d);
        cond.push(Sugar::not_implies(
            c3d.clone(),
            Sugar::And((1..=2).map(|i| Sugar::own_eq(name::link_id(d, i), 0)).collect()),
        ));
        cond.push(Sugar::implies(
            c3d.clone(),
            Sugar::And((1..=2).map(|i| same(agg(name::id(i)), own(name::link_id(d, i)))).collect()),
        ));
        // The last node of the third chain has no successor to compare with.
        let order = (1..=2)
            .map(|i| {
                Sugar::And(vec![
                    at_most(agg(name::link_id(d.prev(), i)), own(name::link_id(d, i)), 0),
                    Sugar::not_implies(
                        name::kind(3, 'e'),
                        at_most(own(name::link_id(d, i)), agg(name::link_id(d.next(), i)), 0),
                    ),
                ])
            })
            .collect();
        cond.push(Sugar::implies(c3d, Sugar::And(order)));
    }
    let f: Vec<String> = (1..=3).flat_map(|i| Dir::ALL.map(|d| name::dir(i, d))).collect();
    Sugar::And(vec![
        Sugar::And(cond),
        Sugar::Colour(f.clone()),
        Sugar::ExactlyOne(f),
        chain_ladder(),
    ])
}

fn tile_constraint(l: &VarLayout, i: usize, d: Dir, p: usize, word: &str) -> Sugar {
    let n = word.len();
    let mut body = vec![Sugar::agg_eq(name::colour(3), 1)];
    for (j, letter) in word.chars().enumerate() {
        body.push(Sugar::is(name::letter(i, d, letter, j)));
    }
    // Offset 0 holds the tile marker itself, so only later offsets are blank.
    for j in 1..n {
        body.push(Sugar::is(name::marker(i, d, Marker::Bot, j)));
    }
    body.push(Sugar::Or(
        l.top_markers().into_iter().map(|q| Sugar::is(name::marker(i, d, q, n))).collect(),
    ));
    Sugar::implies(name::marker(i, d, Marker::Tile(p), 0), Sugar::And(body))
}

fn solution(p: &PcpInstance, l: &VarLayout) -> Sugar {
    let m = l.m;
    let mut cond = Vec::new();
    for i in 1..=2 {
        let mut own_colours = l.letters_of(i);
        own_colours.extend(l.markers_of_chain(i));
        for d in Dir::ALL {
            let mine: Vec<Sugar> = own_colours
                .iter()
                .filter(|n| n.starts_with(&format!("(c{i},{d},")))
                .map(|n| Sugar::not(n.clone()))
                .collect();
            cond.push(Sugar::not_implies(name::dir(i, d), Sugar::And(mine)));
        }
        for d in Dir::ALL {
            let mut shift = Vec::new();
            for letter in ['a', 'b'] {
                for j in 0..m.saturating_sub(1) {
                    shift.push(same(own(name::letter(i, d, letter, j + 1)), agg(name::letter(i, d.next(), letter, j))));
                }
            }
            for q in l.markers() {
                for j in 0..m {
                    shift.push(same(own(name::marker(i, d, q, j + 1)), agg(name::marker(i, d.next(), q, j))));
                }
            }
            cond.push(Sugar::implies(name::dir(i, d), Sugar::And(shift)));
        }
    }
    for i in 1..=2 {
        let mut not_end = Vec::new();
        for d in Dir::ALL {
            for letter in ['a', 'b'] {
                for j in 0..m {
                    not_end.push(Sugar::not(name::letter(i, d, letter, j)));
                }
            }
            for q in l.markers().into_iter().filter(|&q| q != Marker::End) {
                for j in 0..=m {
                    not_end.push(Sugar::not(name::marker(i, d, q, j)));
                }
            }
        }
        let end_here = Sugar::Or(Dir::ALL.iter().map(|&d| Sugar::is(name::marker(i, d, Marker::End, 0))).collect());
        cond.push(Sugar::implies(name::kind(i, 'e'), Sugar::And(vec![Sugar::And(not_end), end_here])));
        cond.push(Sugar::not_implies(
            name::kind(i, 'e'),
            Sugar::And(Dir::ALL.iter().map(|&d| Sugar::not(name::marker(i, d, Marker::End, 0))).collect()),
        ));
    }
    for (t, (alpha, beta)) in p.tiles.iter().enumerate() {
        for d in Dir::ALL {
            cond.push(tile_constraint(l, 1, d, t + 1, alpha));
            cond.push(tile_constraint(l, 2, d, t + 1, beta));
        }
    }
    for i in 1..=2 {
        let starts = Dir::ALL
            .iter()
            .flat_map(|&d| l.top_markers().into_iter().map(move |q| Sugar::is(name::marker(i, d, q, 0))))
            .collect();
        cond.push(Sugar::implies(name::kind(i, 's'), Sugar::Or(starts)));
    }
    for d in Dir::ALL {
        cond.push(Sugar::implies(
            name::dir(1, d),
            Sugar::And(
                ['a', 'b']
                    .iter()
                    .map(|&x| same(own(name::letter(1, d, x, 0)), agg(name::letter(2, d, x, 0))))
                    .collect(),
            ),
        ));
    }
    // Both ladder neighbours of a third-chain node carry the same marker.
    let mut matched = Vec::new();
    for q in l.markers() {
        let mut terms: Vec<(Rational, Ref)> = Vec::new();
        for d in Dir::ALL {
            terms.push((int(1), agg(name::marker(1, d, q, 0))));
            terms.push((int(-1), agg(name::marker(2, d, q, 0))));
        }
        matched.push(Sugar::Eq(terms, int(0)));
    }
    let top = Dir::ALL
        .iter()
        .flat_map(|&d| l.top_markers().into_iter().map(move |q| Sugar::agg_eq(name::marker(1, d, q, 0), 1)))
        .collect();
    cond.push(Sugar::implies(name::colour(3), Sugar::And(vec![Sugar::And(matched), Sugar::Or(top)])));

    let b0: Vec<String> = (1..=2)
        .flat_map(|i| Dir::ALL.into_iter().flat_map(move |d| ['a', 'b'].map(|x| name::letter(i, d, x, 0))))
        .collect();
    let s0: Vec<String> = (1..=2)
        .flat_map(|i| Dir::ALL.into_iter().flat_map(move |d| l.markers().into_iter().map(move |q| name::marker(i, d, q, 0))))
        .collect();
    let one_each = (1..=2)
        .map(|i| {
            Sugar::implies(
                name::colour(i),
                Sugar::And(vec![
                    Sugar::ExactlyOne(s0.clone()),
                    // End nodes carry no letter.
                    Sugar::not_implies(name::kind(i, 'e'), Sugar::ExactlyOne(b0.clone())),
                ]),
            )
        })
        .collect();

    let mut bs: Vec<String> = Vec::new();
    for i in 1..=2 {
        bs.extend(l.letters_of(i));
    }
    for i in 1..=2 {
        bs.extend(l.markers_of_chain(i));
    }
    Sugar::And(vec![Sugar::And(cond), Sugar::And(one_each), pcp_structure(), Sugar::Colour(bs)])
}

fn graph_condition(l: &VarLayout) -> GraphCondition {
    let mut parts = Vec::new();
    for i in 1..=3 {
        for t in ['s', 'e'] {
            parts.push(GraphCondition::equality(LinearGraphTerm::new([(l.index(&name::kind(i, t)), int(1))], int(1))));
        }
        parts.push(GraphCondition::equality(LinearGraphTerm::new(
            [(l.index(&name::colour(i)), int(1)), (l.index(&name::end_id(i)), int(-1))],
            int(0),
        )));
    }
    GraphCondition::and_all(parts)
}

/// Builds `(phi_P, psi_P)` with every colour discretised to `{0, 1}` and the
/// id dimensions left continuous.
pub fn reduce_to_dglp(p: &PcpInstance) -> (DglpProgram, VarLayout) {
    let layout = VarLayout::new(p);
    let phi = desugar_abbreviations(&solution(p, &layout), &layout.names).expect("reduction only uses layout names");
    let psi = graph_condition(&layout);
    let discrete: BTreeMap<usize, Vec<u64>> = layout.colours().into_iter().map(|i| (i, vec![0, 1])).collect();
    let prog = DglpProgram::new(layout.len(), phi, psi, discrete).expect("reduction is well-formed");
    (prog, layout)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_is_dglp() {
        for p in [
            PcpInstance::p0(),
            PcpInstance::new(vec![("a".into(), "a".into())]).unwrap(),
            PcpInstance::new(vec![("ab".into(), "b".into()), ("b".into(), "bab".into())]).unwrap(),
        ] {
            let (prog, layout) = reduce_to_dglp(&p);
            assert!(prog.is_dglp());
            assert_eq!(prog.num_vars(), layout.len());
            for id in &layout.ids {
                assert!(!prog.discrete.contains_key(id));
            }
        }
    }

    #[test]
    fn p0_dimensions() {
        let (prog, _) = reduce_to_dglp(&PcpInstance::p0());
        assert_eq!(prog.num_vars(), 189);
        assert_eq!(prog.discrete.len(), 189 - 12);
    }
}
