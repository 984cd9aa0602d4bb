use super::layout::{name, Dir, Marker, VarLayout};
use super::{check_solution, PcpInstance};
use crate::error::{Error, Result};
use crate::graph::LabeledGraph;
use crate::rational::int;

/// Labelled PCP-structure for the solution `indices` (1-based tiles).
///
/// Chains `V1` and `V2` spell the solution word plus an end node and are
/// joined position-wise by rungs; chain `V3` has one node per tile, linked to
/// where that tile starts on `V1` and `V2`, plus an end node linked to both
/// chain ends.
pub fn encode_solution(p: &PcpInstance, indices: &[usize]) -> Result<LabeledGraph> {
    if !check_solution(p, indices)? {
        return Err(Error::InvalidSolution(format!("{indices:?} is not a solution")));
    }
    let layout = VarLayout::new(p);
    let (word, _) = p.words(indices)?;
    let word = word.as_bytes();
    let k = word.len() + 1;
    let l = indices.len() + 1;
    let n = 2 * k + l;
    let mut labels = vec![vec![int(0); layout.len()]; n];
    let mut edges = Vec::new();

    let mut starts = [Vec::with_capacity(l), Vec::with_capacity(l)];
    let (mut top, mut bottom) = (0, 0);
    for &t in indices {
        starts[0].push(top);
        starts[1].push(bottom);
        top += p.tiles[t - 1].0.len();
        bottom += p.tiles[t - 1].1.len();
    }
    starts[0].push(k - 1);
    starts[1].push(k - 1);

    let set = |labels: &mut Vec<Vec<_>>, v: usize, var: &str, value: i64| {
        labels[v][layout.index(var)] = int(value);
    };

    let chain = |labels: &mut Vec<Vec<_>>, i: usize, offset: usize, len: usize| {
        for t in 0..len {
            let v = offset + t;
            set(labels, v, &name::colour(i), 1);
            let kind = if t == 0 {
                's'
            } else if t + 1 == len {
                'e'
            } else {
                'm'
            };
            set(labels, v, &name::kind(i, kind), 1);
            set(labels, v, &name::id(i), t as i64 + 1);
            if t + 1 == len {
                set(labels, v, &name::end_id(i), len as i64);
            }
            set(labels, v, &name::dir(i, Dir::at(t)), 1);
        }
    };

    for i in 1..=2 {
        let offset = (i - 1) * k;
        chain(&mut labels, i, offset, k);
        let mut marker_at = vec![Marker::Bot; k];
        for (q, &s) in starts[i - 1].iter().enumerate() {
            marker_at[s] = if q + 1 == l { Marker::End } else { Marker::Tile(indices[q]) };
        }
        for t in 0..k {
            let d = Dir::at(t);
            for j in 0..layout.m {
                if t + j < k - 1 {
                    set(&mut labels, offset + t, &name::letter(i, d, word[t + j] as char, j), 1);
                }
            }
            for j in 0..=layout.m {
                if t + j < k {
                    set(&mut labels, offset + t, &name::marker(i, d, marker_at[t + j], j), 1);
                }
            }
        }
        for t in 0..k - 1 {
            edges.push((offset + t, offset + t + 1));
        }
    }
    for t in 0..k {
        edges.push((t, k + t));
    }

    let base = 2 * k;
    chain(&mut labels, 3, base, l);
    for q in 0..l {
        let d = Dir::at(q);
        for i in 1..=2 {
            let s = starts[i - 1][q];
            set(&mut labels, base + q, &name::link_id(d, i), s as i64 + 1);
            edges.push((base + q, (i - 1) * k + s));
        }
        if q + 1 < l {
            edges.push((base + q, base + q + 1));
        }
    }
    LabeledGraph::new(layout.len(), labels, edges)
}
