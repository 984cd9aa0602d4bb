use std::fmt;

use crate::glp::VarNames;

use super::PcpInstance;

/// Chain directions, cycling `L, M, R` from the start of each chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    L,
    M,
    R,
}

impl Dir {
    pub const ALL: [Dir; 3] = [Dir::L, Dir::M, Dir::R];

    /// Direction of the node at chain position `t` (0-based).
    pub fn at(t: usize) -> Dir {
        Dir::ALL[t % 3]
    }

    pub fn next(self) -> Dir {
        Dir::ALL[(self as usize + 1) % 3]
    }

    pub fn prev(self) -> Dir {
        Dir::ALL[(self as usize + 2) % 3]
    }
}

impl fmt::Display for Dir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dir::L => "L",
            Dir::M => "M",
            Dir::R => "R",
        })
    }
}

/// What a look-ahead slot records about a chain node: the start of tile `p`
/// (1-based), the chain end, or neither.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Marker {
    Tile(usize),
    End,
    Bot,
}

impl fmt::Display for Marker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Marker::Tile(p) => write!(f, "{p}"),
            Marker::End => f.write_str("e"),
            Marker::Bot => f.write_str("bot"),
        }
    }
}

/// Variable names of the reduction, in layout order.
pub mod name {
    use super::{Dir, Marker};

    pub fn colour(i: usize) -> String {
        format!("c{i}")
    }

    /// `t` is one of `s`, `m`, `e`.
    pub fn kind(i: usize, t: char) -> String {
        format!("(c{i},{t})")
    }

    pub fn id(i: usize) -> String {
        format!("(c{i},id)")
    }

    pub fn end_id(i: usize) -> String {
        format!("(c{i},e,id)")
    }

    pub fn dir(i: usize, d: Dir) -> String {
        format!("(c{i},{d})")
    }

    pub fn link_id(d: Dir, i: usize) -> String {
        format!("({d},c{i},id)")
    }

    pub fn letter(i: usize, d: Dir, letter: char, j: usize) -> String {
        format!("(c{i},{d},{letter},{j})")
    }

    pub fn marker(i: usize, d: Dir, p: Marker, j: usize) -> String {
        format!("(c{i},{d},{p},{j})")
    }
}

/// Deterministic assignment of the reduction's variables to label
/// dimensions: chain-ladder variables, then the PCP-structure extras, then
/// the letter colours `B` and the marker colours `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarLayout {
    pub names: VarNames,
    /// Longest tile word.
    pub m: usize,
    /// Number of tiles.
    pub k: usize,
    /// Indices of the non-discrete (id) dimensions.
    pub ids: Vec<usize>,
}

impl VarLayout {
    pub fn new(p: &PcpInstance) -> Self {
        let (m, k) = (p.max_word(), p.len());
        let mut names = VarNames::new();
        let mut ids = Vec::new();
        for i in 1..=3 {
            names.push(name::colour(i));
        }
        for i in 1..=3 {
            for t in ['s', 'm', 'e'] {
                names.push(name::kind(i, t));
            }
        }
        for i in 1..=3 {
            ids.push(names.push(name::id(i)));
            ids.push(names.push(name::end_id(i)));
        }
        for i in 1..=3 {
            for d in Dir::ALL {
                names.push(name::dir(i, d));
            }
        }
        for d in Dir::ALL {
            for i in 1..=2 {
                ids.push(names.push(name::link_id(d, i)));
            }
        }
        for i in 1..=2 {
            for d in Dir::ALL {
                for letter in ['a', 'b'] {
                    for j in 0..m {
                        names.push(name::letter(i, d, letter, j));
                    }
                }
            }
        }
        for i in 1..=2 {
            for d in Dir::ALL {
                for p in Self::markers_of(k) {
                    for j in 0..=m {
                        names.push(name::marker(i, d, p, j));
                    }
                }
            }
        }
        VarLayout { names, m, k, ids }
    }

    fn markers_of(k: usize) -> Vec<Marker> {
        (1..=k).map(Marker::Tile).chain([Marker::End, Marker::Bot]).collect()
    }

    /// `1..k, e, bot`.
    pub fn markers(&self) -> Vec<Marker> {
        Self::markers_of(self.k)
    }

    /// `1..k, e`: the markers of `S` without `bot`.
    pub fn top_markers(&self) -> Vec<Marker> {
        (1..=self.k).map(Marker::Tile).chain([Marker::End]).collect()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index(&self, name: &str) -> usize {
        self.names.get(name).expect("name belongs to the layout")
    }

    /// Every colour dimension, i.e. every dimension except the ids.
    pub fn colours(&self) -> Vec<usize> {
        (0..self.len()).filter(|i| !self.ids.contains(i)).collect()
    }

    /// Letter colours of chain `i` (all directions, letters and offsets).
    pub fn letters_of(&self, i: usize) -> Vec<String> {
        let mut out = Vec::new();
        for d in Dir::ALL {
            for letter in ['a', 'b'] {
                for j in 0..self.m {
                    out.push(name::letter(i, d, letter, j));
                }
            }
        }
        out
    }

    /// Marker colours of chain `i`.
    pub fn markers_of_chain(&self, i: usize) -> Vec<String> {
        let mut out = Vec::new();
        for d in Dir::ALL {
            for p in self.markers() {
                for j in 0..=self.m {
                    out.push(name::marker(i, d, p, j));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p0_variable_count() {
        // |Var_CL| = 3 + 9 + 6, |Var_PS extras| = 9 + 6,
        // |B| = 2*3*2*3, |S| = 2*3*(3+2)*(3+1)
        let layout = VarLayout::new(&PcpInstance::p0());
        assert_eq!(layout.len(), 18 + 15 + 36 + 120);
        assert_eq!(layout.ids.len(), 12);
        assert_eq!(layout.index("c1"), 0);
        assert_eq!(layout.index("(c3,e)"), 11);
        assert_eq!(layout.index("(c1,id)"), 12);
        assert_eq!(layout.index("(L,c1,id)"), 27);
        assert_eq!(layout.index("(c1,L,a,0)"), 33);
        assert_eq!(layout.index("(c1,L,1,0)"), 69);
        assert_eq!(layout.index("(c2,R,bot,3)"), 188);
    }

    #[test]
    fn directions_cycle() {
        assert_eq!(Dir::at(4), Dir::M);
        assert_eq!(Dir::L.prev(), Dir::R);
        assert_eq!(Dir::R.next(), Dir::L);
    }
}
