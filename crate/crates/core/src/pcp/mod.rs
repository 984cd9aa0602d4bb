//! Post's Correspondence Problem: instances, a bounded exhaustive solver, the
//! reduction to a DGLP that recognises encoded solutions, and the encoder.

mod encode;
mod layout;
mod reduce;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use encode::encode_solution;
pub use layout::{Dir, Marker, VarLayout};
pub use reduce::reduce_to_dglp;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PcpInstance {
    pub tiles: Vec<(String, String)>,
}

impl PcpInstance {
    pub fn new(tiles: Vec<(String, String)>) -> Result<Self> {
        if tiles.is_empty() {
            return Err(Error::InvalidInstance("no tiles".into()));
        }
        for (i, (a, b)) in tiles.iter().enumerate() {
            for w in [a, b] {
                if w.is_empty() || !w.bytes().all(|c| c == b'a' || c == b'b') {
                    return Err(Error::InvalidInstance(format!(
                        "tile {} word `{w}` must be a nonempty word over {{a,b}}",
                        i + 1
                    )));
                }
            }
        }
        Ok(PcpInstance { tiles })
    }

    /// The instance `{(aab, aa), (b, abb), (ba, bb)}`.
    pub fn p0() -> Self {
        PcpInstance::new(vec![
            ("aab".into(), "aa".into()),
            ("b".into(), "abb".into()),
            ("ba".into(), "bb".into()),
        ])
        .expect("valid instance")
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    /// Longest tile word.
    pub fn max_word(&self) -> usize {
        self.tiles.iter().map(|(a, b)| a.len().max(b.len())).max().unwrap_or(0)
    }

    /// Concatenations of the top and bottom words along 1-based `indices`.
    pub fn words(&self, indices: &[usize]) -> Result<(String, String)> {
        let mut top = String::new();
        let mut bottom = String::new();
        for &i in indices {
            if i == 0 || i > self.tiles.len() {
                return Err(Error::InvalidSolution(format!("tile index {i} out of range 1..={}", self.tiles.len())));
            }
            top.push_str(&self.tiles[i - 1].0);
            bottom.push_str(&self.tiles[i - 1].1);
        }
        Ok((top, bottom))
    }
}

pub fn check_solution(p: &PcpInstance, indices: &[usize]) -> Result<bool> {
    if indices.is_empty() {
        return Err(Error::InvalidSolution("empty index sequence".into()));
    }
    let (top, bottom) = p.words(indices)?;
    Ok(top == bottom)
}

/// Shortest solution with at most `max_len` tiles, lexicographically least
/// among the shortest.
pub fn solve_bounded(p: &PcpInstance, max_len: usize) -> Option<Vec<usize>> {
    fn dfs(p: &PcpInstance, len: usize, seq: &mut Vec<usize>, top: &mut String, bottom: &mut String) -> bool {
        if seq.len() == len {
            return top == bottom;
        }
        for i in 1..=p.tiles.len() {
            let (a, b) = &p.tiles[i - 1];
            let (ta, tb) = (top.len(), bottom.len());
            top.push_str(a);
            bottom.push_str(b);
            let n = top.len().min(bottom.len());
            if top.as_bytes()[..n] == bottom.as_bytes()[..n] {
                seq.push(i);
                if dfs(p, len, seq, top, bottom) {
                    return true;
                }
                seq.pop();
            }
            top.truncate(ta);
            bottom.truncate(tb);
        }
        false
    }
    for len in 1..=max_len {
        let mut seq = Vec::with_capacity(len);
        if dfs(p, len, &mut seq, &mut String::new(), &mut String::new()) {
            return Some(seq);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Tries every sequence of each length in lexicographic order.
    fn exhaustive(p: &PcpInstance, max_len: usize) -> Option<Vec<usize>> {
        let k = p.len();
        for len in 1..=max_len {
            let total = k.pow(len as u32);
            for code in 0..total {
                let mut seq = vec![0; len];
                let mut c = code;
                for slot in seq.iter_mut().rev() {
                    *slot = c % k + 1;
                    c /= k;
                }
                if check_solution(p, &seq).unwrap() {
                    return Some(seq);
                }
            }
        }
        None
    }

    #[test]
    fn p0_solution_checks() {
        let p = PcpInstance::p0();
        assert!(check_solution(&p, &[1, 3, 1, 2]).unwrap());
        assert!(!check_solution(&p, &[1]).unwrap());
        assert!(check_solution(&p, &[]).is_err());
        assert!(check_solution(&p, &[4]).is_err());
    }

    #[test]
    fn equal_tile_is_solution() {
        let p = PcpInstance::new(vec![("ab".into(), "b".into()), ("ba".into(), "ba".into())]).unwrap();
        assert!(check_solution(&p, &[2]).unwrap());
    }

    #[test]
    fn bounded_solver_on_p0() {
        let p = PcpInstance::p0();
        assert_eq!(solve_bounded(&p, 4), Some(vec![1, 3, 1, 2]));
        assert_eq!(solve_bounded(&p, 3), None);
        assert_eq!(exhaustive(&p, 4), Some(vec![1, 3, 1, 2]));
        assert_eq!(exhaustive(&p, 3), None);
        let trivial = PcpInstance::new(vec![("a".into(), "a".into())]).unwrap();
        assert_eq!(solve_bounded(&trivial, 1), Some(vec![1]));
    }

    #[test]
    fn solver_matches_exhaustive_on_small_instances() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let word = |rng: &mut rand_chacha::ChaCha8Rng| -> String {
            let n = rng.gen_range(1..=3);
            (0..n).map(|_| if rng.gen_bool(0.5) { 'a' } else { 'b' }).collect()
        };
        for _ in 0..150 {
            let k = rng.gen_range(1..=3);
            let tiles = (0..k).map(|_| (word(&mut rng), word(&mut rng))).collect();
            let p = PcpInstance::new(tiles).unwrap();
            assert_eq!(solve_bounded(&p, 4), exhaustive(&p, 4), "{p:?}");
        }
    }

    #[test]
    fn rejects_bad_instances() {
        assert!(PcpInstance::new(vec![]).is_err());
        assert!(PcpInstance::new(vec![("ac".into(), "a".into())]).is_err());
        assert!(PcpInstance::new(vec![("".into(), "a".into())]).is_err());
    }
}
