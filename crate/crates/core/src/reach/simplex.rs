//! Two-phase dense simplex over exact rationals with Bland's rule.
//!
//! Solves `max c.z` subject to `A z <= b`, `z >= 0`.

use num_traits::{Signed, Zero};

use crate::rational::{one, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { point: Vec<Rational>, value: Rational },
}

struct Tableau {
    /// Each row holds the coefficients of all columns followed by the
    /// right-hand side.
    rows: Vec<Vec<Rational>>,
    /// `objective . columns + objective[cols]`, expressed over nonbasic
    /// columns.
    objective: Vec<Rational>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut Vec<Rational>| {
            let f = row[c].clone();
            if f.is_zero() {
                return;
            }
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.objective);
        self.basis[r] = c;
    }

    /// Maximises the objective over columns `< allowed`. Returns false when
    /// unbounded.
    fn optimise(&mut self, allowed: usize) -> bool {
        loop {
            let Some(c) = (0..allowed).find(|&j| self.objective[j].is_positive()) else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[self.cols] / &row[c];
                    let better = match &best {
                        None => true,
                        Some((b, r)) => ratio < *r || (ratio == *r && self.basis[i] < self.basis[*b]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }

    fn set_objective(&mut self, c: &[Rational]) {
        let mut obj = vec![Rational::zero(); self.cols + 1];
        obj[..c.len()].clone_from_slice(c);
        for (i, &b) in self.basis.iter().enumerate() {
            let f = obj[b].clone();
            if !f.is_zero() {
                for (o, v) in obj.iter_mut().zip(&self.rows[i]) {
                    *o -= &f * v;
                }
            }
        }
        self.objective = obj;
    }
}

/// `max c.z` subject to `a z <= b` and `z >= 0`.
pub fn maximise(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    let negative: Vec<usize> = (0..m).filter(|&i| b[i].is_negative()).collect();
    // Columns: structural, one slack per row, one artificial per negative row.
    let cols = n + m + negative.len();
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut art = 0;
    for i in 0..m {
        let mut row = vec![Rational::zero(); cols + 1];
        let flip = b[i].is_negative();
        let sign = if flip { -one() } else { one() };
        for (j, v) in a[i].iter().enumerate() {
            if !v.is_zero() {
                row[j] = v * &sign;
            }
        }
        row[n + i] = sign.clone();
        row[cols] = &b[i] * &sign;
        if flip {
            row[n + m + art] = one();
            basis.push(n + m + art);
            art += 1;
        } else {
            basis.push(n + i);
        }
        rows.push(row);
    }
    let mut t = Tableau { rows, objective: Vec::new(), basis, cols };

    if !negative.is_empty() {
        let mut phase1 = vec![Rational::zero(); cols];
        for v in phase1.iter_mut().skip(n + m) {
            *v = -one();
        }
        t.set_objective(&phase1);
        t.optimise(cols);
        // The objective constant is minus the optimum of -sum(artificials).
        if !t.objective[cols].is_zero() {
            return LpOutcome::Infeasible;
        }
        // Drive zero-valued artificials out of the basis.
        for r in 0..m {
            if t.basis[r] >= n + m {
                if let Some(c) = (0..n + m).find(|&j| !t.rows[r][j].is_zero()) {
                    t.pivot(r, c);
                }
            }
        }
        // Rows still holding an artificial are redundant; neutralise them.
        for r in 0..m {
            if t.basis[r] >= n + m {
                for v in t.rows[r].iter_mut() {
                    *v = Rational::zero();
                }
                let b = t.basis[r];
                t.rows[r][b] = one();
            }
        }
    }

    t.set_objective(c);
    if !t.optimise(n + m) {
        return LpOutcome::Unbounded;
    }
    let mut point = vec![Rational::zero(); n];
    for (r, &b) in t.basis.iter().enumerate() {
        if b < n {
            point[b] = t.rows[r][cols].clone();
        }
    }
    let value = -t.objective[cols].clone();
    LpOutcome::Optimal { point, value }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let a = vec![v(&[1, 0]), v(&[0, 2]), v(&[3, 2])];
        let out = maximise(&a, &v(&[4, 12, 18]), &v(&[3, 5]));
        assert_eq!(out, LpOutcome::Optimal { point: v(&[2, 6]), value: int(36) });
    }

    #[test]
    fn negative_rhs_needs_phase_one() {
        // max -x, x >= 3/2 -> x = 3/2
        let a = vec![v(&[-1])];
        let out = maximise(&a, &[rat(-3, 2)], &v(&[-1]));
        assert_eq!(out, LpOutcome::Optimal { point: vec![rat(3, 2)], value: rat(-3, 2) });
    }

    #[test]
    fn infeasible_and_unbounded() {
        let a = vec![v(&[1]), v(&[-1])];
        assert_eq!(maximise(&a, &v(&[1, -2]), &v(&[0])), LpOutcome::Infeasible);
        assert_eq!(maximise(&[v(&[-1])], &v(&[0]), &v(&[1])), LpOutcome::Unbounded);
    }

    #[test]
    fn degenerate_cycle_example_terminates() {
        // Beale's example, which cycles under the largest-coefficient rule.
        let a = vec![
            vec![rat(1, 4), int(-60), rat(-1, 25), int(9)],
            vec![rat(1, 2), int(-90), rat(-1, 50), int(3)],
            vec![int(0), int(0), int(1), int(0)],
        ];
        let c = vec![rat(3, 4), int(-150), rat(1, 50), int(-6)];
        match maximise(&a, &v(&[0, 0, 1]), &c) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, rat(1, 20)),
            other => panic!("{other:?}"),
        }
    }
}
