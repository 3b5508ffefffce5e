//! Dense two-phase simplex over any [`Scalar`], with Bland's anti-cycling rule,
//! and a square linear-system solver.
//!
//! Problems are stated in equality form: maximise `c·x` subject to `A x = b`, `x >= 0`.
//! Under the rational backend every pivot is exact.

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram<T> {
    pub a: Vec<Vec<T>>,
    pub b: Vec<T>,
    pub c: Vec<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution<T> {
    pub x: Vec<T>,
    pub objective: T,
    /// Dual prices `y` with `B^T y = c_B`; rows found redundant get price zero.
    pub duals: Vec<T>,
    /// Basic column per kept row.
    pub basis: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<T> {
    Optimal(LpSolution<T>),
    Infeasible,
    Unbounded,
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    basis: Vec<usize>,
    /// Original constraint index of each tableau row.
    origin: Vec<usize>,
    width: usize,
}

impl<T: Scalar> Tableau<T> {
    fn rhs(&self, i: usize) -> &T {
        &self.rows[i][self.width]
    }

    fn pivot(&mut self, obj: &mut [T], r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for x in self.rows[r].iter_mut() {
            *x = x.clone() / p.clone();
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = x.clone() - f.clone() * y.clone();
            }
            row[c] = T::zero();
        }
        if !obj[c].is_zero() {
            let f = obj[c].clone();
            for (x, y) in obj.iter_mut().zip(&pivot_row) {
                *x = x.clone() - f.clone() * y.clone();
            }
            obj[c] = T::zero();
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations with Bland's rule over columns `< allowed`.
    /// Returns false on unboundedness.
    fn optimise(&mut self, obj: &mut [T], allowed: usize) -> bool {
        loop {
            let entering = (0..allowed).find(|&j| obj[j].lp_positive());
            let Some(c) = entering else { return true };
            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.lp_positive() {
                    continue;
                }
                let ratio = self.rhs(i).clone() / a.clone();
                let better = match &leave {
                    None => true,
                    Some((l, best)) => {
                        if ratio.approx_eq(best) {
                            self.basis[i] < self.basis[*l]
                        } else {
                            ratio < *best
                        }
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                None => return false,
                Some((r, _)) => self.pivot(obj, r, c),
            }
        }
    }
}

impl<T: Scalar> LinearProgram<T> {
    pub fn solve(&self) -> LpOutcome<T> {
        let m = self.a.len();
        let n = self.c.len();
        debug_assert!(self.a.iter().all(|r| r.len() == n));
        debug_assert_eq!(self.b.len(), m);
        let width = n + m;
        let mut rows = Vec::with_capacity(m);
        for i in 0..m {
            let flip = self.b[i].is_negative();
            let mut row: Vec<T> = self.a[i].iter().map(|x| if flip { -x.clone() } else { x.clone() }).collect();
            row.extend((0..m).map(|k| if k == i { T::one() } else { T::zero() }));
            row.push(if flip { -self.b[i].clone() } else { self.b[i].clone() });
            rows.push(row);
        }
        let mut tab = Tableau { rows, basis: (n..n + m).collect(), origin: (0..m).collect(), width };

        // phase 1: maximise -sum(artificials)
        let mut obj = vec![T::zero(); width + 1];
        for row in &tab.rows {
            for j in 0..n {
                obj[j] = obj[j].clone() + row[j].clone();
            }
            obj[width] = obj[width].clone() + row[width].clone();
        }
        tab.optimise(&mut obj, n);
        if !obj[width].lp_zero() {
            return LpOutcome::Infeasible;
        }
        // drive artificials out of the basis, dropping redundant rows
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.basis[i] >= n {
                match (0..n).find(|&j| !tab.rows[i][j].lp_zero()) {
                    Some(j) => tab.pivot(&mut obj, i, j),
                    None => {
                        tab.rows.remove(i);
                        tab.basis.remove(i);
                        tab.origin.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }

        // phase 2
        let mut obj = vec![T::zero(); width + 1];
        obj[..n].clone_from_slice(&self.c);
        for (row, &bj) in tab.rows.iter().zip(&tab.basis) {
            let cb = self.c[bj].clone();
            if cb.is_zero() {
                continue;
            }
            for (x, y) in obj.iter_mut().zip(row) {
                *x = x.clone() - cb.clone() * y.clone();
            }
        }
        if !tab.optimise(&mut obj, n) {
            return LpOutcome::Unbounded;
        }

        let mut x = vec![T::zero(); n];
        for (i, &bj) in tab.basis.iter().enumerate() {
            x[bj] = tab.rhs(i).clone();
        }
        let objective = crate::scalar::sum(
            &self.c.iter().zip(&x).map(|(c, x)| c.clone() * x.clone()).collect::<Vec<_>>(),
        );

        // duals from B^T y = c_B over the kept rows
        let k = tab.basis.len();
        let bt: Vec<Vec<T>> = (0..k)
            .map(|col| tab.origin.iter().map(|&r| self.a[r][tab.basis[col]].clone()).collect())
            .collect();
        let cb: Vec<T> = tab.basis.iter().map(|&j| self.c[j].clone()).collect();
        let mut duals = vec![T::zero(); m];
        if k > 0 {
            let y = solve_square(bt, cb).expect("optimal basis is nonsingular");
            for (yi, &r) in y.into_iter().zip(&tab.origin) {
                duals[r] = yi;
            }
        }
        LpOutcome::Optimal(LpSolution { x, objective, duals, basis: tab.basis })
    }
}

/// Solves the square system `m x = rhs` by Gaussian elimination; `None` when singular.
pub fn solve_square<T: Scalar>(mut m: Vec<Vec<T>>, mut rhs: Vec<T>) -> Option<Vec<T>> {
    let n = m.len();
    debug_assert!(m.iter().all(|r| r.len() == n));
    for col in 0..n {
        let pivot = if T::EXACT {
            (col..n).find(|&r| !m[r][col].is_zero())
        } else {
            (col..n)
                .filter(|&r| !m[r][col].lp_zero())
                .max_by(|&a, &b| {
                    m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap_or(std::cmp::Ordering::Equal)
                })
        }?;
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let p = m[col][col].clone();
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone() / p.clone();
            for c in col..n {
                let v = m[col][c].clone();
                m[r][c] = m[r][c].clone() - f.clone() * v;
            }
            rhs[r] = rhs[r].clone() - f * rhs[col].clone();
        }
    }
    Some((0..n).map(|i| rhs[i].clone() / m[i][i].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn r(n: i64) -> Rational {
        Rational::from_ratio(n, 1)
    }

    #[test]
    fn textbook_max() {
        // max 3x + 2y st x + y <= 4, x + 3y <= 6
        let lp = LinearProgram {
            a: vec![vec![r(1), r(1), r(1), r(0)], vec![r(1), r(3), r(0), r(1)]],
            b: vec![r(4), r(6)],
            c: vec![r(3), r(2), r(0), r(0)],
        };
        let LpOutcome::Optimal(s) = lp.solve() else { panic!() };
        assert_eq!(s.objective, r(12));
        assert_eq!(s.x[0], r(4));
        assert_eq!(s.duals, vec![r(3), r(0)]);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let lp = LinearProgram { a: vec![vec![r(1)], vec![r(1)]], b: vec![r(1), r(2)], c: vec![r(0)] };
        assert_eq!(lp.solve(), LpOutcome::Infeasible);
        let lp = LinearProgram { a: vec![vec![r(1), r(-1)]], b: vec![r(0)], c: vec![r(1), r(0)] };
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows_and_negative_rhs() {
        let lp = LinearProgram {
            a: vec![vec![r(1), r(1)], vec![r(2), r(2)], vec![r(-1), r(0)]],
            b: vec![r(1), r(2), r(-1)],
            c: vec![r(0), r(1)],
        };
        let LpOutcome::Optimal(s) = lp.solve() else { panic!() };
        assert_eq!(s.x, vec![r(1), r(0)]);
        assert_eq!(s.objective, r(0));
    }

    #[test]
    fn square_solve() {
        let m = vec![vec![r(2), r(1)], vec![r(1), r(3)]];
        assert_eq!(solve_square(m, vec![r(3), r(5)]).unwrap(), vec![Rational::from_ratio(4, 5), Rational::from_ratio(7, 5)]);
        assert!(solve_square(vec![vec![r(1), r(2)], vec![r(2), r(4)]], vec![r(1), r(2)]).is_none());
    }
}
