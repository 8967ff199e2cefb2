//! Dense two-phase simplex method with Bland's rule.
//!
//! Solves `maximize c·x subject to A x = b, x >= 0`. Generic over [`Real`]:
//! with `BigRational` every pivot is exact, with `f64` entries below
//! [`FLOAT_PIVOT_EPS`] are treated as zero.

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const FLOAT_PIVOT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<R> {
    pub a: Vec<Vec<R>>,
    pub b: Vec<R>,
    pub c: Vec<R>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<R> {
    Optimal { x: Vec<R>, value: R },
    Infeasible,
    Unbounded,
}

fn positive<R: Real>(x: &R) -> bool {
    if R::EXACT {
        *x > R::zero()
    } else {
        x.to_f64() > FLOAT_PIVOT_EPS
    }
}

struct Tableau<R> {
    rows: Vec<Vec<R>>,
    basis: Vec<usize>,
    /// Columns that may enter the basis.
    allowed: usize,
}

impl<R: Real> Tableau<R> {
    fn rhs(&self, i: usize) -> &R {
        self.rows[i].last().expect("rhs column")
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        for e in self.rows[row].iter_mut() {
            *e = e.clone() / p.clone();
        }
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let f = r[col].clone();
            for (e, pe) in r.iter_mut().zip(&pivot_row) {
                *e = e.clone() - f.clone() * pe.clone();
            }
        }
        self.basis[row] = col;
    }

    fn reduced_cost(&self, cost: &[R], j: usize) -> R {
        self.basis
            .iter()
            .enumerate()
            .fold(cost[j].clone(), |acc, (i, &bj)| {
                acc - cost[bj].clone() * self.rows[i][j].clone()
            })
    }

    /// Runs simplex iterations for `cost`; `Ok(false)` means unbounded.
    fn optimize(&mut self, cost: &[R], max_iter: usize) -> Result<bool> {
        for _ in 0..max_iter {
            let entering = (0..self.allowed)
                .find(|&j| !self.basis.contains(&j) && positive(&self.reduced_cost(cost, j)));
            let Some(col) = entering else {
                return Ok(true);
            };
            let mut leaving: Option<(usize, R)> = None;
            for i in 0..self.rows.len() {
                let coef = &self.rows[i][col];
                if !positive(coef) {
                    continue;
                }
                let ratio = self.rhs(i).clone() / coef.clone();
                let better = match &leaving {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            let Some((row, _)) = leaving else {
                return Ok(false);
            };
            self.pivot(row, col);
        }
        Err(Error::LpNumericalFailure(format!(
            "no optimum after {max_iter} pivots"
        )))
    }
}

pub fn solve<R: Real>(lp: &LinearProgram<R>) -> Result<LpOutcome<R>> {
    let m = lp.a.len();
    let n = lp.c.len();
    if lp.b.len() != m || lp.a.iter().any(|r| r.len() != n) {
        return Err(Error::LpNumericalFailure("inconsistent LP dimensions".into()));
    }
    let max_iter = 50 * (n + m + 10);

    // Phase 1: x plus one artificial per row, with b >= 0.
    let width = n + m + 1;
    let mut rows = Vec::with_capacity(m);
    for (i, (ai, bi)) in lp.a.iter().zip(&lp.b).enumerate() {
        let flip = *bi < R::zero();
        let mut row = vec![R::zero(); width];
        for (j, a) in ai.iter().enumerate() {
            row[j] = if flip { -a.clone() } else { a.clone() };
        }
        row[n + i] = R::one();
        row[width - 1] = if flip { -bi.clone() } else { bi.clone() };
        rows.push(row);
    }
    let mut tab = Tableau {
        rows,
        basis: (n..n + m).collect(),
        allowed: n + m,
    };
    let mut phase1 = vec![R::zero(); n + m];
    for c in phase1.iter_mut().skip(n) {
        *c = -R::one();
    }
    tab.optimize(&phase1, max_iter)?;
    let infeasibility = (0..m).fold(R::zero(), |acc, i| {
        if tab.basis[i] >= n {
            acc + tab.rhs(i).clone()
        } else {
            acc
        }
    });
    if positive(&infeasibility) {
        return Ok(LpOutcome::Infeasible);
    }

    // Drive remaining artificials out of the basis; drop redundant rows.
    let mut i = 0;
    while i < tab.rows.len() {
        if tab.basis[i] < n {
            i += 1;
            continue;
        }
        let col = (0..n).find(|&j| {
            let e = &tab.rows[i][j];
            if R::EXACT {
                !e.is_zero()
            } else {
                e.to_f64().abs() > FLOAT_PIVOT_EPS
            }
        });
        match col {
            Some(j) => {
                tab.pivot(i, j);
                i += 1;
            }
            None => {
                tab.rows.remove(i);
                tab.basis.remove(i);
            }
        }
    }

    // Phase 2 over the original columns only.
    tab.allowed = n;
    let mut cost = lp.c.clone();
    cost.extend((0..m).map(|_| R::zero()));
    if !tab.optimize(&cost, max_iter)? {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x = vec![R::zero(); n];
    for (i, &bj) in tab.basis.iter().enumerate() {
        if bj < n {
            x[bj] = tab.rhs(i).clone();
        }
    }
    let value = x
        .iter()
        .zip(&lp.c)
        .fold(R::zero(), |acc, (xi, ci)| acc + xi.clone() * ci.clone());
    Ok(LpOutcome::Optimal { x, value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(p: i64) -> BigRational {
        BigRational::from_int(p)
    }

    #[test]
    fn small_exact_lp() {
        // max x + y s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
        let lp = LinearProgram {
            a: vec![vec![q(1), q(2), q(1), q(0)], vec![q(3), q(1), q(0), q(1)]],
            b: vec![q(4), q(6)],
            c: vec![q(1), q(1), q(0), q(0)],
        };
        match solve(&lp).unwrap() {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(value, BigRational::ratio(14, 5));
                assert_eq!(x[0], BigRational::ratio(8, 5));
                assert_eq!(x[1], BigRational::ratio(6, 5));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        // x = -1 with x >= 0
        let lp = LinearProgram {
            a: vec![vec![q(1)]],
            b: vec![q(-1)],
            c: vec![q(0)],
        };
        assert_eq!(solve(&lp).unwrap(), LpOutcome::Infeasible);
        // max x s.t. x - y = 0
        let lp = LinearProgram {
            a: vec![vec![q(1), q(-1)]],
            b: vec![q(0)],
            c: vec![q(1), q(0)],
        };
        assert_eq!(solve(&lp).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows_and_floats() {
        let lp = LinearProgram {
            a: vec![vec![1.0, 1.0], vec![2.0, 2.0]],
            b: vec![1.0, 2.0],
            c: vec![1.0, 2.0],
        };
        match solve(&lp).unwrap() {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(x, vec![0.0, 1.0]);
                assert_eq!(value, 2.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
