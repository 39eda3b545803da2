//! Dense tableau simplex for `maximize c·x  s.t.  A x <= b, x >= 0` with `b >= 0`.
//!
//! The origin is feasible, so a single phase suffices. Bland's rule picks both
//! the entering and the leaving variable, which rules out cycling; with an
//! exact scalar the answer is exact.

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("constraint row {row} has {got} coefficients, expected {expected}")]
    Shape {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("right-hand side of row {0} is negative; origin must be feasible")]
    InfeasibleOrigin(usize),
    #[error("simplex did not terminate within {0} pivots")]
    IterationLimit(usize),
    #[error("non-finite value in simplex tableau")]
    NonFinite,
    #[error("witness failed certification: {0}")]
    Certification(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<T> {
    Optimal { x: Vec<T>, objective: T },
    Unbounded,
}

/// `maximize objective·x` subject to `rows[i]·x <= rhs[i]` and `x >= 0`.
pub fn maximize<T: Scalar>(
    objective: &[T],
    rows: &[Vec<T>],
    rhs: &[T],
) -> Result<LpOutcome<T>, SolverError> {
    let n = objective.len();
    let m = rows.len();
    assert_eq!(m, rhs.len(), "one right-hand side per row");
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(SolverError::Shape {
                row: i,
                got: row.len(),
                expected: n,
            });
        }
        if rhs[i] < T::zero() {
            return Err(SolverError::InfeasibleOrigin(i));
        }
    }

    // Columns: n structural, m slack, then the right-hand side.
    let width = n + m + 1;
    let mut tab: Vec<Vec<T>> = rows
        .iter()
        .zip(rhs)
        .enumerate()
        .map(|(i, (row, b))| {
            let mut r = row.clone();
            r.extend((0..m).map(|j| if j == i { T::one() } else { T::zero() }));
            r.push(b.clone());
            r
        })
        .collect();
    // Reduced-cost row; entering candidates are negative entries.
    let mut cost: Vec<T> = objective.iter().map(|c| -c.clone()).collect();
    cost.extend((0..=m).map(|_| T::zero()));
    let mut basis: Vec<usize> = (n..n + m).collect();

    let eps = T::pivot_epsilon();
    let neg_eps = -eps.clone();
    let limit = 50 * (n + m) + 100;
    for _ in 0..limit {
        let Some(enter) = (0..n + m).find(|&j| cost[j] < neg_eps) else {
            let mut x = vec![T::zero(); n];
            for (i, &var) in basis.iter().enumerate() {
                if var < n {
                    x[var] = tab[i][width - 1].clone();
                }
            }
            let objective = cost[width - 1].clone();
            if !objective.is_finite() || x.iter().any(|v| !v.is_finite()) {
                return Err(SolverError::NonFinite);
            }
            return Ok(LpOutcome::Optimal { x, objective });
        };

        let mut leave: Option<(usize, T)> = None;
        for (i, row) in tab.iter().enumerate() {
            if row[enter] > eps {
                let ratio = row[width - 1].clone() / row[enter].clone();
                let better = match &leave {
                    None => true,
                    Some((best_i, best)) => {
                        ratio < *best || (ratio == *best && basis[i] < basis[*best_i])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((pivot_row, _)) = leave else {
            return Ok(LpOutcome::Unbounded);
        };

        pivot(&mut tab, &mut cost, pivot_row, enter);
        basis[pivot_row] = enter;
        if !tab[pivot_row][width - 1].is_finite() {
            return Err(SolverError::NonFinite);
        }
    }
    Err(SolverError::IterationLimit(limit))
}

fn pivot<T: Scalar>(tab: &mut [Vec<T>], cost: &mut [T], row: usize, col: usize) {
    let p = tab[row][col].clone();
    for v in tab[row].iter_mut() {
        *v = v.clone() / p.clone();
    }
    let pivot_row = tab[row].clone();
    let eliminate = |target: &mut [T]| {
        let factor = target[col].clone();
        if factor.is_zero() {
            return;
        }
        for (t, pv) in target.iter_mut().zip(&pivot_row) {
            if !pv.is_zero() {
                *t = t.clone() - factor.clone() * pv.clone();
            }
        }
    };
    for (i, r) in tab.iter_mut().enumerate() {
        if i != row {
            eliminate(r);
        }
    }
    eliminate(cost);
}
