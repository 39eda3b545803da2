//! Which rank matrices come from an actual 2x2 game?
//!
//! Order the `2(N+1)` payoff sums by rank and ask for a game in which each
//! consecutive pair is strictly increasing. The system is homogeneous, so we
//! bound the payoffs to `[-1, 1]` and maximise a common slack `t`:
//!
//! ```text
//! maximise t  s.t.  p(lo) - p(hi) + t <= 0   for consecutive ranks lo < hi
//!                   -1 <= a, b, c, d <= 1,  t >= 0
//! ```
//!
//! Each free payoff is split as `u = u⁺ - u⁻` with `0 <= u± <= 1`, which keeps
//! every right-hand side non-negative and the origin feasible.

use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::simplex::{maximize, LpOutcome, SolverError};
use super::{derive_with_neighbor_count, GameMatrix, RankMatrix};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct RealizabilityResult<T> {
    pub realizable: bool,
    /// A game that re-derives the matrix exactly; present iff `realizable`.
    pub witness: Option<GameMatrix<T>>,
    /// Optimal common slack.
    pub margin: Option<T>,
}

impl<T: Scalar> RealizabilityResult<T> {
    pub fn margin_f64(&self) -> Option<f64> {
        self.margin.as_ref().and_then(ToPrimitive::to_f64)
    }
}

/// Exact decision with rational arithmetic.
pub fn is_linear_realizable(
    rm: &RankMatrix,
) -> Result<RealizabilityResult<BigRational>, SolverError> {
    is_linear_realizable_with::<BigRational>(rm)
}

/// Linear coefficients of the payoff sum for `(s, k)` over `(a, b, c, d)`.
fn payoff_coefficients(s: u8, k: usize, n: usize) -> [usize; 4] {
    match s {
        0 => [n - k, k, 0, 0],
        _ => [0, 0, n - k, k],
    }
}

pub fn is_linear_realizable_with<T: Scalar>(
    rm: &RankMatrix,
) -> Result<RealizabilityResult<T>, SolverError> {
    let n = rm.neighbor_count();
    let order = rm.cells_by_rank();
    // Variables: a⁺ b⁺ c⁺ d⁺ a⁻ b⁻ c⁻ d⁻ t.
    const VARS: usize = 9;
    let mut rows: Vec<Vec<T>> = Vec::with_capacity(order.len() - 1 + 8);
    let mut rhs: Vec<T> = Vec::with_capacity(rows.capacity());
    for pair in order.windows(2) {
        let lo = payoff_coefficients(pair[0].0, pair[0].1, n);
        let hi = payoff_coefficients(pair[1].0, pair[1].1, n);
        let mut row = vec![T::zero(); VARS];
        for v in 0..4 {
            let diff = T::from_count(lo[v]) - T::from_count(hi[v]);
            row[v] = diff.clone();
            row[v + 4] = -diff;
        }
        row[8] = T::one();
        rows.push(row);
        rhs.push(T::zero());
    }
    for v in 0..8 {
        let mut row = vec![T::zero(); VARS];
        row[v] = T::one();
        rows.push(row);
        rhs.push(T::one());
    }
    let mut objective = vec![T::zero(); VARS];
    objective[8] = T::one();

    let x = match maximize(&objective, &rows, &rhs)? {
        LpOutcome::Optimal { x, .. } => x,
        // The box bounds every variable, so this is a solver fault.
        LpOutcome::Unbounded => {
            return Err(SolverError::Certification(
                "bounded LP reported unbounded".into(),
            ))
        }
    };
    let margin = x[8].clone();
    if margin <= T::realizable_threshold() {
        return Ok(RealizabilityResult {
            realizable: false,
            witness: None,
            margin: Some(margin),
        });
    }

    let part = |v: usize| x[v].clone() - x[v + 4].clone();
    let witness = GameMatrix {
        a: part(0),
        b: part(1),
        c: part(2),
        d: part(3),
    };
    match derive_with_neighbor_count(&witness, n) {
        Ok(derived) if derived.entries() == rm.entries() => Ok(RealizabilityResult {
            realizable: true,
            witness: Some(witness),
            margin: Some(margin),
        }),
        Ok(derived) => Err(SolverError::Certification(format!(
            "witness derives {} instead of {}",
            derived.to_inline(),
            rm.to_inline()
        ))),
        Err(e) => Err(SolverError::Certification(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Topology, TopologyKind};
    use crate::rankmodel::derive_rank_matrix;

    #[test]
    fn pd_matrix_is_realizable_and_certified() {
        let rm = RankMatrix::new(
            TopologyKind::Moore8,
            &[13, 11, 10, 8, 7, 5, 4, 2, 1],
            &[18, 17, 16, 15, 14, 12, 9, 6, 3],
        )
        .unwrap();
        let res = is_linear_realizable(&rm).unwrap();
        assert!(res.realizable);
        let witness = res.witness.clone().unwrap();
        let rederived = derive_rank_matrix(&witness, &Topology::moore8()).unwrap();
        assert_eq!(rederived, rm);
        assert!(res.margin_f64().unwrap() > 1e-9);
    }

    #[test]
    fn non_monotone_matrix_is_not_realizable() {
        let rm = RankMatrix::new(
            TopologyKind::Moore8,
            &[12, 8, 16, 14, 9, 3, 6, 1, 10],
            &[2, 11, 18, 17, 5, 13, 4, 15, 7],
        )
        .unwrap();
        let res = is_linear_realizable(&rm).unwrap();
        assert!(!res.realizable);
        assert!(res.witness.is_none());
        assert_eq!(res.margin_f64(), Some(0.0));
    }

    #[test]
    fn float_route_agrees_on_examples() {
        let pd = RankMatrix::new(
            TopologyKind::Moore8,
            &[13, 11, 10, 8, 7, 5, 4, 2, 1],
            &[18, 17, 16, 15, 14, 12, 9, 6, 3],
        )
        .unwrap();
        assert!(is_linear_realizable_with::<f64>(&pd).unwrap().realizable);
        let hex = RankMatrix::new(
            TopologyKind::Hex6,
            &[4, 13, 1, 5, 10, 2, 7],
            &[9, 14, 12, 11, 6, 8, 3],
        )
        .unwrap();
        assert!(!is_linear_realizable_with::<f64>(&hex).unwrap().realizable);
        assert!(!is_linear_realizable(&hex).unwrap().realizable);
    }

    #[test]
    fn exact_and_float_routes_agree_for_two_neighbors() {
        let mut entries = [1u32, 2, 3, 4, 5, 6];
        let mut checked = 0;
        permute(&mut entries, 0, &mut |p| {
            let rm = RankMatrix::with_neighbor_count(2, &p[..3], &p[3..]).unwrap();
            let exact = is_linear_realizable(&rm).unwrap();
            let float = is_linear_realizable_with::<f64>(&rm).unwrap();
            assert_eq!(exact.realizable, float.realizable, "{rm:?}");
            if exact.realizable {
                assert!(rm.rows_monotone(), "{rm:?}");
            }
            checked += 1;
        });
        assert_eq!(checked, 720);
    }

    fn permute(items: &mut [u32], start: usize, f: &mut impl FnMut(&[u32])) {
        if start == items.len() {
            return f(items);
        }
        for i in start..items.len() {
            items.swap(start, i);
            permute(items, start + 1, f);
            items.swap(start, i);
        }
    }
}
