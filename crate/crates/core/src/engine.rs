//! Two-phase synchronous dynamics.
//!
//! Phase one scores every cell by looking up its rank from its own strategy
//! and its count of type-1 neighbors. Phase two replaces every strategy at
//! once according to an [`UpdateRule`]. Both phases are pure functions of the
//! previous grid.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::analysis::{activity, density};
use crate::lattice::{wrap, Grid, LatticeError, Topology, TopologyKind};
use crate::rankmodel::RankMatrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("rank matrix is for {matrix:?}, grid uses {topology}")]
    TopologyMismatch {
        matrix: Option<TopologyKind>,
        topology: TopologyKind,
    },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("patch must be {expected}x{expected} ({} cells), got side {side} with {cells} cells", .expected * .expected)]
    PatchSize {
        expected: usize,
        side: usize,
        cells: usize,
    },
    #[error("unknown update rule {0:?} (expected best or any-better)")]
    UnknownRule(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum UpdateRule {
    /// Adopt the strategy of the highest-ranked cell among self and neighbors.
    #[default]
    BestInNeighborhood,
    /// Switch iff some neighbor playing the other strategy strictly outranks self.
    AnyBetterOpponent,
}

impl UpdateRule {
    pub const ALL: [UpdateRule; 2] = [Self::BestInNeighborhood, Self::AnyBetterOpponent];

    pub fn token(self) -> &'static str {
        match self {
            Self::BestInNeighborhood => "best",
            Self::AnyBetterOpponent => "any-better",
        }
    }
}

impl fmt::Display for UpdateRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for UpdateRule {
    type Err = EngineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "best" => Ok(Self::BestInNeighborhood),
            "any-better" => Ok(Self::AnyBetterOpponent),
            other => Err(EngineError::UnknownRule(other.to_string())),
        }
    }
}

/// Rank of every cell, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankField {
    rows: usize,
    cols: usize,
    ranks: Vec<u32>,
}

impl RankField {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.ranks[row * self.cols + col]
    }
}

fn check_matrix(rm: &RankMatrix, topology: &Topology) -> Result<(), EngineError> {
    if rm.topology() != Some(topology.kind()) {
        return Err(EngineError::TopologyMismatch {
            matrix: rm.topology(),
            topology: topology.kind(),
        });
    }
    Ok(())
}

/// Flattened neighbor indices for one torus: entry `i * N + j` is the `j`-th
/// neighbor of cell `i`, in [`Topology::offsets`] order.
#[derive(Clone, Debug)]
pub struct NeighborTable {
    rows: usize,
    cols: usize,
    n: usize,
    index: Vec<u32>,
}

impl NeighborTable {
    pub fn new(topology: &Topology, rows: usize, cols: usize) -> Result<Self, EngineError> {
        topology.check_dims(rows, cols)?;
        let n = topology.neighbor_count();
        let mut index = Vec::with_capacity(rows * cols * n);
        for r in 0..rows {
            let offsets = topology.offsets(r);
            for c in 0..cols {
                index.extend(
                    offsets
                        .iter()
                        .map(|&(dr, dc)| (wrap(r, dr, rows) * cols + wrap(c, dc, cols)) as u32),
                );
            }
        }
        Ok(Self {
            rows,
            cols,
            n,
            index,
        })
    }

    #[inline]
    fn of(&self, cell: usize) -> &[u32] {
        &self.index[cell * self.n..(cell + 1) * self.n]
    }

    fn check(&self, grid: &Grid) {
        assert_eq!(
            (grid.rows(), grid.cols()),
            (self.rows, self.cols),
            "grid does not match neighbor table"
        );
    }

    fn score(&self, grid: &Grid, rm: &RankMatrix) -> RankField {
        self.check(grid);
        let cells = grid.cells();
        let ranks = (0..cells.len())
            .map(|i| {
                let k: usize = self.of(i).iter().map(|&j| cells[j as usize] as usize).sum();
                rm.rank(cells[i], k)
            })
            .collect();
        RankField {
            rows: self.rows,
            cols: self.cols,
            ranks,
        }
    }

    fn imitate(&self, grid: &Grid, field: &RankField, rule: UpdateRule) -> Grid {
        self.check(grid);
        assert_eq!(
            (field.rows, field.cols),
            (self.rows, self.cols),
            "rank field does not match grid"
        );
        let cells = grid.cells();
        let ranks = &field.ranks;
        let next = (0..cells.len())
            .map(|i| {
                let neighbors = self
                    .of(i)
                    .iter()
                    .map(|&j| (cells[j as usize], ranks[j as usize]));
                next_strategy(rule, (cells[i], ranks[i]), neighbors)
            })
            .collect();
        Grid::from_cells(self.rows, self.cols, next).expect("same shape as input")
    }

    /// One full step; `rm` must already be checked against the topology.
    fn step(&self, grid: &Grid, rm: &RankMatrix, rule: UpdateRule) -> Grid {
        let field = self.score(grid, rm);
        self.imitate(grid, &field, rule)
    }
}

/// Steps a fixed (rank matrix, topology, rule, grid size) combination, reusing
/// the neighbor table between steps.
#[derive(Clone, Debug)]
pub struct Stepper<'a> {
    rm: &'a RankMatrix,
    rule: UpdateRule,
    table: NeighborTable,
}

impl<'a> Stepper<'a> {
    pub fn new(
        rm: &'a RankMatrix,
        topology: &Topology,
        rule: UpdateRule,
        rows: usize,
        cols: usize,
    ) -> Result<Self, EngineError> {
        check_matrix(rm, topology)?;
        Ok(Self {
            rm,
            rule,
            table: NeighborTable::new(topology, rows, cols)?,
        })
    }

    /// Panics if `grid` does not have the stepper's dimensions.
    pub fn step(&self, grid: &Grid) -> Grid {
        self.table.step(grid, self.rm, self.rule)
    }
}

pub fn score_phase(
    grid: &Grid,
    rm: &RankMatrix,
    topology: &Topology,
) -> Result<RankField, EngineError> {
    check_matrix(rm, topology)?;
    Ok(NeighborTable::new(topology, grid.rows(), grid.cols())?.score(grid, rm))
}

/// Applies `rule` to one cell given its own `(strategy, rank)` and its neighbors'.
#[inline]
fn next_strategy(
    rule: UpdateRule,
    own: (u8, u32),
    mut neighbors: impl Iterator<Item = (u8, u32)>,
) -> u8 {
    match rule {
        UpdateRule::BestInNeighborhood => {
            // Equal ranks mean the same (s, k) entry, so the maximum is unambiguous.
            neighbors
                .fold(own, |best, cand| if cand.1 > best.1 { cand } else { best })
                .0
        }
        UpdateRule::AnyBetterOpponent => {
            let (s, r) = own;
            if neighbors.any(|(ns, nr)| ns != s && nr > r) {
                1 - s
            } else {
                s
            }
        }
    }
}

/// Panics if `field` and `grid` differ in size or the grid is not admissible
/// for `topology`.
pub fn imitation_phase(
    grid: &Grid,
    field: &RankField,
    topology: &Topology,
    rule: UpdateRule,
) -> Grid {
    let table = NeighborTable::new(topology, grid.rows(), grid.cols())
        .expect("grid dimensions admissible for topology");
    table.imitate(grid, field, rule)
}

pub fn step(
    grid: &Grid,
    rm: &RankMatrix,
    topology: &Topology,
    rule: UpdateRule,
) -> Result<Grid, EngineError> {
    Ok(Stepper::new(rm, topology, rule, grid.rows(), grid.cols())?.step(grid))
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepMetrics {
    pub step: usize,
    /// Fraction of type-1 cells.
    pub density: f64,
    /// Fraction of cells that changed since the previous step (0 for step 0).
    pub activity: f64,
    /// Hex SHA-256 of the state, see [`Grid::digest`].
    pub digest: String,
}

/// First repeated state of a trajectory: `state(transient) == state(transient + period)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cycle {
    pub transient: usize,
    pub period: usize,
}

/// Detects the first repeated state. Digests index earlier states; a digest
/// hit is only reported after the full packed states compare equal.
#[derive(Debug, Default)]
pub struct CycleDetector {
    seen: HashMap<u64, Vec<usize>>,
    states: Vec<Vec<u8>>,
    found: Option<Cycle>,
}

impl CycleDetector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records the next state; returns the cycle once the first repeat occurs.
    pub fn push(&mut self, grid: &Grid) -> Option<Cycle> {
        if self.found.is_some() {
            return self.found;
        }
        let index = self.states.len();
        let packed = grid.packed_bits();
        let bucket = self.seen.entry(grid.digest64()).or_default();
        if let Some(&first) = bucket.iter().find(|&&i| self.states[i] == packed) {
            self.found = Some(Cycle {
                transient: first,
                period: index - first,
            });
        }
        bucket.push(index);
        self.states.push(packed);
        self.found
    }

    pub fn cycle(&self) -> Option<Cycle> {
        self.found
    }
}

#[derive(Clone, Debug)]
pub struct RunRecord {
    /// Metrics for step 0 (the initial state) through the last step.
    pub metrics: Vec<StepMetrics>,
    pub cycle: Option<Cycle>,
    pub final_grid: Grid,
}

impl RunRecord {
    pub fn steps(&self) -> usize {
        self.metrics.len() - 1
    }

    pub fn frame_digests(&self) -> impl Iterator<Item = &str> {
        self.metrics.iter().map(|m| m.digest.as_str())
    }
}

/// Applies [`step`] `steps` times. The observer sees the initial state as
/// step 0 and then every subsequent state, in order.
pub fn run(
    grid: &Grid,
    rm: &RankMatrix,
    topology: &Topology,
    rule: UpdateRule,
    steps: usize,
    mut observer: impl FnMut(usize, &Grid, &StepMetrics),
) -> Result<RunRecord, EngineError> {
    let stepper = Stepper::new(rm, topology, rule, grid.rows(), grid.cols())?;
    let mut detector = CycleDetector::new();
    let mut current = grid.clone();
    let mut metrics = Vec::with_capacity(steps + 1);

    let initial = StepMetrics {
        step: 0,
        density: density(&current),
        activity: 0.0,
        digest: current.digest_hex(),
    };
    detector.push(&current);
    observer(0, &current, &initial);
    metrics.push(initial);

    for t in 1..=steps {
        let next = stepper.step(&current);
        let m = StepMetrics {
            step: t,
            density: density(&next),
            activity: activity(&current, &next)?,
            digest: next.digest_hex(),
        };
        detector.push(&next);
        observer(t, &next, &m);
        metrics.push(m);
        current = next;
    }
    Ok(RunRecord {
        metrics,
        cycle: detector.cycle(),
        final_grid: current,
    })
}

pub const PATCH_SIDE: usize = 5;

/// The radius-2 square around a cell: every cell that can influence its next
/// strategy. For hex6 the parity of the center row is needed to orient offsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Patch {
    cells: Vec<u8>,
    center_row_odd: bool,
}

impl Patch {
    pub fn new(side: usize, cells: Vec<u8>, center_row_odd: bool) -> Result<Self, EngineError> {
        if side != PATCH_SIDE || cells.len() != side * side {
            return Err(EngineError::PatchSize {
                expected: PATCH_SIDE,
                side,
                cells: cells.len(),
            });
        }
        if let Some(pos) = cells.iter().position(|&c| c > 1) {
            return Err(LatticeError::BadSymbol {
                symbol: char::from_digit(cells[pos] as u32, 36).unwrap_or('?'),
                line: pos / side + 1,
            }
            .into());
        }
        Ok(Self {
            cells,
            center_row_odd,
        })
    }

    /// Cuts the patch centered on `(row, col)`, wrapping around the torus.
    pub fn from_grid(grid: &Grid, row: usize, col: usize) -> Self {
        let mut cells = Vec::with_capacity(PATCH_SIDE * PATCH_SIDE);
        for dr in -2..=2 {
            for dc in -2..=2 {
                cells.push(grid.get(wrap(row, dr, grid.rows()), wrap(col, dc, grid.cols())));
            }
        }
        Self {
            cells,
            center_row_odd: row % 2 == 1,
        }
    }

    fn get(&self, r: usize, c: usize) -> u8 {
        self.cells[r * PATCH_SIDE + c]
    }

    fn shifted(&self, r: usize, c: usize, (dr, dc): (isize, isize)) -> (usize, usize) {
        let nr = r as isize + dr;
        let nc = c as isize + dc;
        assert!(
            (0..PATCH_SIDE as isize).contains(&nr) && (0..PATCH_SIDE as isize).contains(&nc),
            "offset leaves the radius-2 patch"
        );
        (nr as usize, nc as usize)
    }

    /// Row parity in grid coordinates; patch row 2 is the center row.
    fn row_parity(&self, r: usize) -> usize {
        (self.center_row_odd as usize + r) % 2
    }
}

/// The center cell's next strategy, computed from its radius-2 patch alone.
pub fn ca_local_next(
    patch: &Patch,
    rm: &RankMatrix,
    topology: &Topology,
    rule: UpdateRule,
) -> Result<u8, EngineError> {
    check_matrix(rm, topology)?;
    let rank_at = |r: usize, c: usize| {
        let k: usize = topology
            .offsets(patch.row_parity(r))
            .iter()
            .map(|&off| {
                let (nr, nc) = patch.shifted(r, c, off);
                patch.get(nr, nc) as usize
            })
            .sum();
        rm.rank(patch.get(r, c), k)
    };
    let center = (2, 2);
    let neighbors = topology
        .offsets(patch.row_parity(center.0))
        .iter()
        .map(|&off| {
            let (r, c) = patch.shifted(center.0, center.1, off);
            (patch.get(r, c), rank_at(r, c))
        });
    Ok(next_strategy(
        rule,
        (patch.get(center.0, center.1), rank_at(center.0, center.1)),
        neighbors,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{make_grid, Init};

    fn pd() -> RankMatrix {
        RankMatrix::new(
            TopologyKind::Moore8,
            &[13, 11, 10, 8, 7, 5, 4, 2, 1],
            &[18, 17, 16, 15, 14, 12, 9, 6, 3],
        )
        .unwrap()
    }

    fn centre_5x5() -> Grid {
        make_grid(5, 5, &Init::Center(1), 0, &Topology::moore8()).unwrap()
    }

    #[test]
    fn uniform_fields() {
        let t = Topology::moore8();
        let zeros = Grid::filled(6, 6, 0).unwrap();
        let ones = Grid::filled(6, 6, 1).unwrap();
        assert!(score_phase(&zeros, &pd(), &t)
            .unwrap()
            .ranks()
            .iter()
            .all(|&r| r == 13));
        assert!(score_phase(&ones, &pd(), &t)
            .unwrap()
            .ranks()
            .iter()
            .all(|&r| r == 3));
    }

    #[test]
    fn single_defector_field() {
        let field = score_phase(&centre_5x5(), &pd(), &Topology::moore8()).unwrap();
        for r in 0..5usize {
            for c in 0..5usize {
                let want = match r.abs_diff(2).max(c.abs_diff(2)) {
                    0 => 18,
                    1 => 11,
                    _ => 13,
                };
                assert_eq!(field.get(r, c), want, "({r},{c})");
            }
        }
    }

    #[test]
    fn single_defector_spreads_to_block() {
        let next = step(
            &centre_5x5(),
            &pd(),
            &Topology::moore8(),
            UpdateRule::BestInNeighborhood,
        )
        .unwrap();
        for r in 0..5usize {
            for c in 0..5usize {
                let inside = r.abs_diff(2) <= 1 && c.abs_diff(2) <= 1;
                assert_eq!(next.get(r, c), u8::from(inside), "({r},{c})");
            }
        }
    }

    #[test]
    fn topology_mismatch_is_reported() {
        let grid = Grid::filled(4, 4, 0).unwrap();
        assert_eq!(
            score_phase(&grid, &pd(), &Topology::hex6()),
            Err(EngineError::TopologyMismatch {
                matrix: Some(TopologyKind::Moore8),
                topology: TopologyKind::Hex6
            })
        );
        let bare = RankMatrix::with_neighbor_count(8, pd().row(0), pd().row(1)).unwrap();
        assert!(score_phase(&grid, &bare, &Topology::moore8()).is_err());
    }

    #[test]
    fn zero_step_run_has_only_initial_state() {
        let g = centre_5x5();
        let mut seen = Vec::new();
        let rec = run(
            &g,
            &pd(),
            &Topology::moore8(),
            UpdateRule::default(),
            0,
            |i, _, _| seen.push(i),
        )
        .unwrap();
        assert_eq!(rec.steps(), 0);
        assert_eq!(seen, vec![0]);
        assert_eq!(rec.final_grid, g);
        assert_eq!(rec.metrics[0].digest, g.digest_hex());
    }

    #[test]
    fn run_composes() {
        let t = Topology::moore8();
        let g = make_grid(12, 12, &Init::Bernoulli(0.5), 3, &t).unwrap();
        let rule = UpdateRule::AnyBetterOpponent;
        let whole = run(&g, &pd(), &t, rule, 9, |_, _, _| {}).unwrap();
        let first = run(&g, &pd(), &t, rule, 4, |_, _, _| {}).unwrap();
        let second = run(&first.final_grid, &pd(), &t, rule, 5, |_, _, _| {}).unwrap();
        assert_eq!(whole.final_grid, second.final_grid);
    }

    #[test]
    fn cycle_detector_reports_first_repeat() {
        let a = Grid::filled(3, 3, 0).unwrap();
        let b = Grid::filled(3, 3, 1).unwrap();
        let mut det = CycleDetector::new();
        assert_eq!(det.push(&a), None);
        assert_eq!(det.push(&b), None);
        assert_eq!(
            det.push(&a),
            Some(Cycle {
                transient: 0,
                period: 2
            })
        );
    }

    #[test]
    fn patch_validation() {
        assert_eq!(
            Patch::new(3, vec![0; 9], false),
            Err(EngineError::PatchSize {
                expected: 5,
                side: 3,
                cells: 9
            })
        );
        assert!(Patch::new(5, vec![0; 24], false).is_err());
        assert!(Patch::new(5, vec![0; 25], true).is_ok());
    }

    #[test]
    fn local_rule_on_fixture_patches() {
        let t = Topology::moore8();
        let zero = Patch::new(5, vec![0; 25], false).unwrap();
        assert_eq!(
            ca_local_next(&zero, &pd(), &t, UpdateRule::default()).unwrap(),
            0
        );
        let g = centre_5x5();
        let patch = Patch::from_grid(&g, 1, 2);
        assert_eq!(
            ca_local_next(&patch, &pd(), &t, UpdateRule::default()).unwrap(),
            1
        );
    }

    #[test]
    fn rule_tokens() {
        assert_eq!(
            "best".parse::<UpdateRule>(),
            Ok(UpdateRule::BestInNeighborhood)
        );
        assert_eq!(
            "any-better".parse::<UpdateRule>(),
            Ok(UpdateRule::AnyBetterOpponent)
        );
        assert!("worst".parse::<UpdateRule>().is_err());
    }
}
