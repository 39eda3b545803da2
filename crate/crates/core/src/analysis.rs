//! Trajectory metrics, cycle classification, the linear-realizability census,
//! and random exploration of rank matrices.

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;
use thiserror::Error;

use crate::engine::{Cycle, CycleDetector, EngineError, Stepper, UpdateRule};
use crate::lattice::{make_grid, Grid, Init, LatticeError, Topology};
use crate::rankmodel::simplex::SolverError;
use crate::rankmodel::{
    is_linear_realizable, random_rank_matrix, random_with_neighbor_count, RankMatrix,
};
use crate::rng::sample_seed;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("{name} must be at least 1")]
    NonPositive { name: &'static str },
}

/// Fraction of cells whose strategy differs between two same-sized grids.
pub fn activity(g1: &Grid, g2: &Grid) -> Result<f64, LatticeError> {
    g1.same_dims(g2)?;
    let changed = g1
        .cells()
        .iter()
        .zip(g2.cells())
        .filter(|(a, b)| a != b)
        .count();
    Ok(changed as f64 / g1.cells().len() as f64)
}

/// Fraction of type-1 cells.
pub fn density(g: &Grid) -> f64 {
    g.ones() as f64 / g.cells().len() as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassKind {
    FixedPoint { transient: usize },
    Periodic { period: usize, transient: usize },
    Undetermined { horizon: usize },
}

impl ClassKind {
    pub fn from_cycle(cycle: Option<Cycle>, horizon: usize) -> Self {
        match cycle {
            Some(Cycle {
                transient,
                period: 1,
            }) => Self::FixedPoint { transient },
            Some(Cycle { transient, period }) => Self::Periodic { period, transient },
            None => Self::Undetermined { horizon },
        }
    }
}

impl fmt::Display for ClassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::FixedPoint { transient } => write!(f, "fixed_point(transient={transient})"),
            Self::Periodic { period, transient } => {
                write!(f, "periodic(period={period},transient={transient})")
            }
            Self::Undetermined { horizon } => write!(f, "undetermined(horizon={horizon})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub kind: ClassKind,
    /// Activity between step `t-1` and `t`, for `t = 1..=horizon`.
    pub activity: Vec<f64>,
    /// Density at `t = 0..=horizon`.
    pub density: Vec<f64>,
    /// First step at which every cell plays the same strategy.
    pub first_uniform: Option<usize>,
}

/// Simulates `horizon` steps. Once a cycle closes the rest of the series is
/// filled in from the cycle instead of stepping further.
pub fn classify(
    initial: &Grid,
    rm: &RankMatrix,
    topology: &Topology,
    rule: UpdateRule,
    horizon: usize,
) -> Result<Classification, AnalysisError> {
    if horizon == 0 {
        return Err(AnalysisError::NonPositive { name: "horizon" });
    }
    let stepper = Stepper::new(rm, topology, rule, initial.rows(), initial.cols())?;
    let mut detector = CycleDetector::new();
    let mut current = initial.clone();
    let mut activity_series = Vec::with_capacity(horizon);
    let mut density_series = Vec::with_capacity(horizon + 1);
    let mut first_uniform = current.uniform_strategy().map(|_| 0);
    density_series.push(density(&current));
    detector.push(&current);

    for t in 1..=horizon {
        if let Some(cycle) = detector.cycle() {
            // state(t) = state(t - period) for t beyond the transient.
            activity_series.push(activity_series[t - 1 - cycle.period]);
            density_series.push(density_series[t - cycle.period]);
            continue;
        }
        let next = stepper.step(&current);
        activity_series.push(activity(&current, &next)?);
        density_series.push(density(&next));
        if first_uniform.is_none() && next.uniform_strategy().is_some() {
            first_uniform = Some(t);
        }
        detector.push(&next);
        current = next;
    }
    Ok(Classification {
        kind: ClassKind::from_cycle(detector.cycle(), horizon),
        activity: activity_series,
        density: density_series,
        first_uniform,
    })
}

/// `(2(N+1))!`, the number of rank matrices for `N` neighbors.
pub fn count_for_neighbor_count(n: usize) -> BigUint {
    (1..=2 * (n as u64 + 1)).fold(BigUint::one(), |acc, i| acc * i)
}

pub fn count_rank_matrices(topology: &Topology) -> BigUint {
    count_for_neighbor_count(topology.neighbor_count())
}

/// Rank matrices with both rows strictly monotone: pick row 0's value set,
/// then a direction for each row.
pub fn count_monotone(n: usize) -> BigUint {
    if n == 0 {
        return count_for_neighbor_count(0);
    }
    let len = 2 * (n as u64 + 1);
    let half = n as u64 + 1;
    let mut binom = BigUint::one();
    for i in 0..half {
        binom = binom * (len - i) / (i + 1);
    }
    binom * 4u32
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearCensus {
    pub samples: usize,
    pub realizable: usize,
    pub solver_failures: usize,
    /// Realizable matrices whose rows are not both monotone; always 0 for a
    /// sound solver.
    pub non_monotone_realizable: usize,
    pub proportion: f64,
    /// Largest distance from `proportion` to either end of the 95% Wilson interval.
    pub half_width: f64,
}

/// One census draw.
#[derive(Clone, Debug)]
pub struct CensusRecord {
    pub index: usize,
    pub matrix: RankMatrix,
    pub outcome: Result<bool, SolverError>,
    pub margin: Option<f64>,
}

impl CensusRecord {
    pub fn to_record(&self) -> String {
        let verdict = match &self.outcome {
            Ok(true) => "realizable".to_string(),
            Ok(false) => "not_realizable".to_string(),
            Err(e) => format!("solver_failure({e})"),
        };
        format!(
            "index={}\trank={}\tresult={}\tmargin={}\tmonotone={}",
            self.index,
            self.matrix.to_inline(),
            verdict,
            self.margin.map_or("-".to_string(), |m| format!("{m:.9}")),
            self.matrix.rows_monotone()
        )
    }
}

/// Tests `samples` uniformly random matrices; sample `i` uses seed `seed + i`.
pub fn census_records(n: usize, samples: usize, seed: u64) -> Vec<CensusRecord> {
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let matrix = random_with_neighbor_count(n, sample_seed(seed, i as u64));
            let res = is_linear_realizable(&matrix);
            let margin = res.as_ref().ok().and_then(|r| r.margin_f64());
            CensusRecord {
                index: i,
                outcome: res.map(|r| r.realizable),
                margin,
                matrix,
            }
        })
        .collect()
}

pub fn summarize_census(records: &[CensusRecord]) -> LinearCensus {
    let samples = records.len();
    let realizable = records.iter().filter(|r| r.outcome == Ok(true)).count();
    let solver_failures = records.iter().filter(|r| r.outcome.is_err()).count();
    let non_monotone_realizable = records
        .iter()
        .filter(|r| r.outcome == Ok(true) && !r.matrix.rows_monotone())
        .count();
    let tested = samples - solver_failures;
    let (proportion, half_width) = wilson(realizable, tested);
    LinearCensus {
        samples,
        realizable,
        solver_failures,
        non_monotone_realizable,
        proportion,
        half_width,
    }
}

pub fn estimate_linear_proportion_n(
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<LinearCensus, AnalysisError> {
    if samples == 0 {
        return Err(AnalysisError::NonPositive { name: "samples" });
    }
    Ok(summarize_census(&census_records(n, samples, seed)))
}

pub fn estimate_linear_proportion(
    topology: &Topology,
    samples: usize,
    seed: u64,
) -> Result<LinearCensus, AnalysisError> {
    estimate_linear_proportion_n(topology.neighbor_count(), samples, seed)
}

/// Sample proportion and the larger side of the 95% Wilson score interval.
fn wilson(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    const Z: f64 = 1.959_963_984_540_054;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let spread = Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let half = ((centre + spread) - p).max(p - (centre - spread));
    (p, half)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExploreConfig {
    pub topology: Topology,
    pub rule: UpdateRule,
    pub budget: usize,
    pub seed: u64,
    pub rows: usize,
    pub cols: usize,
    pub horizon: usize,
}

impl ExploreConfig {
    pub fn new(topology: Topology, budget: usize, seed: u64) -> Self {
        Self {
            topology,
            rule: UpdateRule::default(),
            budget,
            seed,
            rows: 100,
            cols: 100,
            horizon: 200,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Interest {
    pub score: f64,
    /// Steps before the run became uniform or first revisited a state, capped at the horizon.
    pub survived: usize,
    /// Mean activity over the final quarter of the run.
    pub late_activity: f64,
}

/// `survived + horizon * late_activity`.
pub fn interest(class: &Classification, horizon: usize) -> Interest {
    let cycle_closed = match class.kind {
        ClassKind::FixedPoint { transient } => Some(transient + 1),
        ClassKind::Periodic { period, transient } => Some(transient + period),
        ClassKind::Undetermined { .. } => None,
    };
    let survived = [class.first_uniform, cycle_closed]
        .into_iter()
        .flatten()
        .min()
        .unwrap_or(horizon)
        .min(horizon);
    let quarter = (horizon / 4).max(1).min(class.activity.len());
    let tail = &class.activity[class.activity.len() - quarter..];
    let late_activity = if tail.is_empty() {
        0.0
    } else {
        (tail.iter().sum::<f64>() / tail.len() as f64).clamp(0.0, 1.0)
    };
    Interest {
        score: survived as f64 + horizon as f64 * late_activity,
        survived,
        late_activity,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExploreHit {
    pub index: usize,
    pub matrix_seed: u64,
    pub grid_seed: u64,
    pub matrix: RankMatrix,
    pub interest: Interest,
    pub classification: Classification,
}

impl ExploreHit {
    pub fn to_record(&self) -> String {
        let final_density = self.classification.density.last().copied().unwrap_or(0.0);
        format!(
            "index={}\tseed={}\trank={}\tscore={:.6}\tclass={}\tsurvived={}\tlate_activity={:.6}\tfinal_density={:.6}",
            self.index,
            self.matrix_seed,
            self.matrix.to_inline(),
            self.interest.score,
            self.classification.kind,
            self.interest.survived,
            self.interest.late_activity,
            final_density
        )
    }
}

/// Grid seed paired with a matrix seed, so the two draws use distinct streams.
pub fn grid_seed_for(matrix_seed: u64) -> u64 {
    matrix_seed ^ 0xA076_1D64_78BD_642F
}

/// Scores `budget` random rank matrices, each run from a bernoulli(0.5)
/// start, and returns them best first. Sample `i` draws its matrix with seed
/// `seed + i` and its grid with [`grid_seed_for`] of that. Equal scores keep
/// sample order.
pub fn explore(config: &ExploreConfig) -> Result<Vec<ExploreHit>, AnalysisError> {
    if config.budget == 0 {
        return Err(AnalysisError::NonPositive { name: "budget" });
    }
    if config.horizon == 0 {
        return Err(AnalysisError::NonPositive { name: "horizon" });
    }
    config.topology.check_dims(config.rows, config.cols)?;
    let mut hits = (0..config.budget)
        .into_par_iter()
        .map(|i| {
            let matrix_seed = sample_seed(config.seed, i as u64);
            let matrix = random_rank_matrix(&config.topology, matrix_seed);
            score_matrix(config, i, matrix_seed, matrix)
        })
        .collect::<Result<Vec<_>, _>>()?;
    hits.sort_by(|x, y| {
        y.interest
            .score
            .total_cmp(&x.interest.score)
            .then(x.index.cmp(&y.index))
    });
    Ok(hits)
}

/// Scores one matrix under `config` from the standard start for `matrix_seed`.
pub fn score_matrix(
    config: &ExploreConfig,
    index: usize,
    matrix_seed: u64,
    matrix: RankMatrix,
) -> Result<ExploreHit, AnalysisError> {
    let grid_seed = grid_seed_for(matrix_seed);
    let grid = make_grid(
        config.rows,
        config.cols,
        &Init::Bernoulli(0.5),
        grid_seed,
        &config.topology,
    )?;
    let classification = classify(
        &grid,
        &matrix,
        &config.topology,
        config.rule,
        config.horizon,
    )?;
    Ok(ExploreHit {
        index,
        matrix_seed,
        grid_seed,
        interest: interest(&classification, config.horizon),
        matrix,
        classification,
    })
}
