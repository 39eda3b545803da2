//! Subcommand bodies. Each writes its report to `out` and returns the exit code.

use std::fmt;
use std::fs;
use std::io::Write;

use nlgames::analysis::{census_records, summarize_census, CensusRecord, ExploreConfig};
use nlgames::{
    classify, count_rank_matrices, derive_rank_matrix, explore, is_linear_realizable,
    is_linear_realizable_with, run, ClassKind, ExactGame, RankMatrix, Scalar, Topology,
};

use crate::error::{exit, CliError};
use crate::export::{export_frame, frame_name};
use crate::manifest::RunSpec;

pub const SUMMARY_FILE: &str = "summary.txt";

/// Derives the rank matrix of `game` and prints its serialization.
pub fn cmd_derive(game: &str, topology: &Topology, out: &mut dyn Write) -> Result<i32, CliError> {
    let game = ExactGame::parse(game)?;
    let rm = derive_rank_matrix(&game, topology)?;
    out.write_all(rm.serialize()?.as_bytes())?;
    Ok(exit::SUCCESS)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Solver {
    #[default]
    Exact,
    Float,
}

impl std::str::FromStr for Solver {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Self::Exact),
            "float" => Ok(Self::Float),
            other => Err(CliError::Usage(format!(
                "unknown solver {other:?} (expected exact or float)"
            ))),
        }
    }
}

/// Prints `REALIZABLE` with a witness game, or `NOT_REALIZABLE`.
pub fn cmd_check_linear(
    rm: &RankMatrix,
    solver: Solver,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    match solver {
        Solver::Exact => report_realizability(rm, is_linear_realizable(rm)?, out),
        Solver::Float => report_realizability(rm, is_linear_realizable_with::<f64>(rm)?, out),
    }
}

fn report_realizability<T: Scalar + fmt::Display>(
    rm: &RankMatrix,
    res: nlgames::RealizabilityResult<T>,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    writeln!(out, "rank={}", rm.to_inline())?;
    let margin = res
        .margin_f64()
        .map_or("-".to_string(), |m| format!("{m:.9}"));
    match res.witness {
        Some(w) if res.realizable => {
            writeln!(out, "REALIZABLE")?;
            writeln!(out, "witness={},{},{},{}", w.a, w.b, w.c, w.d)?;
            writeln!(out, "margin={margin}")?;
            Ok(exit::SUCCESS)
        }
        _ => {
            writeln!(out, "NOT_REALIZABLE")?;
            writeln!(out, "margin={margin}")?;
            Ok(exit::NOT_REALIZABLE)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationSummary {
    pub steps: usize,
    pub rows: usize,
    pub cols: usize,
    pub final_density: f64,
    pub classification: ClassKind,
    pub final_digest: String,
    pub frames: usize,
}

impl fmt::Display for SimulationSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "steps={}\trows={}\tcols={}\tfinal_density={:.6}\tclassification={}\tfinal_digest={}\tframes={}",
            self.steps,
            self.rows,
            self.cols,
            self.final_density,
            self.classification,
            self.final_digest,
            self.frames
        )
    }
}

/// Runs `spec.steps` steps. With an output directory, every `stride`-th state
/// (step 0 included) is written as a frame and the summary line is saved to
/// [`SUMMARY_FILE`]. The summary is always printed.
pub fn cmd_simulate(spec: &RunSpec, out: &mut dyn Write) -> Result<SimulationSummary, CliError> {
    if let Some(dir) = &spec.out {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let initial = spec.initial_grid()?;
    let mut frames = 0;
    let mut write_error = None;
    let record = run(
        &initial,
        &spec.matrix,
        &spec.topology,
        spec.rule,
        spec.steps,
        |t, grid, _| {
            let Some(dir) = &spec.out else { return };
            if t % spec.stride != 0 || write_error.is_some() {
                return;
            }
            let path = dir.join(frame_name(t));
            match fs::write(&path, export_frame(grid, spec.format)) {
                Ok(()) => frames += 1,
                Err(e) => write_error = Some(CliError::io(path, e)),
            }
        },
    )?;
    if let Some(e) = write_error {
        return Err(e);
    }
    let last = record
        .metrics
        .last()
        .expect("initial state is always recorded");
    let summary = SimulationSummary {
        steps: record.steps(),
        rows: initial.rows(),
        cols: initial.cols(),
        final_density: last.density,
        classification: ClassKind::from_cycle(record.cycle, spec.steps),
        final_digest: last.digest.clone(),
        frames,
    };
    let line = format!("{summary}\n");
    if let Some(dir) = &spec.out {
        let path = dir.join(SUMMARY_FILE);
        fs::write(&path, &line).map_err(|e| CliError::io(path, e))?;
    }
    out.write_all(line.as_bytes())?;
    Ok(summary)
}

/// Classifies the run from the initial grid over `spec.horizon` steps.
pub fn cmd_classify(spec: &RunSpec, out: &mut dyn Write) -> Result<i32, CliError> {
    let initial = spec.initial_grid()?;
    let class = classify(
        &initial,
        &spec.matrix,
        &spec.topology,
        spec.rule,
        spec.horizon,
    )?;
    let score = nlgames::analysis::interest(&class, spec.horizon);
    writeln!(
        out,
        "class={}\tfirst_uniform={}\tfinal_density={:.6}\tscore={:.6}\tsurvived={}\tlate_activity={:.6}",
        class.kind,
        class
            .first_uniform
            .map_or("-".to_string(), |t| t.to_string()),
        class.density.last().copied().unwrap_or(0.0),
        score.score,
        score.survived,
        score.late_activity
    )?;
    Ok(exit::SUCCESS)
}

/// Prints one record per scored matrix, best first; `top` limits the count.
pub fn cmd_explore(
    config: &ExploreConfig,
    top: Option<usize>,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let hits = explore(config)?;
    for hit in hits.iter().take(top.unwrap_or(usize::MAX)) {
        writeln!(out, "{}", hit.to_record())?;
    }
    Ok(exit::SUCCESS)
}

pub fn cmd_count(topology: &Topology, out: &mut dyn Write) -> Result<i32, CliError> {
    writeln!(out, "{}", count_rank_matrices(topology))?;
    Ok(exit::SUCCESS)
}

/// Estimates the realizable fraction of uniformly random rank matrices.
/// With `records`, each draw is printed before the summary line.
pub fn cmd_census(
    topology: &Topology,
    samples: usize,
    seed: u64,
    records: bool,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    if samples == 0 {
        return Err(CliError::Usage("samples must be at least 1".into()));
    }
    let draws: Vec<CensusRecord> = census_records(topology.neighbor_count(), samples, seed);
    if records {
        for r in &draws {
            writeln!(out, "{}", r.to_record())?;
        }
    }
    let c = summarize_census(&draws);
    writeln!(
        out,
        "topology={}\tsamples={}\trealizable={}\tsolver_failures={}\tproportion={:.6}\thalf_width={:.6}",
        topology.kind(),
        c.samples,
        c.realizable,
        c.solver_failures,
        c.proportion,
        c.half_width
    )?;
    Ok(if c.solver_failures > 0 {
        exit::SOLVER
    } else {
        exit::SUCCESS
    })
}
