//! Argument parsing and dispatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use nlgames::analysis::ExploreConfig;
use nlgames::{Topology, TopologyKind, UpdateRule};

use crate::commands::{
    cmd_census, cmd_check_linear, cmd_classify, cmd_count, cmd_derive, cmd_explore, cmd_simulate,
    Solver,
};
use crate::error::{exit, CliError};
use crate::manifest::{resolve_matrix, RunManifest, DEFAULT_HORIZON, DEFAULT_SIDE};

#[derive(Debug, Parser)]
#[command(
    name = "nlgames",
    version,
    about = "Nonlinear spatial games on a torus"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the rank matrix induced by a 2x2 game.
    Derive {
        /// Payoffs a,b,c,d as decimal literals.
        #[arg(long, allow_hyphen_values = true)]
        game: String,
        #[arg(long, default_value = "moore8")]
        topology: TopologyKind,
    },
    /// Run the automaton and write PBM frames plus a summary.
    Simulate(RunArgs),
    /// Report how a run ends: fixed point, cycle or undetermined.
    Classify(RunArgs),
    /// Decide whether a rank matrix comes from some 2x2 game.
    CheckLinear {
        #[command(flatten)]
        source: RankSource,
        #[arg(long)]
        topology: Option<TopologyKind>,
        /// `exact` (rational arithmetic) or `float`.
        #[arg(long, default_value = "exact")]
        solver: Solver,
    },
    /// Score random rank matrices and list the most interesting first.
    Explore {
        #[arg(long, default_value = "moore8")]
        topology: TopologyKind,
        #[arg(long)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "best")]
        rule: UpdateRule,
        #[arg(long, default_value_t = DEFAULT_SIDE)]
        rows: usize,
        #[arg(long, default_value_t = DEFAULT_SIDE)]
        cols: usize,
        #[arg(long, default_value_t = DEFAULT_HORIZON)]
        horizon: usize,
        /// Print only the best N records.
        #[arg(long)]
        top: Option<usize>,
    },
    /// Print the number of rank matrices for a topology.
    Count {
        #[arg(long, default_value = "moore8")]
        topology: TopologyKind,
    },
    /// Estimate the fraction of random rank matrices that are game-derived.
    Census {
        #[arg(long, default_value = "moore8")]
        topology: TopologyKind,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also print one record per draw.
        #[arg(long)]
        records: bool,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct RankSource {
    /// `file:PATH` or `inline:ROW0/ROW1`.
    #[arg(long)]
    pub ranks: Option<String>,
    /// Payoffs a,b,c,d; the rank matrix is derived from them.
    #[arg(long, allow_hyphen_values = true)]
    pub game: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// TOML file with run settings; flags take precedence.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[command(flatten)]
    pub source: RankSource,
    #[arg(long)]
    pub topology: Option<String>,
    /// `best` or `any-better`.
    #[arg(long)]
    pub rule: Option<String>,
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub cols: Option<usize>,
    /// `uniform0`, `uniform1`, `bernoulli:P`, `file:PATH`, `center` or `center:S`.
    #[arg(long)]
    pub init: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Directory for frames and the summary file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `pbm-ascii` or `pbm-binary`.
    #[arg(long)]
    pub format: Option<String>,
    /// Write every K-th frame.
    #[arg(long)]
    pub stride: Option<usize>,
}

impl RunArgs {
    /// The manifest file (if any) with these flags layered on top.
    pub fn to_manifest(&self) -> Result<RunManifest, CliError> {
        let base = match &self.manifest {
            Some(path) => RunManifest::load(path)?,
            None => RunManifest::default(),
        };
        let flags = RunManifest {
            topology: self.topology.clone(),
            rule: self.rule.clone(),
            ranks: self.source.ranks.clone(),
            game: self.source.game.clone(),
            rows: self.rows,
            cols: self.cols,
            init: self.init.clone(),
            seed: self.seed,
            steps: self.steps,
            horizon: self.horizon,
            out: self.out.clone(),
            format: self.format.clone(),
            stride: self.stride,
        };
        Ok(base.overlay(flags))
    }
}

pub fn execute(command: &Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Derive { game, topology } => cmd_derive(game, &Topology::new(*topology), out),
        Command::Simulate(args) => {
            let spec = args.to_manifest()?.resolve()?;
            cmd_simulate(&spec, out).map(|_| exit::SUCCESS)
        }
        Command::Classify(args) => {
            let spec = args.to_manifest()?.resolve()?;
            cmd_classify(&spec, out)
        }
        Command::CheckLinear {
            source,
            topology,
            solver,
        } => {
            let rm = resolve_matrix(source.ranks.as_deref(), source.game.as_deref(), *topology)?;
            cmd_check_linear(&rm, *solver, out)
        }
        Command::Explore {
            topology,
            budget,
            seed,
            rule,
            rows,
            cols,
            horizon,
            top,
        } => {
            let config = ExploreConfig {
                rule: *rule,
                rows: *rows,
                cols: *cols,
                horizon: *horizon,
                ..ExploreConfig::new(Topology::new(*topology), *budget, *seed)
            };
            cmd_explore(&config, *top, out)
        }
        Command::Count { topology } => cmd_count(&Topology::new(*topology), out),
        Command::Census {
            topology,
            samples,
            seed,
            records,
        } => cmd_census(&Topology::new(*topology), *samples, *seed, *records, out),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Reports go to `out`, diagnostics to `err`.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                exit::PARSE
            } else {
                exit::SUCCESS
            };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
