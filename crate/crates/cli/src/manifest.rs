//! Run settings, from a TOML manifest and/or command-line flags.
//!
//! Relative paths are resolved against the working directory.

use std::path::{Path, PathBuf};

use nlgames::{
    derive_rank_matrix, ExactGame, Grid, Init, RankMatrix, Topology, TopologyKind, UpdateRule,
};
use serde::Deserialize;

use crate::error::CliError;
use crate::export::FrameFormat;

pub const DEFAULT_SIDE: usize = 100;
pub const DEFAULT_STEPS: usize = 100;
pub const DEFAULT_HORIZON: usize = 200;
pub const DEFAULT_INIT: &str = "bernoulli:0.5";

/// Every field is optional so that a manifest and the flags can be layered.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub topology: Option<String>,
    pub rule: Option<String>,
    /// `file:PATH` or `inline:ROW0/ROW1`.
    pub ranks: Option<String>,
    /// `a,b,c,d`.
    pub game: Option<String>,
    pub rows: Option<usize>,
    pub cols: Option<usize>,
    /// `uniform0`, `uniform1`, `bernoulli:P`, `file:PATH`, `center` or `center:S`.
    pub init: Option<String>,
    pub seed: Option<u64>,
    pub steps: Option<usize>,
    pub horizon: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub stride: Option<usize>,
}

impl RunManifest {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("invalid manifest: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text)
    }

    /// Layers `flags` over `self`; set flags win. A rank source given on the
    /// command line replaces both rank sources of the manifest.
    pub fn overlay(self, flags: RunManifest) -> RunManifest {
        let (ranks, game) = if flags.ranks.is_some() || flags.game.is_some() {
            (flags.ranks, flags.game)
        } else {
            (self.ranks, self.game)
        };
        RunManifest {
            topology: flags.topology.or(self.topology),
            rule: flags.rule.or(self.rule),
            ranks,
            game,
            rows: flags.rows.or(self.rows),
            cols: flags.cols.or(self.cols),
            init: flags.init.or(self.init),
            seed: flags.seed.or(self.seed),
            steps: flags.steps.or(self.steps),
            horizon: flags.horizon.or(self.horizon),
            out: flags.out.or(self.out),
            format: flags.format.or(self.format),
            stride: flags.stride.or(self.stride),
        }
    }

    pub fn resolve(&self) -> Result<RunSpec, CliError> {
        let stated: Option<TopologyKind> = self.topology.as_deref().map(str::parse).transpose()?;
        let matrix = resolve_matrix(self.ranks.as_deref(), self.game.as_deref(), stated)?;
        let kind = matrix
            .topology()
            .expect("resolved matrices carry a topology");
        let topology = Topology::new(kind);

        let rule = match &self.rule {
            Some(r) => r.parse()?,
            None => UpdateRule::default(),
        };
        let format = match &self.format {
            Some(f) => f.parse()?,
            None => FrameFormat::default(),
        };
        let stride = self.stride.unwrap_or(1);
        if stride == 0 {
            return Err(CliError::Usage("stride must be at least 1".into()));
        }
        let horizon = self.horizon.unwrap_or(DEFAULT_HORIZON);
        if horizon == 0 {
            return Err(CliError::Usage("horizon must be at least 1".into()));
        }

        let init = parse_init(self.init.as_deref().unwrap_or(DEFAULT_INIT))?;
        let (file_rows, file_cols) = match &init {
            Init::Explicit(g) => (Some(g.rows()), Some(g.cols())),
            _ => (None, None),
        };
        let rows = self.rows.or(file_rows).unwrap_or(DEFAULT_SIDE);
        let cols = self.cols.or(file_cols).unwrap_or(DEFAULT_SIDE);
        topology.check_dims(rows, cols)?;

        Ok(RunSpec {
            topology,
            rule,
            matrix,
            rows,
            cols,
            init,
            seed: self.seed.unwrap_or(0),
            steps: self.steps.unwrap_or(DEFAULT_STEPS),
            horizon,
            out: self.out.clone(),
            format,
            stride,
        })
    }
}

/// Fully validated run settings.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSpec {
    pub topology: Topology,
    pub rule: UpdateRule,
    pub matrix: RankMatrix,
    pub rows: usize,
    pub cols: usize,
    pub init: Init,
    pub seed: u64,
    pub steps: usize,
    pub horizon: usize,
    pub out: Option<PathBuf>,
    pub format: FrameFormat,
    pub stride: usize,
}

impl RunSpec {
    pub fn initial_grid(&self) -> Result<Grid, CliError> {
        Ok(nlgames::make_grid(
            self.rows,
            self.cols,
            &self.init,
            self.seed,
            &self.topology,
        )?)
    }
}

/// Exactly one of `ranks` and `game` must be given. A rank file carries its
/// own topology, which must agree with `stated` when both are present.
pub fn resolve_matrix(
    ranks: Option<&str>,
    game: Option<&str>,
    stated: Option<TopologyKind>,
) -> Result<RankMatrix, CliError> {
    match (ranks, game) {
        (Some(_), Some(_)) => Err(CliError::Usage(
            "give exactly one rank source: --ranks or --game, not both".into(),
        )),
        (None, None) => Err(CliError::Usage(
            "no rank source: give --ranks file:PATH, --ranks inline:ROW0/ROW1 or --game a,b,c,d"
                .into(),
        )),
        (None, Some(game)) => {
            let kind = stated.unwrap_or(TopologyKind::Moore8);
            let game = ExactGame::parse(game)?;
            Ok(derive_rank_matrix(&game, &Topology::new(kind))?)
        }
        (Some(source), None) => {
            if let Some(path) = source.strip_prefix("file:") {
                let mut text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                if !text.ends_with('\n') {
                    text.push('\n');
                }
                let rm = RankMatrix::parse(&text)?;
                let kind = rm.topology().expect("parsed matrices are tagged");
                if let Some(stated) = stated.filter(|&s| s != kind) {
                    return Err(CliError::Usage(format!(
                        "rank file {path} is for {kind} but topology {stated} was requested"
                    )));
                }
                Ok(rm)
            } else if let Some(inline) = source.strip_prefix("inline:") {
                let kind = stated.unwrap_or(TopologyKind::Moore8);
                Ok(RankMatrix::parse_inline(kind, inline)?)
            } else {
                Err(CliError::Usage(format!(
                    "rank source {source:?} must start with file: or inline:"
                )))
            }
        }
    }
}

pub fn parse_init(text: &str) -> Result<Init, CliError> {
    let bad = || {
        CliError::Usage(format!(
            "unknown init {text:?} (expected uniform0, uniform1, bernoulli:P, file:PATH or center)"
        ))
    };
    match text {
        "uniform0" => return Ok(Init::Uniform(0)),
        "uniform1" => return Ok(Init::Uniform(1)),
        "center" => return Ok(Init::Center(1)),
        _ => {}
    }
    let (kind, arg) = text.split_once(':').ok_or_else(bad)?;
    match kind {
        "bernoulli" => {
            let p: f64 = arg.trim().parse().map_err(|_| bad())?;
            if !(0.0..=1.0).contains(&p) {
                return Err(CliError::Usage(format!(
                    "bernoulli probability {p} outside [0, 1]"
                )));
            }
            Ok(Init::Bernoulli(p))
        }
        "center" => match arg {
            "0" => Ok(Init::Center(0)),
            "1" => Ok(Init::Center(1)),
            _ => Err(bad()),
        },
        "file" => {
            let text = std::fs::read_to_string(arg).map_err(|e| CliError::io(arg, e))?;
            Ok(Init::Explicit(Grid::parse(&text)?))
        }
        _ => Err(bad()),
    }
}
