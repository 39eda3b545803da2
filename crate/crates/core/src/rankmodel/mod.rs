//! Rank matrices: construction from 2x2 games, validation, text format,
//! random generation, and the linear-realizability decision procedure.
//!
//! A rank matrix has two rows (own strategy `s`) and `N + 1` columns (number
//! `k` of type-1 neighbors). Its entries are a permutation of `1..=2(N+1)`,
//! and a larger rank means a better outcome.

mod realize;
pub mod simplex;

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::lattice::{LatticeError, Topology, TopologyKind};
use crate::rng::PortableRng;
use crate::scalar::Scalar;

pub use realize::{is_linear_realizable, is_linear_realizable_with, RealizabilityResult};

/// `(strategy, type-1 neighbor count)`: one cell of a rank matrix.
pub type Cell = (u8, usize);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RankError {
    #[error("payoff entry {0} is not finite")]
    NonFinite(&'static str),
    #[error("neighbor count {k} outside 0..={n}")]
    CountOutOfRange { k: usize, n: usize },
    #[error("strategy {0} is not 0 or 1")]
    BadStrategy(u8),
    #[error("non-generic game: equal payoff sums at {}", format_collisions(.0))]
    NonGenericGame(Vec<(Cell, Cell)>),
    #[error("expected {expected} ranks, got {got}")]
    WrongEntryCount { expected: usize, got: usize },
    #[error("ranks are not a permutation of 1..={max}: {detail}")]
    NotPermutation { max: usize, detail: String },
    #[error("malformed rank matrix text: {0}")]
    Format(String),
    #[error(transparent)]
    Topology(#[from] LatticeError),
    #[error("rank matrix has no topology tag (neighbor count {0})")]
    Untagged(usize),
}

fn format_collisions(pairs: &[(Cell, Cell)]) -> String {
    pairs
        .iter()
        .map(|((s1, k1), (s2, k2))| format!("(s={s1},k={k1})=(s={s2},k={k2})"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Symmetric 2x2 game. Row player's payoffs: `a` for 0 vs 0, `b` for 0 vs 1,
/// `c` for 1 vs 0, `d` for 1 vs 1.
#[derive(Clone, Debug, PartialEq)]
pub struct GameMatrix<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Scalar> GameMatrix<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Result<Self, RankError> {
        for (name, v) in [("a", &a), ("b", &b), ("c", &c), ("d", &d)] {
            if !v.is_finite() {
                return Err(RankError::NonFinite(name));
            }
        }
        Ok(Self { a, b, c, d })
    }

    /// Parses `a,b,c,d` decimal literals.
    pub fn parse(text: &str) -> Result<Self, RankError> {
        let parts: Vec<_> = text.split(',').collect();
        if parts.len() != 4 {
            return Err(RankError::Format(format!(
                "game needs four comma-separated payoffs, got {text:?}"
            )));
        }
        let mut values = parts.iter().map(|p| {
            T::from_decimal(p).ok_or_else(|| RankError::Format(format!("bad payoff {p:?}")))
        });
        let mut next = || values.next().expect("four parts");
        Self::new(next()?, next()?, next()?, next()?)
    }

    /// Total payoff of a strategy-`s` player with `k` of its `n` neighbors playing 1.
    pub fn payoff(&self, s: u8, k: usize, n: usize) -> Result<T, RankError> {
        if k > n {
            return Err(RankError::CountOutOfRange { k, n });
        }
        let (vs_zero, vs_one) = match s {
            0 => (&self.a, &self.b),
            1 => (&self.c, &self.d),
            other => return Err(RankError::BadStrategy(other)),
        };
        Ok(T::from_count(n - k) * vs_zero.clone() + T::from_count(k) * vs_one.clone())
    }

    /// The game with strategies 0 and 1 relabelled.
    pub fn relabelled(&self) -> Self {
        Self {
            a: self.d.clone(),
            b: self.c.clone(),
            c: self.b.clone(),
            d: self.a.clone(),
        }
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> GameMatrix<U> {
        GameMatrix {
            a: f(&self.a),
            b: f(&self.b),
            c: f(&self.c),
            d: f(&self.d),
        }
    }
}

impl<T: fmt::Display> fmt::Display for GameMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.a, self.b, self.c, self.d)
    }
}

pub fn payoff<T: Scalar>(game: &GameMatrix<T>, s: u8, k: usize, n: usize) -> Result<T, RankError> {
    game.payoff(s, k, n)
}

/// `2 x (N+1)` permutation of `1..=2(N+1)`, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RankMatrix {
    topology: Option<TopologyKind>,
    neighbors: usize,
    entries: Vec<u32>,
}

impl RankMatrix {
    pub fn new(kind: TopologyKind, row0: &[u32], row1: &[u32]) -> Result<Self, RankError> {
        let n = Topology::new(kind).neighbor_count();
        Self::build(Some(kind), n, row0, row1)
    }

    /// A matrix for a bare neighbor count, not tied to any lattice.
    ///
    /// Useful for reasoning about small `N` (such as `N = 1`) that no torus
    /// topology provides; such matrices cannot drive the engine.
    pub fn with_neighbor_count(n: usize, row0: &[u32], row1: &[u32]) -> Result<Self, RankError> {
        Self::build(None, n, row0, row1)
    }

    fn build(
        topology: Option<TopologyKind>,
        n: usize,
        row0: &[u32],
        row1: &[u32],
    ) -> Result<Self, RankError> {
        for row in [row0, row1] {
            if row.len() != n + 1 {
                return Err(RankError::WrongEntryCount {
                    expected: 2 * (n + 1),
                    got: row0.len() + row1.len(),
                });
            }
        }
        let entries: Vec<u32> = row0.iter().chain(row1).copied().collect();
        check_permutation(&entries)?;
        Ok(Self {
            topology,
            neighbors: n,
            entries,
        })
    }

    fn from_entries(topology: Option<TopologyKind>, n: usize, entries: Vec<u32>) -> Self {
        debug_assert!(check_permutation(&entries).is_ok());
        Self {
            topology,
            neighbors: n,
            entries,
        }
    }

    pub fn topology(&self) -> Option<TopologyKind> {
        self.topology
    }

    pub fn neighbor_count(&self) -> usize {
        self.neighbors
    }

    /// Rank of a strategy-`s` player with `k` type-1 neighbors.
    #[inline]
    pub fn rank(&self, s: u8, k: usize) -> u32 {
        self.entries[s as usize * (self.neighbors + 1) + k]
    }

    pub fn row(&self, s: u8) -> &[u32] {
        let w = self.neighbors + 1;
        &self.entries[s as usize * w..(s as usize + 1) * w]
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    /// Cells `(s, k)` listed from lowest to highest rank.
    pub fn cells_by_rank(&self) -> Vec<(u8, usize)> {
        let w = self.neighbors + 1;
        let mut cells = vec![(0u8, 0usize); self.entries.len()];
        for (i, &r) in self.entries.iter().enumerate() {
            cells[r as usize - 1] = ((i / w) as u8, i % w);
        }
        cells
    }

    /// Each row strictly increasing or strictly decreasing in `k`.
    pub fn rows_monotone(&self) -> bool {
        [0u8, 1].iter().all(|&s| {
            let row = self.row(s);
            row.windows(2).all(|w| w[0] < w[1]) || row.windows(2).all(|w| w[0] > w[1])
        })
    }

    /// `rm'(s, k) = rm(1 - s, N - k)`: the same dynamics with strategies relabelled.
    pub fn complement_transform(&self) -> Self {
        let n = self.neighbors;
        let mut entries = Vec::with_capacity(self.entries.len());
        for s in [1u8, 0] {
            entries.extend((0..=n).rev().map(|k| self.rank(s, k)));
        }
        Self::from_entries(self.topology, n, entries)
    }

    /// Text format: topology token, then each row as space-separated ranks,
    /// every line newline-terminated.
    pub fn serialize(&self) -> Result<String, RankError> {
        let kind = self.topology.ok_or(RankError::Untagged(self.neighbors))?;
        Ok(format!(
            "{kind}\n{}\n{}\n",
            join_row(self.row(0), " "),
            join_row(self.row(1), " ")
        ))
    }

    pub fn parse(text: &str) -> Result<Self, RankError> {
        let body = text
            .strip_suffix('\n')
            .ok_or_else(|| RankError::Format("missing trailing newline".into()))?;
        let lines: Vec<&str> = body.split('\n').collect();
        if lines.len() != 3 {
            return Err(RankError::Format(format!(
                "expected 3 lines (topology, row 0, row 1), got {}",
                lines.len()
            )));
        }
        let kind: TopologyKind = lines[0].trim().parse()?;
        let row0 = parse_row(lines[1])?;
        let row1 = parse_row(lines[2])?;
        Self::new(kind, &row0, &row1)
    }

    /// Single-line form `row0/row1`, ranks separated by spaces.
    pub fn to_inline(&self) -> String {
        format!(
            "{}/{}",
            join_row(self.row(0), " "),
            join_row(self.row(1), " ")
        )
    }

    /// Parses `row0/row1`; ranks may be separated by spaces or commas.
    pub fn parse_inline(kind: TopologyKind, text: &str) -> Result<Self, RankError> {
        let (r0, r1) = text
            .trim()
            .split_once('/')
            .ok_or_else(|| RankError::Format("inline ranks need the form row0/row1".into()))?;
        Self::new(kind, &parse_row(r0)?, &parse_row(r1)?)
    }
}

impl fmt::Debug for RankMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.topology {
            Some(kind) => write!(f, "RankMatrix({kind}: {})", self.to_inline()),
            None => write!(f, "RankMatrix(N={}: {})", self.neighbors, self.to_inline()),
        }
    }
}

fn join_row(row: &[u32], sep: &str) -> String {
    row.iter().map(u32::to_string).collect::<Vec<_>>().join(sep)
}

fn parse_row(line: &str) -> Result<Vec<u32>, RankError> {
    line.split([' ', ',', '\t'])
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<u32>()
                .map_err(|_| RankError::Format(format!("bad rank {t:?}")))
        })
        .collect()
}

fn check_permutation(entries: &[u32]) -> Result<(), RankError> {
    let max = entries.len();
    let mut seen = vec![false; max + 1];
    for &r in entries {
        if r == 0 || r as usize > max {
            return Err(RankError::NotPermutation {
                max,
                detail: format!("rank {r} out of range"),
            });
        }
        if std::mem::replace(&mut seen[r as usize], true) {
            return Err(RankError::NotPermutation {
                max,
                detail: format!("rank {r} appears twice"),
            });
        }
    }
    Ok(())
}

pub fn rows_monotone(rm: &RankMatrix) -> bool {
    rm.rows_monotone()
}

pub fn complement_transform(rm: &RankMatrix) -> RankMatrix {
    rm.complement_transform()
}

pub fn parse_rank_matrix(text: &str) -> Result<RankMatrix, RankError> {
    RankMatrix::parse(text)
}

pub fn serialize_rank_matrix(rm: &RankMatrix) -> Result<String, RankError> {
    rm.serialize()
}

/// Ranks the `2(N+1)` payoff sums of `game` on `topology`.
pub fn derive_rank_matrix<T: Scalar>(
    game: &GameMatrix<T>,
    topology: &Topology,
) -> Result<RankMatrix, RankError> {
    let mut rm = derive_with_neighbor_count(game, topology.neighbor_count())?;
    rm.topology = Some(topology.kind());
    Ok(rm)
}

/// Like [`derive_rank_matrix`] but for a bare neighbor count.
pub fn derive_with_neighbor_count<T: Scalar>(
    game: &GameMatrix<T>,
    n: usize,
) -> Result<RankMatrix, RankError> {
    let mut payoffs = Vec::with_capacity(2 * (n + 1));
    for s in [0u8, 1] {
        for k in 0..=n {
            payoffs.push((game.payoff(s, k, n)?, s, k));
        }
    }
    // Finite by construction of GameMatrix, so partial_cmp never fails.
    payoffs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(Ordering::Equal));

    let mut collisions = Vec::new();
    let mut start = 0;
    while start < payoffs.len() {
        let mut end = start + 1;
        while end < payoffs.len() && payoffs[end].0 == payoffs[start].0 {
            end += 1;
        }
        for i in start..end {
            for j in i + 1..end {
                collisions.push(((payoffs[i].1, payoffs[i].2), (payoffs[j].1, payoffs[j].2)));
            }
        }
        start = end;
    }
    if !collisions.is_empty() {
        collisions.sort();
        return Err(RankError::NonGenericGame(collisions));
    }

    let mut entries = vec![0u32; payoffs.len()];
    for (rank, (_, s, k)) in payoffs.iter().enumerate() {
        entries[*s as usize * (n + 1) + k] = rank as u32 + 1;
    }
    Ok(RankMatrix::from_entries(None, n, entries))
}

/// Uniformly random rank matrix: Fisher–Yates over `1..=2(N+1)` with the portable generator.
pub fn random_rank_matrix(topology: &Topology, seed: u64) -> RankMatrix {
    let mut rm = random_with_neighbor_count(topology.neighbor_count(), seed);
    rm.topology = Some(topology.kind());
    rm
}

pub fn random_with_neighbor_count(n: usize, seed: u64) -> RankMatrix {
    let mut entries: Vec<u32> = (1..=2 * (n as u32 + 1)).collect();
    PortableRng::new(seed).shuffle(&mut entries);
    RankMatrix::from_entries(None, n, entries)
}
