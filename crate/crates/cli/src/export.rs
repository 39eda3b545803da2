//! Netpbm bitmap frames. Type-1 cells are written as 1 (black).

use std::fmt;
use std::str::FromStr;

use nlgames::Grid;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FrameFormat {
    /// `P1`: one text row per grid row, cells separated by spaces.
    PbmAscii,
    /// `P4`: rows bit-packed MSB first, each padded to a whole byte.
    #[default]
    PbmBinary,
}

impl FrameFormat {
    pub fn token(self) -> &'static str {
        match self {
            Self::PbmAscii => "pbm-ascii",
            Self::PbmBinary => "pbm-binary",
        }
    }
}

impl fmt::Display for FrameFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for FrameFormat {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pbm-ascii" | "pbm_ascii" => Ok(Self::PbmAscii),
            "pbm-binary" | "pbm_binary" => Ok(Self::PbmBinary),
            other => Err(CliError::Usage(format!(
                "unknown frame format {other:?} (expected pbm-ascii or pbm-binary)"
            ))),
        }
    }
}

pub fn export_frame(grid: &Grid, format: FrameFormat) -> Vec<u8> {
    let (rows, cols) = (grid.rows(), grid.cols());
    match format {
        FrameFormat::PbmAscii => {
            let mut out = format!("P1\n{cols} {rows}\n").into_bytes();
            for r in 0..rows {
                for (c, &cell) in grid.row(r).iter().enumerate() {
                    if c > 0 {
                        out.push(b' ');
                    }
                    out.push(b'0' + cell);
                }
                out.push(b'\n');
            }
            out
        }
        FrameFormat::PbmBinary => {
            let mut out = format!("P4\n{cols} {rows}\n").into_bytes();
            let row_bytes = cols.div_ceil(8);
            for r in 0..rows {
                let start = out.len();
                out.resize(start + row_bytes, 0);
                for (c, &cell) in grid.row(r).iter().enumerate() {
                    if cell == 1 {
                        out[start + c / 8] |= 0x80 >> (c % 8);
                    }
                }
            }
            out
        }
    }
}

/// `frame_000042.pbm`
pub fn frame_name(step: usize) -> String {
    format!("frame_{step:06}.pbm")
}
